"""Risk-measure specifications and evaluators.

Covers semi-analytic VaR / expected shortfall for Student-t mixtures, the
empirical estimators used by sample-based solvers, and the stochastic
objectives (with subgradients) whose minimization solves the risk budgeting
problem: the Rockafellar-Uryasev form for the expected-shortfall family, a
discretized per-node form for spectral measures, and an asymmetric-hinge
power form for deviation measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from .core import Budgets, InputError, NumericError, _values_of
from .models import StudentTMixture, _portfolio_params


class SpecError(InputError):
    """A risk-measure specification is invalid."""


class RiskPositivityWarning(UserWarning):
    """A configured measure evaluated non-positive on a probe portfolio."""


# ---------------------------------------------------------------------------
# measure specifications

@dataclass(frozen=True)
class Volatility:
    """Standard deviation of portfolio losses."""

    @property
    def power(self) -> float:
        # exponent of the homogenization g(x) = x**power in the solver objective
        return 2.0


@dataclass(frozen=True)
class ExpectedShortfall:
    """Tail-average loss beyond the alpha-quantile."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise SpecError("alpha must lie in (0, 1)")

    @property
    def power(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ESMeanMixture:
    """beta * ES_alpha + delta * E applied to losses.

    Covers expected shortfall minus expectation via beta=1, delta=-1.
    """

    beta: float
    delta: float
    alpha: float

    def __post_init__(self):
        if self.beta <= 0.0:
            raise SpecError("beta must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise SpecError("alpha must lie in (0, 1)")

    @property
    def power(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Spectral:
    """Power-distortion spectral measure with h(s) = s**(1/c - 1) / c.

    Discretized on `nodes` levels; with subtract_mean the expected loss is
    factored out, leaving a translation-invariant measure.
    """

    c: float
    nodes: int = 20
    subtract_mean: bool = False

    def __post_init__(self):
        # c = 1 makes h constant, violating h(0) = 0; the family needs c < 1
        if not 0.0 < self.c < 1.0:
            raise SpecError("spectral exponent c must lie in (0, 1)")
        if self.nodes < 1:
            raise SpecError("need at least one discretization node")

    @property
    def power(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Deviation:
    """Generalized deviation measure min_z E[(a (Z-z)_+ + b (Z-z)_-)^p]^(1/p).

    a=b=1, p=2 is the standard deviation; a=b=1, p=1 the MAD; p=2 with
    a=sqrt(alpha), b=sqrt(1-alpha) the square root of the variantile.
    """

    a: float
    b: float
    p: float

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise SpecError("hinge slopes a, b must be positive")
        if self.p < 1.0:
            raise SpecError("power p must be at least 1")

    @property
    def power(self) -> float:
        return self.p


@dataclass(frozen=True)
class DeviationPlusMean:
    """Deviation measure plus delta times the expected loss (e.g. MAD + E)."""

    a: float
    b: float
    p: float
    delta: float

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise SpecError("hinge slopes a, b must be positive")
        if self.p < 1.0:
            raise SpecError("power p must be at least 1")

    @property
    def power(self) -> float:
        return self.p


RiskMeasureSpec = Union[Volatility, ExpectedShortfall, ESMeanMixture,
                        Spectral, Deviation, DeviationPlusMean]

ES_FAMILY = (ExpectedShortfall, ESMeanMixture, Spectral)


def measure_label(spec: RiskMeasureSpec) -> str:
    if isinstance(spec, Volatility):
        return "volatility"
    if isinstance(spec, ExpectedShortfall):
        return f"es({spec.alpha:g})"
    if isinstance(spec, ESMeanMixture):
        return f"es_mean({spec.beta:g}*es({spec.alpha:g})+{spec.delta:g}*mean)"
    if isinstance(spec, Spectral):
        suffix = "-mean" if spec.subtract_mean else ""
        return f"spectral(c={spec.c:g},K={spec.nodes}){suffix}"
    if isinstance(spec, Deviation):
        return f"deviation(a={spec.a:g},b={spec.b:g},p={spec.p:g})"
    if isinstance(spec, DeviationPlusMean):
        return f"deviation_mean(a={spec.a:g},b={spec.b:g},p={spec.p:g},d={spec.delta:g})"
    raise SpecError(f"unknown measure {type(spec).__name__}")


def measure_to_dict(spec: RiskMeasureSpec) -> dict:
    if isinstance(spec, Volatility):
        return {"measure": "volatility"}
    if isinstance(spec, ExpectedShortfall):
        return {"measure": "es", "alpha": spec.alpha}
    if isinstance(spec, ESMeanMixture):
        return {"measure": "es_mean", "alpha": spec.alpha, "beta": spec.beta,
                "delta": spec.delta}
    if isinstance(spec, Spectral):
        return {"measure": "spectral", "c": spec.c, "nodes": spec.nodes,
                "subtract_mean": spec.subtract_mean}
    if isinstance(spec, Deviation):
        return {"measure": "deviation", "a": spec.a, "b": spec.b, "p": spec.p}
    if isinstance(spec, DeviationPlusMean):
        return {"measure": "deviation_mean", "a": spec.a, "b": spec.b,
                "p": spec.p, "delta": spec.delta}
    raise SpecError(f"unknown measure {type(spec).__name__}")


def measure_from_dict(doc: dict) -> RiskMeasureSpec:
    try:
        kind = doc["measure"]
    except (KeyError, TypeError) as exc:
        raise SpecError("measure document needs a 'measure' field") from exc
    try:
        if kind == "volatility":
            return Volatility()
        if kind == "es":
            return ExpectedShortfall(alpha=doc["alpha"])
        if kind == "es_mean":
            return ESMeanMixture(beta=doc.get("beta", 1.0),
                                 delta=doc.get("delta", 0.0), alpha=doc["alpha"])
        if kind == "spectral":
            return Spectral(c=doc["c"], nodes=doc.get("nodes", 20),
                            subtract_mean=doc.get("subtract_mean", False))
        if kind == "deviation":
            return Deviation(a=doc["a"], b=doc["b"], p=doc["p"])
        if kind == "deviation_mean":
            return DeviationPlusMean(a=doc["a"], b=doc["b"], p=doc["p"],
                                     delta=doc.get("delta", 1.0))
    except KeyError as exc:
        raise SpecError(f"measure {kind!r} missing parameter {exc}") from exc
    raise SpecError(f"unknown measure kind {kind!r}")


# ---------------------------------------------------------------------------
# semi-analytic VaR / ES under a Student-t mixture

def var_tmix(model: StudentTMixture, y, alpha: float) -> float:
    """Loss quantile of -y'X: the unique root z of the mixture loss cdf = alpha.

    Brackets the root by doubling an initial interval until the cdf changes
    sign, then polishes with a safeguarded root solver to |F(z) - alpha| well
    below 1e-12.
    """
    if not 0.0 < alpha < 1.0:
        raise SpecError("alpha must lie in (0, 1)")
    yv = _values_of(y)
    sig, m = _portfolio_params(model, yv)
    p, nu = model.weights, model.dof

    def cdf(z):
        return float(np.dot(p, stats.t.cdf((z + m) / sig, nu)))

    radius = float(np.abs(m).max() + 10.0 * sig.max())
    lo, hi = -radius, radius
    for _ in range(100):
        if cdf(lo) <= alpha:
            break
        lo *= 2.0
    else:
        raise NumericError("lower bracket for the loss quantile not found")
    for _ in range(100):
        if cdf(hi) >= alpha:
            break
        hi *= 2.0
    else:
        raise NumericError("upper bracket for the loss quantile not found")
    return float(brentq(lambda z: cdf(z) - alpha, lo, hi, xtol=1e-300, rtol=8.9e-16))


def es_tmix(model: StudentTMixture, y, alpha: float) -> float:
    """Closed-form expected shortfall of the loss -y'X at level alpha.

    Uses the partial-expectation identity for the standard t density,
    int_t^inf u f_nu(u) du = (nu + t^2) f_nu(t) / (nu - 1), which needs every
    component dof above 1.
    """
    if np.any(model.dof <= 1.0):
        raise NumericError("expected shortfall undefined: some dof <= 1")
    yv = _values_of(y)
    v = var_tmix(model, yv, alpha)
    sig, m = _portfolio_params(model, yv)
    nu = model.dof
    t = (v + m) / sig
    terms = (sig * (nu + t * t) / (nu - 1.0) * stats.t.pdf(t, nu)
             - m * stats.t.cdf(-t, nu))
    return float(np.dot(model.weights, terms) / (1.0 - alpha))


# ---------------------------------------------------------------------------
# empirical estimators

def empirical_var_method7(losses, alpha: float) -> float:
    """Linear-interpolation empirical quantile (Hyndman-Fan method 7).

    With losses sorted ascending and 1-based indexing: h = (n-1) alpha + 1,
    result = x_floor(h) + (h - floor(h)) (x_(floor(h)+1) - x_floor(h)).
    """
    x = np.asarray(losses, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise InputError("empty loss vector")
    if not 0.0 <= alpha <= 1.0:
        raise SpecError("alpha must lie in [0, 1]")
    h = (n - 1) * alpha
    j = int(np.floor(h))
    g = h - j
    lo = np.partition(x, j)[j]
    if g == 0.0 or j + 1 >= n:
        return float(lo)
    hi = np.partition(x, j + 1)[j + 1]
    return float(lo + g * (hi - lo))


def empirical_es(losses, alpha: float) -> float:
    """Tail mean of losses at or above the method-7 empirical quantile."""
    x = np.asarray(losses, dtype=float).ravel()
    q = empirical_var_method7(x, alpha)
    tail = x[x >= q]
    if tail.size == 0:
        raise NumericError("empty tail above the empirical quantile")
    return float(tail.mean())


# ---------------------------------------------------------------------------
# shared pieces for the stochastic objectives

def _losses(y, batch) -> np.ndarray:
    if isinstance(batch, np.ndarray):
        x = batch
    elif hasattr(batch, "data") and not isinstance(batch.data, memoryview):
        x = batch.data
    else:
        x = np.asarray(batch, dtype=float)
    return -(x @ _values_of(y)), x


def _barrier(budgets: Budgets, y) -> float:
    return float(-np.dot(budgets.values, np.log(_values_of(y))))


def _zeta_values(zeta) -> np.ndarray:
    if isinstance(zeta, ZetaState):
        return zeta.values
    return np.atleast_1d(np.asarray(zeta, dtype=float))


@dataclass(frozen=True)
class ZetaState:
    """Auxiliary threshold variables of the variational objectives.

    Length one for scalar-threshold measures, one per node for spectral.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(v)):
            raise InputError("threshold state must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# Rockafellar-Uryasev objective for the ES family

def _ru_params(spec) -> tuple[float, float, float]:
    if isinstance(spec, ExpectedShortfall):
        return spec.alpha, 1.0, 0.0
    if isinstance(spec, ESMeanMixture):
        return spec.alpha, spec.beta, spec.delta
    raise SpecError(f"{type(spec).__name__} is not an ES-family measure")


def ru_objective(spec, budgets: Budgets, y, zeta, batch) -> float:
    """Batch value of the joint objective for beta*ES_alpha + delta*E.

    mean over the batch of beta*(zeta + (loss - zeta)_+ / (1 - alpha))
    + delta * loss, minus the log-barrier sum_i b_i log y_i.
    """
    alpha, beta, delta = _ru_params(spec)
    z = float(_zeta_values(zeta)[0])
    losses, _ = _losses(y, batch)
    ru = z + np.maximum(losses - z, 0.0).mean() / (1.0 - alpha)
    val = beta * ru + _barrier(budgets, y)
    if delta != 0.0:
        val += delta * losses.mean()
    return float(val)


def ru_subgradient(spec, budgets: Budgets, y, zeta, batch):
    """Subgradient of ru_objective at (y, zeta); ties resolved by strict >."""
    alpha, beta, delta = _ru_params(spec)
    yv = _values_of(y)
    z = float(_zeta_values(zeta)[0])
    losses, x = _losses(y, batch)
    tail = losses > z
    g_zeta = beta * (1.0 - tail.mean() / (1.0 - alpha))
    g_y = -beta * (x * tail[:, None]).mean(axis=0) / (1.0 - alpha) - budgets.values / yv
    if delta != 0.0:
        g_y = g_y - delta * x.mean(axis=0)
    return g_y, np.array([g_zeta])


# ---------------------------------------------------------------------------
# spectral measures: discretization and per-node objective

@dataclass(frozen=True)
class SpectralGrid:
    """Discretization of a spectral measure into positive ES combinations.

    levels : K quantile levels in (0, 1), strictly increasing
    coeff : K positive weights summing to one
    """

    levels: np.ndarray
    coeff: np.ndarray

    def __post_init__(self):
        s = np.atleast_1d(np.asarray(self.levels, dtype=float))
        c = np.atleast_1d(np.asarray(self.coeff, dtype=float))
        if s.shape != c.shape:
            raise SpecError("levels and coefficients must have equal length")
        if np.any(s <= 0.0) or np.any(s >= 1.0) or np.any(np.diff(s) <= 0.0):
            raise SpecError("levels must be strictly increasing inside (0, 1)")
        if np.any(c <= 0.0):
            raise SpecError("coefficients must be positive")
        if abs(c.sum() - 1.0) > 1e-6:
            raise SpecError("coefficients must sum to one within 1e-6")
        s.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "levels", s)
        object.__setattr__(self, "coeff", c)

    @property
    def n_nodes(self) -> int:
        return self.levels.size


S_MAX = 0.999


def spectral_grid(spec: Spectral) -> SpectralGrid:
    """Midpoint-rule discretization of the tail-weight measure (1-s) dh(s).

    Nodes are midpoints of `nodes` equal subintervals of (0, S_MAX]; the
    coefficients (1 - s_k) h'(s_k) ds are renormalized to sum exactly to one,
    which the continuous measure satisfies since int (1-s) dh(s) = 1.
    """
    k = spec.nodes
    ds = S_MAX / k
    s = (np.arange(k) + 0.5) * ds
    hprime = (1.0 / spec.c - 1.0) * s ** (1.0 / spec.c - 2.0) / spec.c
    coeff = (1.0 - s) * hprime * ds
    return SpectralGrid(s, coeff / coeff.sum())


def spectral_objective(spec: Spectral, grid: SpectralGrid, budgets: Budgets,
                       y, zeta, batch) -> float:
    """Discretized spectral objective with one threshold per node.

    sum_k coeff_k [zeta_k + mean((loss - zeta_k)_+) / (1 - s_k)] minus the
    log-barrier; with subtract_mean the bracket is replaced by its
    mean-subtracted form (the coefficients sum to one, so this subtracts the
    batch mean loss exactly once).
    """
    z = _zeta_values(zeta)
    if z.size != grid.n_nodes:
        raise InputError(f"threshold vector has {z.size} entries, grid has {grid.n_nodes}")
    losses, _ = _losses(y, batch)
    hinge = np.maximum(losses[:, None] - z[None, :], 0.0).mean(axis=0)
    nodes = z + hinge / (1.0 - grid.levels)
    val = float(np.dot(grid.coeff, nodes)) + _barrier(budgets, y)
    if spec.subtract_mean:
        val -= losses.mean()
    return val


def spectral_subgradient(spec: Spectral, grid: SpectralGrid, budgets: Budgets,
                         y, zeta, batch):
    """Subgradient of spectral_objective at (y, zeta)."""
    z = _zeta_values(zeta)
    if z.size != grid.n_nodes:
        raise InputError(f"threshold vector has {z.size} entries, grid has {grid.n_nodes}")
    yv = _values_of(y)
    losses, x = _losses(y, batch)
    tail = losses[:, None] > z[None, :]
    g_zeta = grid.coeff * (1.0 - tail.mean(axis=0) / (1.0 - grid.levels))
    node_w = grid.coeff / (1.0 - grid.levels)
    g_y = -(x.T @ tail) @ node_w / len(losses) - budgets.values / yv
    if spec.subtract_mean:
        g_y = g_y + x.mean(axis=0)
    return g_y, g_zeta


# ---------------------------------------------------------------------------
# deviation measures: asymmetric hinge powers

def _dev_params(spec) -> tuple[float, float, float, float]:
    if isinstance(spec, Deviation):
        return spec.a, spec.b, spec.p, 0.0
    if isinstance(spec, DeviationPlusMean):
        return spec.a, spec.b, spec.p, spec.delta
    raise SpecError(f"{type(spec).__name__} is not a deviation measure")


def _hinge_power(losses, z, a, b, p) -> np.ndarray:
    # psi(z)^p expanded as a^p z_+^p + b^p z_-^p; avoids fractional powers of
    # negative arguments
    pos = np.maximum(losses - z, 0.0)
    neg = np.maximum(z - losses, 0.0)
    return a ** p * pos ** p + b ** p * neg ** p


def deviation_objective(spec, budgets: Budgets, y, zeta, batch) -> float:
    """mean(psi_{a,b}(loss - zeta)^p) [+ delta * mean loss] minus the barrier."""
    a, b, p, delta = _dev_params(spec)
    z = float(_zeta_values(zeta)[0])
    losses, _ = _losses(y, batch)
    val = _hinge_power(losses, z, a, b, p).mean() + _barrier(budgets, y)
    if delta != 0.0:
        val += delta * losses.mean()
    return float(val)


def deviation_subgradient(spec, budgets: Budgets, y, zeta, batch):
    """Subgradient of deviation_objective; p = 1 uses strict-inequality hinges."""
    a, b, p, delta = _dev_params(spec)
    yv = _values_of(y)
    z = float(_zeta_values(zeta)[0])
    losses, x = _losses(y, batch)
    if p == 1.0:
        w_pos = a * (losses > z).astype(float)
        w_neg = b * (losses < z).astype(float)
    else:
        pos = np.maximum(losses - z, 0.0)
        neg = np.maximum(z - losses, 0.0)
        w_pos = p * a ** p * pos ** (p - 1.0)
        w_neg = p * b ** p * neg ** (p - 1.0)
    g_zeta = float(np.mean(-w_pos + w_neg))
    g_y = -(x * (w_pos - w_neg)[:, None]).mean(axis=0) - budgets.values / yv
    if delta != 0.0:
        g_y = g_y - delta * x.mean(axis=0)
    return g_y, np.array([g_zeta])


# ---------------------------------------------------------------------------
# analytic volatility

def volatility_value_and_gradient(sigma, y):
    """Portfolio volatility sqrt(y' S y) and its gradient S y / value."""
    s = np.asarray(sigma, dtype=float)
    yv = _values_of(y)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] != yv.size:
        raise InputError("covariance shape incompatible with the allocation")
    if np.abs(s - s.T).max() > 1e-10:
        raise InputError("covariance must be symmetric")
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise InputError("covariance must be positive-definite") from exc
    quad = float(yv @ s @ yv)
    if quad <= 0.0:
        raise NumericError("non-positive portfolio variance")
    value = np.sqrt(quad)
    return value, s @ yv / value


# ---------------------------------------------------------------------------
# exact inner minimization over the threshold on a fixed sample

def golden_section(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section minimizer of a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol * (1.0 + abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _ru_node_minimum(sorted_losses: np.ndarray, tail_sums: np.ndarray,
                     level: float) -> float:
    """Exact min over zeta of zeta + mean((L - zeta)_+) / (1 - level).

    The objective is piecewise linear and convex in zeta with kinks at the
    sample points, so the minimum is attained at the ceil(n * level)-th order
    statistic.
    """
    n = sorted_losses.size
    k = min(max(int(np.ceil(n * level)), 1), n)
    z = sorted_losses[k - 1]
    tail = tail_sums[k] - (n - k) * z
    return float(z + tail / (n * (1.0 - level)))


def _sorted_with_tails(losses: np.ndarray):
    s = np.sort(losses)
    cums = np.concatenate(([0.0], np.cumsum(s)))
    tail_sums = cums[-1] - cums  # tail_sums[k] = sum of s[k:]
    return s, tail_sums


def dev_inner_zeta(spec, losses) -> float:
    """Exact or golden-section minimizer of the deviation hinge on a sample."""
    a, b, p, _ = _dev_params(spec)
    x = np.asarray(losses, dtype=float)
    if p == 2.0 and a == b:
        return float(x.mean())
    if p == 1.0 and a == b:
        return float(np.median(x))
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return lo
    return golden_section(lambda z: _hinge_power(x, z, a, b, p).mean(), lo, hi)


def empirical_risk(spec: RiskMeasureSpec, losses) -> float:
    """Value of the risk measure itself on an empirical loss sample."""
    x = np.asarray(losses, dtype=float).ravel()
    if isinstance(spec, Volatility):
        return float(x.std())
    if isinstance(spec, ExpectedShortfall):
        return empirical_es(x, spec.alpha)
    if isinstance(spec, ESMeanMixture):
        return spec.beta * empirical_es(x, spec.alpha) + spec.delta * float(x.mean())
    if isinstance(spec, Spectral):
        grid = spectral_grid(spec)
        s, tails = _sorted_with_tails(x)
        nodes = [_ru_node_minimum(s, tails, lv) for lv in grid.levels]
        val = float(np.dot(grid.coeff, nodes))
        return val - float(x.mean()) if spec.subtract_mean else val
    if isinstance(spec, (Deviation, DeviationPlusMean)):
        a, b, p, delta = _dev_params(spec)
        z = dev_inner_zeta(spec, x)
        val = float(_hinge_power(x, z, a, b, p).mean()) ** (1.0 / p)
        return val + delta * float(x.mean())
    raise SpecError(f"unknown measure {type(spec).__name__}")


def empirical_objective_risk(spec: RiskMeasureSpec, losses) -> float:
    """Risk part of the full-sample descent objective (the homogenized form).

    This is g(rho) plus any linear mean term: the ES family uses the
    empirical tail mean directly, spectral uses the per-node exact
    Rockafellar-Uryasev minima, and deviation measures use the exact inner
    threshold minimization of the hinge power.
    """
    x = np.asarray(losses, dtype=float).ravel()
    if isinstance(spec, Volatility):
        return float(x.var())
    if isinstance(spec, (ExpectedShortfall, ESMeanMixture)):
        return empirical_risk(spec, x)
    if isinstance(spec, Spectral):
        return empirical_risk(spec, x)
    if isinstance(spec, (Deviation, DeviationPlusMean)):
        a, b, p, delta = _dev_params(spec)
        z = dev_inner_zeta(spec, x)
        return float(_hinge_power(x, z, a, b, p).mean()) + delta * float(x.mean())
    raise SpecError(f"unknown measure {type(spec).__name__}")


def warn_if_nonpositive_risk(spec: RiskMeasureSpec, risk_at, d: int) -> None:
    """Probe equal weights and 0.9-concentrated corners; warn if risk <= 0.

    The risk budgeting problem assumes every long-only portfolio has positive
    risk; ES-family measures can violate this when alpha is too low.
    """
    if not isinstance(spec, ES_FAMILY):
        return
    probes = [np.full(d, 1.0 / d)]
    for i in range(d):
        w = np.full(d, 0.1 / (d - 1)) if d > 1 else np.array([1.0])
        w[i] = 0.9
        probes.append(w)
    bad = [w for w in probes if risk_at(w) <= 0.0]
    if bad:
        warnings.warn(
            f"{measure_label(spec)} is non-positive on {len(bad)} probe "
            "portfolio(s); risk budgets are not meaningful there",
            RiskPositivityWarning,
            stacklevel=3,
        )
