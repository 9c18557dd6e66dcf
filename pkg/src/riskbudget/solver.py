"""Risk budgeting solvers.

Four routes to the same portfolio: a stochastic subgradient method on the
joint (allocation, threshold) objective, two finite-difference
Barzilai-Borwein descents (fixed sample vs freshly simulated samples), and a
deterministic reference minimization of the exact objective for measures with
closed-form evaluators.

All sample-based solvers standardize returns so the initial portfolio's risk
is of order one; the solved allocation is mapped back afterwards. The
normalized weights are invariant to this rescaling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .core import (Budgets, DivergenceError, InputError, NumericError,
                   RawAllocation, RiskContributionReport, Weights, euler_audit,
                   l1_accuracy, normalize)
from .models import (GaussianMixture, ReturnSample, StudentTMixture,
                     derive_seed, sample_model)
from .risk import (Deviation, ESMeanMixture,
                   ExpectedShortfall, RiskMeasureSpec, Spectral, SpecError,
                   Volatility, ZetaState, dev_inner_zeta, deviation_objective,
                   deviation_subgradient, empirical_objective_risk,
                   empirical_risk, empirical_var_method7, es_tmix,
                   measure_label, ru_objective, ru_subgradient, spectral_grid,
                   spectral_objective, spectral_subgradient, var_tmix,
                   volatility_value_and_gradient, warn_if_nonpositive_risk)

DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class StepSchedule:
    """SGD step size gamma_k = base / (1 + k)^exponent.

    base <= 0 requests automatic calibration from the initial objective
    scale; kind="constant" freezes gamma_k = base.
    """

    kind: str = "polynomial"
    base: float = 0.0
    exponent: float = 0.6

    def __post_init__(self):
        if self.kind not in ("polynomial", "constant"):
            raise InputError(f"unknown schedule kind {self.kind!r}")


@dataclass(frozen=True)
class SolverConfig:
    method: str = "sgd"
    batch_size: int = 128
    epochs: int = 10
    step_schedule: StepSchedule = field(default_factory=StepSchedule)
    averaging_fraction: float = 0.2
    last_k: int | None = None
    fd_step: float = 1e-4
    stop_tol: float = 1e-6
    max_iters: int | None = None
    resample_size: int = 100_000
    seed: int = 0
    grad_clip: float = 10.0
    record_iterates: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise InputError("batch_size must be at least 1")
        if self.fd_step <= 0.0:
            raise InputError("fd_step must be positive")
        if not 0.0 < self.averaging_fraction <= 1.0:
            raise InputError("averaging_fraction must lie in (0, 1]")
        if self.last_k is not None and self.last_k < 1:
            raise InputError("last_k must be at least 1")


def config_from_dict(doc: dict, base: SolverConfig | None = None) -> SolverConfig:
    """SolverConfig from a JSON-style dict, optionally on top of a base config."""
    doc = dict(doc or {})
    sched = doc.get("step_schedule")
    if isinstance(sched, dict):
        try:
            doc["step_schedule"] = StepSchedule(**sched)
        except TypeError as exc:
            raise InputError(f"bad step schedule: {exc}") from exc
    try:
        if base is None:
            return SolverConfig(**doc)
        return replace(base, **doc)
    except TypeError as exc:
        raise InputError(f"bad solver config: {exc}") from exc


@dataclass(frozen=True)
class SolveReport:
    """Everything a solve produced: portfolio, audit, trace, provenance."""

    weights: Weights
    raw: RawAllocation
    zeta: ZetaState
    contributions: RiskContributionReport
    objective_trace: np.ndarray        # (iterations+1, 2) columns (iter, value)
    wall_time: float
    iterations: int
    seed: int
    method: str
    iterate_trace: np.ndarray | None = None   # optional (iters+1, 1+d+K+d)

    def __post_init__(self):
        trace = np.asarray(self.objective_trace, dtype=float)
        if trace.size and not np.all(np.isfinite(trace)):
            raise NumericError("objective trace contains non-finite values")
        object.__setattr__(self, "objective_trace", trace)
        gap = np.abs(self.weights.values - normalize(self.raw).values).max()
        if gap > 1e-12:
            raise NumericError(f"weights disagree with normalize(raw) by {gap:g}")

    def to_dict(self, include_timing: bool = True, trace_limit: int | None = None) -> dict:
        trace = self.objective_trace
        if trace_limit is not None and len(trace) > trace_limit:
            idx = np.linspace(0, len(trace) - 1, trace_limit).astype(int)
            trace = trace[idx]
        doc = {
            "method": self.method,
            "seed": int(self.seed),
            "iterations": int(self.iterations),
            "weights": self.weights.values.tolist(),
            "raw": self.raw.values.tolist(),
            "zeta": self.zeta.values.tolist(),
            "total_risk": self.contributions.total_risk,
            "risk_contributions": self.contributions.contributions.tolist(),
            "budget_errors": self.contributions.budget_errors.tolist(),
            "objective_trace": [[int(i), float(v)] for i, v in trace],
        }
        if include_timing:
            doc["wall_time"] = self.wall_time
        return doc

    def to_csv_row(self, include_timing: bool = True) -> list:
        row = [self.method, int(self.seed), int(self.iterations)]
        if include_timing:
            row.append(repr(float(self.wall_time)))
        row += [repr(float(w)) for w in self.weights.values]
        return row


# ---------------------------------------------------------------------------
# objective adapters: one stochastic form per measure family

class _StochasticForm:
    """Bundles the batch objective, subgradient, and threshold init for a spec."""

    def __init__(self, spec: RiskMeasureSpec, budgets: Budgets):
        self.spec = spec
        self.budgets = budgets
        if isinstance(spec, Volatility):
            # volatility solves the quadratic threshold form (g(x) = x^2)
            self._dev = Deviation(1.0, 1.0, 2.0)
        else:
            self._dev = None

    def init_zeta(self, losses: np.ndarray) -> np.ndarray:
        spec = self.spec
        if isinstance(spec, (ExpectedShortfall, ESMeanMixture)):
            return np.array([empirical_var_method7(losses, spec.alpha)])
        if isinstance(spec, Spectral):
            grid = spectral_grid(spec)
            return np.array([empirical_var_method7(losses, s) for s in grid.levels])
        dev = self._dev or spec
        return np.array([dev_inner_zeta(dev, losses)])

    def objective(self, y, zeta, batch) -> float:
        spec = self.spec
        if isinstance(spec, (ExpectedShortfall, ESMeanMixture)):
            return ru_objective(spec, self.budgets, y, zeta, batch)
        if isinstance(spec, Spectral):
            return spectral_objective(spec, self._grid(), self.budgets, y, zeta, batch)
        return deviation_objective(self._dev or spec, self.budgets, y, zeta, batch)

    def subgradient(self, y, zeta, batch):
        spec = self.spec
        if isinstance(spec, (ExpectedShortfall, ESMeanMixture)):
            return ru_subgradient(spec, self.budgets, y, zeta, batch)
        if isinstance(spec, Spectral):
            return spectral_subgradient(spec, self._grid(), self.budgets, y, zeta, batch)
        return deviation_subgradient(self._dev or spec, self.budgets, y, zeta, batch)

    def _grid(self):
        if not hasattr(self, "_grid_cache"):
            self._grid_cache = spectral_grid(self.spec)
        return self._grid_cache


def _standardization_constant(spec: RiskMeasureSpec, losses: np.ndarray) -> float:
    c = empirical_risk(spec, losses)
    if not np.isfinite(c) or abs(c) < 1e-300:
        return 1.0
    return abs(c)


def _empirical_report(spec, budgets, theta: Weights, data: np.ndarray,
                      fd_step: float) -> RiskContributionReport:
    """Euler audit of solved weights against the sample evaluator.

    Central differences on the positively homogeneous empirical risk; the
    forward-difference step of the descent itself is a separate choice.
    """

    def risk_fn(t):
        return empirical_risk(spec, -(data @ t))

    def grad_fn(t):
        g = np.empty(t.size)
        for i in range(t.size):
            e = np.zeros(t.size)
            e[i] = fd_step
            g[i] = (risk_fn(t + e) - risk_fn(t - e)) / (2.0 * fd_step)
        return g

    return euler_audit(theta, risk_fn, grad_fn, budgets)


def _check_problem(budgets: Budgets, d: int) -> None:
    if d < 2:
        raise InputError("risk budgeting needs at least two assets")
    if budgets.dim != d:
        raise InputError(f"budget dimension {budgets.dim} does not match assets {d}")


def _initial_allocation(budgets: Budgets, y0) -> np.ndarray:
    if y0 is None:
        return budgets.values.copy()
    y0 = RawAllocation(np.asarray(y0, dtype=float)).values.copy()
    if y0.size != budgets.dim:
        raise InputError("starting allocation dimension mismatch")
    return y0


# ---------------------------------------------------------------------------
# stochastic gradient descent

def sgd_solve(spec: RiskMeasureSpec, budgets: Budgets, sample: ReturnSample,
              config: SolverConfig, y0=None) -> SolveReport:
    """Minimize the stochastic risk-budgeting objective by mini-batch descent.

    Iterates (y, zeta) move along subgradients over shuffled mini-batches;
    the returned allocation is the Polyak-Ruppert average of the trailing
    fraction of iterates. Deterministic for a fixed seed.
    """
    x = sample.data
    n, d = x.shape
    _check_problem(budgets, d)
    if config.epochs < 1:
        raise InputError("need at least one epoch")
    if n < config.batch_size:
        raise InputError(f"sample of {n} rows is smaller than one batch ({config.batch_size})")

    warn_if_nonpositive_risk(spec, lambda w: empirical_risk(spec, -(x @ w)), d)
    form = _StochasticForm(spec, budgets)
    scale = _standardization_constant(spec, -(x @ normalize(budgets.values).values))
    xs = x / scale

    y = _initial_allocation(budgets, y0)
    floor = 1e-8 * y.mean()
    rng = np.random.default_rng(config.seed)
    batches_per_epoch = int(np.ceil(n / config.batch_size))
    total = config.epochs * batches_per_epoch
    if config.last_k is not None:
        avg_start = max(total - config.last_k, 0)
    else:
        avg_start = int(np.floor(total * (1.0 - config.averaging_fraction)))

    order = rng.permutation(n)
    first = xs[order[:config.batch_size]]
    zeta = form.init_zeta(-(first @ y))
    obj0 = form.objective(y, zeta, first)
    if not np.isfinite(obj0):
        raise NumericError("non-finite objective at the starting point")
    if config.step_schedule.base > 0.0:
        base = config.step_schedule.base
    else:
        base = 1.0 / (d * max(abs(obj0), 1e-12))
    g_y0, g_z0 = form.subgradient(y, zeta, first)
    cap = config.grad_clip * (1.0 + float(np.sqrt(g_y0 @ g_y0 + g_z0 @ g_z0)))

    trace = np.empty((total + 1, 2))
    iterates = None
    n_zeta = zeta.size
    if config.record_iterates:
        iterates = np.empty((total + 1, 1 + d + n_zeta + d))
        iterates[0] = [0.0, *y, *zeta, *(y / y.sum())]

    y_sum = np.zeros(d)
    zeta_sum = np.zeros(n_zeta)
    n_avg = 0
    k = 0
    t0 = time.perf_counter()
    for epoch in range(config.epochs):
        if epoch > 0:
            order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = xs[order[start:start + config.batch_size]]
            value = form.objective(y, zeta, batch)
            if not np.isfinite(value) or abs(value) > DIVERGENCE_THRESHOLD:
                raise DivergenceError(
                    f"objective {value!r} diverged at iteration {k}", iteration=k)
            trace[k] = (k, value)
            g_y, g_z = form.subgradient(y, zeta, batch)
            norm = float(np.sqrt(g_y @ g_y + g_z @ g_z))
            if config.grad_clip > 0.0 and norm > cap:
                g_y = g_y * (cap / norm)
                g_z = g_z * (cap / norm)
            if config.step_schedule.kind == "constant":
                gamma = base
            else:
                gamma = base / (1.0 + k) ** config.step_schedule.exponent
            y = np.maximum(y - gamma * g_y, floor)
            zeta = zeta - gamma * g_z
            k += 1
            if not np.all(np.isfinite(y)) or not np.all(np.isfinite(zeta)):
                raise DivergenceError(f"non-finite iterate at iteration {k - 1}",
                                      iteration=k - 1)
            if k > avg_start:
                y_sum += y
                zeta_sum += zeta
                n_avg += 1
            if iterates is not None:
                iterates[k] = [float(k), *y, *zeta, *(y / y.sum())]
    final_value = form.objective(y, zeta, batch)
    if not np.isfinite(final_value):
        raise DivergenceError(f"non-finite objective at iteration {k}", iteration=k)
    trace[k] = (k, final_value)
    wall = time.perf_counter() - t0

    y_avg = y_sum / n_avg
    zeta_avg = zeta_sum / n_avg
    raw = RawAllocation(y_avg / scale)
    weights = normalize(raw)
    report = _empirical_report(spec, budgets, weights, x, config.fd_step)
    return SolveReport(weights, raw, ZetaState(zeta_avg), report, trace,
                       wall, total, config.seed, "sgd", iterate_trace=iterates)


# ---------------------------------------------------------------------------
# Barzilai-Borwein finite-difference descents

def _fd_gradient(risk_part, y: np.ndarray, h: float, budgets: Budgets,
                 base_value: float | None = None):
    """Forward differences of the sample risk term plus the exact barrier."""
    f0 = risk_part(y) if base_value is None else base_value
    g = np.empty(y.size)
    for i in range(y.size):
        e = np.zeros(y.size)
        e[i] = h
        g[i] = (risk_part(y + e) - f0) / h
    return g - budgets.values / y, f0


def _bb_descent(risk_part, budgets: Budgets, y: np.ndarray, config: SolverConfig,
                max_iters: int, stop_on_objective: bool, fresh_risk=None):
    """Shared BB loop. fresh_risk(k) swaps in a new sample each iteration."""
    h = config.fd_step
    grad = lambda yy, rp, fv=None: _fd_gradient(rp, yy, h, budgets, fv)

    rp = risk_part if fresh_risk is None else fresh_risk(0)
    g, f_risk = grad(y, rp)
    f = f_risk - float(budgets.values @ np.log(y))
    if not np.isfinite(f):
        raise NumericError("non-finite objective at the starting point")
    base_fb = config.step_schedule.base if config.step_schedule.base > 0.0 else None
    gamma = base_fb or 1e-3 * (1.0 + float(np.linalg.norm(y))) / (1.0 + float(np.linalg.norm(g)))

    trace = [(0, f)]
    tail: list[np.ndarray] = []
    last_k = config.last_k or 1
    f_prev = f
    iterations = 0
    for k in range(1, max_iters + 1):
        y_new = y - gamma * g
        halvings = 0
        while y_new.min() <= 0.0:
            gamma *= 0.5
            y_new = y - gamma * g
            halvings += 1
            if halvings > 200:
                raise NumericError("could not keep the allocation positive")
        rp = risk_part if fresh_risk is None else fresh_risk(k)
        g_new, f_risk = grad(y_new, rp)
        f_new = f_risk - float(budgets.values @ np.log(y_new))
        if not np.isfinite(f_new) or abs(f_new) > DIVERGENCE_THRESHOLD:
            raise DivergenceError(f"objective {f_new!r} diverged at iteration {k}",
                                  iteration=k)
        dy = y_new - y
        dg = g_new - g
        denom = float(dy @ dg)
        if denom > 0.0 and np.isfinite(denom):
            gamma = float(dy @ dy) / denom
        else:
            gamma = (base_fb or 1e-3) / k
        y, g = y_new, g_new
        trace.append((k, f_new))
        iterations = k
        if len(tail) == last_k:
            tail.pop(0)
        tail.append(y.copy())
        if stop_on_objective and abs(f_new - f_prev) < config.stop_tol:
            break
        f_prev = f_new
    return y, np.array(trace, dtype=float), iterations, tail


def _final_zeta(spec, losses: np.ndarray) -> np.ndarray:
    if isinstance(spec, (ExpectedShortfall, ESMeanMixture)):
        return np.array([empirical_var_method7(losses, spec.alpha)])
    if isinstance(spec, Spectral):
        grid = spectral_grid(spec)
        return np.array([empirical_var_method7(losses, s) for s in grid.levels])
    dev = Deviation(1.0, 1.0, 2.0) if isinstance(spec, Volatility) else spec
    return np.array([dev_inner_zeta(dev, losses)])


def osbgd_solve(spec: RiskMeasureSpec, budgets: Budgets, sample: ReturnSample,
                config: SolverConfig, y0=None) -> SolveReport:
    """One-sample benchmark descent: BB steps on the fixed-sample objective.

    The gradient of the risk term uses forward differences with fd_step; the
    run stops once the objective moves by less than stop_tol between
    consecutive iterations.
    """
    x = sample.data
    n, d = x.shape
    _check_problem(budgets, d)
    warn_if_nonpositive_risk(spec, lambda w: empirical_risk(spec, -(x @ w)), d)
    scale = _standardization_constant(spec, -(x @ normalize(budgets.values).values))
    xs = x / scale
    y = _initial_allocation(budgets, y0)

    def risk_part(yy):
        return empirical_objective_risk(spec, -(xs @ yy))

    max_iters = config.max_iters or 1000
    t0 = time.perf_counter()
    y_fin, trace, iters, _ = _bb_descent(risk_part, budgets, y, config,
                                         max_iters, stop_on_objective=True)
    wall = time.perf_counter() - t0
    raw = RawAllocation(y_fin / scale)
    weights = normalize(raw)
    zeta = _final_zeta(spec, -(xs @ y_fin))
    report = _empirical_report(spec, budgets, weights, x, config.fd_step)
    return SolveReport(weights, raw, ZetaState(zeta), report, trace, wall,
                       iters, config.seed, "osbgd")


def msbgd_solve(spec: RiskMeasureSpec, budgets: Budgets, model,
                config: SolverConfig, y0=None) -> SolveReport:
    """Multi-sample benchmark descent: the gradient at each BB iteration is
    recomputed on a fresh seeded sample of resample_size; runs for a fixed
    number of iterations and averages the trailing last_k iterates."""
    d = model.dim
    _check_problem(budgets, d)
    first = sample_model(model, config.resample_size, derive_seed(config.seed, "msbgd", 0))
    x0 = first.data
    warn_if_nonpositive_risk(spec, lambda w: empirical_risk(spec, -(x0 @ w)), d)
    scale = _standardization_constant(spec, -(x0 @ normalize(budgets.values).values))
    y = _initial_allocation(budgets, y0)

    samples = {0: x0 / scale}

    def fresh_risk(k):
        if k not in samples:
            data = sample_model(model, config.resample_size,
                                derive_seed(config.seed, "msbgd", k)).data
            samples.clear()
            samples[k] = data / scale
        xs = samples[k]
        return lambda yy: empirical_objective_risk(spec, -(xs @ yy))

    iters_fixed = config.max_iters or 60
    cfg = config if config.last_k is not None else replace(config, last_k=5)
    t0 = time.perf_counter()
    _, trace, iters, tail = _bb_descent(None, budgets, y, cfg, iters_fixed,
                                        stop_on_objective=False, fresh_risk=fresh_risk)
    wall = time.perf_counter() - t0
    y_avg = np.mean(tail, axis=0)
    raw = RawAllocation(y_avg / scale)
    weights = normalize(raw)
    audit_data = sample_model(model, config.resample_size,
                              derive_seed(config.seed, "msbgd", "audit")).data
    zeta = _final_zeta(spec, -((audit_data / scale) @ y_avg))
    report = _empirical_report(spec, budgets, weights, audit_data, config.fd_step)
    return SolveReport(weights, raw, ZetaState(zeta), report, trace, wall,
                       iters, config.seed, "msbgd")


# ---------------------------------------------------------------------------
# deterministic reference solve on exact evaluators

def reference_solve(spec: RiskMeasureSpec, budgets: Budgets, model,
                    config: SolverConfig = SolverConfig(method="reference"),
                    y0=None) -> SolveReport:
    """Ground-truth portfolio from the exact risk evaluator.

    Expected shortfall uses the semi-analytic Student-t mixture formula with
    central finite-difference gradients; volatility uses the model covariance
    with analytic gradients. Minimization runs until the projected gradient
    infinity norm falls below stop_tol.
    """
    d = model.dim
    _check_problem(budgets, d)
    b = budgets.values
    h = config.fd_step

    if isinstance(spec, ExpectedShortfall):
        if not isinstance(model, StudentTMixture):
            raise SpecError("exact expected shortfall needs a Student-t mixture model")
        alpha = spec.alpha

        def risk_fn(y):
            return es_tmix(model, y, alpha)

        def risk_grad(y):
            g = np.empty(d)
            for i in range(d):
                e = np.zeros(d)
                e[i] = h
                g[i] = (risk_fn(y + e) - risk_fn(y - e)) / (2.0 * h)
            return g

        warn_if_nonpositive_risk(spec, risk_fn, d)
        power = 1.0
    elif isinstance(spec, Volatility):
        sigma = model.covariance()

        def risk_fn(y):
            return volatility_value_and_gradient(sigma, y)[0]

        def risk_grad(y):
            return volatility_value_and_gradient(sigma, y)[1]

        power = 2.0
    else:
        raise SpecError(
            f"{measure_label(spec)} has no exact evaluator; use a sample-based solver")

    def objective(y):
        r = risk_fn(y)
        return r ** power - float(b @ np.log(y))

    def gradient(y):
        r = risk_fn(y)
        scale = power * r ** (power - 1.0)
        return scale * risk_grad(y) - b / y

    y_start = _initial_allocation(budgets, y0)
    trace: list[tuple[int, float]] = [(0, objective(y_start))]

    def callback(yk):
        trace.append((len(trace), objective(yk)))

    max_iters = config.max_iters or 1000
    t0 = time.perf_counter()
    res = minimize(objective, y_start, jac=gradient, method="L-BFGS-B",
                   bounds=[(1e-12, None)] * d, callback=callback,
                   options={"gtol": config.stop_tol, "ftol": 1e-18,
                            "maxiter": max_iters, "maxcor": 20})
    wall = time.perf_counter() - t0
    if not res.success and np.abs(res.jac).max() > config.stop_tol:
        err = NumericError(f"reference solve did not converge: {res.message}")
        err.trace = np.array(trace, dtype=float)
        raise err

    raw = RawAllocation(res.x)
    weights = normalize(raw)
    theta = weights.values
    audit = euler_audit(theta, risk_fn, risk_grad, budgets)
    if isinstance(spec, ExpectedShortfall):
        losses_zeta = np.array([var_tmix(model, theta, spec.alpha)])
    else:
        losses_zeta = np.array([float(-(model.mean() @ theta))])
    return SolveReport(weights, raw, ZetaState(losses_zeta), audit,
                       np.array(trace, dtype=float), wall, int(res.nit),
                       config.seed, "reference")


# ---------------------------------------------------------------------------
# multistart uniqueness probe

def multistart_uniqueness_check(spec: RiskMeasureSpec, budgets: Budgets, data,
                                config: SolverConfig, starts: int) -> float:
    """Re-solve from `starts` random interior points; return the maximum
    pairwise 100*L1 distance between the resulting weight vectors."""
    if starts < 2:
        raise InputError("need at least two starts")
    rng = np.random.default_rng(config.seed)
    results = []
    for i in range(starts):
        y0 = np.exp(0.5 * rng.standard_normal(budgets.dim))
        y0 /= y0.sum()
        cfg = replace(config, seed=derive_seed(config.seed, "start", i))
        results.append(solve(spec, budgets, data, cfg, y0=y0).weights)
    worst = 0.0
    for i in range(starts):
        for j in range(i + 1, starts):
            worst = max(worst, l1_accuracy(results[i], results[j]))
    return worst


def solve(spec: RiskMeasureSpec, budgets: Budgets, data, config: SolverConfig,
          y0=None) -> SolveReport:
    """Dispatch on config.method; `data` is a sample or a model as required."""
    method = config.method
    if method == "sgd":
        return sgd_solve(spec, budgets, _as_sample(data), config, y0=y0)
    if method == "osbgd":
        return osbgd_solve(spec, budgets, _as_sample(data), config, y0=y0)
    if method == "msbgd":
        return msbgd_solve(spec, budgets, _as_model(data), config, y0=y0)
    if method == "reference":
        return reference_solve(spec, budgets, _as_model(data), config, y0=y0)
    raise InputError(f"unknown method {method!r}")


def _as_sample(data) -> ReturnSample:
    if isinstance(data, ReturnSample):
        return data
    raise InputError("this method needs a return sample")


def _as_model(data):
    if isinstance(data, (StudentTMixture, GaussianMixture)):
        return data
    raise InputError("this method needs a parametric model")
