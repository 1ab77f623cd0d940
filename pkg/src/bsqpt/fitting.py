"""Least-squares estimation of the filter model from a measured process matrix.

The model process matrix is rank at most two (one coefficient vector per
filter operator), so the fit searches the four shape parameters
(p, R/T ratio, theta1, theta2) with a bounded Nelder-Mead simplex from
multiple seeded starts, while the overall rate factor is profiled out
analytically at every evaluation: for a unit-scale model chi_1 the best
multiplier of chi_1 against the measured matrix is a one-line projection,
and the reported ``scale`` is its square root (the Kraus operators carry
scale linearly, the process matrix quadratically). The objective is the
plain Frobenius distance on the unnormalized matrices, matching how the
measured matrices are compared visually; no statistical weighting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bsfilter import FilterParams, kraus_pair, u3
from .channel import ProcessMatrix, choi_from_kraus, to_coeff_vector, transform_process_matrix
from .linalg import fidelity as state_fidelity
from .linalg import permutation_operator, project_to_psd

_I4 = np.eye(4, dtype=complex)
_SWAP = permutation_operator(2, 0, 1)


@dataclass
class FitConfig:
    """Search configuration; bounds are closed intervals.

    The ratio bounds cover physically plausible splitters (1:4 through
    4:1). The scale parameter has no explicit bounds because it is
    profiled analytically and is nonnegative by construction.
    """

    multistart: int = 16
    max_iterations: int = 2000
    p_bounds: tuple[float, float] = (0.0, 0.5)
    ratio_bounds: tuple[float, float] = (0.25, 4.0)
    theta_bounds: tuple[float, float] = (-math.pi, math.pi)
    convergence_tol: float = 1e-14
    seed: int = 0


@dataclass
class FitResult:
    params: FilterParams
    residual: float
    fidelity: float
    n_evaluations: int
    converged: bool
    start_residuals: list[float] = field(default_factory=list)


def model_chi(fp: FilterParams, basis_kind: str = "S") -> ProcessMatrix:
    """Process matrix of the filter model in the requested basis (rank <= 2)."""
    chi = choi_from_kraus(kraus_pair(fp))
    if basis_kind == "S":
        return chi
    return transform_process_matrix(chi, basis_kind)


def _chi_standard(p: float, ratio: float, theta1: float, theta2: float) -> np.ndarray:
    """Unit-scale standard-basis model matrix with T + R normalized to 1."""
    t = 1.0 / (1.0 + ratio)
    r = ratio * t
    v = u3(theta1, theta2) @ _SWAP
    cm = to_coeff_vector(t * _I4 - r * v)
    cp = to_coeff_vector(t * _I4 + r * v)
    return (1.0 - p) * np.outer(cm, cm.conj()) + p * np.outer(cp, cp.conj())


def residual(fp: FilterParams, chi_meas: ProcessMatrix) -> float:
    """Frobenius distance between the model at ``fp`` and a measured matrix."""
    model = model_chi(fp, chi_meas.basis)
    return float(np.linalg.norm(model.m - chi_meas.m))


def canonicalize(fp: FilterParams) -> FilterParams:
    """Reduce equivalent parameter choices to a canonical representative.

    Shifting both angles by 2 pi together leaves the channel unchanged;
    shifting one angle by 2 pi swaps the two filter operators, which the
    mixture absorbs as p -> 1 - p. Angles are folded into [-pi, pi] and p
    kept in [0, 1/2] whenever those moves allow it.
    """

    def fold(theta: float) -> tuple[float, int]:
        shifts = round(theta / (2.0 * math.pi))
        return theta - 2.0 * math.pi * shifts, shifts

    t1, n1 = fold(fp.theta1)
    t2, n2 = fold(fp.theta2)
    p = fp.p
    if (n1 + n2) % 2 == 1:
        if 1.0 - p <= 0.5 + 1e-12:
            p = 1.0 - p
        elif n1 != 0:
            # Flipping p would leave [0, 1/2]; undo one angle fold instead.
            t1 += 2.0 * math.pi * (1 if n1 > 0 else -1)
        else:
            t2 += 2.0 * math.pi * (1 if n2 > 0 else -1)
    p = float(min(max(p, 0.0), 0.5))
    return FilterParams(T=fp.T, R=fp.R, theta1=t1, theta2=t2, p=p, scale=fp.scale)


def _starts(cfg: FitConfig) -> list[np.ndarray]:
    """Deterministic start points: the box midpoint plus seeded uniform draws."""
    rng = np.random.default_rng(cfg.seed)
    lo_r, hi_r = cfg.ratio_bounds
    mid = np.array([0.25, math.sqrt(lo_r * hi_r), 0.0, 0.0])
    starts = [mid]
    for _ in range(max(0, cfg.multistart - 1)):
        p = rng.uniform(*cfg.p_bounds)
        ratio = math.exp(rng.uniform(math.log(lo_r), math.log(hi_r)))
        th1 = rng.uniform(*cfg.theta_bounds)
        th2 = rng.uniform(*cfg.theta_bounds)
        starts.append(np.array([p, ratio, th1, th2]))
    return starts


def fit(chi_meas: ProcessMatrix, cfg: FitConfig | None = None) -> FitResult:
    """Fit the filter model to a measured process matrix.

    Runs a bounded Nelder-Mead descent from ``cfg.multistart`` seeded
    starting points, keeps the best minimum (ties broken by smaller
    angle norm, then smaller p), and polishes it with one more descent.
    Deterministic for a given seed. Non-convergence is reported through
    ``converged=False`` on the result, never as an exception.
    """
    if cfg is None:
        cfg = FitConfig()
    chi_std = transform_process_matrix(chi_meas, "S").m
    chi_std = 0.5 * (chi_std + chi_std.conj().T)
    smm = float(np.vdot(chi_std, chi_std).real)

    def objective(x: np.ndarray) -> float:
        chi1 = _chi_standard(*x)
        s11 = float(np.vdot(chi1, chi1).real)
        s1m = float(np.vdot(chi1, chi_std).real)
        alpha = max(s1m, 0.0) / s11
        r2 = smm - 2.0 * alpha * s1m + alpha * alpha * s11
        return math.sqrt(max(r2, 0.0))

    bounds = [cfg.p_bounds, cfg.ratio_bounds, cfg.theta_bounds, cfg.theta_bounds]
    options = {
        "xatol": 1e-11,
        "fatol": cfg.convergence_tol,
        "maxiter": cfg.max_iterations,
        "maxfev": 4 * cfg.max_iterations,
    }

    candidates = []
    start_residuals = []
    n_evaluations = 0
    for x0 in _starts(cfg):
        start_residuals.append(objective(x0))
        res = minimize(objective, x0, method="Nelder-Mead", bounds=bounds, options=options)
        n_evaluations += int(res.nfev)
        candidates.append((float(res.fun), res.x, bool(res.success)))

    best_fun = min(c[0] for c in candidates)
    tol = 1e-9 * (1.0 + best_fun)
    tied = [c for c in candidates if c[0] <= best_fun + tol]
    tied.sort(key=lambda c: (math.hypot(c[1][2], c[1][3]), c[1][0]))
    fun_best, x_best, ok_best = tied[0]

    polish = minimize(objective, x_best, method="Nelder-Mead", bounds=bounds, options=options)
    n_evaluations += int(polish.nfev)
    if polish.fun <= fun_best:
        fun_best, x_best = float(polish.fun), polish.x
        ok_best = ok_best or bool(polish.success)

    p, ratio, th1, th2 = (float(v) for v in x_best)
    chi1 = _chi_standard(p, ratio, th1, th2)
    s11 = float(np.vdot(chi1, chi1).real)
    alpha = max(float(np.vdot(chi1, chi_std).real), 0.0) / s11
    scale = math.sqrt(max(alpha, 1e-300))
    params = canonicalize(
        FilterParams(
            T=1.0 / (1.0 + ratio),
            R=ratio / (1.0 + ratio),
            theta1=th1,
            theta2=th2,
            p=min(max(p, 0.0), 0.5),
            scale=scale,
        )
    )

    final_residual = residual(params, chi_meas)
    model = model_chi(params, chi_meas.basis)
    try:
        fid = state_fidelity(project_to_psd(model.m), project_to_psd(chi_meas.m))
    except ValueError:
        fid = 0.0

    converged = ok_best or any(c[2] for c in candidates)
    return FitResult(
        params=params,
        residual=final_residual,
        fidelity=fid,
        n_evaluations=n_evaluations,
        converged=converged,
        start_residuals=start_residuals,
    )
