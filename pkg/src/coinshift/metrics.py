"""Distances, entanglement and growth fits for walk trajectories."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import spearmanr

from .linalg import DimensionMismatch, partial_transpose_coin


class LengthMismatch(ValueError):
    pass


class DegenerateSeries(ValueError):
    pass


def hellinger(p, q):
    """Hellinger distance ``||sqrt(p) - sqrt(q)||_2 / sqrt(2)``.

    Works row-wise when given 2-D arrays of distributions.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions differ in shape: {p.shape} vs {q.shape}")
    diff = np.sqrt(np.clip(p, 0, None)) - np.sqrt(np.clip(q, 0, None))
    h = np.sqrt(0.5 * np.sum(diff * diff, axis=-1))
    return np.minimum(h, 1.0) if h.ndim else float(min(h, 1.0))


def negativity(rho, d):
    """Sum of the magnitudes of the negative eigenvalues of ``rho^{T_coin}``.

    Capped at 1/2 for a qubit coupled to anything.
    """
    rho = np.asarray(rho, dtype=complex)
    pt = partial_transpose_coin(rho, d)
    w = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-np.sum(w[w < 0]))


def negativity_pure(state, d):
    """Negativity of a pure joint state from its Schmidt coefficients.

    For a pure state the partial transpose has eigenvalues ``s_i s_j`` and
    ``-s_i s_j``; with a qubit there is only one pair.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2 * d,):
        raise DimensionMismatch(f"expected {2 * d} amplitudes, got {psi.shape}")
    s = np.linalg.svd(psi.reshape(2, d), compute_uv=False)
    s = s / np.linalg.norm(s)
    return float(s[0] * s[1])


def state_negativity(x, d):
    x = np.asarray(x)
    return negativity_pure(x, d) if x.ndim == 1 else negativity(x, d)


@dataclass
class FitResult:
    model: str
    coef: float
    intercept: float
    r2: float


def fit_growth(series, model="linear", steps=None):
    """Least-squares growth fit of a per-step series.

    Parameters
    ----------
    series : array_like
        Values at the given steps.
    model : {"linear", "power"}
        ``linear`` fits ``y = coef * t + b``; ``power`` fits
        ``log y = coef * log t + b`` and drops ``t <= 0``.
    steps : array_like, optional
        Step numbers; defaults to ``0, 1, ...``.
    """
    y = np.asarray(series, dtype=float)
    t = np.arange(len(y), dtype=float) if steps is None else np.asarray(steps, dtype=float)
    if t.shape != y.shape:
        raise LengthMismatch("steps and series differ in length")
    if model == "power":
        keep = (t > 0) & (y > 0)
        t, y = np.log(t[keep]), np.log(y[keep])
    elif model != "linear":
        raise ValueError(f"unknown model {model!r}")
    if len(y) < 5:
        raise DegenerateSeries("need at least 5 points to fit")
    if np.var(t) == 0:
        raise DegenerateSeries("predictor has zero variance")
    a = np.vstack([t, np.ones_like(t)]).T
    (coef, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - (coef * t + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(model, float(coef), float(intercept), float(r2))


def default_window(d):
    return 1, max(d // 4, 1)


def trend(series, start=1):
    """Spearman rank correlation of a series against its step index."""
    y = np.asarray(series, dtype=float)[start:]
    rho, _ = spearmanr(np.arange(len(y)), y)
    return float(rho)


@dataclass
class TrajectoryReport:
    hellinger_per_step: np.ndarray
    std_exact: np.ndarray
    std_approx: np.ndarray
    negativity_exact: Optional[np.ndarray] = None
    negativity_approx: Optional[np.ndarray] = None
    linear_fit: dict = field(default_factory=dict)
    power_fit: dict = field(default_factory=dict)
    window: tuple = (1, 1)

    @property
    def steps(self):
        return len(self.hellinger_per_step) - 1


def _fits(std, window, model):
    lo, hi = window
    t = np.arange(lo, hi + 1)
    try:
        return fit_growth(std[lo : hi + 1], model, steps=t)
    except DegenerateSeries:
        return None


def build_report(exact, approx, window=None, with_negativity=True) -> TrajectoryReport:
    """Compare two trajectories of equal length step by step."""
    if exact.probs.shape != approx.probs.shape:
        raise LengthMismatch("trajectories must have the same steps and dimension")
    d = exact.cfg.d
    if window is None:
        window = default_window(d)
    window = (window[0], min(window[1], exact.steps))
    std_e, std_a = exact.stds, approx.stds
    report = TrajectoryReport(hellinger(exact.probs, approx.probs), std_e, std_a, window=window)
    if with_negativity and exact.states is not None and approx.states is not None:
        report.negativity_exact = np.array([state_negativity(x, d) for x in exact.states])
        report.negativity_approx = np.array([state_negativity(x, d) for x in approx.states])
    for name, std in (("exact", std_e), ("approx", std_a)):
        report.linear_fit[name] = _fits(std, window, "linear")
        report.power_fit[name] = _fits(std, window, "power")
    return report
