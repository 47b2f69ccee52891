"""Fit the joint-Hamiltonian frequencies to a target walk.

The target is the r-parameterized walk, with coin ``Rx(pi/2)`` followed by a
conditional shift of ``2*pi/(r*d)``. The trial is the exact joint evolution
at ``(g_tau, omega_tau)``. The figure of merit is the per-step Hellinger
distance between their phase distributions, averaged over a window of steps.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .metrics import hellinger
from .phase_space import WalkConfig, initial_state
from .walk import block_probs, exact_blocks, pi_separation_step, product_blocks

log = logging.getLogger(__name__)

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
G_FLOOR = 1e-12
R_SWEEP = (1, 2, 4, 8, 10)


def c_ratio(g_tau, omega_tau, r, d):
    """``(omega_tau / g_tau) / ((pi/2) / (2*pi/(r*d)))``, i.e. ``4 omega / (r d g)``."""
    return 4.0 * omega_tau / (r * d * g_tau)


class WindowObjective:
    """Mean Hellinger distance to the target walk over steps ``lo..hi``.

    Picklable so restarts can run in worker processes.
    """

    def __init__(self, cfg: WalkConfig, window, dynamics="exact"):
        lo, hi = window
        if not 0 <= lo <= hi:
            raise ValueError(f"bad window {window}")
        if dynamics not in ("exact", "trotter"):
            raise ValueError(f"unknown dynamics {dynamics!r}")
        self.d = cfg.d
        self.lo, self.hi = lo, hi
        self.dynamics = dynamics
        self.state = initial_state(cfg)
        target = product_blocks(cfg.nominal_g_tau, math.pi / 2, cfg.d)
        self.target = block_probs(target, self.state, hi)[lo:]

    def probs(self, g_tau, omega_tau, steps=None):
        make = exact_blocks if self.dynamics == "exact" else product_blocks
        return block_probs(make(g_tau, omega_tau, self.d), self.state, self.hi if steps is None else steps)

    def __call__(self, x):
        g_tau, omega_tau = x
        return float(np.mean(hellinger(self.probs(g_tau, omega_tau)[self.lo :], self.target)))


def objective(cfg: WalkConfig, window, dynamics="exact"):
    """Window-averaged Hellinger distance at ``cfg.g_tau, cfg.omega_tau``."""
    return WindowObjective(cfg, window, dynamics)((cfg.g_tau, cfg.omega_tau))


def nelder_mead(f, x0, step, lower=None, xtol=1e-6, maxiter=500):
    """Minimize ``f`` with a Nelder-Mead simplex.

    Vertices are clipped to ``lower``. Stops once every vertex lies within
    ``xtol`` of the best one (measured in units of ``step``) or after
    ``maxiter`` iterations.

    Returns
    -------
    x : ndarray
    fx : float
    iterations : int
    """
    x0 = np.asarray(x0, dtype=float)
    step = np.asarray(step, dtype=float)
    n = len(x0)
    lower = np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)

    def clip(x):
        return np.maximum(x, lower)

    simplex = [clip(x0)] + [clip(x0 + step[i] * np.eye(n)[i]) for i in range(n)]
    values = [f(x) for x in simplex]
    it = 0
    while it < maxiter:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diam = max(np.max(np.abs((x - simplex[0]) / step)) for x in simplex[1:])
        if diam < xtol:
            break
        it += 1
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = clip(centroid + REFLECT * (centroid - worst))
        fr = f(xr)
        if fr < values[0]:
            xe = clip(centroid + EXPAND * (xr - centroid))
            fe = f(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < values[-1]:
                xc = clip(centroid + CONTRACT * (xr - centroid))
            else:
                xc = clip(centroid + CONTRACT * (worst - centroid))
            fc = f(xc)
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = xc, fc
            else:
                best = simplex[0]
                simplex = [best] + [clip(best + SHRINK * (x - best)) for x in simplex[1:]]
                values = [values[0]] + [f(x) for x in simplex[1:]]
    best = int(np.argmin(values))
    return simplex[best], values[best], it


def search_box(r, d):
    """Upper corners of the random-start box for ``(g_tau, omega_tau)``.

    ``omega_tau`` reaches ``5*pi`` at ``r = 1``, where the fitted coin angle
    sits near ten times the nominal one.
    """
    g_max = 4 * math.pi / (r * d)
    omega_max = 5 * math.pi if r == 1 else math.pi
    return g_max, omega_max


@dataclass
class OptimizationResult:
    g_tau_opt: float
    omega_tau_opt: float
    objective: float
    c_ratio: float
    window: tuple
    restarts: int
    best_restart_seed: int
    omega_tau_mod_4pi: float
    trace: list = field(default_factory=list, repr=False)

    def config(self, cfg: WalkConfig) -> WalkConfig:
        return replace(cfg, g_tau=self.g_tau_opt, omega_tau=self.omega_tau_opt)

    def to_dict(self):
        out = asdict(self)
        out["window"] = list(self.window)
        return out


def _restart(job):
    index, seed, start, fobj, step = job
    entry = {"index": index, "seed": seed, "start": [float(v) for v in start]}
    try:
        entry["start_objective"] = fobj(start)
        if not math.isfinite(entry["start_objective"]):
            raise ValueError(f"objective is not finite at {entry['start']}")
        x, fx, it = nelder_mead(fobj, start, step, lower=(G_FLOOR, 0.0))
        entry.update(x=[float(v) for v in x], objective=float(fx), iterations=it, error=None)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        entry.update(x=None, objective=math.inf, iterations=0, error=repr(exc))
    return entry


def optimize(cfg: WalkConfig, window, restarts=100, seed=0, starts=None, jobs=1, dynamics="exact"):
    """Multistart Nelder-Mead over ``(g_tau, omega_tau)``.

    Each restart draws its start uniformly from the box ``(0, g_max] x (0,
    omega_max]`` (see :func:`search_box`) with its own child seed, so the
    result does not depend on ``jobs``. Explicit ``starts`` replace the random
    draws. A failing restart is logged in the trace and skipped.
    """
    fobj = WindowObjective(cfg, window, dynamics)
    g_max, omega_max = search_box(cfg.r, cfg.d)
    step = np.array([0.05 * g_max, 0.05 * omega_max])
    if starts is None:
        if restarts < 1:
            raise ValueError("restarts must be >= 1")
        seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(restarts)]
        starts = []
        for s in seeds:
            rng = np.random.default_rng(s)
            u = 1.0 - rng.random(2)
            starts.append(np.array([g_max * u[0], omega_max * u[1]]))
    else:
        starts = [np.asarray(s, dtype=float) for s in starts]
        seeds = [seed] * len(starts)
    jobs_list = [(i, s, x0, fobj, step) for i, (s, x0) in enumerate(zip(seeds, starts))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            trace = list(pool.map(_restart, jobs_list))
    else:
        trace = [_restart(j) for j in jobs_list]
    for entry in trace:
        if entry["error"]:
            log.warning("restart %d failed: %s", entry["index"], entry["error"])
    ok = [e for e in trace if e["error"] is None]
    if not ok:
        raise ArithmeticError("every restart failed")
    best = min(ok, key=lambda e: (e["objective"], e["index"]))
    g_opt, w_opt = best["x"]
    return OptimizationResult(
        g_tau_opt=g_opt,
        omega_tau_opt=w_opt,
        objective=best["objective"],
        c_ratio=c_ratio(g_opt, w_opt, cfg.r, cfg.d),
        window=tuple(window),
        restarts=len(trace),
        best_restart_seed=best["seed"],
        omega_tau_mod_4pi=math.fmod(w_opt, 4 * math.pi),
        trace=trace,
    )


def error_trace(cfg: WalkConfig, steps=None):
    """Per-step Hellinger distance between the exact run at ``cfg``'s
    frequencies and the target walk, for steps ``0..steps``.

    ``steps`` defaults to the step at which the target walk's peaks become
    antipodal.
    """
    if steps is None:
        steps = pi_separation_step(cfg, "standard")
    fobj = WindowObjective(cfg, (0, steps))
    return hellinger(fobj.probs(cfg.g_tau, cfg.omega_tau), fobj.target)


def r_sweep(cfg: WalkConfig, window, rs=R_SWEEP, restarts=100, seed=0, jobs=1):
    """Re-optimize at each ``r``; returns ``{r: OptimizationResult}``."""
    return {r: optimize(replace(cfg, r=r, g_tau=None), window, restarts, seed, jobs=jobs) for r in rs}
