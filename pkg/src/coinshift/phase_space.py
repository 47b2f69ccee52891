"""Truncated Fock space, coherent states and the phase-site basis.

The walker lives on ``d`` phase sites ``phi_m = 2*pi*m/d``. The phase state
``|phi_m>`` is column ``m`` of :func:`coinshift.linalg.dft_matrix`, so the
rotation ``exp(i*theta*a^dagger a)`` moves ``|phi_m>`` to ``|phi_{m+1}>`` when
``theta = 2*pi/d``.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .linalg import DimensionMismatch, dft_matrix, partial_trace_coin

STD_CONVENTION = "linear std of site angles unwrapped onto [mean - pi, mean + pi)"

# smoothed maxima below this fraction of the tallest one are numerical noise
PEAK_FLOOR = 1e-3


class AdmissibilityWarning(UserWarning):
    """Dimension outside |alpha|^2 + |alpha| <= d <= 4*pi*|alpha|."""


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of one run.

    ``g_tau`` defaults to the nominal hop ``2*pi/(r*d)`` and ``omega_tau`` to
    the Hadamard-like ``pi/2``. ``steps = 0`` asks trajectories to stop once
    the two peaks are antipodal.
    """

    d: int = 31
    alpha: complex = -5.0
    r: float = 1.0
    g_tau: Optional[float] = None
    omega_tau: float = math.pi / 2
    steps: int = 12
    coin_init: tuple = (1.0, 0.0)
    dephasing_p: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not 0.0 <= self.dephasing_p <= 1.0:
            raise ValueError(f"dephasing_p must lie in [0, 1], got {self.dephasing_p}")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        coin = tuple(complex(c) for c in self.coin_init)
        if len(coin) != 2 or abs(abs(coin[0]) ** 2 + abs(coin[1]) ** 2 - 1.0) > 1e-12:
            raise ValueError(f"coin_init must be a normalized pair, got {self.coin_init}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "coin_init", coin)
        if self.g_tau is None:
            object.__setattr__(self, "g_tau", self.nominal_g_tau)
        a = abs(self.alpha)
        if not (a * a + a <= self.d <= 4 * math.pi * a):
            warnings.warn(
                f"d={self.d} outside the admissible range [{a * a + a:.3g}, {4 * math.pi * a:.3g}] "
                f"for |alpha|={a:.3g}",
                AdmissibilityWarning,
                stacklevel=3,
            )

    @property
    def nominal_g_tau(self):
        return 2 * math.pi / (self.r * self.d)

    def nominal(self):
        """The same run driven by the target walk angles (2*pi/(r*d), pi/2)."""
        return replace(self, g_tau=self.nominal_g_tau, omega_tau=math.pi / 2)


@dataclass
class PhaseDistribution:
    probs: np.ndarray
    circular_mean: float
    circular_std: float
    peak_separation: Optional[float]
    std_convention: str = field(default=STD_CONVENTION, repr=False)

    @property
    def d(self):
        return len(self.probs)

    @property
    def phases(self):
        return site_angles(self.d)


def site_angles(d):
    return 2 * np.pi * np.arange(d) / d


def coherent_state(alpha, d):
    """Truncated coherent state ``|alpha>`` on Fock levels ``0..d-1``.

    Returns
    -------
    amps : ndarray, shape (d,)
        Renormalized Fock amplitudes.
    support : float
        Probability weight the untruncated state has on the kept levels.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    alpha = complex(alpha)
    n = np.arange(d)
    if alpha == 0:
        amps = np.zeros(d, dtype=complex)
        amps[0] = 1.0
        return amps, 1.0
    r = abs(alpha)
    log_mag = n * math.log(r) - 0.5 * gammaln(n + 1) - 0.5 * r * r
    raw = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    support = float(np.sum(np.abs(raw) ** 2))
    return raw / math.sqrt(support), support


def initial_state(cfg: WalkConfig):
    """Joint product state ``coin_init (x) |alpha>`` (coin index outermost)."""
    walker, _ = coherent_state(cfg.alpha, cfg.d)
    return np.kron(np.asarray(cfg.coin_init, dtype=complex), walker)


def phase_probs(state_or_rho, d):
    """Phase-site probabilities ``<phi_m| Tr_coin(rho) |phi_m>`` as a plain array."""
    x = np.asarray(state_or_rho, dtype=complex)
    if x.ndim == 1:
        if x.shape[0] != 2 * d:
            raise DimensionMismatch(f"joint state must have {2 * d} amplitudes, got {x.shape[0]}")
        # <phi_m|c> = sum_n exp(-2j*pi*m*n/d) c_n / sqrt(d), i.e. the forward FFT
        amps = np.fft.fft(x.reshape(2, d), axis=1) / math.sqrt(d)
        p = np.sum(np.abs(amps) ** 2, axis=0)
    elif x.ndim == 2:
        walker = partial_trace_coin(x, d)
        f = dft_matrix(d)
        p = np.real(np.einsum("am,ab,bm->m", f.conj(), walker, f))
    else:
        raise DimensionMismatch(f"expected a joint state or density matrix, got ndim={x.ndim}")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def phase_distribution(state_or_rho, d) -> PhaseDistribution:
    p = phase_probs(state_or_rho, d)
    return distribution_from_probs(p)


def distribution_from_probs(p) -> PhaseDistribution:
    p = np.asarray(p, dtype=float)
    d = len(p)
    mean, std = circular_stats(p, d)
    return PhaseDistribution(p, mean, std, peak_separation(p, d))


def circular_stats(p, d):
    """Circular mean and unwrapped linear standard deviation.

    The mean is the argument of the first trigonometric moment, in ``[0, 2*pi)``.
    Site angles are then mapped onto the arc ``[mean - pi, mean + pi)`` and the
    ordinary weighted standard deviation is taken there, so a distribution
    spreading ballistically gives a linearly growing value until it wraps.
    """
    p = np.asarray(p, dtype=float)
    if len(p) != d:
        raise DimensionMismatch(f"expected {d} probabilities, got {len(p)}")
    theta = site_angles(d)
    moment = np.sum(p * np.exp(1j * theta))
    mean = float(np.angle(moment)) % (2 * np.pi)
    lo = mean - np.pi
    u = lo + np.mod(theta - lo, 2 * np.pi)
    centre = np.sum(p * u)
    std = math.sqrt(max(float(np.sum(p * (u - centre) ** 2)), 0.0))
    return mean, std


def _smoothed(p):
    return (np.roll(p, 1) + p + np.roll(p, -1)) / 3.0


def local_maxima(p):
    """Sites of the local maxima of the 3-site smoothed distribution.

    Plateaus count once, at their lowest index. Returned tallest first; equal
    heights are ordered by site index.
    """
    s = _smoothed(np.asarray(p, dtype=float))
    left = np.roll(s, 1)
    right = np.roll(s, -1)
    idx = np.flatnonzero((s > left) & (s >= right) & (s >= PEAK_FLOOR * s.max()))
    order = np.lexsort((idx, -s[idx]))
    return idx[order]


def peak_separation(p, d) -> Optional[float]:
    """Angular distance between the two tallest peaks, or None when unimodal."""
    if len(p) != d:
        raise DimensionMismatch(f"expected {d} probabilities, got {len(p)}")
    peaks = local_maxima(p)
    if len(peaks) < 2:
        return None
    k = abs(int(peaks[0]) - int(peaks[1]))
    k = min(k, d - k)
    return 2 * math.pi * k / d


def max_separation(d):
    """Largest separation two sites can have: pi for even d, pi*(1 - 1/d) for odd d."""
    return 2 * math.pi * (d // 2) / d
