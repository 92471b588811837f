"""Rectangle billiard with a point scatterer: spectral-sum experiments.

The unperturbed system is the Neumann rectangle with sides alpha^{1/4}
and alpha^{-1/4} (unit area), whose levels are

    E_{n,m} = pi^2 (n^2 alpha^{-1/2} + m^2 alpha^{1/2}),   n, m >= 0.

With the scatterer at a corner every retained mode contributes equal
weight, and two spectral sums are sampled at random energies E drawn
uniformly from a window [E_{n_min}, E_{n_max}]:

  * the determinant surrogate  pi <d> sum_k 1/(E_k - E), conjectured
    Cauchy like the star-graph Z;
  * the squared-coefficient ratio c (E_i - E)^{-2} / sum_k (E_k - E)^{-2}
    with c = (2/Lbar)(E_max - E_min)^2 <d>^2, conjectured to follow
    the amplitude law Q with its eta^{-3/2} tail.

<d> is the least-squares slope of the counting function N(E) over the
window — the window-local mean level density.
"""

import dataclasses

import numpy as np

from .stats import EmpiricalDistribution
from .model import stream

#: golden-mean aspect parameter used throughout
DEFAULT_ALPHA = (np.sqrt(5.0) - 1.0) / 2.0

_LEVEL_GUARD = 1e-9


@dataclasses.dataclass(frozen=True)
class RectangleSpectrum:
    """First K unperturbed levels with their quantum numbers."""
    alpha: float
    levels: np.ndarray
    numbers: np.ndarray
    K: int

    def __post_init__(self):
        if self.levels[0] != 0.0:
            raise ValueError("spectrum must start at the (0,0) level")
        if np.any(np.diff(self.levels) < 0.0):
            raise ValueError("levels must ascend")


@dataclasses.dataclass(frozen=True)
class SebaWindow:
    """Sampling window [E_{n_min}, E_{n_max}] with density and constant c."""
    n_min: int
    n_max: int
    e_min: float
    e_max: float
    mean_density: float
    c: float


def rectangle_levels(alpha, K):
    """Ascending E_{n,m} enumeration truncated to K levels.

    Enumerates the lattice up to a Weyl-guessed cutoff, doubling the
    cutoff if K levels were not captured; ties (absent for irrational
    alpha, barring rounding) order by (n, m) so truncation is
    deterministic and levels(K) is a prefix of levels(K').
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if K < 1:
        raise ValueError("K must be >= 1")
    root = np.sqrt(alpha)
    cut = 4.0 * np.pi * (K + 10.0) * 1.5
    for _ in range(60):
        n_top = int(np.floor(np.sqrt(cut * root) / np.pi)) + 1
        m_top = int(np.floor(np.sqrt(cut / root) / np.pi)) + 1
        n = np.arange(n_top + 1, dtype=np.float64)
        m = np.arange(m_top + 1, dtype=np.float64)
        e_mat = np.pi ** 2 * (n[:, None] ** 2 / root + m[None, :] ** 2 * root)
        nn, mm = np.meshgrid(n, m, indexing="ij")
        keep = e_mat <= cut
        if keep.sum() >= K:
            e_flat = e_mat[keep]
            nn = nn[keep].astype(np.int64)
            mm = mm[keep].astype(np.int64)
            order = np.lexsort((mm, nn, e_flat))[:K]
            levels = e_flat[order]
            numbers = np.column_stack([nn[order], mm[order]])
            levels.setflags(write=False)
            numbers.setflags(write=False)
            return RectangleSpectrum(float(alpha), levels, numbers, K)
        cut *= 2.0
    raise RuntimeError("level enumeration failed to reach K")


def rectangle_weyl_estimate(alpha, energy):
    """Two-term Weyl count for the unit-area Neumann rectangle."""
    perim = 2.0 * (alpha ** 0.25 + alpha ** -0.25)
    return energy / (4.0 * np.pi) + perim * np.sqrt(energy) / (4.0 * np.pi)


def seba_window(spectrum, n_min=1000, n_max=2000, l_bar=2.0):
    """Build the sampling window with <d> and c = (2/Lbar) (dE)^2 <d>^2.

    Level indices are 1-based; <d> is the least-squares slope of
    N(E) = index against E over the window.
    """
    if not 1 <= n_min < n_max <= spectrum.K:
        raise ValueError("window must satisfy 1 <= n_min < n_max <= K")
    e_win = spectrum.levels[n_min - 1:n_max]
    idx = np.arange(n_min, n_max + 1, dtype=np.float64)
    slope = np.polyfit(e_win, idx, 1)[0]
    e_min = float(spectrum.levels[n_min - 1])
    e_max = float(spectrum.levels[n_max - 1])
    c = (2.0 / l_bar) * (e_max - e_min) ** 2 * slope ** 2
    return SebaWindow(n_min, n_max, e_min, e_max, float(slope), float(c))


def _draw_energies(spectrum, window, n_samples, rng):
    """Uniform draws on the window, rejecting any within 1e-9 of a level."""
    out = np.empty(n_samples)
    need = np.arange(n_samples)
    levels = spectrum.levels
    for _ in range(100):
        draw = rng.uniform(window.e_min, window.e_max, size=need.size)
        pos = np.searchsorted(levels, draw)
        left = np.abs(draw - levels[np.clip(pos - 1, 0, levels.size - 1)])
        right = np.abs(levels[np.clip(pos, 0, levels.size - 1)] - draw)
        ok = np.minimum(left, right) > _LEVEL_GUARD
        out[need[ok]] = draw[ok]
        need = need[~ok]
        if need.size == 0:
            return out
    raise RuntimeError("energy draws kept colliding with levels")


def _chunked_sum(levels, energies, func, chunk=2048):
    parts = []
    for s in range(0, energies.size, chunk):
        diff = levels[None, :] - energies[s:s + chunk, None]
        parts.append(func(diff))
    return np.concatenate(parts)


def seba_determinant_samples(spectrum, window, n_samples, seed=0):
    """Standardized determinant sum (1/(pi <d>)) sum_k 1/(E_k - E).

    For poles of unit residue with Poisson spacing at density <d>, the
    raw sum is Cauchy with scale pi <d> (the same stable-law argument
    as for a single tan(kL)); dividing by pi <d> is what makes the
    limit the standard Cauchy, exactly as the 1/v prefactor does for
    the star-graph determinant.  Samples scale as 1/<d>.
    """
    rng = stream(seed, 0)
    energies = _draw_energies(spectrum, window, n_samples, rng)
    scale = 1.0 / (np.pi * window.mean_density)
    vals = _chunked_sum(spectrum.levels, energies,
                        lambda diff: scale * np.sum(1.0 / diff, axis=1))
    return EmpiricalDistribution(vals)


def seba_coefficient_samples(spectrum, window, level=1500, n_samples=10000, seed=0):
    """c (E_level - E)^{-2} / sum_k (E_k - E)^{-2}; level is 1-based.

    Bounded by c term-by-term; conjectured to share the star-graph
    amplitude tail eta^{-3/2}.
    """
    if not 1 <= level <= spectrum.K:
        raise ValueError("level must be in [1, K]")
    rng = stream(seed, 0)
    energies = _draw_energies(spectrum, window, n_samples, rng)
    e_i = spectrum.levels[level - 1]
    denom = _chunked_sum(spectrum.levels, energies, lambda d: (1.0 / (d * d)).sum(axis=1))
    vals = window.c * (1.0 / (e_i - energies) ** 2) / denom
    return EmpiricalDistribution(vals)


def write_rectangle_csv(spectrum, path):
    """CSV export `idx,n,m,energy`, idx 1-based."""
    rows = ["idx,n,m,energy"]
    for i in range(spectrum.K):
        rows.append("%d,%d,%d,%.17g"
                    % (i + 1, spectrum.numbers[i, 0], spectrum.numbers[i, 1],
                       spectrum.levels[i]))
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")
