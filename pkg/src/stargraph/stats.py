"""Empirical distributions and their comparison to limit laws.

Samples of the normalized determinant come from two theorems' worth of
randomness: uniform k on [0, k_max] with fixed lengths (the k-average
route), and fresh length vectors at fixed k (the length-average
route).  Both converge to the standard Cauchy law when the relevant
product k * DeltaL is large.  The KS distance against an analytic CDF
is the workhorse comparison; 1.63/sqrt(n) is the asymptotic 99% point
of the two-sided statistic.
"""

import dataclasses
import json
import warnings

import numpy as np

from .densities import DensityCurve
from .errors import GuardViolationError, NonMonotoneCDFError
from .model import mean_density, stream
from .reduction import reduce_mod_pi
from . import secular

_CHUNK = 1 << 16

#: largest tolerated fraction of pole-guard discards; beyond this the
#: missing extreme values could bias the tails at KS resolution.
MAX_DISCARD_FRACTION = 1e-6


@dataclasses.dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample values with their count."""
    values: np.ndarray

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=np.float64).ravel())
        if vals.size < 1:
            raise ValueError("need at least one sample")
        if not np.isfinite(vals).all():
            raise ValueError("samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return self.values.size

    def ecdf(self, x):
        """Right-continuous empirical CDF evaluated at x."""
        x = np.asarray(x, dtype=np.float64)
        out = np.searchsorted(self.values, x, side="right") / self.n
        return float(out) if x.ndim == 0 else out


def ks_99_threshold(n):
    """Asymptotic 99% quantile of the two-sided KS statistic."""
    return 1.63 / np.sqrt(n)


def ks_distance(emp, cdf):
    """sup_x |F_n(x) - F(x)| for a continuous target CDF.

    The callable is probed at 1000 points across the sample range
    first; non-monotone or out-of-[0,1] values abort, since a KS
    number against a non-CDF is meaningless.
    """
    lo = emp.values[0]
    hi = emp.values[-1]
    span = max(hi - lo, 1.0)
    probe = np.linspace(lo - 0.1 * span, hi + 0.1 * span, 1000)
    fp = np.asarray(cdf(probe), dtype=np.float64)
    if np.any(np.diff(fp) < -1e-12):
        raise NonMonotoneCDFError("cdf decreases between probe points")
    if fp.min() < -1e-12 or fp.max() > 1.0 + 1e-12:
        raise NonMonotoneCDFError("cdf leaves [0, 1] on the probe grid")
    f = np.asarray(cdf(emp.values), dtype=np.float64)
    n = emp.n
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def _collect_chunks(n_samples, worker, threads=1):
    """Deterministic chunked sampling: chunk i always uses stream index i."""
    edges = [(i, s, min(s + _CHUNK, n_samples))
             for i, s in enumerate(range(0, n_samples, _CHUNK))]
    if threads and threads > 1 and len(edges) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, edges))
    return [worker(e) for e in edges]


def _discard_guarded(parts, n_samples):
    vals = np.concatenate(parts)
    keep = np.isfinite(vals)
    dropped = int(n_samples - keep.sum())
    if dropped > MAX_DISCARD_FRACTION * n_samples:
        raise GuardViolationError(
            "%d of %d samples hit the pole guard; tails would be biased"
            % (dropped, n_samples))
    return vals[keep]


def sample_z_over_k(lengths, k_max, n_samples, seed=0, threads=1):
    """Z(k, L)/v for uniform k on [0, k_max] as an EmpiricalDistribution.

    Pole-guarded evaluations (infinities) are discarded; their count
    must stay below MAX_DISCARD_FRACTION of the draw.
    """
    if mean_density(lengths) * k_max < 100.0:
        warnings.warn("k_max spans fewer than ~100 eigenvalue cells; "
                      "the k-average is far from its ergodic limit")

    def worker(arg):
        idx, a, b = arg
        rng = stream(seed, idx)
        k = rng.uniform(0.0, k_max, size=b - a)
        return secular.eval_z(k, lengths) / lengths.v

    parts = _collect_chunks(n_samples, worker, threads=threads)
    return EmpiricalDistribution(_discard_guarded(parts, n_samples))


def sample_z_over_lengths(box, v, k_fixed, n_samples, seed=0, threads=1):
    """Z(k_fixed, L)/v for fresh length vectors drawn from the box.

    The Cauchy limit needs k * DeltaL -> infinity; a warning fires
    below k_fixed * delta_l = 100 so the negative-control regime is
    explicit rather than silent.
    """
    if k_fixed * box.delta_l < 100.0:
        warnings.warn("k * delta_l = %g < 100: outside the Cauchy regime"
                      % (k_fixed * box.delta_l))
    lo = box.l_bar - 0.5 * box.delta_l

    def worker(arg):
        idx, a, b = arg
        rng = stream(seed, idx)
        mat = lo + box.delta_l * rng.random(size=(b - a, v))
        t = np.tan(reduce_mod_pi(np.float64(k_fixed), mat))
        return t.sum(axis=1) / v

    parts = _collect_chunks(n_samples, worker, threads=threads)
    return EmpiricalDistribution(_discard_guarded(parts, n_samples))


def sample_cauchy(n_samples, seed=0):
    """Seeded standard-Cauchy draws (for KS calibration tests)."""
    return EmpiricalDistribution(stream(seed, 0).standard_cauchy(n_samples))


def histogram(emp, bins=80, clip=None):
    """Density-normalized histogram as a DensityCurve over bin centers.

    With clip=(lo, hi) the bars cover only the window but are still
    normalized by the full sample count, so the bar area equals
    1 - clipped mass (heavy-tailed data stays readable without
    pretending the tail mass does not exist).
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    vals = emp.values
    if clip is not None:
        lo, hi = clip
        kept = vals[(vals >= lo) & (vals <= hi)]
        rng = (lo, hi)
    else:
        kept = vals
        rng = (vals[0], vals[-1])
    counts, edges = np.histogram(kept, bins=bins, range=rng)
    width = edges[1] - edges[0]
    density = counts / (emp.n * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return DensityCurve(centers, density, mass=float(density.sum() * width))


def write_samples_csv(emp, path):
    """CSV export, header `value`, one sample per line, 17 digits."""
    rows = ["value"]
    rows.extend("%.17g" % x for x in emp.values)
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")


def write_histogram_csv(curve, path):
    """CSV export `bin_center,density`."""
    rows = ["bin_center,density"]
    for x, d in zip(curve.grid, curve.pdf):
        rows.append("%.17g,%.17g" % (x, d))
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")


def ks_summary(emp, cdf):
    """JSON-ready dict {n, ks, ks_99_threshold}."""
    return {
        "n": emp.n,
        "ks": ks_distance(emp, cdf),
        "ks_99_threshold": float(ks_99_threshold(emp.n)),
    }


def write_ks_json(summary, path):
    with open(path, "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
