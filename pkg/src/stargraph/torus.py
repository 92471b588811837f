"""Invariant-measure Monte Carlo on the secular surface of the torus.

Eigenvalue statistics of a star graph with incommensurate bonds follow
the flow k -> (k L_1, ..., k L_v) mod pi, equidistributed on the
surface Sigma = {sum_j tan x_j = 0} with respect to the measure
J(xi) dxi / integral(J), where xi ranges over the first v-1
coordinates and

    J(xi) = (sum_{j<v} L_j sec^2 xi_j) / (1 + S^2) + L_v,
    S     = sum_{j<v} tan xi_j,
    x_v   = -arctan(S)  (mod pi).

Averages over the surface therefore come in two exchangeable routes:
importance-weighted Monte Carlo with uniform xi (this module's
estimator), and plain averages over computed eigenvalues mapped to the
torus (`eigenvalue_average`, the no-weights ground truth).

The implied sec^2 x_v is computed as 1 + S^2 exactly; round-tripping
through arctan/tan would lose ~16 digits' worth of conditioning when
S is large.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import GuardViolationError
from .model import stream
from .reduction import reduce_mod_pi
from . import secular

_CHUNK = 1 << 16


@dataclasses.dataclass(frozen=True)
class SurfaceSample:
    """One point of Sigma: free coordinates, weight, full torus point."""
    xi: np.ndarray
    jacobian: float
    x: np.ndarray


@dataclasses.dataclass(frozen=True)
class SampleBatch:
    """Vectorized surface points handed to test functions.

    `sec2` holds sec^2 of every coordinate including the implied last
    one (exact via 1 + S^2); `jacobian` is None on the eigenvalue
    route, where samples are equal-weight.
    """
    x: np.ndarray
    tan: np.ndarray
    sec2: np.ndarray
    jacobian: np.ndarray

    def __len__(self):
        return self.x.shape[0]


@dataclasses.dataclass(frozen=True)
class SurfaceEstimate:
    """Self-normalized importance estimate with jackknife error.

    Iterates as (estimate, std_error) so callers can unpack the pair
    directly.
    """
    estimate: float
    std_error: float
    n_samples: int
    max_weight_fraction: float

    def __iter__(self):
        return iter((self.estimate, self.std_error))


def _batch_from_xi(xi, lengths):
    L = lengths.lengths
    v = lengths.v
    t_head = np.tan(xi)
    s = t_head.sum(axis=1)
    sec2_head = 1.0 + t_head * t_head
    jac = sec2_head @ L[:v - 1] / (1.0 + s * s) + L[v - 1]
    x_last = np.mod(-np.arctan(s), np.pi)
    x = np.concatenate([xi, x_last[:, None]], axis=1)
    tan = np.concatenate([t_head, -s[:, None]], axis=1)
    sec2 = np.concatenate([sec2_head, (1.0 + s * s)[:, None]], axis=1)
    return SampleBatch(x, tan, sec2, jac)


def jacobian(xi, lengths):
    """Surface weight J(xi) for one point xi in [0, pi)^{v-1}.

    Any coordinate within 1e-12 of pi/2 is rejected: the tangent there
    is no longer trustworthy in double precision.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if xi.shape != (lengths.v - 1,):
        raise ValueError("xi must have v-1 coordinates")
    off = np.abs(np.mod(xi, np.pi) - 0.5 * np.pi)
    if np.any(off < 1e-12):
        bad = int(np.argmin(off))
        raise GuardViolationError(
            "coordinate %d is within %.3g of pi/2" % (bad + 1, off[bad]))
    return float(_batch_from_xi(xi[None, :], lengths).jacobian[0])


def sample_surface(lengths, n_samples, seed=0):
    """Draw n_samples SurfaceSample points (uniform xi, weights attached)."""
    rng = stream(seed, 0)
    xi = rng.uniform(0.0, np.pi, size=(n_samples, lengths.v - 1))
    batch = _batch_from_xi(xi, lengths)
    return [SurfaceSample(xi[i].copy(), float(batch.jacobian[i]), batch.x[i].copy())
            for i in range(n_samples)]


def _mc_batches(lengths, n_samples, seed, threads):
    edges = [(i, s, min(s + _CHUNK, n_samples))
             for i, s in enumerate(range(0, n_samples, _CHUNK))]

    def _one(arg):
        idx, a, b = arg
        rng = stream(seed, idx)
        xi = rng.uniform(0.0, np.pi, size=(b - a, lengths.v - 1))
        return _batch_from_xi(xi, lengths)

    if threads and threads > 1 and len(edges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_one, edges))
    return [_one(e) for e in edges]


def surface_average(f, lengths, n_samples, seed=0, threads=1):
    """Integral of f over Sigma against the invariant measure.

    Self-normalized estimator sum f J / sum J over uniform xi; the
    standard error is the exact leave-one-out jackknife, which is the
    right tool because numerator and denominator share randomness.
    Deterministic for fixed seed regardless of thread count (fixed
    chunking by RNG stream index).
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000 for a usable error bar")
    vals = []
    weights = []
    for batch in _mc_batches(lengths, n_samples, seed, threads):
        vals.append(np.asarray(f(batch), dtype=np.float64))
        weights.append(batch.jacobian)
    fv = np.concatenate(vals)
    jv = np.concatenate(weights)
    big_f = float(fv @ jv)
    big_w = float(jv.sum())
    estimate = big_f / big_w
    loo = (big_f - fv * jv) / (big_w - jv)
    n = fv.size
    se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return SurfaceEstimate(estimate, float(se), n, float(jv.max() / big_w))


def finite_v_pv(lengths, threshold, n_samples, seed=0, threads=1):
    """nu-probability that (1/v^2) sum_j L_j sec^2 x_j < threshold.

    This is the finite-v distribution function of the normalized
    derivative Z'(k_n)/v^2; identically 0 for threshold <= 0.
    """
    if threshold <= 0.0:
        return SurfaceEstimate(0.0, 0.0, n_samples, 0.0)
    v2 = lengths.v ** 2
    L = lengths.lengths

    def f(batch):
        return (batch.sec2 @ L / v2 < threshold).astype(np.float64)

    return surface_average(f, lengths, n_samples, seed=seed, threads=threads)


def finite_v_qv(lengths, bond, threshold, n_samples, seed=0, threads=1):
    """nu-probability that the scaled squared amplitude v^2 A_bond < threshold.

    bond is 1-based.  v^2 A_i = 2 v^2 sec^2 x_i / sum_j L_j sec^2 x_j;
    the limiting law is bond-independent, which makes cross-bond
    agreement a usable self-test.
    """
    if not 1 <= bond <= lengths.v:
        raise ValueError("bond must be in [1, v]")
    v2 = lengths.v ** 2
    L = lengths.lengths
    col = bond - 1

    def f(batch):
        ratio = 2.0 * v2 * batch.sec2[:, col] / (batch.sec2 @ L)
        return (ratio < threshold).astype(np.float64)

    return surface_average(f, lengths, n_samples, seed=seed, threads=threads)


def eigenvalue_batch(lengths, n_eigs, threads=1, k_start=0.0):
    """n_eigs eigenvalues mapped to the torus as an equal-weight batch.

    k_start > 0 takes a window of consecutive eigenvalues above that
    height instead of the first ones — necessary for near-equal
    lengths, where transverse equidistribution only sets in once
    k * Delta L is large.
    """
    if k_start > 0.0:
        points = secular.eigenvalue_window(lengths, k_start, n_eigs,
                                           threads=threads)
    else:
        points = secular.eigenvalues(lengths, n_eigs, threads=threads)
    k = np.array([p.k for p in points])
    r = reduce_mod_pi(k[:, None], lengths.lengths[None, :])
    tan = np.tan(r)
    sec2 = 1.0 + tan * tan
    x = np.mod(r, np.pi)
    return SampleBatch(x, tan, sec2, None)


def eigenvalue_average(f, lengths, n_eigs, threads=1, n_batches=20):
    """Plain average of f over the first n_eigs eigenvalue torus points.

    The ground-truth side of the two-route comparison.  Consecutive
    eigenvalues are weakly dependent, so the standard error comes from
    batch means over n_batches consecutive blocks.
    """
    batch = eigenvalue_batch(lengths, n_eigs, threads=threads)
    vals = np.asarray(f(batch), dtype=np.float64)
    estimate = float(vals.mean())
    blocks = np.array_split(vals, n_batches)
    means = np.array([b.mean() for b in blocks])
    se = float(means.std(ddof=1) / np.sqrt(len(means)))
    return estimate, se


def write_estimate_json(est, path):
    """JSON export {estimate, std_error, n_samples, max_weight_fraction}."""
    import json
    payload = {
        "estimate": est.estimate,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "max_weight_fraction": est.max_weight_fraction,
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
