"""Spectral determinant of a star graph and its interlaced zeros.

Z(k, L) = sum_j tan(k L_j) has poles at k = (2n+1).pi/(2 L_j) and is
strictly increasing between consecutive poles (Z' = sum L_j sec^2 > 0),
so exactly one zero lies in every open inter-pole interval.  k = 0 is
always a zero.  Eigenfunction data derives from Z'(k_n):

    (A^(n))^2 = 2 / Z'(k_n)          (normalization constant)
    A_i       = 2 sec^2(k_n L_i) / Z'(k_n)   (peak amplitude squared,
                                              bond i)

All tangents go through the double-word argument reduction in
`reduction`, so values stay trustworthy at k ~ 1e5.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import BracketError, PoleMergeError
from .model import mean_density
from .reduction import reduce_mod_pi

#: inputs closer to a pole than POLE_GUARD * k (distance in k) are
#: reported as signed infinities instead of evaluating the tangent.
POLE_GUARD = 1e-12

#: minimum separation of poles from distinct bonds; below this the
#: bracket sign conditions are unreliable and the grid build aborts.
MERGE_THRESHOLD = 1e-9

_CHUNK = 16384           # intervals solved per vectorized batch
_BISECT_ITERS = 34       # (1-2e-3)/2^34 < 1e-10 of the bracket width


@dataclasses.dataclass(frozen=True)
class PoleGrid:
    """Merged, ascending tangent poles of all bonds up to k_max."""
    poles: np.ndarray
    bond_index: np.ndarray
    k_max: float

    def __len__(self):
        return self.poles.size


@dataclasses.dataclass(frozen=True)
class SpectralPoint:
    """One eigenvalue k_n with Z'(k_n) and its pole bracket."""
    index: int
    k: float
    z_prime: float
    bracket: tuple

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo < self.k < hi):
            raise ValueError("k=%r outside bracket (%r, %r)" % (self.k, lo, hi))
        if not (self.z_prime > 0.0):
            raise ValueError("z_prime must be positive")


@dataclasses.dataclass(frozen=True)
class Eigenfunction:
    """Per-bond squared amplitudes A_i and (A^(n))^2 for one eigenvalue."""
    point: SpectralPoint
    amplitude_sq: np.ndarray
    norm_constant_sq: float


def _tan_products(k, lengths_arr, guard=True):
    """tan of the elementwise product k * L, optionally pole-guarded.

    With guard on, entries whose product lies within POLE_GUARD * k
    (k-distance) of a tangent pole become signed infinities carrying
    the sign of the diverging tangent — the honest answer for a
    user-facing evaluation.  The root solver runs unguarded: huge
    finite tangents keep their correct signs, whereas guard infinities
    of opposite sign would collapse a sum to nan inside the tightest
    inter-pole intervals.
    """
    r = reduce_mod_pi(k, lengths_arr)
    t = np.tan(r)
    if guard:
        dist_k = np.abs(0.5 * np.pi - np.abs(r)) / lengths_arr
        guarded = dist_k < POLE_GUARD * np.abs(k)
        if guarded.any():
            t = np.where(guarded, np.copysign(np.inf, t), t)
    return t


def _tan_bonds(k, lengths_arr, guard=True):
    """tan(k L_j) for an array of k against the length vector; (..., v)."""
    k = np.asarray(k, dtype=np.float64)
    return _tan_products(k[..., None], lengths_arr, guard=guard)


def eval_z(k, lengths):
    """Spectral determinant Z(k, L) = sum_j tan(k L_j).

    Scalar k gives a float; array k is mapped elementwise.  Near-pole
    inputs give a signed infinity marker, never an exception.
    """
    t = _tan_bonds(k, lengths.lengths)
    z = t.sum(axis=-1)
    return float(z) if np.ndim(k) == 0 else z


def eval_z_prime(k, lengths):
    """Z'(k, L) = sum_j L_j sec^2(k L_j) >= sum_j L_j > 0."""
    t = _tan_bonds(k, lengths.lengths)
    zp = ((1.0 + t * t) * lengths.lengths).sum(axis=-1)
    return float(zp) if np.ndim(k) == 0 else zp


def build_pole_grid(lengths, k_max):
    """All tangent poles below k_max, merged across bonds, ascending.

    The per-bond count is floor(k_max L_j / pi + 1/2); poles from
    distinct bonds closer than MERGE_THRESHOLD abort with both bonds
    named, since near-commensurate lengths break the bracket logic.
    """
    if not (k_max > 0.0):
        raise ValueError("k_max must be positive")
    L = lengths.lengths
    counts = np.floor(k_max * L / np.pi + 0.5).astype(np.int64)
    poles = []
    bonds = []
    for j in range(lengths.v):
        n = np.arange(counts[j], dtype=np.float64)
        poles.append((2.0 * n + 1.0) * (np.pi / (2.0 * L[j])))
        bonds.append(np.full(int(counts[j]), j, dtype=np.int64))
    poles = np.concatenate(poles) if poles else np.empty(0)
    bonds = np.concatenate(bonds) if bonds else np.empty(0, dtype=np.int64)
    order = np.argsort(poles, kind="stable")
    poles = poles[order]
    bonds = bonds[order]
    if poles.size >= 2:
        gaps = np.diff(poles)
        tight = int(np.argmin(gaps))
        if gaps[tight] <= MERGE_THRESHOLD:
            raise PoleMergeError(
                "poles k=%.17g (bond %d) and k=%.17g (bond %d) are %.3g apart; "
                "lengths are too close to commensurate"
                % (poles[tight], bonds[tight] + 1,
                   poles[tight + 1], bonds[tight + 1] + 1, gaps[tight]))
    poles.setflags(write=False)
    bonds.setflags(write=False)
    return PoleGrid(poles, bonds, float(k_max))


def _z_of(k, L):
    return _tan_bonds(k, L, guard=False).sum(axis=-1)


def _z_zp_of(k, L):
    t = _tan_bonds(k, L, guard=False)
    return t.sum(axis=-1), ((1.0 + t * t) * L).sum(axis=-1)


def _solve_chunk(L, lo, hi):
    """One zero of Z inside each open interval (lo_i, hi_i).

    Bisection down to <1e-10 of the bracket, three bracket-guarded
    secant steps, and one clipped Newton polish; Z runs from -inf to
    +inf across each interval, so the sign logic is unconditional.

    Intervals only a few ulp wide (nearly coincident poles at large k)
    skip the sign machinery: every representable interior float is
    within rounding distance of the root, so the midpoint is returned
    outright.
    """
    gap = hi - lo
    # offsets must clear the rounding granularity of the endpoints or
    # lo + delta collapses onto the pole float itself in tight
    # high-k intervals
    floor_a = 2.0 * np.spacing(np.abs(lo))
    floor_b = 2.0 * np.spacing(np.abs(hi))
    tight = gap <= 2.0 * (floor_a + floor_b)
    if tight.any():
        x = np.empty_like(lo)
        zp = np.empty_like(lo)
        wide = ~tight
        x[wide], zp[wide] = _solve_chunk(L, lo[wide].copy(), hi[wide].copy())
        t_lo, t_hi = lo[tight], hi[tight]
        mid = 0.5 * (t_lo + t_hi)
        mid = np.maximum(mid, np.nextafter(t_lo, t_hi))
        mid = np.minimum(mid, np.nextafter(t_hi, t_lo))
        if ((mid <= t_lo) | (mid >= t_hi)).any():
            bad = np.flatnonzero((mid <= t_lo) | (mid >= t_hi))[0]
            raise PoleMergeError(
                "poles %.17g and %.17g leave no representable float "
                "between them" % (t_lo[bad], t_hi[bad]))
        x[tight] = mid
        zp[tight] = _z_zp_of(mid, L)[1]
        return x, zp
    delta_a = np.maximum(1e-3 * gap, floor_a)
    delta_b = np.maximum(1e-3 * gap, floor_b)
    a = lo + delta_a
    b = hi - delta_b
    fa = _z_of(a, L)
    fb = _z_of(b, L)
    for _ in range(60):
        bad_a = ~(fa < 0.0)
        bad_b = ~(fb > 0.0)
        if not bad_a.any() and not bad_b.any():
            break
        if bad_a.any():
            delta_a[bad_a] = np.maximum(delta_a[bad_a] / 8.0, floor_a[bad_a])
            a[bad_a] = lo[bad_a] + delta_a[bad_a]
            fa[bad_a] = _z_of(a[bad_a], L)
        if bad_b.any():
            delta_b[bad_b] = np.maximum(delta_b[bad_b] / 8.0, floor_b[bad_b])
            b[bad_b] = hi[bad_b] - delta_b[bad_b]
            fb[bad_b] = _z_of(b[bad_b], L)
    else:
        bad = np.flatnonzero(~(fa < 0.0) | ~(fb > 0.0))[0]
        raise BracketError(
            "no sign change over (%.17g, %.17g): Z=%r..%r; pole grid corrupt?"
            % (lo[bad], hi[bad], fa[bad], fb[bad]))

    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (a + b)
        neg = _z_of(mid, L) < 0.0
        a = np.where(neg, mid, a)
        b = np.where(neg, b, mid)
    fa = _z_of(a, L)
    fb = _z_of(b, L)

    for _ in range(3):
        with np.errstate(invalid="ignore", divide="ignore"):
            x = b - fb * (b - a) / (fb - fa)
        keep = np.isfinite(x) & (x > a) & (x < b)
        x = np.where(keep, x, 0.5 * (a + b))
        fx = _z_of(x, L)
        neg = fx < 0.0
        a = np.where(neg, x, a)
        fa = np.where(neg, fx, fa)
        b = np.where(neg, b, x)
        fb = np.where(neg, fx, fb)

    x = np.where(np.abs(fa) <= np.abs(fb), a, b)
    fx, zp = _z_zp_of(x, L)
    with np.errstate(invalid="ignore"):
        polished = x - fx / zp
    x = np.where((polished > lo) & (polished < hi), polished, x)
    zp = _z_zp_of(x, L)[1]
    return x, zp


def _solve_intervals(L, lo, hi, threads=1):
    slices = [slice(s, min(s + _CHUNK, lo.size)) for s in range(0, lo.size, _CHUNK)]
    if threads and threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: _solve_chunk(L, lo[s].copy(), hi[s].copy()),
                                  slices))
    else:
        parts = [_solve_chunk(L, lo[s].copy(), hi[s].copy()) for s in slices]
    roots = np.concatenate([p[0] for p in parts])
    zps = np.concatenate([p[1] for p in parts])
    return roots, zps


def eigenvalues(lengths, n_eigs, threads=1):
    """The first n_eigs eigen-wavenumbers 0 = k_0 < k_1 < ... as SpectralPoints.

    Index 0 is the k = 0 eigenvalue with z_prime = sum L_j (the limit
    value); every later point is the unique zero between two
    consecutive poles, refined well below 1e-13 relative.
    """
    if n_eigs < 1:
        raise ValueError("n_eigs must be >= 1")
    lengths.require_distinct()
    n_roots = n_eigs - 1
    dbar = mean_density(lengths)
    k_guess = (n_roots + lengths.v + 2) / dbar + 1.0
    grid = build_pole_grid(lengths, k_guess)
    while len(grid) < n_roots + 1:
        k_guess *= 1.25
        grid = build_pole_grid(lengths, k_guess)
    first_pole = grid.poles[0]
    points = [SpectralPoint(0, 0.0, lengths.total, (-first_pole, first_pole))]
    if n_roots == 0:
        return points
    lo = grid.poles[:n_roots]
    hi = grid.poles[1:n_roots + 1]
    roots, zps = _solve_intervals(lengths.lengths, lo, hi, threads=threads)
    for i in range(n_roots):
        points.append(SpectralPoint(i + 1, float(roots[i]), float(zps[i]),
                                    (float(lo[i]), float(hi[i]))))
    return points


def eigenvalue_window(lengths, k_start, n_eigs, threads=1):
    """n_eigs consecutive eigenvalues starting with the first zero above k_start.

    Index bookkeeping is exact: with n_lo_j poles of bond j below
    k_start, interlacing puts sum_j n_lo_j + 1 zeros (including k = 0)
    at or below the first window pole, so the returned points carry
    their true global indices.  High windows are where the torus orbit
    k L mod pi has actually equidistributed when the lengths are
    nearly equal — the spread Delta L only winds the transverse
    directions at rate k * Delta L.
    """
    if not k_start > 0.0:
        raise ValueError("k_start must be positive (use eigenvalues() from 0)")
    if n_eigs < 1:
        raise ValueError("n_eigs must be >= 1")
    lengths.require_distinct()
    L = lengths.lengths
    n_lo = np.ceil(k_start * L / np.pi - 0.5).astype(np.int64)
    span = (n_eigs + lengths.v + 2) * np.pi / lengths.total + 1.0
    for _ in range(60):
        k_end = k_start + span
        n_hi = np.ceil(k_end * L / np.pi - 0.5).astype(np.int64)
        polelist = []
        for j in range(lengths.v):
            n = np.arange(n_lo[j], n_hi[j], dtype=np.float64)
            polelist.append((2.0 * n + 1.0) * (np.pi / (2.0 * L[j])))
        poles = np.sort(np.concatenate(polelist))
        if poles.size >= n_eigs + 1:
            break
        span *= 1.25
    else:
        raise RuntimeError("window enumeration failed to cover n_eigs")
    gaps = np.diff(poles[:n_eigs + 1])
    tight = int(np.argmin(gaps))
    if gaps[tight] <= MERGE_THRESHOLD:
        raise PoleMergeError(
            "poles k=%.17g and k=%.17g are %.3g apart; lengths too close "
            "to commensurate at this height"
            % (poles[tight], poles[tight + 1], gaps[tight]))
    base = int(n_lo.sum()) + 1
    lo = poles[:n_eigs]
    hi = poles[1:n_eigs + 1]
    roots, zps = _solve_intervals(L, lo, hi, threads=threads)
    return [SpectralPoint(base + i, float(roots[i]), float(zps[i]),
                          (float(lo[i]), float(hi[i])))
            for i in range(n_eigs)]


def eigenvalue_ensemble(lengths, k_start, n_eigs, n_windows=20,
                        spacing=None, threads=1):
    """n_eigs eigenvalues stratified over n_windows windows above k_start.

    One consecutive window advances the transverse torus coordinates
    by only (window length) * (L_i - L_j) per bond pair, so for nearly
    equal lengths it samples the secular surface along a thin slice;
    the slice carries a few-percent distributional bias that does not
    decay as the window is moved higher.  Splitting the same eigenvalue
    budget across windows separated by much more than pi / |L_i - L_j|
    decorrelates the slices and averages that bias away.

    The default spacing scrambles pair phases by >= 50 half-turns for
    the widest pair and always clears the window's own length.
    """
    if n_windows < 1:
        raise ValueError("n_windows must be >= 1")
    per, extra = divmod(n_eigs, n_windows)
    if per < 1:
        raise ValueError("fewer eigenvalues than windows")
    if spacing is None:
        spread = float(lengths.lengths.max() - lengths.lengths.min())
        window_len = (per + 1) * np.pi / lengths.total
        phase_scramble = 50.0 * np.pi / spread if spread > 0.0 else np.inf
        spacing = max(phase_scramble, 3.0 * window_len)
        if not np.isfinite(spacing):
            raise ValueError("equal lengths cannot be stratified")
    points = []
    for m in range(n_windows):
        count = per + (1 if m < extra else 0)
        points.extend(eigenvalue_window(lengths, k_start + m * spacing,
                                        count, threads=threads))
    return points


def spectrum_arrays(points):
    """(k, z_prime) arrays for a list of SpectralPoints."""
    k = np.array([p.k for p in points])
    zp = np.array([p.z_prime for p in points])
    return k, zp


def amplitudes(point, lengths):
    """Per-bond squared amplitudes of the normalized eigenfunction at k_n.

    A_i = 2 sec^2(k_n L_i) / Z'(k_n); the identity sum_j L_j A_j = 2
    holds to rounding because the same sec^2 values enter numerator
    and denominator.
    """
    L = lengths.lengths
    if point.k == 0.0:
        sec2 = np.ones_like(L)
    else:
        r = reduce_mod_pi(point.k, L)
        t = np.tan(r)
        sec2 = 1.0 + t * t
    zp = float(L @ sec2)
    amp = 2.0 * sec2 / zp
    amp.setflags(write=False)
    return Eigenfunction(point, amp, 2.0 / zp)


def weyl_count_check(lengths, k_max, threads=1):
    """(zero_count, pole_count, dbar * k_max) for the window [0, k_max].

    zero_count counts eigenvalues including k = 0; interlacing forces
    zero_count - pole_count into {0, 1}, and Weyl's law keeps
    |zero_count - dbar * k_max| small (of order v).
    """
    lengths.require_distinct()
    grid = build_pole_grid(lengths, k_max)
    pole_count = len(grid)
    if pole_count == 0:
        return 1, 0, mean_density(lengths) * k_max
    # one pole past k_max closes the last interval
    L = lengths.lengths
    counts = np.floor(k_max * L / np.pi + 0.5)
    next_pole = float(np.min((2.0 * counts + 1.0) * (np.pi / (2.0 * L))))
    lo = grid.poles
    hi = np.append(grid.poles[1:], next_pole)
    roots, _ = _solve_intervals(L, lo, hi, threads=threads)
    zero_count = 1 + int((roots <= k_max).sum())
    return zero_count, pole_count, mean_density(lengths) * k_max


def write_spectrum_csv(points, path):
    """CSV export `n,k,z_prime,bracket_lo,bracket_hi`, 17 significant digits."""
    rows = ["n,k,z_prime,bracket_lo,bracket_hi"]
    for p in points:
        rows.append("%d,%.17g,%.17g,%.17g,%.17g"
                    % (p.index, p.k, p.z_prime, p.bracket[0], p.bracket[1]))
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")
