"""Quantitative acceptance suite: thirteen pass/fail criteria.

Each criterion is a standalone function returning a CriterionResult;
`run_all` executes them in order and prints one pass/fail line per
criterion.  The criteria pin down the load-bearing claims end to end:
exact small spectra, interlacing and counting at scale, eigenfunction
normalization, the four limit theorems (Cauchy by k-average and by
length-average, the derivative law P, the amplitude law Q), the
two-route surface/eigenvalue agreement, density normalizations and
tail constants, the rectangle-spectrum Cauchy test with its published
constant, and the Abel-transform oracle.

Where a criterion carries an explicit runtime budget, exceeding the
budget fails the criterion even if the numbers are right.
"""

import dataclasses
import time
import warnings

import numpy as np

from .model import BondLengths, LengthBox, generate_lengths, mean_density, stream
from .reduction import reduce_mod_pi
from .densities import _q_direct  # cross-check route, intentionally internal
from . import densities, seba, secular, stats, torus


@dataclasses.dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    runtime_seconds: float

    def line(self):
        return "%s criterion %2d: %s (%s; %.2f s)" % (
            "PASS" if self.passed else "FAIL", self.number, self.title,
            self.detail, self.runtime_seconds)


def _result(number, title, passed, detail, t0):
    return CriterionResult(number, title, bool(passed), detail,
                           time.perf_counter() - t0)


def _fig3_graph():
    return generate_lengths(LengthBox(2.0, 1.0), 7, seed=7)


def criterion_1(threads=1):
    """Single bond: k_n = n pi exactly, fast."""
    t0 = time.perf_counter()
    lengths = BondLengths(np.array([1.0]))
    points = secular.eigenvalues(lengths, 1001, threads=threads)
    k = np.array([p.k for p in points])
    err = float(np.max(np.abs(k - np.arange(1001) * np.pi)))
    elapsed = time.perf_counter() - t0
    passed = err < 1e-12 and elapsed < 1.0
    return _result(1, "v=1 spectrum is n*pi to 1e-12 in under 1 s", passed,
                   "max err %.3g, %.2f s" % (err, elapsed), t0)


def criterion_2(threads=1):
    """Interlacing brackets plus the counting law on 1e5 eigenvalues."""
    t0 = time.perf_counter()
    lengths = _fig3_graph()
    points = secular.eigenvalues(lengths, 100_000, threads=threads)
    inside = all(p.bracket[0] < p.k < p.bracket[1] for p in points)
    k_last = points[-1].k
    count_err = abs(len(points) - mean_density(lengths) * k_last)
    elapsed = time.perf_counter() - t0
    passed = inside and count_err <= 8.0 and elapsed < 30.0
    return _result(2, "v=7 brackets strict and |N - dbar K| <= 8 at 1e5",
                   passed, "brackets %s, count err %.2f, %.1f s"
                   % ("ok" if inside else "VIOLATED", count_err, elapsed), t0)


def _simpson(y, h):
    """Composite Simpson on an odd-length uniform grid."""
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def criterion_3(threads=1):
    """Normalization: sum L_j A_j = 2 and quadrature of the mode's L2 norm."""
    t0 = time.perf_counter()
    lengths = _fig3_graph()
    points = secular.eigenvalues(lengths, 1001, threads=threads)
    rng = stream(303, 0)
    idx = rng.choice(np.arange(1, 1001), size=100, replace=False)
    n_nodes = 32769
    worst_identity = 0.0
    worst_quad = 0.0
    for i in idx:
        point = points[i]
        fn = secular.amplitudes(point, lengths)
        worst_identity = max(worst_identity,
                             abs(lengths.lengths @ fn.amplitude_sq - 2.0))
        total = 0.0
        for L_j, A_j in zip(lengths.lengths, fn.amplitude_sq):
            x = np.linspace(0.0, L_j, n_nodes)
            total += _simpson(A_j * np.cos(point.k * (L_j - x)) ** 2,
                              L_j / (n_nodes - 1))
        worst_quad = max(worst_quad, abs(total - 1.0))
    passed = worst_identity < 1e-12 and worst_quad < 1e-8
    return _result(3, "eigenfunction normalization identity and L2 quadrature",
                   passed, "identity err %.3g, quadrature err %.3g"
                   % (worst_identity, worst_quad), t0)


def criterion_4(threads=1):
    """k-averaged Z/v matches the Cauchy law at KS < 0.02 in under 10 s."""
    t0 = time.perf_counter()
    lengths = _fig3_graph()
    emp = stats.sample_z_over_k(lengths, 1e4 * np.pi / 2.0, 100_000,
                                seed=7, threads=threads)
    ks = stats.ks_distance(emp, densities.cauchy_cdf)
    elapsed = time.perf_counter() - t0
    passed = ks < 0.02 and elapsed < 10.0
    return _result(4, "uniform-k Z/v is Cauchy (KS < 0.02, under 10 s)",
                   passed, "KS %.4f, %.1f s" % (ks, elapsed), t0)


def criterion_5(threads=1):
    """Length-averaged Z/v at fixed k: Cauchy when k*DeltaL is large only."""
    t0 = time.perf_counter()
    emp = stats.sample_z_over_lengths(LengthBox(2.0, 0.1), 7, 1e4,
                                      100_000, seed=5, threads=threads)
    ks = stats.ks_distance(emp, densities.cauchy_cdf)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        control = stats.sample_z_over_lengths(LengthBox(2.0, 1e-5), 7, 1e4,
                                              100_000, seed=5, threads=threads)
    ks_control = stats.ks_distance(control, densities.cauchy_cdf)
    passed = ks < 0.02 and ks_control > 0.2
    return _result(5, "fixed-k length average: KS < 0.02, control KS > 0.2",
                   passed, "KS %.4f, control KS %.2f" % (ks, ks_control), t0)


def criterion_6(threads=1):
    """Two routes to the same surface averages: MC weights vs eigenvalues."""
    t0 = time.perf_counter()
    lengths = generate_lengths(LengthBox(2.0, 1.0), 4, seed=4)
    thresholds = (0.75, 1.0, 1.5, 2.5, 6.0)
    v2 = lengths.v ** 2
    L = lengths.lengths
    agree = 0
    rows = []
    for i, thr in enumerate(thresholds):
        mc, mc_se = torus.finite_v_pv(lengths, thr, 1_000_000,
                                      seed=600 + i, threads=threads)

        def f(batch, thr=thr):
            return (batch.sec2 @ L / v2 < thr).astype(np.float64)

        eig, eig_se = torus.eigenvalue_average(f, lengths, 10_000,
                                               threads=threads)
        gap = abs(mc - eig)
        band = 3.0 * np.hypot(mc_se, eig_se)
        agree += gap <= band
        rows.append("%.3g" % (gap / band if band else np.inf))
    passed = agree >= 4
    return _result(6, "surface-MC vs eigenvalue averages agree at >= 4/5",
                   passed, "%d/5 within 3 SE, gap/band %s"
                   % (agree, " ".join(rows)), t0)


def criterion_7(threads=1):
    """High-k eigenvalue ensemble: Z'(k_n)/v^2 follows P at v = 70."""
    t0 = time.perf_counter()
    lengths = generate_lengths(LengthBox(2.0, 0.0005), 70, seed=70)
    points = secular.eigenvalue_ensemble(lengths, 1.0e6, 100_000,
                                         n_windows=20, spacing=5.0e4,
                                         threads=threads)
    _, zp = secular.spectrum_arrays(points)
    emp = stats.EmpiricalDistribution(zp / 70 ** 2)
    sup = stats.ks_distance(emp, densities.p_curve(2.0).cdf())
    elapsed = time.perf_counter() - t0
    passed = sup < 0.03 and elapsed < 300.0
    return _result(7, "v=70 derivative law P (sup < 0.03, under 5 min)",
                   passed, "sup %.4f, %.1f s" % (sup, elapsed), t0)


def criterion_8(threads=1):
    """High-k eigenvalue ensemble: v^2 A_1 follows Q at v = 50."""
    t0 = time.perf_counter()
    lengths = generate_lengths(LengthBox(2.0, 0.0005), 50, seed=50)
    points = secular.eigenvalue_ensemble(lengths, 5.0e5, 100_000,
                                         n_windows=20, spacing=5.0e4,
                                         threads=threads)
    k, zp = secular.spectrum_arrays(points)
    r = reduce_mod_pi(k, lengths.lengths[0])
    t = np.tan(r)
    eta = 50 ** 2 * 2.0 * (1.0 + t * t) / zp
    emp = stats.EmpiricalDistribution(eta)
    sup = stats.ks_distance(emp, densities.q_curve(2.0).cdf())
    passed = sup < 0.05
    return _result(8, "v=50 amplitude law Q (sup < 0.05)", passed,
                   "sup %.4f" % sup, t0)


def criterion_9(threads=1):
    """Tail constant of Q: b(1) near 0.348 and eta^{3/2} Q(eta) at 200."""
    t0 = time.perf_counter()
    b1 = densities.q_tail_coefficient(1.0)
    scaled = 200.0 ** 1.5 * float(densities.limit_q(200.0, 2.0))
    target = 0.348 / np.sqrt(2.0)
    rel = abs(scaled / target - 1.0)
    passed = abs(b1 - 0.348) <= 0.004 and rel < 0.10
    return _result(9, "Q tail constant 0.348/sqrt(l_bar) and far-tail match",
                   passed, "b(1) %.4f, eta^1.5 Q rel err %.3f" % (b1, rel), t0)


def criterion_10(threads=1):
    """Unit mass of P and Q; Dawson form of Q against the direct series."""
    t0 = time.perf_counter()
    p_mass = densities.p_curve(2.0).mass
    q_mass = densities.q_curve(2.0).mass
    diffs = [abs(float(densities.limit_q(eta, 2.0)) - _q_direct(eta, 2.0))
             for eta in (0.5, 2.0, 8.0)]
    passed = (abs(p_mass - 1.0) < 1e-4 and abs(q_mass - 1.0) < 1e-4
              and max(diffs) < 1e-8)
    return _result(10, "P and Q integrate to 1; two Q routes agree to 1e-8",
                   passed, "mass err %.2g/%.2g, route diff %.2g"
                   % (p_mass - 1.0, q_mass - 1.0, max(diffs)), t0)


def _rectangle_setup():
    spectrum = seba.rectangle_levels(seba.DEFAULT_ALPHA, 3000)
    window = seba.seba_window(spectrum)
    return spectrum, window


def criterion_11(threads=1):
    """Normalized rectangle-spectrum sums are Cauchy at KS < 0.05."""
    t0 = time.perf_counter()
    spectrum, window = _rectangle_setup()
    emp = seba.seba_determinant_samples(spectrum, window, 100_000, seed=11)
    ks = stats.ks_distance(emp, densities.cauchy_cdf)
    passed = ks < 0.05
    return _result(11, "rectangle spectral sums are Cauchy (KS < 0.05)",
                   passed, "KS %.4f" % ks, t0)


def criterion_12(threads=1):
    """The coefficient-normalization constant lands within 5% of 9.75e5."""
    t0 = time.perf_counter()
    _, window = _rectangle_setup()
    rel = abs(window.c / 9.75e5 - 1.0)
    passed = rel < 0.05
    return _result(12, "constant c within 5% of 9.75e5", passed,
                   "c %.4g, rel err %.3f" % (window.c, rel), t0)


def criterion_13(threads=1):
    """Abel transform oracle: uniform Q on [1, 2] and evenness in r."""
    t0 = time.perf_counter()
    q = densities.DensityCurve(grid=np.array([1.0, 2.0]),
                               pdf=np.array([1.0, 1.0]), mass=1.0)
    r0 = float(densities.abel_value_distribution(q, 0.0))
    oracle = (2.0 / np.pi) * (np.sqrt(2.0) - 1.0)
    rs = np.array([0.1, 0.35, 0.7, 1.2])
    even = float(np.max(np.abs(densities.abel_value_distribution(q, rs)
                               - densities.abel_value_distribution(q, -rs))))
    passed = abs(r0 - oracle) < 1e-8 and even <= 1e-15
    return _result(13, "Abel oracle (2/pi)(sqrt 2 - 1) and evenness", passed,
                   "oracle err %.2g, even gap %.2g" % (r0 - oracle, even), t0)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
            criterion_11, criterion_12, criterion_13)


def run_all(numbers=None, threads=1, echo=print):
    """Run the requested criteria (default all), echoing one line each."""
    results = []
    for i, criterion in enumerate(CRITERIA, start=1):
        if numbers is not None and i not in numbers:
            continue
        result = criterion(threads=threads)
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results
