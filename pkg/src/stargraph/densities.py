"""Limiting value distributions of star-graph spectra.

Three laws appear in the v -> infinity regime, all driven by the even
profile m(xi) = (2/sqrt(pi)) e^{-xi^2/4} + xi erf(xi/2):

  * Cauchy for the normalized determinant Z/v;
  * P(y)   for the normalized derivative Z'(k_n)/v^2,
        P(y) = (sqrt(Lbar)/(4 pi y^{3/2})) Int exp(-xi^2/4
                 - Lbar m^2/(4y)) m dxi            (y > 0);
  * Q(eta) for the scaled squared amplitudes v^2 A_i,
        Q(eta) = (1/(pi^2 eta)) Int exp(-xi^2/4) D(a) dxi,
        a(xi) = sqrt(Lbar eta / 8) m(xi),
    where D is the Dawson function.  Q has an exact eta^{-3/2} tail
    with coefficient b = (sqrt(2)/(sqrt(Lbar) pi^2))
    Int exp(-xi^2/4)/m dxi ~ 0.348/sqrt(Lbar), and an eta^{-1/2}
    blow-up at the origin with coefficient 2 sqrt(Lbar)/pi^2.

The Dawson form of Q is the cancellation-free rewrite of the complex
error-function integral; `_q_direct` keeps the naive complex form
around purely as an independent cross-check.  An Abel-type transform
of Q gives the density R(r) of eigenfunction values themselves.

Tabulated curves carry optional power-law head/tail models so that
total mass and CDFs account for the slowly-decaying parts outside the
grid.
"""

import dataclasses
import json
import math

import numpy as np

from .specfun import dawson, default_rule, erf, gauss_weighted_integral

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclasses.dataclass(frozen=True)
class DensityCurve:
    """A tabulated density with optional power-law continuations.

    `tail` and `head` are (coefficient, exponent) pairs modelling
    pdf ~ coefficient * x**exponent beyond the last grid point and
    below the first one; `mass` is the total integral including both
    continuations.  The head exponent must be > -1 so the origin mass
    is finite.
    """
    grid: np.ndarray
    pdf: np.ndarray
    mass: float
    tail: tuple = None
    head: tuple = None
    l_bar: float = None

    def __post_init__(self):
        grid = np.ascontiguousarray(self.grid, dtype=np.float64)
        pdf = np.ascontiguousarray(self.pdf, dtype=np.float64)
        if grid.ndim != 1 or grid.shape != pdf.shape:
            raise ValueError("grid and pdf must be matching 1-d arrays")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly ascending")
        if np.any(pdf < 0.0):
            raise ValueError("pdf must be nonnegative")
        if self.head is not None and self.head[1] <= -1.0:
            raise ValueError("head exponent must be > -1")
        grid.setflags(write=False)
        pdf.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "pdf", pdf)

    def head_mass(self):
        """Integral of the head model over (0, grid[0]]."""
        if self.head is None:
            return 0.0
        coef, expo = self.head
        return coef * self.grid[0] ** (expo + 1.0) / (expo + 1.0)

    def tail_mass(self):
        """Integral of the tail model over [grid[-1], infinity)."""
        if self.tail is None:
            return 0.0
        coef, expo = self.tail
        if expo >= -1.0:
            raise ValueError("tail exponent must be < -1 for finite mass")
        return -coef * self.grid[-1] ** (expo + 1.0) / (expo + 1.0)

    def cdf(self):
        """A vectorized CDF callable with range exactly [0, 1].

        Grid part by cumulative trapezoid, continued analytically with
        the head/tail models, then normalized by the total so the KS
        machinery sees a genuine distribution function.
        """
        grid = self.grid
        steps = np.diff(grid) * 0.5 * (self.pdf[1:] + self.pdf[:-1])
        cum = self.head_mass() + np.concatenate(([0.0], np.cumsum(steps)))
        total = cum[-1] + self.tail_mass()
        head = self.head
        tail = self.tail
        g_lo = grid[0]
        g_hi = grid[-1]
        cum_lo = cum[0]
        cum_hi = cum[-1]

        def _cdf(x):
            x = np.asarray(x, dtype=np.float64)
            out = np.interp(x, grid, cum)
            below = x < g_lo
            if below.any():
                if head is None:
                    out = np.where(below, 0.0, out)
                else:
                    coef, expo = head
                    xb = np.clip(x, 0.0, None)
                    part = coef * xb ** (expo + 1.0) / (expo + 1.0)
                    out = np.where(below, part, out)
            above = x > g_hi
            if above.any() and tail is not None:
                coef, expo = tail
                xa = np.where(above, x, g_hi)
                part = cum_hi + coef * (xa ** (expo + 1.0) - g_hi ** (expo + 1.0)) \
                    / (expo + 1.0)
                out = np.where(above, part, out)
            out = out / total
            return out if out.ndim else float(out)

        return _cdf


def m_profile(xi):
    """m(xi) = (2/sqrt(pi)) e^{-xi^2/4} + xi erf(xi/2); even, >= 2/sqrt(pi)."""
    xi = np.asarray(xi, dtype=np.float64)
    val = _TWO_OVER_SQRT_PI * np.exp(-0.25 * xi * xi) + xi * erf(0.5 * xi)
    return float(val) if val.ndim == 0 else val


def cauchy_cdf(y):
    """Standard Cauchy CDF 1/2 + arctan(y)/pi."""
    y = np.asarray(y, dtype=np.float64)
    val = 0.5 + np.arctan(y) / np.pi
    return float(val) if val.ndim == 0 else val


def cauchy_pdf(y):
    """Standard Cauchy density 1/(pi (1 + y^2))."""
    y = np.asarray(y, dtype=np.float64)
    val = 1.0 / (np.pi * (1.0 + y * y))
    return float(val) if val.ndim == 0 else val


def _p_kernel(y_col, l_bar, nodes):
    m = m_profile(nodes)
    expo = -0.25 * nodes * nodes - 0.25 * l_bar * m * m / y_col
    return np.exp(expo) * m


def limit_p(y, l_bar):
    """Limit density P(y, Lbar) of the normalized derivative; 0 for y <= 0."""
    if not l_bar > 0.0:
        raise ValueError("l_bar must be positive")
    y = np.asarray(y, dtype=np.float64)
    scalar = y.ndim == 0
    y2 = np.atleast_1d(y)
    out = np.zeros_like(y2)
    pos = y2 > 0.0
    if pos.any():
        rule = default_rule()
        yp = y2[pos]
        vals = _p_kernel(yp[:, None], l_bar, rule.nodes[None, :]) @ rule.weights
        out[pos] = math.sqrt(l_bar) / (4.0 * np.pi) * vals / yp ** 1.5
    return float(out[0]) if scalar else out


def limit_q(eta, l_bar):
    """Limit density Q(eta, Lbar) of scaled amplitudes; 0 for eta <= 0.

    Evaluated in the Dawson form, which stays cancellation-free as the
    argument a = sqrt(Lbar eta/8) m(xi) grows.
    """
    if not l_bar > 0.0:
        raise ValueError("l_bar must be positive")
    eta = np.asarray(eta, dtype=np.float64)
    scalar = eta.ndim == 0
    e2 = np.atleast_1d(eta)
    out = np.zeros_like(e2)
    pos = e2 > 0.0
    if pos.any():
        rule = default_rule()
        m = m_profile(rule.nodes)
        gauss = np.exp(-0.25 * rule.nodes * rule.nodes)
        ep = e2[pos]
        scale = np.sqrt(l_bar * ep / 8.0)
        vals = (gauss * dawson(scale[:, None] * m[None, :])) @ rule.weights
        out[pos] = vals / (np.pi * np.pi * ep)
    return float(out[0]) if scalar else out


def _erfi_series(x):
    """erfi by its everywhere-convergent Maclaurin series (cross-check only).

    Safe for |x| up to ~17 in double precision; the largest partial
    terms stay below the overflow threshold there.
    """
    x = np.asarray(x, dtype=np.float64)
    x2 = x * x
    term = np.array(x, copy=True)
    total = np.array(x, copy=True)
    for n in range(1, 400):
        term = term * x2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if np.all(np.abs(contrib) <= 1e-18 * np.abs(total)):
            break
    return _TWO_OVER_SQRT_PI * total


def _q_direct(eta, l_bar):
    """Q(eta) straight from the complex error-function integral.

    Uses Im erfc(-i a) = e^{-a^2} erfi(a) with erfi summed by series;
    this is the cancellation-prone route and exists only to validate
    the Dawson form.
    """
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    rule = default_rule()
    m = m_profile(rule.nodes)
    a = np.sqrt(l_bar * eta / 8.0) * m
    integrand = np.exp(-0.25 * rule.nodes ** 2 - a * a) * _erfi_series(a)
    val = integrand @ rule.weights
    return val / (2.0 * math.pi ** 1.5 * eta)


def q_tail_coefficient(l_bar):
    """Tail coefficient b(Lbar): Q(eta) ~ b eta^{-3/2}; roughly 0.348/sqrt(Lbar)."""
    if not l_bar > 0.0:
        raise ValueError("l_bar must be positive")
    integral = gauss_weighted_integral(
        lambda xi: np.exp(-0.25 * xi * xi) / m_profile(xi))
    return math.sqrt(2.0 / l_bar) / math.pi ** 2 * integral


def q_head_coefficient(l_bar):
    """Origin coefficient: Q(eta) ~ (2 sqrt(Lbar)/pi^2) eta^{-1/2} as eta -> 0."""
    if not l_bar > 0.0:
        raise ValueError("l_bar must be positive")
    return 2.0 * math.sqrt(l_bar) / math.pi ** 2


def p_tail_coefficient(l_bar):
    """Tail coefficient of P: P(y) ~ sqrt(2 Lbar)/pi * y^{-3/2}."""
    if not l_bar > 0.0:
        raise ValueError("l_bar must be positive")
    return math.sqrt(2.0 * l_bar) / math.pi


def _chunked(func, x, chunk=256):
    parts = [func(x[i:i + chunk]) for i in range(0, x.size, chunk)]
    return np.concatenate(parts)


def p_curve(l_bar, grid_min=1e-3, grid_max=1e3, n_points=4001):
    """Tabulate P on a log grid with its analytic y^{-3/2} tail.

    Below grid_min the density is superexponentially small (the
    exponent -Lbar m^2/(4y) with m >= 2/sqrt(pi) crushes it), so no
    head model is attached.
    """
    grid = np.geomspace(grid_min, grid_max, n_points)
    pdf = _chunked(lambda y: limit_p(y, l_bar), grid)
    tail = (p_tail_coefficient(l_bar), -1.5)
    mass = float(np.trapezoid(pdf, grid))
    mass += 2.0 * tail[0] / math.sqrt(grid_max)
    return DensityCurve(grid, pdf, mass, tail=tail, l_bar=l_bar)


def q_curve(l_bar, grid_min=1e-6, grid_max=200.0, n_points=4001):
    """Tabulate Q on a log grid with eta^{-1/2} head and eta^{-3/2} tail.

    The algebraic tail holds ~3% of the mass beyond eta = 200; the
    analytic continuation 2 b / sqrt(eta_max) recovers it, keeping the
    reported mass within 1e-4 of 1.
    """
    grid = np.geomspace(grid_min, grid_max, n_points)
    pdf = _chunked(lambda e: limit_q(e, l_bar), grid)
    head = (q_head_coefficient(l_bar), -0.5)
    tail = (q_tail_coefficient(l_bar), -1.5)
    curve = DensityCurve(grid, pdf, 0.0, tail=tail, head=head, l_bar=l_bar)
    mass = curve.head_mass() + float(np.trapezoid(pdf, grid)) + curve.tail_mass()
    return dataclasses.replace(curve, mass=mass)


def abel_value_distribution(q, r):
    """Eigenfunction value density R(r) = (1/pi) Int_{r^2}^inf Q(s) ds/sqrt(s-r^2).

    The grid part integrates the piecewise-linear interpolant of Q
    exactly against the square-root kernel (the singularity at s = r^2
    is handled in closed form per segment), and the head/tail models
    contribute their own closed forms.  Even in r by construction.
    R(0) diverges logarithmically when Q carries an s^{-1/2} head;
    that is genuine, not numerical.
    """
    r = np.asarray(r, dtype=np.float64)
    scalar = r.ndim == 0
    r2 = np.atleast_1d(r).ravel() ** 2

    grid = q.grid
    pdf = q.pdf
    s0 = grid[:-1][None, :]
    s1 = grid[1:][None, :]
    p0 = pdf[:-1][None, :]
    slope = ((pdf[1:] - pdf[:-1]) / (grid[1:] - grid[:-1]))[None, :]
    c = r2[:, None]

    # integral over [max(s0, r^2), s1] of (p0 + slope (s - s0)) / sqrt(s - r^2)
    t1 = s1 - c
    t0 = np.clip(s0 - c, 0.0, None)
    live = t1 > 0.0
    t1 = np.clip(t1, 0.0, None)
    a_const = p0 + slope * (c - s0)
    st0 = np.sqrt(t0)
    st1 = np.sqrt(t1)
    seg = 2.0 * a_const * (st1 - st0) + (2.0 / 3.0) * slope * (t1 * st1 - t0 * st0)
    total = np.where(live, seg, 0.0).sum(axis=1)

    if q.head is not None:
        coef, expo = q.head
        if abs(expo + 0.5) > 1e-12:
            raise ValueError("head closed form implemented for exponent -1/2 only")
        g0 = grid[0]
        inside = r2 < g0
        if inside.any():
            rr = np.sqrt(r2[inside])
            gap = np.sqrt(np.clip(g0 - r2[inside], 0.0, None))
            with np.errstate(divide="ignore"):
                head_part = 2.0 * coef * np.log((math.sqrt(g0) + gap)
                                                / np.where(rr > 0.0, rr, 1.0))
                head_part = np.where(rr > 0.0, head_part, np.inf)
            total[inside] += head_part

    if q.tail is not None:
        coef, expo = q.tail
        if abs(expo + 1.5) > 1e-12:
            raise ValueError("tail closed form implemented for exponent -3/2 only")
        g1 = grid[-1]
        lo = np.maximum(r2, g1)
        frac = np.clip(r2 / lo, 0.0, 1.0)
        total += coef * 2.0 / (lo * (1.0 + np.sqrt(1.0 - frac)))

    out = total / np.pi
    return float(out[0]) if scalar else out.reshape(np.atleast_1d(r).shape)


def write_curve_csv(curve, path):
    """CSV `x,pdf` plus a JSON sidecar {mass, tail_coefficient, tail_exponent, l_bar}."""
    rows = ["x,pdf"]
    for x, p in zip(curve.grid, curve.pdf):
        rows.append("%.17g,%.17g" % (x, p))
    path = str(path)
    with open(path, "w") as handle:
        handle.write("\n".join(rows) + "\n")
    sidecar = {
        "mass": curve.mass,
        "tail_coefficient": None if curve.tail is None else curve.tail[0],
        "tail_exponent": None if curve.tail is None else curve.tail[1],
        "l_bar": curve.l_bar,
    }
    side_path = path[:-4] + ".json" if path.endswith(".csv") else path + ".json"
    with open(side_path, "w") as handle:
        json.dump(sidecar, handle, indent=2, sort_keys=True)
        handle.write("\n")
