"""Real error functions, Dawson's integral, and Gaussian-weighted quadrature.

Everything here is self-contained (no library special functions) and
vectorized over numpy arrays:

  erf   -- Maclaurin series for |x| < 0.5, else 1 - erfc(x).
           Absolute error below 1e-15, odd symmetry exact.
  erfc  -- Legendre continued fraction (modified Lentz) for x >= 0.5,
           1 - erf for smaller x, reflection for x < 0.  Relative error
           below 1e-14 throughout the representable range; the
           exp(-x^2) factor is formed with a two-product split of x^2
           so no accuracy is lost at large x.
  dawson -- Maclaurin series for |x| <= 1, Rybicki's sampling formula
           with spacing h = 0.25 for 1 < |x| <= 10, 12-term asymptotic
           series beyond.  Relative error below 1e-13 (measured ~4e-16).
  gauss_weighted_integral -- composite trapezoid on [-X, X] for
           integrands decaying like exp(-xi^2/4); with the default
           X = 12 the truncation error is ~exp(-36) and the trapezoid
           converges superalgebraically for smooth integrands.
"""

import dataclasses

import numpy as np

from .errors import NonFiniteIntegrandError
from .reduction import two_prod

_SQRT_PI = 1.7724538509055159    # sqrt(pi)
_TWO_OVER_SQRT_PI = 1.1283791670955126

_CF_MAX_ITER = 1200              # Lentz cap; x = 0.5 needs ~830 iterations


def _exp_neg_square(x):
    """exp(-x*x) with the squaring done in double-double.

    fl(x*x) alone already costs ~1e-14 relative at x ~ 20 after
    exponentiation; carrying the low word of the square keeps the
    result to ~1 ulp.
    """
    s, t = two_prod(x, x)
    return np.exp(-s) * (1.0 - t)


def _erf_series(x):
    """Maclaurin erf for |x| < 0.5 (13 terms reach ~1e-17)."""
    x2 = x * x
    term = np.array(x, dtype=np.float64, copy=True)
    total = np.zeros_like(term)
    for n in range(14):
        total = total + term / (2 * n + 1)
        term = term * (-x2) / (n + 1)
    return _TWO_OVER_SQRT_PI * total


def _erfc_cf(x):
    """Continued fraction for erfc(x)*sqrt(pi)*exp(x^2), x >= 0.5.

    K(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))) evaluated with
    the modified Lentz recurrence, all lanes in parallel.
    """
    tiny = 1e-300
    f = np.full_like(x, tiny)
    c = np.array(f, copy=True)
    d = np.zeros_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for it in range(1, _CF_MAX_ITER + 1):
        a = 1.0 if it == 1 else (it - 1) / 2.0
        d = x + a * d
        d = np.where(d == 0.0, tiny, d)
        c = x + a / c
        c = np.where(c == 0.0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < 1e-17
        if done.all():
            break
    return f


def erf(x):
    """Error function, odd, accurate to ~1e-16 absolute.

    Scalars in give scalars out; arrays are handled elementwise.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    ax = np.abs(x_arr)
    out = np.empty_like(x_arr)

    small = ax < 0.5
    if small.any():
        out[small] = _erf_series(x_arr[small])
    if (~small).any():
        a = ax[~small]
        # erfc(a) = exp(-a^2)/sqrt(pi) * K(a);  erf(|x|) = 1 - erfc(|x|)
        out[~small] = np.copysign(1.0 - _exp_neg_square(a) * _erfc_cf(a) / _SQRT_PI,
                                  x_arr[~small])
    return float(out[0]) if scalar else out


def erfc(x):
    """Complementary error function, relative error below 1e-14.

    Computed directly (not by 1 - erf) for x >= 0.5 so the result keeps
    full relative accuracy far into the tail; for x < 0 the reflection
    erfc(x) = 2 - erfc(-x) is used.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.empty_like(x_arr)

    neg = x_arr < 0.0
    mid = (~neg) & (x_arr < 0.5)
    big = x_arr >= 0.5
    if mid.any():
        out[mid] = 1.0 - _erf_series(x_arr[mid])
    if big.any():
        a = x_arr[big]
        out[big] = _exp_neg_square(a) * _erfc_cf(a) / _SQRT_PI
    if neg.any():
        a = -x_arr[neg]
        upper = np.where(a < 0.5, 1.0 - _erf_series(a),
                         _exp_neg_square(a) * _erfc_cf(a) / _SQRT_PI)
        out[neg] = 2.0 - upper
    return float(out[0]) if scalar else out


# (2n-1)!! for the asymptotic Dawson series
_DOUBLE_FACTORIAL = np.array([1.0, 1.0, 3.0, 15.0, 105.0, 945.0, 10395.0,
                              135135.0, 2027025.0, 34459425.0, 654729075.0,
                              13749310575.0])

_RYBICKI_H = 0.25
# odd-offset window: terms with |x - n h| > 7.25 are below e^-52
_RYBICKI_OFFSETS = np.arange(-29, 30, 2)


def _dawson_series(x):
    x2 = 2.0 * x * x
    term = np.array(x, dtype=np.float64, copy=True)
    total = np.zeros_like(term)
    for n in range(22):
        total = total + term
        term = term * (-x2) / (2 * n + 3)
    return total


def _dawson_rybicki(x):
    """Sampling-theorem form, h = 0.25: D = (1/sqrt(pi)) sum_odd e^{-(x-nh)^2}/n.

    The discretization error is ~exp(-(pi/(2h))^2) ~ 7e-18; 29 odd
    terms around x/h cover the Gaussian window.
    """
    n0 = 2.0 * np.rint(x / (2.0 * _RYBICKI_H))
    n = n0[..., None] + _RYBICKI_OFFSETS             # odd integers near x/h
    d = x[..., None] - n * _RYBICKI_H
    return np.sum(np.exp(-d * d) / n, axis=-1) / _SQRT_PI


def _dawson_asymptotic(x):
    inv = 1.0 / (2.0 * x * x)
    acc = np.zeros_like(x)
    for c in _DOUBLE_FACTORIAL[::-1]:
        acc = c + acc * inv
    return acc / (2.0 * x)


def dawson(x):
    """Dawson's integral D(x) = exp(-x^2) * integral_0^x exp(t^2) dt.

    Odd; relative error ~1e-15 over the whole real line.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    ax = np.abs(x_arr)
    out = np.empty_like(x_arr)

    small = ax <= 1.0
    mid = (ax > 1.0) & (ax <= 10.0)
    big = ax > 10.0
    if small.any():
        out[small] = _dawson_series(x_arr[small])
    if mid.any():
        out[mid] = np.copysign(_dawson_rybicki(ax[mid]), x_arr[mid])
    if big.any():
        out[big] = np.copysign(_dawson_asymptotic(ax[big]), x_arr[big])
    return float(out[0]) if scalar else out


@dataclasses.dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [-half_width, half_width].

    The composite trapezoid family: positive weights summing to the
    interval length, equally spaced nodes.  Intended for integrands
    bounded by C * exp(-xi^2/4), for which half_width = 12 pushes the
    truncated tails below C * 3e-16.
    """
    nodes: np.ndarray
    weights: np.ndarray
    half_width: float

    @classmethod
    def trapezoid(cls, n_nodes=4001, half_width=12.0):
        if n_nodes < 2:
            raise ValueError("need at least two nodes")
        nodes = np.linspace(-half_width, half_width, n_nodes)
        h = 2.0 * half_width / (n_nodes - 1)
        weights = np.full(n_nodes, h)
        weights[0] = weights[-1] = 0.5 * h
        nodes.setflags(write=False)
        weights.setflags(write=False)
        return cls(nodes, weights, half_width)


_DEFAULT_RULE = QuadratureRule.trapezoid()


def default_rule():
    """The shared 4001-node trapezoid rule on [-12, 12]."""
    return _DEFAULT_RULE


def gauss_weighted_integral(f, rule=None):
    """Integrate f over the real line, assuming exp(-xi^2/4)-type decay.

    f is called once with the node array and must return values of the
    same shape; a non-finite value aborts with the offending node named.
    """
    rule = rule or _DEFAULT_RULE
    values = np.asarray(f(rule.nodes), dtype=np.float64)
    if values.shape != rule.nodes.shape:
        raise ValueError("integrand returned shape %r for %d nodes"
                         % (values.shape, rule.nodes.size))
    finite = np.isfinite(values)
    if not finite.all():
        bad = rule.nodes[~finite][0]
        raise NonFiniteIntegrandError("integrand is not finite at xi = %.17g" % bad)
    return float(values @ rule.weights)
