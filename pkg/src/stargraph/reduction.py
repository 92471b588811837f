"""Accurate reduction of k*L modulo pi for tangent evaluation at large k.

tan(k*L_j) is needed at wavenumbers up to k ~ 1e4..1e5.  Forming the
product in ordinary double precision and letting the libm reduce it
modulo pi loses ~4 digits there, which is enough to poison distribution
tests downstream.  Two classical fixes are combined here:

* the product k*L_j is formed as a double-double (Veltkamp/Dekker
  two-product), so the low word of the product enters the reduction;
* the nearest multiple of pi is subtracted in three Cody-Waite pieces
  PI_1 + PI_2 + PI_3 ~ pi (about 107 bits), the first two chosen with
  trailing zero bits so n*PI_1 and n*PI_2 are exact for n < 2**28.

The reduced angle r in [-pi/2, pi/2] then satisfies
|r - (k*L mod pi)| <~ 1 ulp, i.e. the tangent is evaluated at the exact
real product of the two stored floats.
"""

import numpy as np

# pi split into three pieces; PI_1 and PI_2 carry 28/29 trailing zero
# bits, so n*PI_1 and n*PI_2 are exact for n < 2**28.  The residual
# pi - (PI_1 + PI_2 + PI_3) is about -3e-33.
PI_1 = float.fromhex("0x1.921fb50000000p+1")    # 3.1415926218032837
PI_2 = float.fromhex("0x1.110b460000000p-25")   # 3.1786509424591713e-08
PI_3 = float.fromhex("0x1.1a62633145c07p-53")   # 1.2246467991473532e-16

_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


def two_prod(a, b):
    """Return (p, e) with p = fl(a*b) and p + e = a*b exactly.

    Dekker's product via Veltkamp splitting; valid as long as no
    intermediate overflows, which holds comfortably for k*L < 1e15.
    """
    p = a * b
    ah = a * _SPLIT
    ah = ah - (ah - a)
    al = a - ah
    bh = b * _SPLIT
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def reduce_mod_pi(a, b):
    """Reduced angle r in [-pi/2, pi/2] with tan(a*b) = tan(r).

    `a` and `b` are broadcast elementwise.  The result is accurate to
    about one ulp as long as round(a*b/pi) < 2**28 (k*L below ~8e8).

    The nearest-multiple choice can flip at half-integer boundaries of
    a*b/pi, in which case |r| slightly exceeds pi/2; tan is pi-periodic,
    so callers taking tan(r) are unaffected.
    """
    p, e = two_prod(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    n = np.rint(p * (1.0 / np.pi))
    w = p - n * PI_1          # exact: n*PI_1 is exact and Sterbenz applies
    t = n * PI_2              # exact for n < 2**28
    r = w - t
    err = (w - r) - t         # rounding error of the last subtraction
    return r + (err + (e - n * PI_3))
