"""Independent reference values used by several test modules."""
import math


def _chord_integral(y, r):
    # antiderivative of 2 sqrt(r^2 - y^2)
    y = max(-r, min(r, y))
    return y * math.sqrt(max(r * r - y * y, 0.0)) + r * r * math.asin(y / r)


def exp_strip_area(r, theta1, alpha):
    """Relative area of ``{|z| < r : Im z mod 2 pi in (theta1, theta1 + alpha)}``.

    For ``f = e^z`` the argument equals ``Im z``, so this is ``A(r, S, e^z)``.
    """
    total = 0.0
    k_lo = math.floor((-r - theta1 - alpha) / (2 * math.pi)) - 1
    k_hi = math.ceil((r - theta1) / (2 * math.pi)) + 1
    for k in range(k_lo, k_hi + 1):
        a = theta1 + 2 * math.pi * k
        b = a + alpha
        if b <= -r or a >= r:
            continue
        total += _chord_integral(b, r) - _chord_integral(a, r)
    return total / (math.pi * r * r)
