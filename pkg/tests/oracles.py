"""Independent reference computations used by the tests.

Nothing here calls the package kernels: values come from direct complex
arithmetic on coefficient lists or from closed forms.
"""
import numpy as np


def direct_value(num, den, z):
    return np.polyval(num[::-1], z) / np.polyval(den[::-1], z)


def direct_norm(num, den, z):
    """``|f'(z)| (1 + |z|^2) / (1 + |f(z)|^2)`` by the quotient rule (finite z, f(z) finite)."""
    p = np.polyval(num[::-1], z)
    q = np.polyval(den[::-1], z)
    dp = np.polyval(np.polyder(num[::-1]), z)
    dq = np.polyval(np.polyder(den[::-1]), z)
    fz = p / q
    dfz = (dp * q - p * dq) / q ** 2
    return abs(dfz) * (1 + abs(z) ** 2) / (1 + abs(fz) ** 2)


def power_norm_max(d, n=2_000_001):
    """Dense 1-D scan of ``d r^(d-1) (1 + r^2) / (1 + r^(2d))`` over ``r`` in ``[0, 1]``.

    The function is invariant under ``r -> 1/r``, so ``[0, 1]`` suffices.
    """
    r = np.linspace(0.0, 1.0, n)
    return float(np.max(d * r ** (d - 1) * (1 + r ** 2) / (1 + r ** (2 * d))))


def chordal(z, w):
    return abs(z - w) / np.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))

