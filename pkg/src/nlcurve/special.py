"""Incomplete beta function and the trigonometric power integrals built on it.

The unregularised incomplete beta

    beta_x(a, b) = int_0^x u**(a-1) (1-u)**(b-1) du

is evaluated with the classical continued fraction (modified Lentz), using
the reflection beta_x(a, b) = B(a, b) - beta_{1-x}(b, a) on the slowly
converging side.  Everything here is vectorised over numpy arrays; the
scalar entry points are thin wrappers.
"""

import math

import numpy as np

from .errors import DomainError

_TINY = 1e-300
_CF_EPS = 1e-15
_CF_MAX_ITER = 500


def _check_sigma(sigma):
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"sigma must lie in (0, 1), got {sigma!r}")


def complete_beta(a, b):
    """B(a, b) from log-gamma."""
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def _betacf(a, b, x):
    """Continued fraction for I_x(a, b) without the x**a (1-x)**b / a prefactor."""
    x = np.asarray(x, dtype=float)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        done |= np.abs(delta - 1.0) < _CF_EPS
        if done.all():
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def incomplete_beta_array(x, a, b):
    """Vectorised beta_x(a, b) for an array of x in [0, 1] and scalar a, b > 0."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta parameters must be positive, got a={a!r}, b={b!r}")
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("incomplete beta argument must lie in [0, 1]")
    out = np.zeros_like(x)
    full = complete_beta(a, b)
    out[x == 1.0] = full

    interior = (x > 0.0) & (x < 1.0)
    direct = interior & (x < (a + 1.0) / (a + b + 2.0))
    swap = interior & ~direct
    if np.any(direct):
        xd = x[direct]
        front = np.exp(a * np.log(xd) + b * np.log1p(-xd)) / a
        out[direct] = front * _betacf(a, b, xd)
    if np.any(swap):
        xs = x[swap]
        front = np.exp(b * np.log1p(-xs) + a * np.log(xs)) / b
        out[swap] = full - front * _betacf(b, a, 1.0 - xs)
    return out


def incomplete_beta(z, a, b):
    """Unregularised incomplete beta function beta_z(a, b).

    Parameters
    ----------
    z : float
        Upper limit, 0 <= z <= 1.
    a, b : float
        Positive shape parameters.

    Raises
    ------
    DomainError
        If ``z`` is outside [0, 1] or a parameter is not positive.
    """
    return float(incomplete_beta_array(np.array([z], dtype=float), a, b)[0])


def psi_sigma_array(z, sigma):
    """Vectorised Psi_sigma(z) = sgn(z)/2 * beta_{z^2}(1/2, (1+sigma)/2), |z| <= 1."""
    _check_sigma(sigma)
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) > 1.0):
        raise DomainError("psi_sigma argument must satisfy |z| <= 1")
    half = 0.5 * incomplete_beta_array(z * z, 0.5, 0.5 * (1.0 + sigma))
    # sign applied by copysign so that psi(-z) == -psi(z) bit for bit
    return np.where(z == 0.0, 0.0, np.copysign(half, z))


def psi_sigma(z, sigma):
    """Odd, increasing helper Psi_sigma on [-1, 1] used by the segment formula."""
    return float(psi_sigma_array(np.array([z], dtype=float), sigma)[0])


def integral_sin_pow(z, sigma):
    """int_{pi/2}^{z} sin(t)**sigma dt for z in [0, pi], as -Psi_sigma(cos z)."""
    _check_sigma(sigma)
    if not (0.0 <= z <= math.pi):
        raise DomainError(f"integral_sin_pow needs z in [0, pi], got {z!r}")
    return -psi_sigma(math.cos(z), sigma)


def integral_cos_pow(z, sigma):
    """int_0^{z} cos(t)**sigma dt for z in [-pi/2, pi/2], as Psi_sigma(sin z)."""
    _check_sigma(sigma)
    if not (-0.5 * math.pi <= z <= 0.5 * math.pi):
        raise DomainError(f"integral_cos_pow needs z in [-pi/2, pi/2], got {z!r}")
    return psi_sigma(math.sin(z), sigma)
