"""Scalar numerics shared by the evaluators.

Gamma and Beta via a Lanczos log-gamma, the smooth cutoff used by every
smoothed sum, and Gauss-Legendre helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, PoleError

__all__ = [
    "gamma",
    "loggamma",
    "beta",
    "mb_kernel",
    "SmoothCutoff",
    "DEFAULT_CUTOFF",
    "phi_eval",
    "phi_mellin",
    "phi_mellin_continued",
    "gauss_legendre",
    "composite_rule",
]

_LANCZOS_G = 7.0
_LANCZOS_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_POLE_TOL = 1e-12


def _scalar_out(x, scalar: bool):
    return complex(x) if scalar else x


def _check_poles(z: np.ndarray) -> None:
    zr = np.round(z.real)
    bad = (zr <= 0) & (np.abs(z - zr) < _POLE_TOL)
    if np.any(bad):
        raise PoleError(f"Gamma pole at z={complex(z[bad].flat[0])}")


def _lanczos_right(z: np.ndarray) -> np.ndarray:
    # valid for Re(z) >= 0.5
    zm = z - 1.0
    acc = np.full(z.shape, _LANCZOS_P[0], dtype=complex)
    for i in range(1, len(_LANCZOS_P)):
        acc = acc + _LANCZOS_P[i] / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # log sin(pi z) up to 2*pi*i, without overflow for large |Im z|
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z.imag) <= 20.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    up = (~small) & (z.imag > 0)
    zu = z[up]
    out[up] = -1j * np.pi * zu + np.log1p(-np.exp(2j * np.pi * zu)) - np.log(-2j)
    dn = (~small) & (z.imag < 0)
    zd = z[dn]
    out[dn] = 1j * np.pi * zd + np.log1p(-np.exp(-2j * np.pi * zd)) - np.log(2j)
    return out


def loggamma(z):
    """A branch of log Gamma(z); exp() of it is Gamma(z).

    The imaginary part is not the principal branch on the left half plane,
    so only use the result through exponentials or differences.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(z)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    out[right] = _lanczos_right(z[right])
    if np.any(~right):
        zl = z[~right]
        out[~right] = math.log(math.pi) - _log_sin_pi(zl) - _lanczos_right(1.0 - zl)
    return _scalar_out(out[0], True) if scalar else out


def gamma(z):
    """Gamma function for complex (array) input."""
    lg = loggamma(z)
    return complex(np.exp(lg)) if np.ndim(lg) == 0 else np.exp(lg)


def beta(x, y):
    """Euler Beta B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), in log space."""
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    val = np.exp(loggamma(x) + loggamma(y) - loggamma(x + y))
    return _scalar_out(val, scalar)


def mb_kernel(z, s):
    """Gamma(z) Gamma(s - z) / Gamma(s) = B(z, s - z), the Mellin-Barnes weight."""
    return beta(z, np.asarray(s) - np.asarray(z))


# ---------------------------------------------------------------- cutoff


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    m = u > 0
    out[m] = np.exp(-1.0 / u[m])
    return out


@dataclass(frozen=True)
class SmoothCutoff:
    """phi = 1 on [0, plateau_end], 0 on [support_end, inf), exp-bump bridge between."""

    plateau_end: float = 2.0
    support_end: float = 3.0

    def __post_init__(self):
        if not (0 < self.plateau_end < self.support_end):
            raise DomainError("need 0 < plateau_end < support_end")

    @property
    def width(self) -> float:
        return self.support_end - self.plateau_end

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise DomainError("cutoff evaluated at negative argument")
        u = (x - self.plateau_end) / self.width
        a = _bump(1.0 - u)
        b = _bump(u)
        denom = np.where(a + b > 0, a + b, 1.0)
        out = np.where(x <= self.plateau_end, 1.0, np.where(x >= self.support_end, 0.0, a / denom))
        return float(out[0]) if scalar else out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.plateau_end) / self.width
        inside = (u > 0) & (u < 1)
        uc = np.where(inside, u, 0.5)
        a = _bump(1.0 - uc)
        b = _bump(uc)
        d = -a * b * (1.0 / (1.0 - uc) ** 2 + 1.0 / uc**2) / (a + b) ** 2
        return np.where(inside, d / self.width, 0.0)

    def bridge_rule(self, max_phase: float = 0.0):
        """Nodes, weights, phi and phi' on [plateau_end, support_end].

        max_phase bounds the total oscillation (radians) of whatever will be
        integrated against the rule; the panel count grows with it.
        """
        panels = max(16, int(math.ceil(max_phase / 6.0)))
        return _bridge_rule_cached(self.plateau_end, self.support_end, panels)


@lru_cache(maxsize=64)
def _bridge_rule_cached(a: float, b: float, panels: int):
    x, w = composite_rule(a, b, panels, 16)
    cut = SmoothCutoff(a, b)
    for arr in (x, w):
        arr.setflags(write=False)
    phi = cut(x)
    dphi = cut.derivative(x)
    phi.setflags(write=False)
    dphi.setflags(write=False)
    return x, w, phi, dphi


DEFAULT_CUTOFF = SmoothCutoff()


def phi_eval(cutoff: SmoothCutoff, x):
    return cutoff(x)


def phi_mellin(cutoff: SmoothCutoff, z: complex, epsabs: float = 1e-12) -> complex:
    """Mellin transform int_0^inf x^(z-1) phi(x) dx for Re(z) > 0.

    The plateau contributes a^z / z in closed form; the bridge goes to
    adaptive quadrature.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError("Mellin transform of the cutoff needs Re(z) > 0")
    a, b = cutoff.plateau_end, cutoff.support_end
    limit = 200 + int(abs(z.imag))
    val, _ = integrate.quad(
        lambda x: x ** (z - 1) * cutoff(x), a, b,
        complex_func=True, epsabs=epsabs, epsrel=1e-13, limit=limit,
    )
    return a**z / z + val


def phi_mellin_continued(cutoff: SmoothCutoff, w):
    """Meromorphic continuation of the Mellin transform, valid for w != 0.

    Uses Phi(w) = -(1/w) int v^w phi'(v) dv, which only touches the bridge.
    Vectorised over w.
    """
    scalar = np.ndim(w) == 0
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(w == 0):
        raise PoleError("Mellin transform of the cutoff has a pole at 0")
    phase = float(np.max(np.abs(w.imag))) * math.log(cutoff.support_end / cutoff.plateau_end)
    v, wt, _, dphi = cutoff.bridge_rule(phase)
    logv = np.log(v)
    vals = -(np.exp(np.outer(w, logv)) @ (wt * dphi)) / w
    return complex(vals[0]) if scalar else vals


# ------------------------------------------------------------ quadrature


@lru_cache(maxsize=32)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(a: float, b: float, panels: int, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    nodes = ((lo + hi) / 2 + (hi - lo) / 2 * x).ravel()
    weights = ((hi - lo) / 2 * w).ravel()
    return nodes, weights
