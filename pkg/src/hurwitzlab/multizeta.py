"""Multiple Hurwitz zeta evaluators.

zeta_n(s; alpha) = sum over 0 <= k_1 < ... < k_n of prod_j (k_j + alpha_j)^(-s_j).

Plain truncation, the gap-smoothed truncation, a windowed evaluator built on
the smoothed sum, a Mellin-Barnes recursion and the equal-parameter power-sum
identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import signal

from .errors import (
    ArityError,
    ContourError,
    ConvergenceError,
    CostError,
    DomainError,
    RangeError,
    SignError,
)
from .hurwitz import (
    HurwitzParam,
    _bernoulli_coeffs,
    as_param,
    em_tail,
    gap_completion,
    hurwitz_zeta,
)
from .numcore import DEFAULT_CUTOFF, SmoothCutoff, gauss_legendre, loggamma

MAX_ARITY = 8

# (A, B) pair for the raw smoothed-sum error bound B * T^-A. B is the largest
# observed |raw - completed| * T^2 at Re = 1.5 (about 42, T in 50..400,
# Im in [T^0.3, T]) rounded up to a power of ten; see notebooks/calibrate_bound.py.
DEFAULT_BOUND_A = 2.0
DEFAULT_BOUND_B = 1.0e2

_T_FLOOR = 64.0
_EPS = np.finfo(float).eps


def as_point(s: Sequence[complex]) -> tuple[complex, ...]:
    pt = tuple(complex(z) for z in s)
    if not 1 <= len(pt) <= MAX_ARITY:
        raise ArityError(f"arity must be in 1..{MAX_ARITY}, got {len(pt)}")
    if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in pt):
        raise DomainError("non-finite coordinate")
    return pt


def as_params(alpha, n: int | None = None) -> tuple[HurwitzParam, ...]:
    if isinstance(alpha, (int, float, Fraction, HurwitzParam, str)):
        alpha = [alpha] * (n or 1)
    params = tuple(as_param(a) for a in alpha)
    if n is not None and len(params) != n:
        raise ArityError(f"expected {n} parameters, got {len(params)}")
    return params


def _powers(s: complex, a: float, count: int) -> np.ndarray:
    return np.exp(-s * np.log(np.arange(count) + a))


@dataclass(frozen=True)
class CompactBox:
    """Product of rectangles [sigma_lo, sigma_hi] x [t_lo, t_hi], one per coordinate.

    grid is the number of sample points per real axis, so each coordinate
    carries grid**2 points.
    """

    sigma: tuple[tuple[float, float], ...]
    t: tuple[tuple[float, float], ...]
    grid: int = 9

    def __post_init__(self):
        if len(self.sigma) != len(self.t) or not self.sigma:
            raise ArityError("sigma and t ranges must have equal, positive length")
        if self.grid < 2:
            raise DomainError("grid needs at least 2 points per axis")
        for lo, hi in self.sigma:
            if not lo < hi:
                raise DomainError("empty sigma range")
        for lo, hi in self.t:
            if not lo <= hi:
                raise DomainError("empty t range")

    @classmethod
    def symmetric(cls, sigma: tuple[float, float], R: float, n: int = 1, grid: int = 9) -> "CompactBox":
        return cls((tuple(sigma),) * n, ((-R, R),) * n, grid)

    @classmethod
    def square(cls, center: complex, half_width: float, n: int = 1, grid: int = 9) -> "CompactBox":
        c = complex(center)
        sig = (c.real - half_width, c.real + half_width)
        tt = (c.imag - half_width, c.imag + half_width)
        return cls((sig,) * n, (tt,) * n, grid)

    @property
    def arity(self) -> int:
        return len(self.sigma)

    def in_strip(self) -> bool:
        return all(0.5 < lo < hi < 1.0 for lo, hi in self.sigma)

    def axis_points(self, j: int) -> np.ndarray:
        (a, b), (c, d) = self.sigma[j], self.t[j]
        x = np.linspace(a, b, self.grid)
        y = np.linspace(c, d, self.grid)
        return (x[:, None] + 1j * y[None, :]).ravel()

    def points(self) -> np.ndarray:
        """All grid points, shape (grid^(2n), n)."""
        axes = [self.axis_points(j) for j in range(self.arity)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def abs_range(self, j: int) -> tuple[float, float]:
        """Exact min and max of |s| over rectangle j."""
        (a, b), (c, d) = self.sigma[j], self.t[j]
        x = 0.0 if a <= 0 <= b else min(abs(a), abs(b))
        y = 0.0 if c <= 0 <= d else min(abs(c), abs(d))
        far = max(abs(complex(u, v)) for u in (a, b) for v in (c, d))
        return math.hypot(x, y), far

    def to_dict(self) -> dict:
        return {"sigma": [list(r) for r in self.sigma], "t": [list(r) for r in self.t], "grid": self.grid}


# ------------------------------------------------------------ truncation


def zeta_trunc(s, alpha, N: int) -> complex:
    """Sum over 0 <= k_1 < ... < k_n <= N, by iterated suffix sums (O(nN))."""
    s = as_point(s)
    n = len(s)
    a = as_params(alpha, n)
    if N < 0:
        raise DomainError("N must be non-negative")
    w = _powers(s[-1], a[-1].alpha, N + 1)
    for j in range(n - 2, -1, -1):
        tail = np.cumsum(w[::-1])[::-1]
        # strict order: k_j < k_{j+1}, so drop the diagonal term
        after = np.append(tail[1:], 0.0)
        w = _powers(s[j], a[j].alpha, N + 1) * after
    return complex(w.sum())


def zeta_diag_powersum(s: complex, alpha, n: int, N: int | None) -> complex:
    """Equal-parameter diagonal via power sums S_m = sum_{k<=N} (k+alpha)^(-ms).

    N=None uses S_m = zeta(ms, alpha), i.e. the full (continued) function.
    """
    if n not in (2, 3):
        raise ArityError("power-sum identity implemented for n = 2, 3")
    s = complex(s)
    a = float(as_param(alpha))
    if N is None:
        S = [hurwitz_zeta(m * s, a) for m in range(1, n + 1)]
    else:
        logk = np.log(np.arange(N + 1) + a)
        S = [complex(np.exp(-m * s * logk).sum()) for m in range(1, n + 1)]
    if n == 2:
        return (S[0] ** 2 - S[1]) / 2
    return (S[0] ** 3 - 3 * S[0] * S[1] + 2 * S[2]) / 6


# ------------------------------------------------------------ smoothing


def _gap_weights(T: float, cutoff: SmoothCutoff) -> np.ndarray:
    g = np.arange(int(math.ceil(cutoff.support_end * T)) + 1)
    w = cutoff(g / T)
    return w[: np.flatnonzero(w > 0)[-1] + 1]


def zeta_smoothed(
    s,
    alpha,
    T: float,
    cutoff: SmoothCutoff = DEFAULT_CUTOFF,
    cost_cap: float = 1e8,
) -> complex:
    """Gap-smoothed truncation: each gap k_j - k_(j-1) (with k_0 = 0) weighted by phi(gap/T).

    Evaluated by a backward recursion over gap variables; every step is a
    correlation with the weight vector, so the cost is far below the
    (support_end * T)^n terms of the naive sum, which is what the cap bounds.
    """
    s = as_point(s)
    n = len(s)
    a = as_params(alpha, n)
    if T < 1:
        raise DomainError("T must be at least 1")
    if (cutoff.support_end * T) ** n > cost_cap:
        raise CostError(f"(support_end*T)^n = {(cutoff.support_end * T) ** n:.3g} exceeds cap {cost_cap:.3g}")
    w = _gap_weights(T, cutoff)
    gmax = len(w) - 1
    W = _powers(s[-1], a[-1].alpha, n * gmax + 1)
    for j in range(n - 2, -1, -1):
        length = (j + 1) * gmax + 1
        inner = signal.correlate(W[1:], w[1:], mode="valid")[:length]
        W = _powers(s[j], a[j].alpha, length) * inner
    return complex(np.dot(w, W[: gmax + 1]))


# ------------------------------------------------ completed smoothed sums


def _binomial_tail(s1, p, delta: float, U: float, maxterms: int = 400):
    """Integral over u > U of u^(-s1) (u + delta)^(-p), by the binomial series in delta/u."""
    s1 = np.asarray(s1, dtype=complex)
    p = np.asarray(p, dtype=complex)
    q = s1 + p - 1.0
    base = np.exp(-q * math.log(U))  # U^(1 - s1 - p)
    coef = np.ones(np.broadcast(s1, p).shape, dtype=complex)
    total = coef * base / q
    if delta == 0.0:
        return total
    r = delta / U
    for i in range(1, maxterms):
        coef = coef * (-(p + i - 1)) * r / i
        term = coef * base / (q + i)
        total = total + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)) and i > 3:
            return total
    raise ConvergenceError("binomial tail series did not converge")


def _completed_1(s, alpha: float, T: float, cutoff: SmoothCutoff):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    w = _gap_weights(T, cutoff)
    logk = np.log(np.arange(len(w)) + alpha)
    head = np.exp(-np.outer(s, logk)) @ w
    return head + gap_completion(s, alpha, T, cutoff)


def _completed_2(s1, s2, a1: float, a2: float, T: float, cutoff: SmoothCutoff, order: int = 12):
    """zeta_2 on a batch of points: smoothed outer sum over k_1 plus its continued tail.

    The inner sum over k_2 > k_1 is exact, Z(k) = zeta(s2, a2 + k + 1). The
    discarded outer tail is an integral of (1 - phi(x/T)) (x+a1)^(-s1) Z(x),
    done by quadrature on the cutoff bridge and in closed form beyond it
    using the asymptotic expansion of Z.
    """
    s1 = np.atleast_1d(np.asarray(s1, dtype=complex))
    s2 = np.atleast_1d(np.asarray(s2, dtype=complex))
    w = _gap_weights(T, cutoff)
    K = len(w)
    log1 = np.log(np.arange(K) + a1)
    log2 = np.log(np.arange(K) + a2)
    full2 = hurwitz_zeta(s2, a2)
    beta = a2 + 1.0
    phase = float(np.max(np.abs(s1.imag) + np.abs(s2.imag))) * math.log(
        (cutoff.support_end * T + a1) / (cutoff.plateau_end * T + a1)
    )
    v, wt, phi, _ = cutoff.bridge_rule(phase)
    x = T * v
    bw = T * wt * (1.0 - phi)
    U = cutoff.support_end * T + a1
    delta = beta - a1
    coeffs = _bernoulli_coeffs()

    out = np.empty(s1.shape, dtype=complex)
    step = max(1, (1 << 20) // (K + len(x)))
    for i in range(0, len(s1), step):
        z1 = s1[i:i + step, None]
        z2 = s2[i:i + step, None]
        b = np.exp(-z2 * log2)
        Z = full2[i:i + step, None] - np.cumsum(b, axis=1)
        head = np.sum(w * np.exp(-z1 * log1) * Z, axis=1)
        # bridge part of the outer tail
        Zb = em_tail(z2, x + beta, order)
        bridge = np.sum(bw * np.exp(-z1 * np.log(x + a1)) * Zb, axis=1)
        # beyond the bridge: term-by-term closed form
        zz1 = z1[:, 0]
        zz2 = z2[:, 0]
        far = _binomial_tail(zz1, zz2 - 1.0, delta, U) / (zz2 - 1.0)
        far = far + 0.5 * _binomial_tail(zz1, zz2, delta, U)
        poch = zz2.copy()
        for j in range(1, order + 1):
            far = far + coeffs[j - 1] * poch * _binomial_tail(zz1, zz2 + 2 * j - 1, delta, U)
            poch = poch * (zz2 + 2 * j - 1) * (zz2 + 2 * j)
        out[i:i + step] = head + bridge + far
    return out


def _raw_smoothed_batch(points: np.ndarray, alpha, T, cutoff, cost_cap):
    return np.array([zeta_smoothed(p, alpha, T, cutoff, cost_cap) for p in points], dtype=complex)


def zeta_values(
    points,
    alpha,
    T: float,
    cutoff: SmoothCutoff = DEFAULT_CUTOFF,
    completion: bool = True,
    cost_cap: float = 1e8,
) -> np.ndarray:
    """Vectorised evaluator at a fixed T with no window checks.

    points has shape (m, n). Arity 1 and 2 are completed (the continued
    tail beyond the cutoff is added back); higher arity falls back to the raw
    smoothed sum.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[None, :]
    n = pts.shape[1]
    a = as_params(alpha, n)
    conj = np.all(pts.imag < 0, axis=1)
    work = np.where(conj[:, None], pts.conj(), pts)
    if completion and n == 1:
        vals = _completed_1(work[:, 0], a[0].alpha, T, cutoff)
    elif completion and n == 2:
        vals = _completed_2(work[:, 0], work[:, 1], a[0].alpha, a[1].alpha, T, cutoff)
    else:
        vals = _raw_smoothed_batch(work, a, T, cutoff, cost_cap)
    return np.where(conj, vals.conj(), vals)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_estimate: float
    T: float
    completed: bool


def choose_T(s: Sequence[complex], xi: float, T: float | None = None) -> float:
    """Window check: every |Im s_j| must lie in [T^xi, T] and all signs agree."""
    ims = [z.imag for z in s]
    if any(t == 0 for t in ims):
        raise RangeError("Im(s_j) = 0 lies outside every window [T^xi, T]")
    if any(t > 0 for t in ims) and any(t < 0 for t in ims):
        raise SignError("imaginary parts of the coordinates have mixed signs")
    mags = [abs(t) for t in ims]
    if T is None:
        T = max(mags)
    if max(mags) > T or min(mags) < T**xi:
        raise RangeError(f"|Im s| in [{min(mags):.4g}, {max(mags):.4g}] not inside [T^xi, T] with T = {T:.4g}")
    return float(T)


def zeta_eval(
    s,
    alpha,
    xi: float = 0.3,
    T: float | None = None,
    *,
    completion: bool = True,
    cutoff: SmoothCutoff = DEFAULT_CUTOFF,
    bound: tuple[float, float] = (DEFAULT_BOUND_A, DEFAULT_BOUND_B),
    re_bound: float = 10.0,
    cost_cap: float = 1e8,
) -> EvalResult:
    """Windowed evaluator of zeta_n(s; alpha) built on the smoothed truncation.

    T defaults to max |Im s_j| and must satisfy T^xi <= |Im s_j| <= T.
    With completion (default, n <= 2) the continued tail beyond the cutoff is
    added and the result is the function value itself; the smoothing scale is
    then raised to at least 64 so that the neglected terms are negligible.
    Without completion the raw smoothed sum is returned together with the
    bound B T^-A.
    """
    pt = as_point(s)
    n = len(pt)
    a = as_params(alpha, n)
    if not 0 < xi < 1:
        raise DomainError("xi must lie in (0, 1)")
    if any(abs(z.real) > re_bound for z in pt):
        raise RangeError(f"Re(s_j) outside [-{re_bound}, {re_bound}]")
    T = choose_T(pt, xi, T)
    arr = np.array([pt])
    if completion and n <= 2:
        T_eval = max(T, _T_FLOOR)
        val = complex(zeta_values(arr, a, T_eval, cutoff, True)[0])
        err = 1e3 * _EPS * max(1.0, abs(val))
        return EvalResult(val, err, T_eval, True)
    val = complex(zeta_values(arr, a, T, cutoff, False, cost_cap)[0])
    A, B = bound
    return EvalResult(val, B * T ** (-A), T, False)


# ------------------------------------------------------- Mellin-Barnes


@dataclass(frozen=True)
class ContourSpec:
    """Polygonal contour for the Mellin-Barnes integral.

    From lower_re - i inf up to lower_re - i h, across to right_re - i h, up to
    right_re + i h, across to left_re + i h, then up to left_re + i inf.
    None fields are filled from the point being evaluated.
    """

    right_re: float | None = None
    left_re: float | None = None
    lower_re: float | None = None
    height: float | None = None
    order: int = 20
    panel: float = 2.0
    tol: float = 1e-13
    tail_tol: float = 1e-16
    max_length: float = 5000.0

    @classmethod
    def wide(cls, n: int, A: float = 2.0, **kw) -> "ContourSpec":
        """Legs at Re z = +-(A + n(A+1) + 10), the wide symmetric variant."""
        N = A + n * (A + 1) + 10
        return cls(right_re=N, left_re=-N, lower_re=-N, **kw)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _gl_panels(f, a: complex, b: complex, npanel: int, order: int):
    x, w = gauss_legendre(order)
    edges = a + (b - a) * np.linspace(0.0, 1.0, npanel + 1)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    z = (lo + hi) / 2 + (hi - lo) / 2 * x
    vals = f(z.ravel()).reshape(z.shape)
    return ((hi - lo)[:, 0] / 2) * (vals @ w)


_PANEL_NOISE = 1e-11


def _adaptive_segment(f, a: complex, b: complex, spec: ContourSpec, tol: float, depth: int = 0) -> complex:
    """Adaptive composite Gauss-Legendre along a straight segment."""
    length = abs(b - a)
    if length == 0:
        return 0j
    npanel = max(1, int(math.ceil(length / spec.panel)))
    edges = a + (b - a) * np.linspace(0.0, 1.0, npanel + 1)
    pending = list(zip(edges[:-1], edges[1:]))
    total = 0j
    for level in range(14):
        if not pending:
            return total
        lo = np.array([p[0] for p in pending])
        hi = np.array([p[1] for p in pending])
        mid = (lo + hi) / 2
        x, w = gauss_legendre(spec.order)
        ends = np.concatenate([np.stack([lo, hi], 1), np.stack([lo, mid], 1), np.stack([mid, hi], 1)])
        z = (ends[:, :1] + ends[:, 1:]) / 2 + (ends[:, 1:] - ends[:, :1]) / 2 * x
        vals = f(z.ravel()).reshape(z.shape)
        half_len = (ends[:, 1] - ends[:, 0]) / 2
        q = half_len * (vals @ w)
        mass = np.abs(half_len) * (np.abs(vals) @ w)
        m = len(pending)
        whole, halves = q[:m], q[m:2 * m] + q[2 * m:]
        errs = np.abs(whole - halves)
        local = tol * np.abs(hi - lo) / length
        # noise floor: the Hurwitz values left of Re z = 0 are good to ~1e-12 relative
        noise = _PANEL_NOISE * (mass[m:2 * m] + mass[2 * m:])
        ok = errs <= np.maximum.reduce([local, 1e-15 * np.abs(halves), noise])
        total += halves[ok].sum()
        nxt = []
        for k in np.flatnonzero(~ok):
            nxt.append((lo[k], mid[k]))
            nxt.append((mid[k], hi[k]))
        pending = nxt
    raise ConvergenceError("adaptive quadrature on a contour leg did not converge")


def _infinite_leg(f, start: complex, direction: complex, spec: ContourSpec, scale: float, min_run: float) -> complex:
    """Integrate from start to start + direction * inf, chunk by chunk until the integrand has decayed."""
    total = 0j
    pos = 0.0
    chunk = 4.0
    quiet = 0
    while pos < spec.max_length:
        a = start + direction * pos
        b = start + direction * (pos + chunk)
        part = _adaptive_segment(f, a, b, spec, spec.tol)
        total += part
        pos += chunk
        if pos >= min_run and abs(part) <= spec.tail_tol * max(scale, abs(total)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise ConvergenceError("infinite contour leg did not decay within the length budget")


def _mb_integrand(s: tuple[complex, ...], a: tuple[HurwitzParam, ...], inner, mode: str):
    n = len(s)
    sn = s[-1]
    sp = s[-2]
    beta = 1.0 + a[-1].alpha - a[-2].alpha
    lg_sn = loggamma(sn)

    def f(z):
        z = np.asarray(z, dtype=complex)
        kern = np.exp(loggamma(z) + loggamma(sn - z) - lg_sn)
        z1 = hurwitz_zeta(z, beta)
        last = sp + sn - z
        rest = inner(last)
        return kern * z1 * rest

    return f


def zeta_mb(
    s,
    alpha,
    contour: ContourSpec | None = None,
    depth: int | None = None,
    xi: float = 0.3,
    T: float | None = None,
) -> complex:
    """Mellin-Barnes recursion from arity n to n-1.

    zeta_n(s) = (1/2 pi i) int B(z, s_n) zeta(z; 1 + a_n - a_(n-1))
                zeta_(n-1)(s_1, .., s_(n-2), s_(n-1) + s_n - z) dz,

    with B(z, s) = Gamma(z) Gamma(s - z) / Gamma(s), along the polygon of
    ContourSpec. The default polygon passes right of z = 1 near the real
    axis and left of the poles at s_n + j and s_(n-1) + s_n - 1 above it.
    depth limits how many levels recurse through this integral; deeper
    inner values come from the completed smoothed evaluator.
    """
    pt = as_point(s)
    n = len(pt)
    if n < 2:
        raise ArityError("Mellin-Barnes recursion needs n >= 2")
    a = as_params(alpha, n)
    beta = 1.0 + a[-1].alpha - a[-2].alpha
    if beta <= 0:
        raise ContourError(f"parameter 1 + a_n - a_(n-1) = {beta} must be positive")
    if all(z.imag < 0 for z in pt):
        return complex(np.conj(zeta_mb([z.conjugate() for z in pt], a, contour, depth, xi, T)))
    T = choose_T(pt, xi, T)
    spec = contour or ContourSpec()
    sn, sp = pt[-1], pt[-2]
    h = spec.height if spec.height is not None else T ** (xi / 2)
    if not 0 < h < min(sn.imag, (sp + sn).imag - 0.0):
        raise ContourError("contour height must lie below the poles at Im z = Im s_n")
    cr = spec.right_re if spec.right_re is not None else 1.5
    cl = spec.left_re if spec.left_re is not None else min(sn.real, sp.real + sn.real - 1.0) - 0.5
    lo_re = spec.lower_re if spec.lower_re is not None else cr
    if cr <= 1.0:
        raise ContourError("right leg must pass to the right of z = 1")
    if cl >= min(sn.real, sp.real + sn.real - 1.0):
        raise ContourError("upper leg must pass left of the poles at s_n + j and s_(n-1) + s_n - 1")
    depth = (n - 1) if depth is None else depth

    head = pt[:-2]
    if n == 2:
        def inner(last):
            return hurwitz_zeta(last, a[0].alpha)
    elif depth > 1:
        def inner(last):
            return np.array([
                zeta_mb(head + (complex(l),), a[:-1], None, depth - 1, xi, None) for l in np.atleast_1d(last)
            ])
    else:
        def inner(last):
            last = np.atleast_1d(last)
            pts = np.array([head + (complex(l),) for l in last])
            Tin = max(_T_FLOOR, float(np.max(np.abs(pts.imag))))
            return zeta_values(pts, a[:-1], Tin)

    f = _mb_integrand(pt, a, inner, "")
    scale = 1.0
    top = max(sn.imag, (sp + sn).imag)
    # lower infinite leg, traversed upward: integrate downward and negate
    total = -_infinite_leg(f, complex(lo_re, -h), -1j, spec, scale, 8.0)
    total += _adaptive_segment(f, complex(lo_re, -h), complex(cr, -h), spec, spec.tol)
    total += _adaptive_segment(f, complex(cr, -h), complex(cr, h), spec, spec.tol)
    total += _adaptive_segment(f, complex(cr, h), complex(cl, h), spec, spec.tol)
    total += _infinite_leg(f, complex(cl, h), 1j, spec, scale, top - h + 8.0)
    return complex(total / (2j * math.pi))
