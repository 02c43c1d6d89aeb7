"""One-variable Hurwitz zeta, its smoothed truncation and Dirichlet L-functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, PoleError, RangeError
from .numcore import DEFAULT_CUTOFF, SmoothCutoff

__all__ = [
    "HurwitzParam",
    "as_param",
    "hurwitz_zeta",
    "em_tail",
    "hurwitz_smoothed",
    "hurwitz_afe",
    "AfeResult",
    "gap_completion",
    "DirichletCharacter",
    "character_table",
    "dirichlet_L",
    "permissibility_scan",
]

_POLE_RADIUS = 1e-12
_CHUNK = 1 << 21


# ------------------------------------------------------------ parameters


@dataclass(frozen=True)
class HurwitzParam:
    """A positive shift alpha with an arithmetic tag.

    Rational parameters carry (c, d) with gcd 1; anything else is treated as
    transcendental and only its float value is used.
    """

    alpha: float
    c: int | None = None
    d: int | None = None

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if (self.c is None) != (self.d is None):
            raise DomainError("rational tag needs both c and d")
        if self.c is not None:
            if self.c <= 0 or self.d <= 0 or math.gcd(self.c, self.d) != 1:
                raise DomainError("rational tag needs positive coprime c, d")
            if abs(self.alpha - self.c / self.d) > 1e-15 * max(1.0, self.alpha):
                raise DomainError("alpha does not match c/d")

    @property
    def is_rational(self) -> bool:
        return self.c is not None

    @classmethod
    def rational(cls, c: int, d: int) -> "HurwitzParam":
        g = math.gcd(c, d)
        c, d = c // g, d // g
        return cls(c / d, c, d)

    @classmethod
    def transcendental(cls, x: float) -> "HurwitzParam":
        return cls(float(x))

    @classmethod
    def parse(cls, text: str) -> "HurwitzParam":
        """Parse ``r:c/d`` or ``t:x``."""
        kind, _, body = text.strip().partition(":")
        if kind == "r":
            num, _, den = body.partition("/")
            return cls.rational(int(num), int(den) if den else 1)
        if kind == "t":
            return cls.transcendental(float(body))
        raise DomainError(f"cannot parse parameter {text!r}")

    def label(self) -> str:
        return f"r:{self.c}/{self.d}" if self.is_rational else f"t:{self.alpha!r}"

    def __float__(self) -> float:
        return self.alpha


def as_param(a) -> HurwitzParam:
    if isinstance(a, HurwitzParam):
        return a
    if isinstance(a, Fraction):
        return HurwitzParam.rational(a.numerator, a.denominator)
    if isinstance(a, str):
        return HurwitzParam.parse(a)
    return HurwitzParam.transcendental(float(a))


# ------------------------------------------------------- Euler-Maclaurin


@lru_cache(maxsize=1)
def _bernoulli_coeffs(pmax: int = 80) -> np.ndarray:
    # B_{2j} / (2j)!, j = 1..pmax
    b = special.bernoulli(2 * pmax)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, pmax + 1)])


def em_tail(s, x, order: int = 12):
    """Asymptotic expansion of zeta(s, x) for large x (the EM tail at x).

    x^(1-s)/(s-1) + x^(-s)/2 + sum_j B_2j/(2j)! (s)_(2j-1) x^(1-s-2j).
    Broadcasts over s and x.
    """
    s = np.asarray(s, dtype=complex)
    x = np.asarray(x, dtype=float)
    logx = np.log(x)
    xs = np.exp(-s * logx)
    out = x * xs / (s - 1.0) + 0.5 * xs
    coeffs = _bernoulli_coeffs()
    poch = s.copy()
    pw = xs / x
    inv_x2 = 1.0 / (x * x)
    for j in range(1, order + 1):
        out = out + coeffs[j - 1] * poch * pw
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        pw = pw * inv_x2
    return out


def _em_plan(s: np.ndarray, a: float, em_terms, order):
    """Per-point shift M and Bernoulli order."""
    if em_terms is not None:
        m = np.full(s.shape, int(em_terms))
    else:
        # tail starts at x = M + a >= max(50, 2|t|)
        target = np.maximum(50.0, 2.0 * np.abs(s.imag))
        m = np.maximum(0, np.ceil(target - a)).astype(int)
    p = np.full(s.shape, 12 if order is None else int(order))
    return m, p


def _zeta_mp(s: np.ndarray, a: float) -> np.ndarray:
    # left of Re s = -1 double-precision EM cancels badly; use mpmath there
    import mpmath

    with mpmath.workdps(30):
        return np.array([complex(mpmath.zeta(mpmath.mpc(z.real, z.imag), a)) for z in s], dtype=complex)


def hurwitz_zeta(s, alpha, em_terms: int | None = None, bernoulli_order: int | None = None):
    """zeta(s, alpha) by Euler-Maclaurin summation; vectorised over s.

    Defaults: shift the tail to x ~ max(50, 2|Im s|) with 12 Bernoulli terms.
    With default settings, points with Re(s) < -1 go to mpmath instead, since
    the float sum loses most of its digits to cancellation there.
    """
    a = float(alpha)
    if a <= 0:
        raise DomainError("alpha must be positive")
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(s - 1.0) < _POLE_RADIUS):
        raise PoleError("zeta(s, alpha) has a pole at s = 1")
    flat = s.ravel()
    m, p = _em_plan(flat, a, em_terms, bernoulli_order)
    out = np.empty(flat.shape, dtype=complex)
    em_ok = np.ones(flat.shape, dtype=bool)
    if em_terms is None and bernoulli_order is None:
        em_ok = flat.real >= -1.0
        if not em_ok.all():
            out[~em_ok] = _zeta_mp(flat[~em_ok], a)
    order_idx = np.flatnonzero(em_ok)[np.argsort(m[em_ok], kind="stable")]
    i = 0
    while i < len(order_idx):
        mm = int(m[order_idx[i]])
        width = max(1, mm)
        step = max(1, _CHUNK // width)
        # group points with similar M (within 25%) to avoid wasted work
        j = i
        while j < len(order_idx) and j - i < step and m[order_idx[j]] <= 1.25 * mm + 8:
            j += 1
        idx = order_idx[i:j]
        mg = int(m[idx].max())
        sg = flat[idx]
        pg = int(p[idx].max())
        if mg > 0:
            logk = np.log(np.arange(mg) + a)
            # ascending magnitude for Re(s) > 0: sum the tail end first
            terms = np.exp(-np.outer(sg, logk[::-1]))
            direct = terms.sum(axis=1)
        else:
            direct = 0.0
        out[idx] = direct + em_tail(sg, mg + a, pg)
        i = j
    out = out.reshape(s.shape)
    return complex(out[0]) if scalar else out


# ------------------------------------------------------ smoothed sums


def hurwitz_smoothed(s, alpha, T: float, cutoff: SmoothCutoff = DEFAULT_CUTOFF):
    """Sum over n >= 0 of phi((n + alpha)/T) (n + alpha)^(-s)."""
    if T < 1:
        raise DomainError("T must be at least 1")
    a = float(alpha)
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    nmax = int(math.ceil(cutoff.support_end * T - a))
    x = np.arange(max(nmax, 0) + 1) + a
    w = cutoff(x / T)
    keep = w > 0
    x, w = x[keep][::-1], w[keep][::-1]
    vals = np.exp(-np.outer(s.ravel(), np.log(x))) @ w
    vals = vals.reshape(s.shape)
    return complex(vals[0]) if scalar else vals


def _shift_completion(s, T: float, cutoff: SmoothCutoff):
    # int_0^inf (1 - phi(u/T)) u^(-s) du, continued: -T^(1-s) Phi(1-s)
    return _bridge_integral(s, T, 0.0, cutoff)


def gap_completion(s, alpha, T: float, cutoff: SmoothCutoff = DEFAULT_CUTOFF):
    """Continued value of the integral of (1 - phi(x/T)) (x + alpha)^(-s) over x > 0.

    Equals (1/(1-s)) * int phi'(v) (T v + alpha)^(1-s) dv after one
    integration by parts; only the bridge of the cutoff contributes.
    """
    return _bridge_integral(s, T, float(alpha), cutoff)


def _bridge_integral(s, T: float, shift: float, cutoff: SmoothCutoff):
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(s - 1.0) < _POLE_RADIUS):
        raise PoleError("completion has a pole at s = 1")
    lo = cutoff.plateau_end * T + shift
    hi = cutoff.support_end * T + shift
    phase = float(np.max(np.abs(s.imag))) * math.log(hi / lo)
    v, wt, _, dphi = cutoff.bridge_rule(phase)
    logx = np.log(T * v + shift)
    flat = s.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK // len(v))
    for i in range(0, len(flat), step):
        sg = flat[i:i + step]
        out[i:i + step] = (np.exp(np.outer(1.0 - sg, logx)) @ (wt * dphi)) / (1.0 - sg)
    out = out.reshape(s.shape)
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class AfeResult:
    value: complex
    regime: str  # "FarFromOne" or "NearOne"


def hurwitz_afe(
    s: complex,
    alpha,
    T: float,
    xi: float = 0.3,
    A: float = 10.0,
    cutoff: SmoothCutoff = DEFAULT_CUTOFF,
    residue_correction: bool = True,
) -> AfeResult:
    """Smoothed Dirichlet polynomial as an approximation to zeta(s, alpha).

    With residue_correction (the default) the continued contribution of the
    cut-off tail, -T^(1-s) Phi(1-s), is added back; the smoothed polynomial
    alone is returned otherwise.
    """
    s = complex(s)
    if not 0 < xi < 1:
        raise DomainError("xi must lie in (0, 1)")
    if abs(s.imag) > T:
        raise RangeError(f"|Im s| = {abs(s.imag)} exceeds T = {T}")
    if not -A <= s.real <= A:
        raise RangeError(f"Re s = {s.real} outside [-{A}, {A}]")
    regime = "FarFromOne" if T**xi <= abs(s.imag) <= T else "NearOne"
    value = hurwitz_smoothed(s, alpha, T, cutoff)
    if residue_correction:
        value += _shift_completion(s, T, cutoff)
    return AfeResult(value, regime)


# ----------------------------------------------------------- characters


def _factorize_small(q: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= q:
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            out.append((p, e))
        p += 1
    if q > 1:
        out.append((q, 1))
    return out


def _root_of_unity(k: int, m: int) -> complex:
    k %= m
    # exact values on the quarter turns keep real characters real
    if (4 * k) % m == 0:
        return (1, 1j, -1, -1j)[(4 * k) // m]
    ang = 2 * math.pi * k / m
    return complex(math.cos(ang), math.sin(ang))


def _cyclic_components(p: int, e: int) -> list[tuple[int, int]]:
    """(generator, order) pairs whose product is (Z/p^e)^*."""
    pe = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(pe - 1, 2)]
        return [(pe - 1, 2), (5, 2 ** (e - 2))]
    phi = pe - pe // p
    for g in range(2, pe):
        if math.gcd(g, p) != 1:
            continue
        # g generates iff g^(phi/r) != 1 for each prime r | phi
        if all(pow(g, phi // r, pe) != 1 for r, _ in _factorize_small(phi)):
            return [(g, phi)]
    raise AssertionError("no primitive root found")


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character given by its full value table on residues 0..q-1."""

    modulus: int
    values: tuple
    index: tuple = ()

    @property
    def principal(self) -> bool:
        return all(v == 1 for v in self.values if v != 0)

    @property
    def order(self) -> int:
        k = 1
        vals = [v for v in self.values if v != 0]
        while any(abs(v**k - 1) > 1e-9 for v in vals):
            k += 1
        return k

    @property
    def is_real(self) -> bool:
        return all(isinstance(v, int) or abs(complex(v).imag) == 0 for v in self.values)

    def __call__(self, n):
        if np.ndim(n) == 0:
            return complex(self.values[int(n) % self.modulus])
        table = np.asarray(self.values, dtype=complex)
        return table[np.asarray(n, dtype=np.int64) % self.modulus]

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, tuple(complex(v).conjugate() for v in self.values), self.index)

    def times(self, other: "DirichletCharacter") -> "DirichletCharacter":
        """Product character modulo lcm of the two moduli."""
        q = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        vals = tuple(self(a) * other(a) for a in range(q))
        return DirichletCharacter(q, vals)

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "index": list(self.index),
            "values": [[complex(v).real, complex(v).imag] for v in self.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DirichletCharacter":
        vals = tuple(complex(re, im) for re, im in d["values"])
        return cls(int(d["modulus"]), vals, tuple(d.get("index", ())))


def _unit_log(a: int, pe: int, gens: list[tuple[int, int]]) -> list[int]:
    """Exponents of a in the basis gens of (Z/p^e)^*, by brute force."""
    ranges = [range(o) for _, o in gens]
    for ks in product(*ranges):
        x = 1
        for (g, _), k in zip(gens, ks):
            x = x * pow(g, k, pe) % pe
        if x == a % pe:
            return list(ks)
    raise AssertionError("unit not generated")


@lru_cache(maxsize=128)
def character_table(q: int) -> tuple[DirichletCharacter, ...]:
    """All characters mod q, built by CRT from generators of each prime-power factor."""
    if q < 1:
        raise DomainError("modulus must be positive")
    blocks = [(p**e, _cyclic_components(p, e)) for p, e in _factorize_small(q)]
    orders = [o for _, gens in blocks for _, o in gens]
    logs: dict[int, list[int]] = {}
    for a in range(q):
        if math.gcd(a, q) == 1:
            vec: list[int] = []
            for pe, gens in blocks:
                vec.extend(_unit_log(a, pe, gens))
            logs[a] = vec
    chars = []
    for idx in product(*[range(o) for o in orders]):
        vals = []
        for a in range(q):
            if a not in logs:
                vals.append(0)
                continue
            frac = sum((Fraction(b * e, o) for b, e, o in zip(idx, logs[a], orders)), Fraction(0))
            v = _root_of_unity(frac.numerator, frac.denominator)
            vals.append(1 if v == 1 else v)
        if q == 1:
            vals = [1]
        chars.append(DirichletCharacter(q, tuple(vals), tuple(idx)))
    return tuple(chars)


def dirichlet_L(s, chi: DirichletCharacter):
    """L(s, chi) = q^(-s) sum_a chi(a) zeta(s, a/q); vectorised over s."""
    q = chi.modulus
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    near_one = np.abs(s - 1.0) < _POLE_RADIUS
    if np.any(near_one) and chi.principal:
        raise PoleError("principal L-function has a pole at s = 1")
    out = np.zeros(s.shape, dtype=complex)
    far = ~near_one
    for a in range(1, q + 1):
        c = chi(a)
        if c == 0:
            continue
        if np.any(far):
            out[far] += c * hurwitz_zeta(s[far], a / q)
        if np.any(near_one):
            # zeta(s, x) = 1/(s-1) - psi(x) + O(s-1); the poles cancel
            out[near_one] += -c * special.digamma(a / q)
    out[far] *= np.exp(-s[far] * math.log(q))
    out[near_one] /= q
    return complex(out[0]) if scalar else out


def permissibility_scan(
    chi: DirichletCharacter,
    d: int,
    sigma: tuple[float, float] = (0.55, 0.95),
    t: tuple[float, float] = (-50.0, 50.0),
    points_per_unit: int = 40,
) -> dict:
    """Numerical heuristic for zero-freeness of L(s, chi chi*) on a rectangle, all chi* mod d.

    Counts zeros by the argument principle on the rectangle boundary. A count
    of zero for every product is consistent with permissibility; it is not a
    proof.
    """
    s_lo, s_hi = sigma
    t_lo, t_hi = t
    per_side = []
    for a, b in (
        (complex(s_lo, t_lo), complex(s_hi, t_lo)),
        (complex(s_hi, t_lo), complex(s_hi, t_hi)),
        (complex(s_hi, t_hi), complex(s_lo, t_hi)),
        (complex(s_lo, t_hi), complex(s_lo, t_lo)),
    ):
        n = max(16, int(abs(b - a) * points_per_unit))
        per_side.append(a + (b - a) * np.arange(n) / n)
    path = np.concatenate(per_side + [per_side[0][:1]])
    results = []
    for star in character_table(d):
        psi = chi.times(star)
        vals = dirichlet_L(path, psi)
        dphase = np.angle(vals[1:] / vals[:-1])
        winding = int(round(dphase.sum() / (2 * math.pi)))
        results.append({
            "chi_star": list(star.index),
            "zeros_inside": winding,
            "min_abs_on_boundary": float(np.abs(vals).min()),
            "max_phase_step": float(np.abs(dphase).max()),
        })
    return {
        "zero_free": all(r["zeros_inside"] == 0 for r in results),
        "products": results,
        "note": "argument-principle count on sampled boundary; heuristic only",
    }
