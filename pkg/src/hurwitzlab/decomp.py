"""Monomial tableaux: writing a polynomial as an ordered sum of products of one-variable monomials.

A tableau is a sequence of M slots. Slot m belongs to one variable j_m and
carries a monomial q_{j_m, m}(s_{j_m}); every other row is zero in that
column. The decomposition satisfies

    p(s) = sum over m_1 < ... < m_n of prod_j q_{j, m_j}(s_j),

every proper tail sum (rows v..n, v >= 2) vanishes identically, and all row
prefix sums are single monomials. Rows are then scaled by powers of two so
that the first-row prefix sums are large and the others small on a box.

Verification runs in exact Gaussian-rational arithmetic.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, DomainError
from .multizeta import MAX_ARITY, CompactBox

Exps = tuple[int, ...]
GQ = tuple[Fraction, Fraction]  # Gaussian rational (re, im)


def _gq(z: complex) -> GQ:
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def _gq_mul(a: GQ, b: GQ) -> GQ:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _gq_add(a: GQ, b: GQ) -> GQ:
    return a[0] + b[0], a[1] + b[1]


_ZERO: GQ = (Fraction(0), Fraction(0))


# -------------------------------------------------------------- polynomial


@dataclass(frozen=True)
class Polynomial:
    """Terms in input order; duplicate exponents merged, zero coefficients dropped."""

    arity: int
    terms: tuple[tuple[complex, Exps], ...]

    def __post_init__(self):
        if not 1 <= self.arity <= MAX_ARITY:
            raise ArityError(f"arity must be in 1..{MAX_ARITY}")
        seen = set()
        for c, e in self.terms:
            if len(e) != self.arity or any(k < 0 for k in e):
                raise DomainError(f"bad exponent tuple {e}")
            if e in seen:
                raise DomainError(f"duplicate exponent {e}")
            if complex(c) == 0:
                raise DomainError("zero coefficient stored")
            seen.add(e)

    @classmethod
    def from_terms(cls, arity: int, terms: Iterable[tuple[complex, Sequence[int]]]) -> "Polynomial":
        acc: dict[Exps, complex] = {}
        for c, e in terms:
            e = tuple(int(k) for k in e)
            acc[e] = acc.get(e, 0j) + complex(c)
        return cls(arity, tuple((c, e) for e, c in acc.items() if c != 0))

    @classmethod
    def parse(cls, text: str, arity: int | None = None) -> "Polynomial":
        return parse_polynomial(text, arity)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        out = np.zeros(pts.shape[0], dtype=complex)
        for c, e in self.terms:
            out += c * np.prod(pts ** np.asarray(e), axis=1)
        return out

    def exact(self) -> dict[Exps, GQ]:
        return {e: _gq(c) for c, e in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for c, e in self.terms:
            mono = "*".join(f"s{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k)
            c = complex(c)
            neg = c.imag == 0 and c.real < 0
            coef = _format_coeff(-c if neg else c)
            piece = coef if not mono else (mono if coef == "1" else f"{coef}*{mono}")
            if not out:
                out = "-" + piece if neg else piece
            else:
                out += (" - " if neg else " + ") + piece
        return out


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real).removesuffix(".0") if c.real.is_integer() else repr(c.real)
    return f"({c.real!r}{c.imag:+}i)"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)(?P<imag>i)?"
    r"|(?P<var>s[1-8])|(?P<i>i)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"unexpected input at {text[pos:]!r}")
        if m.group("num") is not None:
            val = float(m.group("num"))
            out.append(("num", complex(0, val) if m.group("imag") else complex(val)))
        elif m.group("var"):
            out.append(("var", int(m.group("var")[1:])))
        elif m.group("i"):
            out.append(("num", 1j))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    return out


class _Parser:
    """Recursive descent for: expr := ['+'|'-'] term (('+'|'-') term)*;
    term := factor ('*' factor)*; factor := number | 'i' | var ['^' int] | '(' expr ')'.

    Parenthesised sub-expressions must be constants (coefficients such as (2+3i)).
    """

    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> dict[Exps, complex]:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self._scale(self.term(), sign)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                acc = self._add(acc, self._scale(self.term(), -1 if val == "-" else 1))
            else:
                return acc

    def term(self) -> dict[Exps, complex]:
        acc = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            acc = self._mul(acc, self.factor())
        return acc

    def factor(self) -> dict[Exps, complex]:
        kind, val = self.take()
        if kind == "num":
            return {(): val}
        if kind == "var":
            power = 1
            if self.peek() == ("op", "^"):
                self.take()
                k2, v2 = self.take()
                if k2 != "num" or v2.imag != 0 or not float(v2.real).is_integer() or v2.real < 0:
                    raise DomainError("exponent must be a non-negative integer")
                power = int(v2.real)
            e = [0] * val
            e[val - 1] = power
            return {tuple(e): 1 + 0j}
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise DomainError("missing closing parenthesis")
            if any(any(e) for e in inner):
                raise DomainError("parentheses may only enclose constants")
            return inner
        raise DomainError(f"unexpected token {val!r}")

    @staticmethod
    def _norm(e: Exps, n: int) -> Exps:
        return tuple(e) + (0,) * (n - len(e))

    def _add(self, a, b):
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0j) + c
        return out

    @staticmethod
    def _scale(a, k):
        return {e: k * c for e, c in a.items()}

    def _mul(self, a, b):
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                n = max(len(e1), len(e2))
                e = tuple(x + y for x, y in zip(self._norm(e1, n), self._norm(e2, n)))
                out[e] = out.get(e, 0j) + c1 * c2
        return out


def parse_polynomial(text: str, arity: int | None = None) -> Polynomial:
    """Parse the mini-grammar: variables s1..s8, + - * ^, decimal, 'i' or '(a+bi)' coefficients."""
    toks = _tokenize(text)
    if not toks:
        raise DomainError("empty polynomial")
    parser = _Parser(toks)
    body = parser.expr()
    if parser.i != len(toks):
        raise DomainError(f"trailing input near token {parser.i}")
    n_used = max((len(e) for e in body), default=0)
    n = arity if arity is not None else max(n_used, 1)
    if n_used > n:
        raise ArityError(f"polynomial uses s{n_used} but arity is {n}")
    terms = [(c, tuple(e) + (0,) * (n - len(e))) for e, c in body.items()]
    return Polynomial.from_terms(n, terms)


# ---------------------------------------------------------------- tableau


@dataclass(frozen=True)
class Slot:
    owner: int  # 1-based variable index j_m
    coeff: complex
    exponent: int


@dataclass(frozen=True)
class MonomialTableau:
    arity: int
    slots: tuple[Slot, ...]
    B: int = 1

    @property
    def M(self) -> int:
        return len(self.slots)

    def row(self, j: int) -> list[tuple[complex, int]]:
        """Row j (1-based) as (coefficient, exponent) pairs, zeros where not owned."""
        return [(s.coeff, s.exponent) if s.owner == j else (0j, 0) for s in self.slots]

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "arity": self.arity,
            "M": self.M,
            "B": self.B,
            "slots": [
                {"m": m + 1, "j_m": s.owner, "coefficient": [s.coeff.real, s.coeff.imag], "exponent": s.exponent}
                for m, s in enumerate(self.slots)
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MonomialTableau":
        doc = json.loads(text)
        slots = tuple(Slot(int(d["j_m"]), complex(*d["coefficient"]), int(d["exponent"])) for d in doc["slots"])
        return cls(int(doc["arity"]), slots, int(doc["B"]))


def _layout(p: Polynomial) -> list[Slot]:
    """Unscaled slots: block l has centre c = 2nl - n; row 1 at c and c + n, row j at c -+ (j-1)."""
    n = p.arity
    L = len(p.terms)
    M = 2 * n * L - 1
    slots: list[Slot | None] = [None] * M
    for l, (a, e) in enumerate(p.terms, start=1):
        c = 2 * n * l - n
        slots[c - 1] = Slot(1, complex(a), e[0])
        if l < L:
            slots[c + n - 1] = Slot(1, -complex(a), e[0])
        for j in range(2, n + 1):
            slots[c - (j - 1) - 1] = Slot(j, -1 + 0j, e[j - 1])
            slots[c + (j - 1) - 1] = Slot(j, 1 + 0j, e[j - 1])
    assert all(s is not None for s in slots)
    return slots  # type: ignore[return-value]


def _needed_B(p: Polynomial, C: float, box: CompactBox) -> int:
    n = p.arity
    min1 = math.inf
    max_rest = 0.0
    lo1, hi1 = box.abs_range(0)
    for a, e in p.terms:
        m = abs(a) * (lo1 ** e[0] if e[0] else 1.0)
        min1 = min(min1, m)
        for j in range(1, n):
            lo, hi = box.abs_range(j)
            max_rest = max(max_rest, hi ** e[j] if e[j] else 1.0)
    if min1 == 0:
        raise DomainError("first-variable monomial vanishes on the box; no scale works")
    for k in range(0, 1100):
        B = 2**k
        if B ** (n - 1) * min1 > C and max_rest / B <= 1:
            return B
    raise DomainError("no power-of-two scale found")


def decompose(p: Polynomial, C: float = 1.0, box: CompactBox | None = None, scale: bool = True) -> MonomialTableau:
    """Tableau for p with M = 2nL - 1 slots; row 1 times B^(n-1), other rows divided by B.

    B is the smallest power of two (B >= 1) making every nonzero first-row
    prefix sum exceed C in modulus and every other prefix sum at most 1 on
    the box. scale=False returns the B = 1 layout.
    """
    n = p.arity
    if n < 2:
        raise ArityError("decomposition needs at least two variables")
    if p.is_zero:
        return MonomialTableau(n, (), 1)
    base = _layout(p)
    if not scale:
        return MonomialTableau(n, tuple(base), 1)
    if box is None:
        box = CompactBox.symmetric((0.55, 0.95), 1.0, n)
    if box.arity != n:
        raise ArityError("box arity differs from polynomial arity")
    B = _needed_B(p, C, box)
    up = float(B ** (n - 1))
    slots = tuple(
        Slot(s.owner, s.coeff * up if s.owner == 1 else s.coeff / B, s.exponent) for s in base
    )
    return MonomialTableau(n, slots, B)


# ----------------------------------------------------------- verification


@dataclass
class VerificationReport:
    reconstructs: bool
    tails_vanish: bool
    prefix_monomial: bool
    box_conditions: bool | None
    failing_tail: list[int] = field(default_factory=list)
    failing_prefix: list[tuple[int, int]] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.reconstructs and self.tails_vanish and self.prefix_monomial and self.box_conditions is not False

    def to_dict(self) -> dict:
        return {
            "reconstructs": self.reconstructs,
            "tails_vanish": self.tails_vanish,
            "prefix_monomial": self.prefix_monomial,
            "box_conditions": self.box_conditions,
            "failing_tail": self.failing_tail,
            "failing_prefix": [list(x) for x in self.failing_prefix],
            "details": self.details,
        }


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = _gq_add(out.get(e, _ZERO), c)
        if v == _ZERO:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def _poly_mono_mul(a: dict, coeff: GQ, j: int, k: int) -> dict:
    out = {}
    for e, c in a.items():
        e2 = list(e)
        e2[j] += k
        out[tuple(e2)] = _gq_mul(c, coeff)
    return out


def verify_tableau(t: MonomialTableau, p: Polynomial, C: float | None = None, box: CompactBox | None = None) -> VerificationReport:
    """Exact checks (i)-(iii); (iv) on the box when C and box are given."""
    n = t.arity
    if p.arity != n:
        raise ArityError("tableau and polynomial arity differ")
    zero_e = (0,) * n
    # P[v] = sum over m_v < ... < m_n of prod_{j >= v} q_{j, m_j}, built right to left
    P: list[dict] = [dict() for _ in range(n + 2)]
    P[n + 1] = {zero_e: (Fraction(1), Fraction(0))}
    for slot in reversed(t.slots):
        j = slot.owner
        if slot.coeff == 0:
            continue
        P[j] = _poly_add(P[j], _poly_mono_mul(P[j + 1], _gq(slot.coeff), j - 1, slot.exponent))
    target = {e: c for e, c in p.exact().items() if c != _ZERO}
    reconstructs = P[1] == target
    failing_tail = [v for v in range(2, n + 1) if P[v]]

    # (iii) prefix sums stay single monomials
    failing_prefix = []
    prefix_monos: dict[int, list[tuple[GQ, int] | None]] = {j: [] for j in range(1, n + 1)}
    for j in range(1, n + 1):
        acc: dict[int, GQ] = {}
        for m, slot in enumerate(t.slots, start=1):
            if slot.owner == j and slot.coeff != 0:
                v = _gq_add(acc.get(slot.exponent, _ZERO), _gq(slot.coeff))
                if v == _ZERO:
                    acc.pop(slot.exponent, None)
                else:
                    acc[slot.exponent] = v
            if len(acc) > 1:
                failing_prefix.append((j, m))
                prefix_monos[j].append(None)
            else:
                prefix_monos[j].append(next(iter(acc.items()))[::-1] if acc else (_ZERO, 0))

    box_ok = None
    details: dict = {}
    if C is not None and box is not None:
        box_ok, details = _box_conditions(t, prefix_monos, C, box)
    return VerificationReport(
        reconstructs, not failing_tail, not failing_prefix, box_ok, failing_tail, failing_prefix, details
    )


def _box_conditions(t: MonomialTableau, prefix_monos, C: float, box: CompactBox):
    """Certify via exact extrema of |c s^k| on each rectangle, and cross-check on the grid."""
    n = t.arity
    worst_first = math.inf
    worst_rest = 0.0
    grid_first = math.inf
    grid_rest = 0.0
    for j in range(1, n + 1):
        lo, hi = box.abs_range(j - 1)
        pts = box.axis_points(j - 1)
        for mono in prefix_monos[j]:
            if mono is None:
                return False, {"reason": f"row {j} has a non-monomial prefix"}
            coeff, k = mono
            mag = abs(complex(float(coeff[0]), float(coeff[1])))
            if mag == 0:
                continue
            gvals = mag * np.abs(pts) ** k
            if j == 1:
                worst_first = min(worst_first, mag * lo**k)
                grid_first = min(grid_first, float(gvals.min()))
            else:
                worst_rest = max(worst_rest, mag * hi**k)
                grid_rest = max(grid_rest, float(gvals.max()))
    ok = worst_first > C and worst_rest <= 1.0
    return ok, {
        "min_first_row_prefix": worst_first,
        "max_other_row_prefix": worst_rest,
        "grid_min_first_row_prefix": grid_first,
        "grid_max_other_row_prefix": grid_rest,
    }
