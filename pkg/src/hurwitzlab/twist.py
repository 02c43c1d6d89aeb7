"""Completely multiplicative unimodular twists with a character tail.

A twist lives on N + alpha. For rational alpha = c/d it comes from a completely
multiplicative function on the integers, a(k + c/d) = a(kd + c) / a(d), whose
prime values are free below the threshold L = ceil(log N0) and follow chi
above it. For transcendental alpha the values a(k + alpha) are free for k < L
and equal exp(2 pi i k / q) afterwards.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityError, BudgetError, CompatibilityError, DomainError, UnimodularError
from .hurwitz import DirichletCharacter, HurwitzParam, as_param
from .multizeta import as_params, as_point

SIEVE_CAP = 10**6
_UNIT_TOL = 1e-12


@lru_cache(maxsize=2)
def _spf_table(limit: int) -> np.ndarray:
    """Smallest prime factor of every integer below limit (spf[1] = 1)."""
    spf = np.zeros(limit, dtype=np.int64)
    spf[1:] = np.arange(1, limit)
    for p in range(2, int(math.isqrt(limit - 1)) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            mask = block == np.arange(p * p, limit, p)
            block[mask] = p
            spf[p * p::p] = block
    spf.setflags(write=False)
    return spf


def _sieve_for(n: int) -> np.ndarray:
    if n > SIEVE_CAP:
        raise BudgetError(f"integer {n} beyond sieve cap {SIEVE_CAP}")
    return _spf_table(SIEVE_CAP + 1)


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation; sieve below the cap, trial division by sieve primes up to cap^2."""
    if n < 1:
        raise DomainError("factorize needs a positive integer")
    out: dict[int, int] = {}
    if n <= SIEVE_CAP:
        spf = _sieve_for(n)
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    if n >= SIEVE_CAP**2:
        raise BudgetError(f"integer {n} beyond factorisation budget")
    spf = _spf_table(SIEVE_CAP + 1)
    for p in np.flatnonzero(spf[2:math.isqrt(n) + 2] == np.arange(2, math.isqrt(n) + 2)) + 2:
        p = int(p)
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        if p * p > n:
            break
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _check_unit(v: complex, what: str) -> complex:
    v = complex(v)
    if abs(abs(v) - 1.0) > _UNIT_TOL:
        raise UnimodularError(f"{what} has modulus {abs(v)}")
    return v


@dataclass(frozen=True)
class TwistFunction:
    param: HurwitzParam
    character: DirichletCharacter
    N0: int
    threshold: int
    free_values: Mapping[int, complex] = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.character.modulus

    @property
    def free_primes(self) -> tuple[int, ...]:
        """Primes whose value is free (rational case): p < L and p | q."""
        small = [p for p in range(2, self.threshold) if all(p % r for r in range(2, math.isqrt(p) + 1))]
        extra = [p for p in factorize(self.q) if p >= self.threshold] if self.q > 1 else []
        return tuple(sorted(set(small) | set(extra)))

    def prime_value(self, p: int) -> complex:
        if p in self.free_values:
            return self.free_values[p]
        if p < self.threshold or self.q % p == 0:
            return 1 + 0j
        return self.character(p)

    def integer_value(self, n: int) -> complex:
        v = 1 + 0j
        for p, e in factorize(n).items():
            v *= self.prime_value(p) ** e
        return v

    def to_json(self) -> str:
        doc = {
            "param": {"alpha": self.param.alpha, "c": self.param.c, "d": self.param.d},
            "character": self.character.to_dict(),
            "N0": self.N0,
            "threshold": self.threshold,
            "free_values": {str(k): [complex(v).real, complex(v).imag] for k, v in sorted(self.free_values.items())},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TwistFunction":
        doc = json.loads(text)
        p = doc["param"]
        param = HurwitzParam(p["alpha"], p["c"], p["d"])
        chi = DirichletCharacter.from_dict(doc["character"])
        free = {int(k): complex(re, im) for k, (re, im) in doc["free_values"].items()}
        return cls(param, chi, int(doc["N0"]), int(doc["threshold"]), free)


def threshold_for(N0: int) -> int:
    return int(math.ceil(math.log(N0))) if N0 > 1 else 0


def make_twist(alpha, chi: DirichletCharacter, N0: int, free_values: Mapping[int, complex] | None = None) -> TwistFunction:
    """Build a type-(N0, chi) twist; missing free values default to 1.

    Rational case: keys of free_values are primes (p < L, or p dividing q).
    Transcendental case: keys are indices k < L.
    """
    param = as_param(alpha)
    L = threshold_for(N0)
    free = {int(k): _check_unit(v, f"free value at {k}") for k, v in (free_values or {}).items()}
    if param.is_rational:
        if math.gcd(chi.modulus, param.d) != 1:
            raise CompatibilityError(f"gcd(q={chi.modulus}, d={param.d}) != 1")
        if chi.principal:
            raise CompatibilityError("rational case needs a non-principal character")
        tw = TwistFunction(param, chi, N0, L, free)
        allowed = set(tw.free_primes)
        bad = [k for k in free if k not in allowed]
        if bad:
            raise DomainError(f"free values given at non-free primes {bad}")
        return tw
    bad = [k for k in free if not 0 <= k < L]
    if bad:
        raise DomainError(f"free indices must lie in [0, {L}), got {bad}")
    return TwistFunction(param, chi, N0, L, free)


def twist_value(a: TwistFunction, k: int) -> complex:
    """a(k + alpha)."""
    if k < 0:
        raise DomainError("index must be non-negative")
    if a.param.is_rational:
        c, d = a.param.c, a.param.d
        return a.integer_value(k * d + c) / a.integer_value(d)
    if k < a.threshold:
        return a.free_values.get(k, 1 + 0j)
    return cmath.exp(2j * math.pi * (k % a.q) / a.q)


def integer_table(a: TwistFunction, n_max: int) -> np.ndarray:
    """a(n) for n = 0..n_max on the integers (a(0) set to 0); rational case only."""
    spf = _sieve_for(n_max)
    vals = np.zeros(n_max + 1, dtype=complex)
    if n_max >= 1:
        vals[1] = 1.0
    primes = np.flatnonzero(spf[: n_max + 1] == np.arange(min(len(spf), n_max + 1)))
    primes = primes[primes >= 2]
    chi_tab = np.asarray(a.character.values, dtype=complex)
    pv = chi_tab[primes % a.q]
    small = (primes < a.threshold) | (a.q % primes == 0)
    pv[small] = 1.0
    for p, v in a.free_values.items():
        if p <= n_max:
            pv[np.searchsorted(primes, p)] = v
    vals[primes] = pv
    # composites in [2^i, 2^(i+1)) only depend on smaller integers
    lo = 4
    while lo <= n_max:
        hi = min(2 * lo, n_max + 1)
        n = np.arange(lo, hi)
        p = spf[n]
        comp = p != n
        n, p = n[comp], p[comp]
        vals[n] = vals[p] * vals[n // p]
        lo = hi
    return vals


def twist_values(a: TwistFunction, N: int) -> np.ndarray:
    """a(k + alpha) for k = 0..N."""
    k = np.arange(N + 1)
    if a.param.is_rational:
        c, d = a.param.c, a.param.d
        table = integer_table(a, N * d + c)
        return table[k * d + c] / table[d]
    out = np.exp(2j * np.pi * (k % a.q) / a.q)
    for idx in range(min(a.threshold, N + 1)):
        out[idx] = a.free_values.get(idx, 1 + 0j)
    return out


def twisted_zeta_trunc(s, alpha, twists: Sequence[TwistFunction | None], N: int) -> complex:
    """Sum over 0 <= k_1 < ... < k_n <= N of prod_j a_j(k_j + alpha_j) (k_j + alpha_j)^(-s_j).

    A twist entry of None means the trivial twist.
    """
    pt = as_point(s)
    n = len(pt)
    params = as_params(alpha, n)
    if len(twists) != n:
        raise ArityError("one twist per coordinate required")
    for tw, p in zip(twists, params):
        if tw is not None and abs(tw.param.alpha - p.alpha) > 1e-15:
            raise CompatibilityError("twist built on a different parameter")
    k = np.arange(N + 1)

    def weights(j):
        base = np.exp(-pt[j] * np.log(k + params[j].alpha))
        return base if twists[j] is None else base * twist_values(twists[j], N)

    w = weights(n - 1)
    for j in range(n - 2, -1, -1):
        after = np.append(np.cumsum(w[::-1])[::-1][1:], 0.0)
        w = weights(j) * after
    return complex(w.sum())


@dataclass(frozen=True)
class GrowthReport:
    checkpoints: tuple[int, ...]
    partial_sums: tuple[float, ...]
    running_max: tuple[float, ...]
    beta: float
    log_c: float

    def to_dict(self) -> dict:
        return {
            "checkpoints": list(self.checkpoints),
            "partial_sums": list(self.partial_sums),
            "running_max": list(self.running_max),
            "beta": self.beta,
            "log_c": self.log_c,
        }


def partial_sum_growth(a: TwistFunction, N_max: int, window: int = 16) -> GrowthReport:
    """Fit max_{n<=N} |S(n)| ~ c N^beta over geometric checkpoints from window to N_max.

    S(N) is the partial sum of a(k + alpha) over k <= N. At least 12
    checkpoints are used; the spacing is x2 when the range allows it.
    """
    if N_max < 100:
        raise DomainError("N_max must be at least 100")
    window = max(1, min(window, N_max // 64))
    vals = twist_values(a, N_max)
    S = np.abs(np.cumsum(vals))
    runmax = np.maximum.accumulate(S)
    span = math.log(N_max / window)
    count = max(12, int(span / math.log(2)) + 1)
    cps = np.unique(np.round(window * np.exp(np.linspace(0, span, count))).astype(int))
    cps = cps[cps <= N_max]
    y = np.log(np.maximum(runmax[cps], 1e-300))
    beta, logc = np.polyfit(np.log(cps), y, 1)
    return GrowthReport(
        tuple(int(c) for c in cps),
        tuple(float(S[c]) for c in cps),
        tuple(float(runmax[c]) for c in cps),
        float(beta),
        float(logc),
    )


# ------------------------------------------------------------------ Weyl


@dataclass(frozen=True)
class WeylTargetSpec:
    """Phase targets theta for each constrained index, with tolerance delta.

    Transcendental case: indices k = 0..floor(N - alpha), frequencies log(k + alpha).
    Rational case: pass primes; frequencies log p.
    """

    delta: float
    N: float
    theta: Mapping[int, float] = field(default_factory=dict)
    primes: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")
        if any(not 0 <= v < 1 for v in self.theta.values()):
            raise DomainError("targets must lie in [0, 1)")

    def frequencies(self, alpha: float) -> tuple[list[int], np.ndarray]:
        if self.primes is not None:
            idx = list(self.primes)
            return idx, np.log(np.asarray(idx, dtype=float))
        top = math.floor(self.N - alpha)
        idx = list(range(0, top + 1)) if top >= 0 else []
        return idx, np.log(np.asarray(idx, dtype=float) + alpha)


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, block]))


def weyl_set_measure(
    alpha,
    spec: WeylTargetSpec,
    T: float,
    samples: int = 100_000,
    seed: int = 0,
    displayed_form: bool = False,
    block: int = 65536,
) -> float:
    """Monte Carlo density of t in [0, T] with ||t log(k+alpha)/(2 pi) - theta_k|| < delta/2 for all indices.

    displayed_form switches the phase to t / (2 pi log(k + alpha)).
    """
    if samples < 1000:
        raise DomainError("need at least 1000 samples")
    a = float(as_param(alpha))
    idx, logs = spec.frequencies(a)
    if not idx:
        return 1.0
    theta = np.array([spec.theta.get(i, 0.0) for i in idx])
    if displayed_form:
        freq = 1.0 / (2 * math.pi * logs)
    else:
        freq = logs / (2 * math.pi)
    hits = 0
    done = 0
    b = 0
    while done < samples:
        m = min(block, samples - done)
        t = _rng(seed, b).uniform(0.0, T, m)
        ph = np.outer(t, freq) - theta
        dist = np.abs(ph - np.round(ph))
        hits += int(np.count_nonzero(np.all(dist < spec.delta / 2, axis=1)))
        done += m
        b += 1
    return hits / samples
