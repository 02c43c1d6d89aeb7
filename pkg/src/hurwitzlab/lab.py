"""Shift scans of zeta_n, with mean squares and zero probing alongside."""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, Union

import numpy as np
from scipy import ndimage

from .decomp import Polynomial
from .errors import BudgetError, DomainError
from .hurwitz import hurwitz_zeta
from .multizeta import _T_FLOOR, CompactBox, _gap_weights, as_params, zeta_values
from .numcore import DEFAULT_CUTOFF, SmoothCutoff

Target = Union[Polynomial, complex, float, Callable[[np.ndarray], np.ndarray]]

DEFAULT_MAX_EVALUATIONS = 1e8
_BLOCK = 256


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, block]))


def target_values(target: Target, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    if isinstance(target, Polynomial):
        return target(pts)
    if callable(target):
        return np.asarray(target(pts), dtype=complex).reshape(len(pts))
    return np.full(len(pts), complex(target))


def _eval_scale(max_im: float) -> float:
    # completed one-variable sums stay exact to ~1e-12 with T well below max |Im|
    return max(_T_FLOOR, max_im / 4.0)


class _ShiftEvaluator:
    """Values of zeta_n(s + i t; alpha) for the fixed points s of a box and many shifts t."""

    def __init__(self, alpha, points: np.ndarray, max_im: float, cutoff: SmoothCutoff = DEFAULT_CUTOFF):
        self.points = np.asarray(points, dtype=complex)
        self.n = self.points.shape[1]
        self.alpha = as_params(alpha, self.n)
        self.cutoff = cutoff
        self.max_im = max_im
        if self.n == 1:
            self._setup_one(max_im)

    def _setup_one(self, max_im: float) -> None:
        a = self.alpha[0].alpha
        T = _eval_scale(max_im)
        base = self.points[:, 0]
        w = _gap_weights(T, self.cutoff)
        self.logk = np.log(np.arange(len(w)) + a)
        self.A = w * np.exp(-np.outer(base, self.logk))
        lo = self.cutoff.plateau_end * T + a
        hi = self.cutoff.support_end * T + a
        v, wt, _, dphi = self.cutoff.bridge_rule(max_im * math.log(hi / lo))
        self.logx = np.log(T * v + a)
        self.C = (wt * dphi) * np.exp(np.outer(1.0 - base, self.logx))
        self.base = base

    def one_var(self, shifts: np.ndarray, phases: tuple | None = None) -> np.ndarray:
        """(S, P) values for scalar shifts.

        phases optionally supplies the matrices exp(-i t log(k+a)) and
        exp(-i t log x) over the bridge nodes, for callers that build them faster.
        """
        t = np.asarray(shifts, dtype=float)
        if phases is None:
            phases = (np.exp(-1j * np.outer(self.logk, t)), np.exp(-1j * np.outer(self.logx, t)))
        head = self.A @ phases[0]
        comp = (self.C @ phases[1]) / (1.0 - self.base[:, None] - 1j * t[None, :])
        return (head + comp).T

    def __call__(self, shifts: np.ndarray) -> np.ndarray:
        shifts = np.atleast_2d(np.asarray(shifts, dtype=float))
        if self.n == 1:
            return self.one_var(shifts[:, 0])
        out = np.empty((len(shifts), len(self.points)), dtype=complex)
        for i, t in enumerate(shifts):
            pts = self.points + 1j * t[None, :]
            T = max(_T_FLOOR, float(np.max(np.abs(pts.imag))))
            out[i] = zeta_values(pts, self.alpha, T, self.cutoff)
        return out


def sup_distance(alpha, t, target: Target, box: CompactBox) -> float:
    """Grid maximum of |zeta_n(s + i t; alpha) - target(s)| over the box."""
    pts = box.points()
    n = box.arity
    shift = np.broadcast_to(np.asarray(t, dtype=float), (n,))
    a = as_params(alpha, n)
    moved = pts + 1j * shift[None, :]
    if n == 1:
        vals = hurwitz_zeta(moved[:, 0], a[0].alpha)
    else:
        vals = zeta_values(moved, a, max(_T_FLOOR, float(np.max(np.abs(moved.imag)))))
    return float(np.max(np.abs(vals - target_values(target, pts))))


def refinement_study(alpha, t, target: Target, box: CompactBox) -> tuple[float, float]:
    """sup_distance on the box grid and on the grid with twice the resolution."""
    fine = CompactBox(box.sigma, box.t, 2 * box.grid - 1)
    return sup_distance(alpha, t, target, box), sup_distance(alpha, t, target, fine)


def validate_box(box: CompactBox) -> list[str]:
    """Non-fatal warnings about where the box sits."""
    msgs = []
    if not box.in_strip():
        msgs.append("box leaves the strip 1/2 < Re(s) < 1")
    if box.arity >= 2:
        lo = box.sigma[-2][0] + box.sigma[-1][0]
        if lo <= 1.5:
            msgs.append(f"min Re(s_(n-1) + s_n) = {lo:.3g} <= 3/2")
    for m in msgs:
        warnings.warn(m, stacklevel=3)
    return msgs


# ------------------------------------------------------------------ scans


@dataclass(frozen=True)
class Continuous:
    step: tuple[float, ...]

    def __post_init__(self):
        if any(h <= 0 for h in self.step):
            raise DomainError("steps must be positive")


@dataclass(frozen=True)
class Discrete:
    delta: tuple[float, ...]

    def __post_init__(self):
        if any(h <= 0 for h in self.delta):
            raise DomainError("lattice steps must be positive")


@dataclass(frozen=True)
class Line:
    direction: tuple[float, ...]
    step: float

    def __post_init__(self):
        if any(v <= 0 for v in self.direction):
            raise DomainError("line direction must be strictly positive")
        if self.step <= 0:
            raise DomainError("step must be positive")


Mode = Union[Continuous, Discrete, Line]


@dataclass(frozen=True)
class ShiftRecord:
    shift: tuple[float, ...]
    sup_distance: float
    passed: bool


@dataclass(frozen=True)
class ScanSpec:
    alpha: tuple
    mode: Mode
    t_range: tuple[float, float]
    target: Target
    box: CompactBox
    eps: float
    joint: tuple = ()  # extra (alpha, target) pairs, all scanned at the same shifts
    samples: int | None = None
    seed: int = 0
    xi: float = 0.3
    skip_below: float | None = None
    max_evaluations: float = DEFAULT_MAX_EVALUATIONS
    threads: int = 1

    def __post_init__(self):
        if not self.eps > 0 and self.eps != 0:
            raise DomainError("eps must be non-negative")
        lo, hi = self.t_range
        if not 0 <= lo <= hi:
            raise DomainError("need 0 <= t_lo <= t_hi")

    @property
    def arity(self) -> int:
        return self.box.arity

    def lower_cut(self) -> float:
        # shifts below T^xi sit outside the evaluator window for n >= 2
        if self.skip_below is not None:
            return self.skip_below
        return self.t_range[1] ** self.xi if self.arity >= 2 else 0.0

    def to_dict(self) -> dict:
        mode = type(self.mode).__name__
        return {
            "alpha": [getattr(a, "label", lambda: str(a))() for a in as_params(self.alpha, self.arity)],
            "mode": {"kind": mode, **{k: list(v) if isinstance(v, tuple) else v for k, v in vars(self.mode).items()}},
            "t_range": list(self.t_range),
            "target": _target_label(self.target),
            "box": self.box.to_dict(),
            "eps": _json_float(self.eps),
            "joint": [[str(a), _target_label(f)] for a, f in self.joint],
            "samples": self.samples,
            "seed": self.seed,
            "xi": self.xi,
            "skip_below": self.lower_cut(),
        }


def _target_label(target: Target) -> str:
    if isinstance(target, Polynomial):
        return str(target)
    if callable(target):
        return getattr(target, "__name__", "callable")
    return repr(complex(target))


def _json_float(x: float):
    return x if math.isfinite(x) else str(x)


def _axis(lo: float, hi: float, h: float) -> np.ndarray:
    return lo + h * np.arange(int(math.floor((hi - lo) / h + 1e-9)) + 1)


def enumerate_shifts(spec: ScanSpec) -> np.ndarray:
    """All shifts of the scan in lexicographic order, shape (S, n)."""
    n = spec.arity
    lo, hi = spec.t_range
    mode = spec.mode
    if spec.samples is not None:
        return _sampled_shifts(spec)
    if isinstance(mode, Continuous):
        steps = _per_axis(mode.step, n)
        axes = [_axis(lo, hi, h) for h in steps]
        count = math.prod(len(a) for a in axes)
        _check_budget(count, spec)
        grids = np.meshgrid(*axes, indexing="ij")
        shifts = np.stack([g.ravel() for g in grids], axis=1)
    elif isinstance(mode, Discrete):
        deltas = _per_axis(mode.delta, n)
        axes = [d * np.arange(math.ceil(lo / d - 1e-9), math.floor(hi / d + 1e-9) + 1) for d in deltas]
        count = math.prod(len(a) for a in axes)
        _check_budget(count, spec)
        grids = np.meshgrid(*axes, indexing="ij")
        shifts = np.stack([g.ravel() for g in grids], axis=1)
    else:
        v = np.asarray(_per_axis(mode.direction, n))
        tau = _axis(lo, hi, mode.step)
        _check_budget(len(tau), spec)
        shifts = tau[:, None] * v[None, :]
    cut = spec.lower_cut()
    keep = np.all(shifts >= cut, axis=1)
    return shifts[keep]


def _per_axis(values: Sequence[float], n: int) -> tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise DomainError(f"need 1 or {n} per-axis values")
    return values


def _sampled_shifts(spec: ScanSpec) -> np.ndarray:
    n = spec.arity
    lo, hi = spec.t_range
    lo = max(lo, spec.lower_cut())
    _check_budget(spec.samples, spec)
    if spec.samples <= 0:
        raise BudgetError("samples must be positive")
    blocks = []
    for b, start in enumerate(range(0, spec.samples, _BLOCK)):
        m = min(_BLOCK, spec.samples - start)
        u = _rng(spec.seed, b).random((m, n))
        mode = spec.mode
        if isinstance(mode, Line):
            v = np.asarray(_per_axis(mode.direction, n))
            blocks.append((lo + (hi - lo) * u[:, :1]) * v[None, :])
        elif isinstance(mode, Discrete):
            d = np.asarray(_per_axis(mode.delta, n))
            k_lo = np.ceil(lo / d - 1e-9)
            k_hi = np.floor(hi / d + 1e-9)
            blocks.append(d * (k_lo + np.floor(u * (k_hi - k_lo + 1))))
        else:
            blocks.append(lo + (hi - lo) * u)
    shifts = np.concatenate(blocks)
    order = np.lexsort(shifts.T[::-1])
    return shifts[order]


def _check_budget(count: int, spec: ScanSpec) -> None:
    total = float(count) * len(spec.box.points()) * (1 + len(spec.joint))
    if total > spec.max_evaluations:
        raise BudgetError(f"{count} shifts x {len(spec.box.points())} grid points exceeds cap {spec.max_evaluations:.3g}")


@dataclass
class ScanResult:
    density: float
    best: ShiftRecord | None
    records: list[ShiftRecord]
    spec: ScanSpec
    runtime: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def iter_records(self) -> Iterator[ShiftRecord]:
        return iter(self.records)

    def write_csv(self, path_or_file) -> None:
        if hasattr(path_or_file, "write"):
            _write_records(path_or_file, self.records, self.spec.arity)
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write_records(fh, self.records, self.spec.arity)

    def csv_text(self) -> str:
        buf = io.StringIO()
        _write_records(buf, self.records, self.spec.arity)
        return buf.getvalue()

    def summary(self) -> dict:
        best = None
        if self.best is not None:
            best = {"shift": list(self.best.shift), "sup_distance": self.best.sup_distance, "pass": self.best.passed}
        return {
            "spec": self.spec.to_dict(),
            "density": self.density,
            "count": len(self.records),
            "best": best,
            "seed": self.spec.seed,
            "warnings": self.warnings,
            "timing": {"runtime_seconds": self.runtime},
        }


def _write_records(fh, records: Sequence[ShiftRecord], n: int) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"t_{j + 1}" for j in range(n)] + ["sup_distance", "pass"])
    for r in records:
        w.writerow([repr(float(x)) for x in r.shift] + [repr(r.sup_distance), int(r.passed)])


def scan_shifts(spec: ScanSpec) -> ScanResult:
    """Sup-distance at every shift of the scan; density is the passing fraction."""
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        validate_box(spec.box)
    msgs = [str(w.message) for w in caught]
    shifts = enumerate_shifts(spec)
    pts = spec.box.points()
    max_im = float(np.max(np.abs(pts.imag))) + (float(shifts.max()) if len(shifts) else 0.0)
    pairs = [(spec.alpha, spec.target)] + list(spec.joint)
    evals = [(_ShiftEvaluator(a, pts, max_im), target_values(f, pts)) for a, f in pairs]

    def block(i: int) -> np.ndarray:
        t = shifts[i:i + _BLOCK]
        d = np.zeros(len(t))
        for ev, tv in evals:
            d = np.maximum(d, np.max(np.abs(ev(t) - tv[None, :]), axis=1))
        return d

    starts = range(0, len(shifts), _BLOCK)
    if spec.threads > 1:
        with ThreadPoolExecutor(spec.threads) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(i) for i in starts]
    dist = np.concatenate(parts) if parts else np.zeros(0)
    passed = dist < spec.eps
    records = [ShiftRecord(tuple(float(x) for x in t), float(d), bool(p)) for t, d, p in zip(shifts, dist, passed)]
    best = records[int(np.argmin(dist))] if records else None
    density = float(passed.mean()) if records else 0.0
    return ScanResult(density, best, records, spec, time.perf_counter() - start, msgs)


# ------------------------------------------------------------ mean square


@dataclass(frozen=True)
class MeanSquareResult:
    integral: float
    ratio: float
    main_term: float
    samples: int
    T: float
    xi: float
    seed: int

    def to_dict(self) -> dict:
        return dict(vars(self))


def mean_square(alpha, n: int, T: float, xi: float = 0.3, samples: int | None = None, seed: int = 0) -> MeanSquareResult:
    """Estimate the integral of |zeta_n(1/2 + i t; alpha)|^2 over [T^xi, T]^n.

    n = 1 uses a randomly shifted lattice (default spacing 1/4), n >= 2
    stratified sampling with one point per cell (default 10^5 points).
    The ratio is taken against (T log T)^n / n!.
    """
    if n > 3:
        raise BudgetError("mean square limited to n <= 3")
    if T < 10:
        raise DomainError("T must be at least 10")
    a = as_params(alpha, n)
    lo = T**xi
    if samples is None:
        samples = int(math.ceil(4 * (T - lo))) if n == 1 else 100_000
    if samples <= 0:
        raise BudgetError("samples must be positive")
    rng = _rng(seed, 0)
    main = (T * math.log(T)) ** n / math.factorial(n)
    if n == 1:
        h = (T - lo) / samples
        t0 = lo + h * rng.random()
        sq = _mean_square_lattice(a, t0, h, samples)
        integral = h * sq
    else:
        m = max(1, int(math.floor(samples ** (1.0 / n) + 1e-9)))
        h = (T - lo) / m
        cells = np.stack(np.meshgrid(*[np.arange(m)] * n, indexing="ij"), axis=-1).reshape(-1, n)
        t = lo + h * (cells + rng.random(cells.shape))
        samples = len(t)
        total = 0.0
        for i in range(0, len(t), 1 << 14):
            pts = 0.5 + 1j * t[i:i + (1 << 14)]
            vals = zeta_values(pts, a, max(T, _T_FLOOR))
            total += float(np.sum(np.abs(vals) ** 2))
        integral = (T - lo) ** n * total / samples
    return MeanSquareResult(integral, integral / main, main, samples, T, xi, seed)


def _mean_square_lattice(a, t0: float, h: float, count: int) -> float:
    ev = _ShiftEvaluator(a, np.array([[0.5 + 0j]]), t0 + h * count)
    # exp(-i (start + offset) log x) = exp(-i start log x) * F[offset]: one multiply per entry
    offsets = h * np.arange(_BLOCK * 4)
    Fk = np.exp(-1j * np.outer(ev.logk, offsets))
    Fx = np.exp(-1j * np.outer(ev.logx, offsets))
    total = 0.0
    width = len(offsets)
    for i in range(0, count, width):
        m = min(width, count - i)
        start = t0 + h * i
        Ek = Fk[:, :m] * np.exp(-1j * start * ev.logk)[:, None]
        Ex = Fx[:, :m] * np.exp(-1j * start * ev.logx)[:, None]
        vals = ev.one_var(start + offsets[:m], phases=(Ek, Ex))
        total += float(np.sum(np.abs(vals) ** 2))
    return total


# ------------------------------------------------------------------ zeros


@dataclass(frozen=True)
class ZeroRecord:
    location: tuple[complex, ...]
    residual: float
    winding: int
    winding_wide: int

    @property
    def certified(self) -> bool:
        return self.winding >= 1 and self.winding == self.winding_wide

    def to_dict(self) -> dict:
        return {
            "location": [[z.real, z.imag] for z in self.location],
            "residual": self.residual,
            "winding": self.winding,
            "winding_wide": self.winding_wide,
            "certified": self.certified,
        }


def _winding(f, center: complex, r: float, m: int = 256) -> int:
    z = center + r * np.exp(2j * np.pi * np.arange(m + 1) / m)
    vals = f(z)
    darg = np.angle(vals[1:] / vals[:-1])
    return int(round(float(darg.sum()) / (2 * np.pi)))


def _newton(f, z0: complex, tol: float, h: float = 1e-6, iters: int = 60) -> tuple[complex, float]:
    z = complex(z0)
    fz = complex(f(np.array([z]))[0])
    for _ in range(iters):
        if abs(fz) < tol:
            break
        d = f(np.array([z + h, z - h]))
        deriv = (d[0] - d[1]) / (2 * h)
        if deriv == 0:
            break
        step = fz / deriv
        lam = 1.0
        while lam > 1e-4:
            zn = z - lam * step
            fn = complex(f(np.array([zn]))[0])
            if abs(fn) < abs(fz):
                break
            lam /= 2
        else:
            break
        z, fz = zn, fn
    return z, abs(fz)


def find_zeros(
    alpha,
    box: CompactBox,
    resolution: float = 0.05,
    refine_tol: float = 1e-10,
    seed_threshold: float = 0.3,
) -> list[ZeroRecord]:
    """Grid minima of |zeta_n| refined by damped Newton in the last coordinate.

    For n >= 2 the first n-1 coordinates run over their box grids and the
    search is a one-variable problem in s_n. Every find carries the winding
    number of zeta_n around circles of radius resolution/4 and 1.5 times that.
    """
    n = box.arity
    a = as_params(alpha, n)
    if n == 1:
        fixed = [()]
    else:
        heads = [box.axis_points(j) for j in range(n - 1)]
        mesh = np.meshgrid(*heads, indexing="ij")
        fixed = [tuple(c) for c in np.stack([m.ravel() for m in mesh], axis=1)]
    (slo, shi), (tlo, thi) = box.sigma[-1], box.t[-1]
    xs = _axis(slo, shi, resolution)
    ys = _axis(tlo, thi, resolution)
    Z = xs[:, None] + 1j * ys[None, :]
    out: dict[tuple, ZeroRecord] = {}
    for head in fixed:
        f = _slice_function(a, head)
        vals = np.abs(f(Z.ravel())).reshape(Z.shape)
        is_min = (vals == ndimage.minimum_filter(vals, size=3, mode="nearest")) & (vals < seed_threshold)
        for i, j in zip(*np.nonzero(is_min)):
            z, res = _newton(f, Z[i, j], refine_tol)
            if res >= refine_tol:
                continue
            if not (slo <= z.real <= shi and tlo <= z.imag <= thi):
                continue
            r = resolution / 4
            rec = ZeroRecord(tuple(complex(c) for c in head) + (complex(z),), res, _winding(f, z, r), _winding(f, z, 1.5 * r))
            cell = head + (round(z.real / resolution), round(z.imag / resolution))
            if cell not in out or out[cell].residual > res:
                out[cell] = rec
    recs = sorted(out.values(), key=lambda r: (tuple((z.real, z.imag) for z in r.location)))
    # merge the same zero reached from neighbouring cells
    merged: list[ZeroRecord] = []
    for r in recs:
        if merged and merged[-1].location[:-1] == r.location[:-1] and abs(merged[-1].location[-1] - r.location[-1]) < 1e-7:
            if r.residual < merged[-1].residual:
                merged[-1] = r
            continue
        merged.append(r)
    return merged


def _slice_function(a, head: tuple):
    n = len(a)
    if n == 1:
        alpha = a[0].alpha
        return lambda z: hurwitz_zeta(np.asarray(z, dtype=complex), alpha)

    def f(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        pts = np.empty((len(z), n), dtype=complex)
        pts[:, :-1] = head
        pts[:, -1] = z
        T = max(_T_FLOOR, float(np.max(np.abs(pts.imag))))
        return zeta_values(pts, a, T)

    return f


def zeros_summary(records: Sequence[ZeroRecord]) -> str:
    return json.dumps([r.to_dict() for r in records])
