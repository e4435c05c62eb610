"""Hyperangular eigenvalue problem: Q(s, R), block determinants and root finding.

Two routes to the roots are provided.  ``q_matrix`` and ``block_determinant``
build the full product-basis matrix; they are the literal definition and are
used for cross-checks.  ``find_roots`` works in the reduced space of even-F2b
channels of one (F3b, M) block, where

    det Q_block  is proportional to  det B(s),   B(s) = diag(1/rho) - W(s),
    W(s) = s cot(s pi/2) I - X(s) O,   X(s) = 4 sin(s pi/6) / (sqrt(3) sin(s pi/2)),

with rho_F = a_F / (d R) and O the matrix of P+ + P- between the channel
states.  On every pole-free interval of the real axis (below s = 10) and on
the imaginary axis, W is monotone in the matrix sense, so the number of
negative eigenvalues of B changes by exactly the multiplicity of each root.
Roots are therefore located by bisecting on that count, which captures
tangential (even-multiplicity) roots that a sign-change scan would miss.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgumentError, NonPlateauError, RootFindingError
from .interaction import (
    ScatteringLengths,
    direct_factor,
    exchange_factor,
    m_matrix,
    spectator_a_matrix,
)
from .spin_algebra import (
    block_states,
    check_spin,
    coupled_state_vector,
    permutation_matrix,
)

JACOBI_D = np.sqrt(2.0) / 3.0**0.25
POLE_OFFSET = 1e-12
REAL_WINDOW_LIMIT = 10.0
ROOT_XTOL = 1e-12
SURROGATE_SCALE = 1e8

Axis = Literal["real", "imaginary"]


@dataclass(frozen=True)
class QContext:
    f: int
    a: ScatteringLengths
    R: float
    mass: float = 1.0

    def __post_init__(self):
        check_spin(self.f)
        if self.a.f != self.f:
            raise InvalidArgumentError(f"lengths are for f={self.a.f}, not f={self.f}")
        if not self.R > 0:
            raise InvalidArgumentError(f"hyperradius must be positive, got {self.R}")

    @property
    def jacobi_d(self) -> float:
        return JACOBI_D

    @property
    def mu(self) -> float:
        return self.mass / np.sqrt(3.0)

    @property
    def prefactor(self) -> float:
        return 1.0 / (JACOBI_D * self.R)


@lru_cache(maxsize=16)
def _a_matrices(f: int, a: ScatteringLengths):
    return tuple(spectator_a_matrix(f, a, k) for k in (1, 2, 3))


def q_matrix(ctx: QContext, s) -> np.ndarray:
    """Q = c (M1 + M2 P- + M3 P+) - I over the product basis, c = 3^(1/4) / (sqrt(2) R)."""
    A1, A2, A3 = _a_matrices(ctx.f, ctx.a)
    Pp = permutation_matrix(ctx.f, "cyclic")
    Pm = permutation_matrix(ctx.f, "anticyclic")
    M = m_matrix(1, s, A1) + m_matrix(2, s, A2) @ Pm + m_matrix(3, s, A3) @ Pp
    return ctx.prefactor * M - np.eye(M.shape[0])


def block_vectors(f: int, F3b: int, M: int | None = None) -> np.ndarray:
    """Columns are the coupled states of the (F3b, M) block."""
    return np.array([coupled_state_vector(f, c) for c in block_states(f, F3b, M)]).T


def block_matrix(ctx: QContext, s, F3b: int, M: int | None = None) -> np.ndarray:
    V = block_vectors(ctx.f, F3b, M)
    return V.T @ q_matrix(ctx, s) @ V


def block_determinant(ctx: QContext, s, F3b: int, M: int | None = None) -> float:
    """Determinant of the (F3b, M=F3b) block of S Q S^T."""
    if not 0 <= F3b <= 3 * ctx.f:
        raise InvalidArgumentError(f"F3b={F3b} outside [0, {3 * ctx.f}]")
    return float(np.linalg.det(block_matrix(ctx, s, F3b, M)))


@lru_cache(maxsize=None)
def channel_overlap(f: int, F3b: int, M: int | None = None) -> tuple[tuple[int, ...], np.ndarray]:
    """Even pair spins in the block and the matrix of P+ + P- between them."""
    states = [c for c in block_states(f, F3b, M) if c.F2b % 2 == 0]
    F2bs = tuple(c.F2b for c in states)
    if not states:
        O = np.zeros((0, 0))
    else:
        V = np.array([coupled_state_vector(f, c) for c in states]).T
        K = permutation_matrix(f, "cyclic") + permutation_matrix(f, "anticyclic")
        O = V.T @ K @ V
        O = 0.5 * (O + O.T)
    O.setflags(write=False)
    return F2bs, O


@dataclass(frozen=True)
class Root:
    value: float
    axis: Axis
    multiplicity: int = 1
    sector_weights: tuple[tuple[int, float], ...] = ()

    @property
    def s(self) -> complex:
        return complex(0.0, self.value) if self.axis == "imaginary" else complex(self.value, 0.0)

    @property
    def s_squared(self) -> float:
        return -self.value**2 if self.axis == "imaginary" else self.value**2

    def label(self, digits: int = 5) -> str:
        text = f"{self.value:.{digits}g}" + ("i" if self.axis == "imaginary" else "")
        return text + (f"^({self.multiplicity})" if self.multiplicity > 1 else "")


@dataclass(frozen=True)
class RootSet:
    F3b: int
    roots: tuple[Root, ...] = ()
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        ordered = sorted(self.roots, key=lambda r: (r.axis != "imaginary", r.value))
        object.__setattr__(self, "roots", tuple(ordered))

    @property
    def imaginary(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if r.axis == "imaginary")

    @property
    def real(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if r.axis == "real")

    @property
    def lowest_real(self) -> Root | None:
        return self.real[0] if self.real else None

    def summary(self, digits: int = 5) -> str:
        """Imaginary roots (largest first) then the lowest real root."""
        parts = [r.label(digits) for r in reversed(self.imaginary)]
        if self.lowest_real is not None:
            parts.append(self.lowest_real.label(digits))
        return ", ".join(parts)

    def expanded(self) -> list[tuple[float, Axis]]:
        """One entry per root counted with multiplicity."""
        return [(r.value, r.axis) for r in self.roots for _ in range(r.multiplicity)]


def _real_trig(x: float) -> tuple[float, float]:
    k = round(x / 2.0)
    t = x - 2.0 * k
    sign = -1.0 if k % 2 else 1.0
    return sign * np.sin(0.5 * np.pi * t), sign * np.cos(0.5 * np.pi * t)


@dataclass(frozen=True)
class ChannelProblem:
    """Reduced problem B(s) = diag(1/rho) - W(s) over the interacting channels of one block."""

    F3b: int
    F2b: tuple[int, ...]
    overlap: np.ndarray
    rho: np.ndarray
    _g: np.ndarray = field(init=False, repr=False, compare=False)
    _diag: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = np.minimum(1.0, np.sqrt(np.abs(self.rho)))
        object.__setattr__(self, "_g", g)
        object.__setattr__(self, "_diag", np.diag(g * g / self.rho))

    @classmethod
    def from_context(cls, ctx: QContext, F3b: int, M: int | None = None) -> "ChannelProblem":
        if not 0 <= F3b <= 3 * ctx.f:
            raise InvalidArgumentError(f"F3b={F3b} outside [0, {3 * ctx.f}]")
        F2bs, O = channel_overlap(ctx.f, F3b, M)
        keep = [i for i, F in enumerate(F2bs) if ctx.a[F] != 0.0]
        rho = np.array([ctx.a[F2bs[i]] for i in keep]) * ctx.prefactor
        return cls(F3b, tuple(F2bs[i] for i in keep), O[np.ix_(keep, keep)], rho)

    @property
    def size(self) -> int:
        return len(self.F2b)

    def scaled_matrix(self, axis: Axis, x: float) -> np.ndarray:
        """Symmetric matrix congruent (up to a positive factor) to B(s)."""
        G = np.outer(self._g, self._g)
        n = self.size
        if axis == "imaginary" or x <= 1.0:
            s = complex(0, x) if axis == "imaginary" else x
            W = direct_factor(s) * np.eye(n) - exchange_factor(s) * self.overlap
            return self._diag - G * W
        tau, cos = _real_trig(x)
        Wt = x * cos * np.eye(n) - (4.0 / np.sqrt(3.0)) * np.sin(np.pi * x / 6.0) * self.overlap
        return abs(tau) * self._diag - np.sign(tau) * G * Wt

    def negative_count(self, axis: Axis, x: float) -> int:
        return int(np.count_nonzero(np.linalg.eigvalsh(self.scaled_matrix(axis, x)) < 0.0))

    def sector_weights(self, axis: Axis, x: float, multiplicity: int) -> tuple[tuple[int, float], ...]:
        w, v = np.linalg.eigh(self.scaled_matrix(axis, x))
        idx = np.argsort(np.abs(w))[:multiplicity]
        vecs = self._g[:, None] * v[:, idx]
        vecs /= np.linalg.norm(vecs, axis=0)
        weights = (vecs**2).sum(axis=1) / multiplicity
        return tuple((F, float(round(wt, 12))) for F, wt in zip(self.F2b, weights))

    def _slice(self, axis: Axis, lo: float, hi: float, n_lo: int, n_hi: int, out: list) -> None:
        # bisect on the eigenvalue count; n is non-decreasing from lo to hi here
        stack = [(lo, hi, n_lo, n_hi)]
        while stack:
            lo, hi, n_lo, n_hi = stack.pop()
            if n_lo == n_hi:
                continue
            if hi - lo <= ROOT_XTOL + 4e-16 * abs(hi):
                out.append((0.5 * (lo + hi), n_hi - n_lo))
                continue
            mid = 0.5 * (lo + hi)
            n_mid = min(max(self._oriented_count(axis, mid), n_lo), n_hi)
            stack.append((mid, hi, n_mid, n_hi))
            stack.append((lo, mid, n_lo, n_mid))

    def _oriented_count(self, axis: Axis, x: float) -> int:
        # count that increases across each root: negatives on the imaginary axis,
        # non-negatives on the real axis
        n = self.negative_count(axis, x)
        return n if axis == "imaginary" else self.size - n

    def roots(self, s_max: float, imag_max: float | None = None) -> list[tuple[float, Axis, int]]:
        if self.size == 0:
            return []
        if s_max > REAL_WINDOW_LIMIT:
            raise InvalidArgumentError(f"real window is limited to s <= {REAL_WINDOW_LIMIT}")
        imag_max = s_max if imag_max is None else imag_max
        found: list[tuple[float, Axis, int]] = []
        raw: list = []
        n0, n1 = self._oriented_count("imaginary", 0.0), self._oriented_count("imaginary", imag_max)
        if n1 < n0:
            raise RootFindingError("eigenvalue count decreased along the imaginary axis", (0.0, imag_max))
        self._slice("imaginary", 0.0, imag_max, n0, n1, raw)
        found += [(x, "imaginary", m) for x, m in raw if x > 0.0]
        k = 0
        while 2 * k < s_max:
            lo = 2.0 * k + (POLE_OFFSET if k else 0.0)
            hi = min(2.0 * k + 2.0 - POLE_OFFSET, s_max)
            if hi <= lo:
                break
            raw = []
            n_lo, n_hi = self._oriented_count("real", lo), self._oriented_count("real", hi)
            if n_hi < n_lo:
                raise RootFindingError("eigenvalue count not monotone on the real axis", (lo, hi))
            self._slice("real", lo, hi, n_lo, n_hi, raw)
            found += [(x, "real", m) for x, m in raw if x > 0.0]
            k += 1
        return found


def _merge(roots: Iterable[tuple[float, Axis, int]], tol: float) -> list[tuple[float, Axis, int]]:
    merged: list[list] = []
    for x, axis, m in sorted(roots, key=lambda r: (r[1], r[0])):
        if merged and merged[-1][1] == axis and x - merged[-1][3] <= tol * max(1.0, x):
            last = merged[-1]
            last[0] = (last[0] * last[2] + x * m) / (last[2] + m)
            last[2] += m
            last[3] = x
        else:
            merged.append([x, axis, m, x])
    return [(x, axis, m) for x, axis, m, _ in merged]


def _build_rootset(problem: ChannelProblem, raw, merge_tol: float) -> RootSet:
    roots, notes = [], []
    for x, axis, m in _merge(raw, merge_tol):
        roots.append(Root(float(x), axis, int(m), problem.sector_weights(axis, x, m)))
        if m >= 3:
            notes.append(f"{m} coincident roots at {x:.10g} ({axis})")
    return RootSet(problem.F3b, tuple(roots), tuple(notes))


def find_roots(
    ctx: QContext,
    F3b: int,
    s_max: float = 5.0,
    *,
    M: int | None = None,
    imag_max: float | None = None,
    merge_tol: float = 1e-9,
) -> RootSet:
    """All roots with |s| <= s_max on the real axis and |s| <= imag_max on the imaginary axis."""
    problem = ChannelProblem.from_context(ctx, F3b, M)
    return _build_rootset(problem, problem.roots(s_max, imag_max), merge_tol)


@dataclass(frozen=True)
class Region:
    """Asymptotic region: channels in ``resonant`` have |a| >> R, the rest |a| << R."""

    f: int
    resonant: frozenset[int]

    def __post_init__(self):
        check_spin(self.f)
        object.__setattr__(self, "resonant", frozenset(self.resonant))
        bad = set(self.resonant) - set(range(0, 2 * self.f + 1, 2))
        if bad:
            raise InvalidArgumentError(f"{sorted(bad)} are not even channels of f={self.f}")

    @property
    def small(self) -> tuple[int, ...]:
        return tuple(F for F in range(0, 2 * self.f + 1, 2) if F not in self.resonant)

    @property
    def label(self) -> str:
        big = ",".join(str(F) for F in sorted(self.resonant))
        small = ",".join(str(F) for F in self.small)
        if not self.small:
            return f"R<<|a{big}|"
        if not self.resonant:
            return f"R>>|a{small}|"
        return f"|a{small}|<<R<<|a{big}|"


def all_regions(f: int) -> tuple[Region, ...]:
    """Regions in table order: by number of non-resonant channels, then lexicographically."""
    chans = tuple(range(0, 2 * check_spin(f) + 1, 2))
    out = []
    for k in range(len(chans) + 1):
        for small in itertools.combinations(chans, k):
            out.append(Region(f, frozenset(set(chans) - set(small))))
    return tuple(out)


def surrogate_lengths(region: Region, signs: dict[int, int] | None = None, scale: float = SURROGATE_SCALE) -> ScatteringLengths:
    """Lengths at R = 1 with |a| = scale for resonant channels and 1/scale otherwise."""
    signs = signs or {}
    vals = {}
    for F in range(0, 2 * region.f + 1, 2):
        sign = signs.get(F, -1)
        if sign not in (-1, 1):
            raise InvalidArgumentError(f"sign for a{F} must be +1 or -1, got {sign}")
        vals[F] = sign * (scale if F in region.resonant else 1.0 / scale)
    return ScatteringLengths.from_mapping(region.f, vals)


def _same_rootset(a: RootSet, b: RootSet, rtol: float) -> bool:
    if len(a.roots) != len(b.roots):
        return False
    for x, y in zip(a.roots, b.roots):
        if x.axis != y.axis or x.multiplicity != y.multiplicity:
            return False
        if abs(x.value - y.value) > rtol * max(abs(x.value), 1e-3):
            return False
    return True


def region_roots(
    f: int,
    region: Region,
    F3b: int,
    signs: dict[int, int] | None = None,
    s_max: float = 5.0,
    *,
    scale: float = SURROGATE_SCALE,
    check: bool = True,
    merge_tol: float = 1e-6,
) -> RootSet:
    """Plateau roots of a region, checked for stability under a tenfold rescaling."""
    f = check_spin(f)
    if region.f != f:
        raise InvalidArgumentError("region belongs to a different spin")
    ctx = QContext(f, surrogate_lengths(region, signs, scale), 1.0)
    result = find_roots(ctx, F3b, s_max, merge_tol=merge_tol)
    if check:
        ctx2 = QContext(f, surrogate_lengths(region, signs, 10.0 * scale), 1.0)
        other = find_roots(ctx2, F3b, s_max, merge_tol=merge_tol)
        if not _same_rootset(result, other, 1e-5):
            raise NonPlateauError(
                f"f={f} {region.label} F3b={F3b}: {result.summary(8)} vs {other.summary(8)} after rescaling"
            )
    return result


TABLE_COLUMNS = {1: tuple(range(1, 4)), 2: tuple(range(0, 7)), 3: tuple(range(1, 10))}


@dataclass(frozen=True)
class TableCell:
    f: int
    region: Region
    F3b: int
    roots: RootSet | None
    diagnostic: str | None = None


def _cell_job(args) -> TableCell:
    f, region, F3b, signs, s_max = args
    try:
        return TableCell(f, region, F3b, region_roots(f, region, F3b, signs, s_max))
    except (NonPlateauError, RootFindingError) as exc:
        return TableCell(f, region, F3b, None, str(exc))


def table_one(f: int, signs: dict[int, int] | None = None, s_max: float = 5.0, jobs: int = 1) -> list[TableCell]:
    """Every region row times every tabulated F3b, in row-major order."""
    f = check_spin(f)
    tasks = [(f, region, F3b, signs, s_max) for region in all_regions(f) for F3b in TABLE_COLUMNS[f]]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell_job, tasks, chunksize=4))
    return [_cell_job(t) for t in tasks]


# ---------------------------------------------------------------------------
# Closed-form scalar equations for f = 1, used as an independent check.

def _f1_channel_terms(which: int, axis: Axis, x: float):
    """Return (u, v, den) with u ~ s cot, v ~ sin(s pi/6)/sin(s pi/2) times den."""
    if axis == "imaginary":
        return x / np.tanh(0.5 * np.pi * x), np.sinh(np.pi * x / 6) / np.sinh(0.5 * np.pi * x), 1.0
    return x * np.cos(0.5 * np.pi * x), np.sin(np.pi * x / 6), np.sin(0.5 * np.pi * x)


def _f1_equation(which: int, a0: float, a2: float, R: float, axis: Axis, x: float) -> float:
    u, v, den = _f1_channel_terms(which, axis, x)
    c = 3**0.25 / (np.sqrt(2.0) * R)
    if which == 1:
        # multiplied through by den**2 so the real-axis function has no poles
        return (
            c * (a0 + a2) * u * den
            - np.sqrt(3.0) * a0 * a2 * u * u / (2 * R * R)
            - 2**1.5 * (2 * a0 + a2) * v * den / (3**1.25 * R)
            + 2 * a0 * a2 * u * v / (R * R)
            + 16 * a0 * a2 * v * v / (np.sqrt(3.0) * R * R)
            - den * den
        )
    if which == 2:
        return c * a2 * (u + (4 / np.sqrt(3.0)) * v) - den
    if which == 3:
        return c * a2 * (u - (8 / np.sqrt(3.0)) * v) - den
    raise InvalidArgumentError(f"F3b must be 1, 2 or 3, got {which}")


def f1_transcendental_roots(
    which: int, a0: float, a2: float, R: float, s_max: float = 5.0, step: float = 1e-3
) -> RootSet:
    """Roots of the scalar f = 1 channel equations by scanning and Brent refinement.

    Simple roots only; each pole-free interval is scanned on its own and the
    spurious zeros of the pole-cleared function at even integers are skipped.
    """
    if not R > 0:
        raise InvalidArgumentError("R must be positive")
    found: list[Root] = []

    def scan(axis: Axis, lo: float, hi: float):
        xs = np.append(np.arange(lo, hi, step), hi)
        ys = np.array([_f1_equation(which, a0, a2, R, axis, x) for x in xs])
        for i in np.nonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) < 0)[0]:
            x = brentq(lambda t: _f1_equation(which, a0, a2, R, axis, t), xs[i], xs[i + 1], xtol=1e-14, rtol=1e-15)
            found.append(Root(float(x), axis))

    scan("imaginary", 1e-9, s_max)
    k = 0
    while 2 * k < s_max:
        scan("real", 2 * k + 1e-9, min(2 * k + 2 - 1e-9, s_max))
        k += 1
    return RootSet(which, tuple(found))
