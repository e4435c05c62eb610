"""Angular-momentum algebra for three identical spin-f bosons.

Product states are indexed lexicographically with each m running from +f
down to -f, so ``(f, f, f)`` is index 0 and ``(-f, -f, -f)`` is the last.
Coupled states |F3b M (F2b)> pair particles 1 and 2 into F2b first and then
add particle 3.  Clebsch-Gordan coefficients follow the Condon-Shortley
phase convention.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt
from typing import Literal

import numpy as np

from .errors import InvalidArgumentError

SUPPORTED_SPINS = (1, 2, 3)


def check_spin(f: int) -> int:
    """Return ``f`` as an int, rejecting anything outside the supported range."""
    if isinstance(f, bool) or int(f) != f or int(f) not in SUPPORTED_SPINS:
        raise InvalidArgumentError(f"atomic spin f must be one of {SUPPORTED_SPINS}, got {f!r}")
    return int(f)


@dataclass(frozen=True)
class ProductState:
    m1: int
    m2: int
    m3: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class CoupledState:
    F2b: int
    F3b: int
    MF3b: int

    def validate(self, f: int) -> None:
        if not 0 <= self.F2b <= 2 * f:
            raise InvalidArgumentError(f"F2b={self.F2b} outside [0, {2 * f}]")
        if not abs(f - self.F2b) <= self.F3b <= f + self.F2b:
            raise InvalidArgumentError(f"F3b={self.F3b} cannot be reached from F2b={self.F2b} and f={f}")
        if abs(self.MF3b) > self.F3b:
            raise InvalidArgumentError(f"|MF3b|={abs(self.MF3b)} exceeds F3b={self.F3b}")


@dataclass(frozen=True)
class SymmetryTally:
    """Number of fully symmetric, mixed and fully antisymmetric states in a block."""

    symmetric: int
    mixed: int
    antisymmetric: int

    @property
    def total(self) -> int:
        return self.symmetric + self.mixed + self.antisymmetric


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def clebsch_gordan_squared(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> Fraction:
    """Exact signed square of <j1 m1 j2 m2|J M>: sign(c) * c**2 as a Fraction."""
    if any(isinstance(x, bool) or int(x) != x for x in (j1, m1, j2, m2, J, M)):
        raise InvalidArgumentError("only integer angular momenta are supported")
    j1, m1, j2, m2, J, M = (int(x) for x in (j1, m1, j2, m2, J, M))
    for j, m in ((j1, m1), (j2, m2), (J, M)):
        if j < 0:
            raise InvalidArgumentError(f"negative angular momentum {j}")
        if abs(m) > j:
            raise InvalidArgumentError(f"|m|={abs(m)} exceeds j={j}")
    if m1 + m2 != M or not abs(j1 - j2) <= J <= j1 + j2:
        return Fraction(0)
    pre = Fraction(
        (2 * J + 1) * factorial(J + j1 - j2) * factorial(J - j1 + j2) * factorial(j1 + j2 - J),
        factorial(j1 + j2 + J + 1),
    )
    pre *= (
        factorial(J + M) * factorial(J - M) * factorial(j1 - m1) * factorial(j1 + m1)
        * factorial(j2 - m2) * factorial(j2 + m2)
    )
    total = Fraction(0)
    for k in range(j1 + j2 - J + 1):
        den = (k, j1 + j2 - J - k, j1 - m1 - k, j2 + m2 - k, J - j2 + m1 + k, J - j1 - m2 + k)
        if min(den) < 0:
            continue
        term = Fraction(1, int(np.prod([factorial(d) for d in den], dtype=object)))
        total += -term if k % 2 else term
    sq = pre * total * total
    return -sq if total < 0 else sq


@lru_cache(maxsize=None)
def clebsch_gordan(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2|J M> (Condon-Shortley phases).

    Zero when M != m1 + m2 or the triangle rule fails.  The square is
    accumulated exactly so the only rounding is the final square root.
    """
    sq = clebsch_gordan_squared(j1, m1, j2, m2, J, M)
    return -sqrt(-sq) if sq < 0 else sqrt(sq)


@lru_cache(maxsize=None)
def build_product_basis(f: int) -> tuple[ProductState, ...]:
    f = check_spin(f)
    ms = range(f, -f - 1, -1)
    return tuple(ProductState(*t) for t in itertools.product(ms, repeat=3))


def product_index(f: int, state: ProductState | tuple[int, int, int]) -> int:
    """Position of a product state in ``build_product_basis(f)``."""
    t = state.as_tuple() if isinstance(state, ProductState) else tuple(state)
    n = 2 * f + 1
    if any(abs(m) > f for m in t):
        raise InvalidArgumentError(f"{t} is not a valid spin-{f} product state")
    return (f - t[0]) * n * n + (f - t[1]) * n + (f - t[2])


@lru_cache(maxsize=None)
def coupled_states(f: int) -> tuple[CoupledState, ...]:
    """All coupled states ordered by (F3b, MF3b, F2b), MF3b descending."""
    f = check_spin(f)
    out = []
    for F3b in range(3 * f + 1):
        for M in range(F3b, -F3b - 1, -1):
            for F2b in range(2 * f + 1):
                if abs(f - F2b) <= F3b <= f + F2b:
                    out.append(CoupledState(F2b, F3b, M))
    return tuple(out)


def block_states(f: int, F3b: int, M: int | None = None) -> tuple[CoupledState, ...]:
    """Coupled states of one (F3b, MF3b) block; MF3b defaults to F3b."""
    f = check_spin(f)
    if not 0 <= F3b <= 3 * f:
        raise InvalidArgumentError(f"F3b={F3b} outside [0, {3 * f}]")
    M = F3b if M is None else M
    if abs(M) > F3b:
        raise InvalidArgumentError(f"|MF3b|={abs(M)} exceeds F3b={F3b}")
    return tuple(c for c in coupled_states(f) if c.F3b == F3b and c.MF3b == M)


@lru_cache(maxsize=None)
def coupled_state_vector(f: int, c: CoupledState) -> np.ndarray:
    """Coefficients of |F3b M (F2b)> over the product basis (unit norm)."""
    f = check_spin(f)
    c.validate(f)
    vec = np.zeros(len(build_product_basis(f)))
    for m1 in range(-f, f + 1):
        for m2 in range(-f, f + 1):
            m3 = c.MF3b - m1 - m2
            if abs(m3) > f or abs(m1 + m2) > c.F2b:
                continue
            pair = clebsch_gordan(f, m1, f, m2, c.F2b, m1 + m2)
            if pair == 0.0:
                continue
            vec[product_index(f, (m1, m2, m3))] = pair * clebsch_gordan(c.F2b, m1 + m2, f, m3, c.F3b, c.MF3b)
    return _readonly(vec)


@lru_cache(maxsize=None)
def _permutation(f: int, order: tuple[int, int, int]) -> np.ndarray:
    # row Sigma has a single 1 at the column whose slots are Sigma reordered by ``order``
    basis = build_product_basis(check_spin(f))
    P = np.zeros((len(basis), len(basis)))
    for i, st in enumerate(basis):
        t = st.as_tuple()
        P[i, product_index(f, tuple(t[k] for k in order))] = 1.0
    return _readonly(P)


def permutation_matrix(f: int, kind: Literal["cyclic", "anticyclic"]) -> np.ndarray:
    """Cyclic (P+) or anticyclic (P-) particle permutation on the product basis.

    (P+)[S, S'] = 1 exactly when m1 = m2', m2 = m3' and m3 = m1'.
    """
    if kind == "cyclic":
        return _permutation(f, (2, 0, 1))
    if kind == "anticyclic":
        return _permutation(f, (1, 2, 0))
    raise InvalidArgumentError(f"kind must be 'cyclic' or 'anticyclic', got {kind!r}")


def transposition_matrix(f: int, pair: tuple[int, int]) -> np.ndarray:
    """Exchange of two particles (1-based labels) on the product basis."""
    i, j = sorted(pair)
    if (i, j) not in ((1, 2), (1, 3), (2, 3)):
        raise InvalidArgumentError(f"invalid particle pair {pair}")
    order = [0, 1, 2]
    order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
    return _permutation(f, tuple(order))


@lru_cache(maxsize=None)
def s_transformation(f: int) -> np.ndarray:
    """Orthogonal change of basis whose rows are the coupled state vectors."""
    S = np.array([coupled_state_vector(f, c) for c in coupled_states(f)])
    return _readonly(S)


@lru_cache(maxsize=None)
def single_spin_operators(f: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f_z, f_+, f_-) for one spin-f particle in the m = f..-f basis."""
    ms = np.arange(f, -f - 1, -1)
    fz = np.diag(ms.astype(float))
    fp = np.zeros((2 * f + 1, 2 * f + 1))
    for i in range(1, 2 * f + 1):
        m = ms[i]
        fp[i - 1, i] = sqrt(f * (f + 1) - m * (m + 1))
    return tuple(_readonly(x) for x in (fz, fp, fp.T.copy()))


def _embed(op: np.ndarray, slot: int, nparticles: int) -> np.ndarray:
    eye = np.eye(op.shape[0])
    out = np.ones((1, 1))
    for k in range(nparticles):
        out = np.kron(out, op if k == slot else eye)
    return out


@lru_cache(maxsize=None)
def total_spin_operators(f: int, nparticles: int = 3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total (F_z, F_+, F_-) on the product space of ``nparticles`` spins."""
    ops = single_spin_operators(check_spin(f))
    out = []
    for op in ops:
        out.append(_readonly(sum(_embed(op, k, nparticles) for k in range(nparticles))))
    return tuple(out)


def total_spin_squared(f: int, nparticles: int = 3) -> np.ndarray:
    Fz, Fp, Fm = total_spin_operators(f, nparticles)
    return Fm @ Fp + Fz @ Fz + Fz


@lru_cache(maxsize=None)
def symmetry_classify(f: int, F3b: int) -> SymmetryTally:
    """Count symmetric / mixed / antisymmetric states in the (F3b, M=F3b) block."""
    states = block_states(f, F3b)
    if not states:
        return SymmetryTally(0, 0, 0)
    V = np.array([coupled_state_vector(f, c) for c in states]).T
    even = [np.eye(V.shape[0]), permutation_matrix(f, "cyclic"), permutation_matrix(f, "anticyclic")]
    odd = [transposition_matrix(f, p) for p in ((1, 2), (1, 3), (2, 3))]
    sym = V.T @ (sum(even) + sum(odd)) @ V / 6.0
    anti = V.T @ (sum(even) - sum(odd)) @ V / 6.0
    n_sym = int(round(np.trace(sym)))
    n_anti = int(round(np.trace(anti)))
    return SymmetryTally(n_sym, len(states) - n_sym - n_anti, n_anti)


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    """Dump a matrix row-major with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(np.asarray(matrix, dtype=float)):
            writer.writerow([format(x, ".17g") for x in row])
