"""Scattering-length operators and the s-dependent M matrices.

Lengths are in units of r_vdW.  Only even pair spins F2b interact; odd
channels always carry zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError, PoleError
from .spin_algebra import build_product_basis, check_spin, clebsch_gordan

POLE_THRESHOLD = 1e-9
_FOUR_OVER_ROOT3 = 4.0 / np.sqrt(3.0)


@dataclass(frozen=True)
class ScatteringLengths:
    """Even-channel lengths (a0, a2, ..., a_2f)."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) - 1 not in (1, 2, 3):
            raise InvalidArgumentError(f"expected 2, 3 or 4 lengths (f=1..3), got {len(vals)}")
        if not all(np.isfinite(vals)):
            raise InvalidArgumentError("scattering lengths must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, f: int, lengths: Mapping[int, float]) -> "ScatteringLengths":
        f = check_spin(f)
        extra = set(lengths) - set(range(0, 2 * f + 1, 2))
        if extra:
            raise InvalidArgumentError(f"no even channel F2b in {sorted(extra)} for f={f}")
        return cls(tuple(lengths.get(F, 0.0) for F in range(0, 2 * f + 1, 2)))

    @property
    def f(self) -> int:
        return len(self.values) - 1

    @property
    def channels(self) -> tuple[int, ...]:
        return tuple(range(0, 2 * self.f + 1, 2))

    def __getitem__(self, F2b: int) -> float:
        if not 0 <= F2b <= 2 * self.f:
            raise InvalidArgumentError(f"F2b={F2b} outside [0, {2 * self.f}]")
        return 0.0 if F2b % 2 else self.values[F2b // 2]

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.channels, self.values))

    def scaled(self, factor: float) -> "ScatteringLengths":
        return ScatteringLengths(tuple(factor * v for v in self.values))

    def __add__(self, other: "ScatteringLengths") -> "ScatteringLengths":
        if other.f != self.f:
            raise InvalidArgumentError("cannot add lengths for different spins")
        return ScatteringLengths(tuple(x + y for x, y in zip(self.values, other.values)))


@lru_cache(maxsize=None)
def two_body_coupled_basis(f: int) -> tuple[tuple[int, int], ...]:
    """Pair states (F2b, M) ordered by F2b ascending, M descending."""
    f = check_spin(f)
    return tuple((F, M) for F in range(2 * f + 1) for M in range(F, -F - 1, -1))


@lru_cache(maxsize=None)
def two_body_transform(f: int) -> np.ndarray:
    """Rows are the pair states |F2b M> over the pair product basis (m_a, m_b descending)."""
    n = 2 * f + 1
    T = np.zeros((n * n, n * n))
    for row, (F, M) in enumerate(two_body_coupled_basis(f)):
        for ia, ma in enumerate(range(f, -f - 1, -1)):
            mb = M - ma
            if abs(mb) <= f:
                T[row, ia * n + (f - mb)] = clebsch_gordan(f, ma, f, mb, F, M)
    T.setflags(write=False)
    return T


def scattering_operator(f: int, a: ScatteringLengths) -> np.ndarray:
    """Diagonal scattering-length operator on the pair coupled basis."""
    f = check_spin(f)
    _check_match(f, a)
    return np.diag([a[F] for F, _ in two_body_coupled_basis(f)])


def pair_operator(f: int, a: ScatteringLengths) -> np.ndarray:
    """Scattering-length operator on the pair product basis."""
    T = two_body_transform(f)
    return T.T @ scattering_operator(f, a) @ T


def _check_match(f: int, a: ScatteringLengths) -> None:
    if a.f != f:
        raise InvalidArgumentError(f"lengths are for f={a.f}, not f={f}")


@dataclass(frozen=True)
class SpectatorAMatrix:
    """Pair interaction in the three-body product basis with particle ``k`` spectating."""

    k: int
    matrix: np.ndarray


def spectator_a_matrix(f: int, a: ScatteringLengths, k: int) -> SpectatorAMatrix:
    f = check_spin(f)
    _check_match(f, a)
    if k not in (1, 2, 3):
        raise InvalidArgumentError(f"spectator index must be 1, 2 or 3, got {k}")
    n = 2 * f + 1
    pair = pair_operator(f, a).reshape(n, n, n, n)
    eye = np.eye(n)
    if k == 1:
        A = np.einsum("ad,bcef->abcdef", eye, pair)
    elif k == 2:
        A = np.einsum("be,acdf->abcdef", eye, pair)
    else:
        A = np.einsum("cf,abde->abcdef", eye, pair)
    A = A.reshape(n**3, n**3)
    A = 0.5 * (A + A.T)
    A.setflags(write=False)
    assert A.shape[0] == len(build_product_basis(f))
    return SpectatorAMatrix(k, A)


def _as_axis_value(s) -> tuple[str, float]:
    """Split ``s`` into ('real', s) or ('imaginary', sigma)."""
    z = complex(s)
    if z.imag == 0.0:
        return "real", z.real
    if z.real == 0.0:
        return "imaginary", z.imag
    raise InvalidArgumentError(f"s must be real or purely imaginary, got {s!r}")


def direct_factor(s) -> float:
    """s*cot(s*pi/2) on the real axis, sigma*coth(sigma*pi/2) for s = i*sigma."""
    axis, x = _as_axis_value(s)
    if axis == "imaginary":
        x = abs(x)
        if x < 1e-8:
            return 2.0 / np.pi
        return float(x / np.tanh(0.5 * np.pi * x))
    _check_pole(x)
    return float((2.0 / np.pi) * np.cos(0.5 * np.pi * x) / np.sinc(0.5 * x))


def exchange_factor(s) -> float:
    """4 sin(s*pi/6) / (sqrt(3) sin(s*pi/2)), with the hyperbolic form on the imaginary axis."""
    axis, x = _as_axis_value(s)
    if axis == "imaginary":
        x = abs(x)
        if x == 0.0:
            return _FOUR_OVER_ROOT3 / 3.0
        u, v = np.pi * x / 6.0, np.pi * x / 2.0
        # sinh(u)/sinh(v) without overflow for large sigma
        return float(_FOUR_OVER_ROOT3 * np.exp(u - v) * np.expm1(-2 * u) / np.expm1(-2 * v))
    _check_pole(x)
    return float(_FOUR_OVER_ROOT3 * np.sinc(x / 6.0) / (3.0 * np.sinc(0.5 * x)))


def half_sine(s: float) -> float:
    """sin(s*pi/2), reduced about the nearest even integer for accuracy near poles."""
    k = round(s / 2.0)
    t = s - 2.0 * k
    return float((-1.0) ** k * np.sin(0.5 * np.pi * t))


def _check_pole(x: float) -> None:
    # s = 0 is removable: both factors have finite limits there
    if round(x / 2.0) != 0 and abs(half_sine(x)) < POLE_THRESHOLD:
        raise PoleError(x)


def m_matrix(i: int, s, A: SpectatorAMatrix) -> np.ndarray:
    """M^(i): A^(1) times the direct factor, or minus A^(2,3) times the exchange factor."""
    if i != A.k:
        raise InvalidArgumentError(f"M^({i}) needs the spectator-{i} A matrix, got k={A.k}")
    if i == 1:
        return direct_factor(s) * A.matrix
    if i in (2, 3):
        return -exchange_factor(s) * A.matrix
    raise InvalidArgumentError(f"index must be 1, 2 or 3, got {i}")
