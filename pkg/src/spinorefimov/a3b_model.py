"""Log-periodic closed forms for three-body scattering lengths near Efimov resonances.

All lengths are in r_vdW and results in r_vdW**4.  Negative lengths enter the
logarithms and power-law prefactors through their magnitudes.  The loss
parameter eta shifts the tangent argument to x + i*eta.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, InvalidArgumentError

S0 = 1.0062
S0_PRIME = 0.3788
# prefactor exponents taken verbatim from the published closed forms
EXPONENT_F1 = 0.82
EXPONENT_F2_MIXED = 1.37
EXPONENT_F2_LOW = 1.04
DEFAULT_EXPONENTS = {"f1": EXPONENT_F1, "f2_mixed": EXPONENT_F2_MIXED, "f2_low": EXPONENT_F2_LOW}

PLACEHOLDER_A_MINUS = -10.0
PLACEHOLDER_WARNING = (
    "alpha, beta, gamma and a_minus are placeholder values; supply computed constants for quantitative use"
)

F3B_F1 = (1, 3)
F3B_F2 = (0, 2, 3, 4, 6)

POLE_TOL = 1e-12


def _per_f3b(value, F3b: int) -> float:
    return float(value[F3b]) if isinstance(value, Mapping) else float(value)


@dataclass(frozen=True)
class ResonanceParams:
    """Universal constants (scalars or per-F3b mappings) and resonance positions a_minus[F3b]."""

    alpha: float | Mapping[int, float] = 0.0
    beta: float | Mapping[int, float] = 1.0
    gamma: float | Mapping[int, float] = 0.0
    a_minus: Mapping[int, float] = field(default_factory=dict)
    s0: float = S0
    s0_prime: float = S0_PRIME
    eta: float = 0.0
    exponents: Mapping[str, float] = field(default_factory=dict)
    placeholder: bool = True

    def __post_init__(self):
        if self.eta < 0:
            raise InvalidArgumentError("eta must be non-negative")
        for F, v in self.a_minus.items():
            if not v < 0:
                raise InvalidArgumentError(f"a_minus[{F}] must be negative, got {v}")
        unknown = set(self.exponents) - set(DEFAULT_EXPONENTS)
        if unknown:
            raise InvalidArgumentError(f"unknown exponent keys {sorted(unknown)}; use {sorted(DEFAULT_EXPONENTS)}")

    def exponent(self, name: str) -> float:
        return float(self.exponents.get(name, DEFAULT_EXPONENTS[name]))

    def constants(self, F3b: int) -> tuple[float, float, float]:
        return _per_f3b(self.alpha, F3b), _per_f3b(self.beta, F3b), _per_f3b(self.gamma, F3b)

    def resonance(self, F3b: int) -> float:
        return float(self.a_minus.get(F3b, PLACEHOLDER_A_MINUS))

    def uses_placeholders(self, F3b: int) -> bool:
        return self.placeholder or F3b not in self.a_minus


def tan_shifted(x: float, eta: float) -> complex:
    """tan(x + i eta); infinite real part at an exact pole with eta = 0."""
    if eta == 0.0:
        if abs(math.cos(x)) < POLE_TOL:
            return complex(math.copysign(math.inf, math.sin(x)), 0.0)
        return complex(math.tan(x), 0.0)
    return cmath.tan(complex(x, eta))


def _bracket(p: ResonanceParams, F3b: int, phase: float) -> complex:
    alpha, beta, _ = p.constants(F3b)
    return alpha - beta * tan_shifted(phase, p.eta)


def _ratio(x: float, y: float) -> float:
    return abs(x) / abs(y)


def _require_negative(**lengths: float) -> None:
    for name, v in lengths.items():
        if not v < 0:
            raise DomainError(f"{name}={v} must be negative")


def tangent_phase(f: int, F3b: int, lengths: Sequence[float], p: ResonanceParams) -> float:
    """Real part of the tangent argument for the given formula."""
    am = p.resonance(F3b)
    if f == 1:
        return p.s0 * math.log(_ratio(lengths[1], am))
    a0, a2, a4 = lengths
    if F3b == 0:
        return p.s0 * math.log(_ratio(a2, am))
    if F3b in (2, 3):
        return p.s0 * math.log(_ratio(a4, am)) + p.s0_prime * math.log(_ratio(a2, a4))
    return p.s0 * math.log(_ratio(a4, am))


def a3b_f1(F3b: int, a0: float, a2: float, p: ResonanceParams) -> complex:
    """Three-body length for f=1, valid for a0 < a2 < 0 with |a0| >> |a2|."""
    if F3b not in F3B_F1:
        raise InvalidArgumentError(f"f=1 formulas exist for F3b in {F3B_F1}, got {F3b}")
    _require_negative(a0=a0, a2=a2)
    if not abs(a0) > abs(a2):
        raise DomainError(f"need |a0| > |a2|, got a0={a0}, a2={a2}")
    br = _bracket(p, F3b, tangent_phase(1, F3b, (a0, a2), p))
    if F3b == 1:
        _, _, gamma = p.constants(1)
        return br * _ratio(a2, a0) ** p.exponent("f1") * a0**4 + gamma * a0**4
    return br * a2**4


def a3b_f2(F3b: int, a0: float, a2: float, a4: float, p: ResonanceParams) -> complex:
    """Three-body length for f=2, valid for negative lengths with |a0| > |a2| > |a4|."""
    if F3b not in F3B_F2:
        raise InvalidArgumentError(f"f=2 formulas exist for F3b in {F3B_F2}, got {F3b}")
    _require_negative(a0=a0, a2=a2, a4=a4)
    if not abs(a0) > abs(a2) > abs(a4):
        raise DomainError(f"need |a0| > |a2| > |a4|, got {a0}, {a2}, {a4}")
    _, _, gamma = p.constants(F3b)
    br = _bracket(p, F3b, tangent_phase(2, F3b, (a0, a2, a4), p))
    if F3b == 2:
        return br * _ratio(a2, a0) ** p.exponent("f2_mixed") * a0**4 + gamma * a0**4
    if F3b == 4:
        return br * _ratio(a4, a2) ** p.exponent("f2_low") * a2**4 + gamma * a2**4
    if F3b == 6:
        return br * a4**4
    return br * a2**4


def a3b_values(f: int, lengths: Sequence[float], p: ResonanceParams) -> dict[int, complex]:
    if f == 1:
        return {F: a3b_f1(F, lengths[0], lengths[1], p) for F in F3B_F1}
    if f == 2:
        return {F: a3b_f2(F, lengths[0], lengths[1], lengths[2], p) for F in F3B_F2}
    raise InvalidArgumentError("closed forms exist only for f = 1 and f = 2")


@dataclass(frozen=True)
class ScanRow:
    value: float
    F3b: int
    a3b: complex | None
    status: str  # ok | pole | crossing | domain-error: ...


def resonance_scan(
    f: int,
    sweep: str,
    lo: float,
    hi: float,
    fixed: Mapping[str, float],
    p: ResonanceParams,
    points: int = 200,
) -> list[ScanRow]:
    """Evaluate every F3b formula on a log-spaced sweep of one length.

    ``lo`` and ``hi`` are signed lengths of equal sign; the grid is log-spaced in
    magnitude.  Rows are ordered by sweep point, then F3b.  With eta = 0 a pole
    is flagged where the real part jumps between +inf and -inf or the tangent
    argument crosses an odd multiple of pi/2; a sign change of the real part
    without a pole is flagged as a crossing.
    """
    names = ("a0", "a2") if f == 1 else ("a0", "a2", "a4") if f == 2 else None
    if names is None:
        raise InvalidArgumentError("closed forms exist only for f = 1 and f = 2")
    if sweep not in names:
        raise InvalidArgumentError(f"sweep must be one of {names}")
    if lo == 0 or hi == 0 or (lo > 0) != (hi > 0):
        raise InvalidArgumentError("sweep bounds must be non-zero with equal sign")
    if points < 2:
        raise InvalidArgumentError("need at least two points")
    sign = 1.0 if lo > 0 else -1.0
    grid = sign * np.logspace(np.log10(abs(lo)), np.log10(abs(hi)), points)
    fs = F3B_F1 if f == 1 else F3B_F2
    rows = []
    previous: dict[int, tuple] = {}
    for x in grid:
        vals = dict(fixed)
        vals[sweep] = float(x)
        lengths = [vals[n] for n in names]
        for F in fs:
            try:
                v = a3b_f1(F, *lengths, p) if f == 1 else a3b_f2(F, *lengths, p)
            except DomainError as exc:
                rows.append(ScanRow(float(x), F, None, f"domain-error: {exc}"))
                previous.pop(F, None)
                continue
            phase = tangent_phase(f, F, lengths, p)
            status = "ok"
            if not math.isfinite(v.real):
                status = "pole"
            elif F in previous:
                prev_phase, prev_v = previous[F]
                if p.eta == 0.0 and _pole_between(prev_phase, phase):
                    status = "pole"
                elif math.isfinite(prev_v.real) and prev_v.real * v.real < 0:
                    status = "crossing"
            rows.append(ScanRow(float(x), F, v, status))
            previous[F] = (phase, v)
    return rows


def _pole_between(x0: float, x1: float) -> bool:
    """True when an odd multiple of pi/2 lies in the half-open interval (x0, x1]."""
    k0 = math.floor((x0 - 0.5 * math.pi) / math.pi)
    k1 = math.floor((x1 - 0.5 * math.pi) / math.pi)
    return k0 != k1


def exponent_crosscheck() -> list[dict]:
    """Compare the prefactor exponents with twice the lowest repulsive roots of the matching regions."""
    from .hyperangular import Region, region_roots

    cases = [
        ("f=1 F3b=1 prefactor", EXPONENT_F1, 1, frozenset({0}), 1),
        ("f=2 F3b=2 prefactor", EXPONENT_F2_MIXED, 2, frozenset({0}), 2),
        ("f=2 F3b=4 prefactor", EXPONENT_F2_LOW, 2, frozenset({0, 2}), 4),
    ]
    out = []
    for name, expo, f, res, F3b in cases:
        rs = region_roots(f, Region(f, res), F3b)
        root = rs.lowest_real.value
        out.append({"exponent": name, "value": expo, "region": Region(f, res).label, "F3b": F3b,
                    "lowest_real_root": root, "twice_root": 2 * root, "difference": expo - 2 * root})
    return out


def warn_placeholders(p: ResonanceParams, F3bs: Sequence[int]) -> list[str]:
    if any(p.uses_placeholders(F) for F in F3bs):
        warnings.warn(PLACEHOLDER_WARNING, stacklevel=2)
        return [PLACEHOLDER_WARNING]
    return []
