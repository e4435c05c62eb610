"""Spin-dot-product expansions of the two- and three-body contact operators.

A pair operator diagonal in F2b, a = sum_F a_F P_F, is rewritten as
sum_n alpha^(n) (f1.f2)^n, using (f1.f2) P_F = lambda_F P_F.  The three-body
analogue uses the eigenvalues of sum_{i<j} f_i.f_j on the fully symmetric
F3b sectors.  Coefficients are exact Fractions.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .interaction import ScatteringLengths
from .spin_algebra import check_spin, symmetry_classify

Combination = dict[int, Fraction]  # channel label -> rational weight


def pair_eigenvalue(f: int, F2b: int) -> Fraction:
    """Eigenvalue of f1.f2 on pair spin F2b: F2b(F2b+1)/2 - f(f+1)."""
    f = check_spin(f)
    if not 0 <= F2b <= 2 * f:
        raise InvalidArgumentError(f"F2b={F2b} outside [0, {2 * f}]")
    return Fraction(F2b * (F2b + 1), 2) - f * (f + 1)


def triple_eigenvalue(f: int, F3b: int) -> Fraction:
    """Eigenvalue of sum_{i<j} f_i.f_j on total spin F3b: F3b(F3b+1)/2 - 3f(f+1)/2."""
    f = check_spin(f)
    if not 0 <= F3b <= 3 * f:
        raise InvalidArgumentError(f"F3b={F3b} outside [0, {3 * f}]")
    return Fraction(F3b * (F3b + 1), 2) - Fraction(3 * f * (f + 1), 2)


def solve_exact(matrix: Sequence[Sequence[Fraction]], rhs_columns: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan elimination over the rationals; returns one solution per rhs column."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(col[i]) for col in rhs_columns] for i, row in enumerate(matrix)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if pivot is None:
            raise InvalidArgumentError("singular system")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                factor = aug[r][c]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[c])]
    return [[aug[i][n + k] for i in range(n)] for k in range(len(rhs_columns))]


def vandermonde_inverse(nodes: Sequence[Fraction]) -> list[list[Fraction]]:
    """Exact inverse of V[i][n] = nodes[i]**n, as rows indexed by power n."""
    m = len(nodes)
    V = [[Fraction(x) ** n for n in range(m)] for x in nodes]
    unit = [[Fraction(int(i == k)) for i in range(m)] for k in range(m)]
    cols = solve_exact(V, unit)  # cols[k] = V^-1 e_k
    return [[cols[k][n] for k in range(m)] for n in range(m)]


@lru_cache(maxsize=None)
def _alpha2b_table(f: int) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    chans = list(range(0, 2 * f + 1, 2))
    inv = vandermonde_inverse([pair_eigenvalue(f, F) for F in chans])
    return tuple(tuple(zip(chans, row)) for row in inv)


def alpha_2b_coefficients(f: int) -> list[Combination]:
    """alpha^(n) for n = 0..f as rational combinations of a_0, a_2, ..., a_2f."""
    return [dict(row) for row in _alpha2b_table(check_spin(f))]


def symmetric_triples(f: int) -> tuple[int, ...]:
    """F3b values whose block contains a fully symmetric spin state."""
    f = check_spin(f)
    return tuple(F for F in range(3 * f + 1) if symmetry_classify(f, F).symmetric > 0)


@lru_cache(maxsize=None)
def _alpha3b_table(f: int) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
    chans = list(symmetric_triples(f))
    inv = vandermonde_inverse([triple_eigenvalue(f, F) for F in chans])
    return tuple(tuple(zip(chans, row)) for row in inv)


def alpha_3b_coefficients(f: int) -> list[Combination]:
    """alpha_3b^(n) for n = 0..N-1 as rational combinations of a3b^(F3b)."""
    return [dict(row) for row in _alpha3b_table(check_spin(f))]


def _exact(x):
    # real inputs become exact rationals (floats convert without rounding)
    if isinstance(x, (int, float, Fraction, np.integer, np.floating)) and not isinstance(x, bool):
        return Fraction(x) if not isinstance(x, (np.integer, np.floating)) else Fraction(x.item())
    return x


def _apply(combos: list[Combination], values: Mapping[int, object]) -> list:
    values = {k: _exact(v) for k, v in values.items()}
    return [sum((w * values[F] for F, w in combo.items()), start=Fraction(0)) for combo in combos]


def _length_map(f: int, a) -> dict[int, object]:
    if isinstance(a, ScatteringLengths):
        if a.f != f:
            raise InvalidArgumentError(f"lengths are for f={a.f}, not f={f}")
        return a.as_dict()
    vals = dict(a) if isinstance(a, Mapping) else dict(zip(range(0, 2 * f + 1, 2), a))
    if set(vals) != set(range(0, 2 * f + 1, 2)):
        raise InvalidArgumentError(f"need lengths for F2b in {list(range(0, 2 * f + 1, 2))}")
    return vals


def alpha_2b(f: int, a) -> list:
    """Two-body expansion coefficients for given lengths.

    ``a`` may be ScatteringLengths, a mapping F2b -> value or a sequence
    (a0, a2, ...).  Real inputs, floats included, are converted exactly and
    the coefficients come back as Fractions; complex inputs stay complex.
    """
    f = check_spin(f)
    return _apply(alpha_2b_coefficients(f), _length_map(f, a))


def alpha_3b(f: int, a3: Mapping[int, object]) -> list:
    """Three-body expansion coefficients; ``a3`` maps each symmetric F3b to a length."""
    f = check_spin(f)
    needed = set(symmetric_triples(f))
    if set(a3) != needed:
        raise InvalidArgumentError(f"three-body lengths required exactly for F3b in {sorted(needed)}, got {sorted(a3)}")
    return _apply(alpha_3b_coefficients(f), a3)


def lengths_from_alpha_2b(f: int, alpha: Sequence) -> dict[int, object]:
    """Inverse map: a_F = sum_n alpha^(n) lambda_F^n."""
    f = check_spin(f)
    return {F: sum((c * pair_eigenvalue(f, F) ** n for n, c in enumerate(alpha)), start=Fraction(0)) for F in range(0, 2 * f + 1, 2)}


def lengths_from_alpha_3b(f: int, alpha: Sequence) -> dict[int, object]:
    f = check_spin(f)
    return {F: sum((c * triple_eigenvalue(f, F) ** n for n, c in enumerate(alpha)), start=Fraction(0)) for F in symmetric_triples(f)}


def couplings(alpha2b: Sequence, alpha3b: Sequence, m: float = 1.0) -> tuple[list, list]:
    """g2b = 4 pi alpha2b / m and g3b = sqrt(3) 12 pi alpha3b / m."""
    if not m > 0:
        raise InvalidArgumentError("mass must be positive")
    g2 = [4.0 * np.pi * _number(x) / m for x in alpha2b]
    g3 = [np.sqrt(3.0) * 12.0 * np.pi * _number(x) / m for x in alpha3b]
    return g2, g3


def _number(x):
    return x if isinstance(x, complex) else float(x)


def _polar(x) -> dict:
    z = complex(x)
    return {"abs": abs(z), "phase": cmath.phase(z)}


@dataclass(frozen=True)
class DominanceReport:
    density: float
    two_body_energies: tuple
    three_body_energies: tuple
    phase: str
    dominant: bool
    opposite_sign: bool | None

    def to_dict(self) -> dict:
        def enc(x):
            return _polar(x) if isinstance(x, complex) and x.imag != 0 else float(complex(x).real)

        return {
            "density": self.density,
            "two_body_energies": [enc(x) for x in self.two_body_energies],
            "three_body_energies": [enc(x) for x in self.three_body_energies],
            "phase": self.phase,
            "three_body_exchange_dominates": self.dominant,
            "opposite_sign": self.opposite_sign,
        }


def dominance_report(n: float, g2b: Sequence, g3b: Sequence) -> DominanceReport:
    """Compare n^2 |g3b^(1)| with n |g2b^(1)| and label the two-body magnetic phase.

    The phase follows the sign of g2b^(1), which equals the sign of alpha2b^(1)
    for positive mass.  Complex three-body couplings enter through their modulus;
    the sign comparison then uses the real part.
    """
    if not n > 0:
        raise InvalidArgumentError("density must be positive")
    e2 = tuple(n * x for x in g2b)
    e3 = tuple(n * n * x for x in g3b)
    x2 = float(complex(g2b[1]).real) if len(g2b) > 1 else 0.0
    phase = "antiferromagnetic" if x2 < 0 else "ferromagnetic" if x2 > 0 else "neutral"
    if len(g3b) < 2:
        return DominanceReport(n, e2, e3, phase, False, None)
    dominant = abs(e3[1]) > abs(e2[1])
    y3 = complex(g3b[1]).real
    opposite = bool(x2 * y3 < 0)
    return DominanceReport(n, e2, e3, phase, bool(dominant), opposite)


@dataclass(frozen=True)
class MeanFieldSet:
    f: int
    alpha2b: tuple
    alpha3b: tuple
    g2b: tuple
    g3b: tuple
    provenance: dict = field(default_factory=dict)


def mean_field_set(f: int, a, a3: Mapping[int, object] | None = None, m: float = 1.0) -> MeanFieldSet:
    f = check_spin(f)
    al2 = alpha_2b(f, a)
    al3 = alpha_3b(f, a3) if a3 is not None else []
    g2, g3 = couplings(al2, al3, m)
    prov = {}
    if f == 3:
        prov["alpha3b"] = "derived with the same Vandermonde solve; no published closed form to compare"
    return MeanFieldSet(f, tuple(al2), tuple(al3), tuple(g2), tuple(g3), prov)


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def combination_to_text(combo: Combination, symbol: str = "a") -> str:
    """Human-readable rendering such as '-2/5*a0 + 8/7*a2'."""
    parts = []
    for F, w in combo.items():
        if w == 0:
            continue
        parts.append(f"{format_fraction(w)}*{symbol}{F}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def product_basis_pair_dot(f: int) -> np.ndarray:
    """f1.f2 on the two-particle product basis (m descending)."""
    from .spin_algebra import single_spin_operators

    fz, fp, fm = single_spin_operators(check_spin(f))
    return np.kron(fz, fz) + 0.5 * (np.kron(fp, fm) + np.kron(fm, fp))


def pair_operator_from_alpha(f: int, alpha: Sequence) -> np.ndarray:
    """sum_n alpha^(n) (f1.f2)^n on the pair product basis.

    This equals the scattering-length operator on exchange-symmetric pair
    states; on odd-F2b states it takes whatever value the polynomial gives.
    """
    D = product_basis_pair_dot(f)
    out = np.zeros_like(D)
    power = np.eye(D.shape[0])
    for c in alpha:
        out += float(c) * power
        power = power @ D
    return out
