"""Adiabatic potentials U(R) traced continuously across a hyperradial grid.

Units: hbar = m = r_vdW = 1 unless a mass is supplied.  The tracked quantity
is lambda = s**2, which is negative on the imaginary axis, so a channel
moving from a real to an imaginary root stays on one smooth curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidArgumentError
from .hyperangular import QContext, channel_overlap, find_roots
from .interaction import ScatteringLengths
from .spin_algebra import check_spin

DEFAULT_S_MAX = 5.0
MATCH_COST_LIMIT = 0.5
AMBIGUITY_RATIO = 2.0
BARRIER_TOL = 0.1
DIMER_TOL = 0.01


def reduced_mass(mass: float = 1.0) -> float:
    return mass / np.sqrt(3.0)


def potential_from_root(s, R: float, mass: float = 1.0) -> float:
    """U = (s^2 - 1/4) / (2 mu R^2) with mu = m / sqrt(3)."""
    if not R > 0:
        raise InvalidArgumentError("R must be positive")
    z = complex(s)
    if z.real != 0.0 and z.imag != 0.0:
        raise InvalidArgumentError(f"s must be real or purely imaginary, got {s!r}")
    s2 = z.real**2 - z.imag**2
    return float((s2 - 0.25) / (2.0 * reduced_mass(mass) * R * R))


@dataclass(frozen=True)
class ChannelClass:
    kind: str  # efimov | barrier | atom_dimer | unclassified
    F2b: int | None = None
    threshold: float | None = None
    note: str = ""

    def label(self) -> str:
        if self.kind == "atom_dimer":
            return f"atom_dimer(F2b={self.F2b})"
        return self.kind


@dataclass
class PotentialCurve:
    F3b: int
    channel_id: int
    R_grid: np.ndarray
    s_squared: np.ndarray
    U: np.ndarray
    channel_class: ChannelClass = field(default_factory=lambda: ChannelClass("unclassified"))
    diagnostics: list[str] = field(default_factory=list)

    @property
    def s_magnitude(self) -> np.ndarray:
        return np.sqrt(np.abs(self.s_squared))

    @property
    def s_axis(self) -> np.ndarray:
        return np.where(self.s_squared < 0, "imaginary", "real")

    def value_at(self, R: float) -> float:
        """U at the grid point nearest to R in log space."""
        i = int(np.argmin(np.abs(np.log(self.R_grid) - np.log(R))))
        return float(self.U[i])


def log_grid(R_min: float, R_max: float, points_per_decade: int) -> np.ndarray:
    decades = np.log10(R_max) - np.log10(R_min)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(np.log10(R_min), np.log10(R_max), n)


def imaginary_window(R: float, a: ScatteringLengths, s_max: float = DEFAULT_S_MAX) -> float:
    """max(s_max, 3 R / a_min+), so dimer roots growing like R stay inside."""
    positive = [v for v in a.values if v > 0]
    return max(s_max, 3.0 * R / min(positive)) if positive else s_max


def _roots_at(f: int, a: ScatteringLengths, F3b: int, R: float, s_max: float, mass: float) -> np.ndarray:
    ctx = QContext(f, a, float(R), mass)
    rs = find_roots(ctx, F3b, s_max, imag_max=imaginary_window(R, a, s_max))
    return np.array(sorted(r.s_squared for r in rs.roots for _ in range(r.multiplicity)))


@dataclass
class _Track:
    channel_id: int
    start: int
    values: list[float]
    notes: list[str] = field(default_factory=list)

    def predict(self, logR: np.ndarray, i: int) -> float:
        if len(self.values) < 2:
            return self.values[-1]
        j = self.start + len(self.values) - 1
        slope = (self.values[-1] - self.values[-2]) / (logR[j] - logR[j - 1])
        return self.values[-1] + slope * (logR[i] - logR[j])


def _cost(pred: np.ndarray, new: np.ndarray) -> np.ndarray:
    return np.abs(pred[:, None] - new[None, :]) / (1.0 + np.abs(pred[:, None]))


def trace_channels(
    f: int,
    a: ScatteringLengths,
    F3b: int,
    R_min: float = 1.0,
    R_max: float = 1e7,
    points_per_decade: int = 64,
    *,
    s_max: float = DEFAULT_S_MAX,
    mass: float = 1.0,
    allow_short_range: bool = False,
    classify: bool = True,
) -> list[PotentialCurve]:
    """Follow every root of one F3b block from R_min to R_max by nearest-value continuation."""
    f = check_spin(f)
    if R_min < 1.0 and not allow_short_range:
        raise InvalidArgumentError("R_min below 1 r_vdW lies in the non-universal zone; pass allow_short_range=True")
    if not R_max > R_min > 0:
        raise InvalidArgumentError("need 0 < R_min < R_max")
    grid = log_grid(R_min, R_max, points_per_decade)
    logR = np.log(grid)
    active: list[_Track] = []
    done: list[_Track] = []
    next_id = 0
    for i, R in enumerate(grid):
        new = _roots_at(f, a, F3b, R, s_max, mass)
        if not active:
            for v in new:
                active.append(_Track(next_id, i, [float(v)]))
                next_id += 1
            continue
        pred = np.array([t.predict(logR, i) for t in active])
        cost = _cost(pred, new)
        rows, cols = linear_sum_assignment(cost) if len(new) else (np.array([], int), np.array([], int))
        keep, used = [], set()
        for r, c in zip(rows, cols):
            if cost[r, c] > MATCH_COST_LIMIT:
                continue
            track = active[r]
            others = [k for k in range(len(new)) if k != c and abs(new[k] - new[c]) > 1e-8 * (1 + abs(new[c]))]
            if others:
                alt = min(others, key=lambda k: cost[r, k])
                if cost[r, alt] <= AMBIGUITY_RATIO * cost[r, c] and cost[r, alt] < MATCH_COST_LIMIT:
                    track.notes.append(
                        f"ambiguous continuation at R={R:.6g}: lambda={new[c]:.10g} chosen, lambda={new[alt]:.10g} within tolerance"
                    )
            track.values.append(float(new[c]))
            keep.append(track)
            used.add(c)
        matched = {r for r, c in zip(rows, cols) if cost[r, c] <= MATCH_COST_LIMIT}
        done += [t for k, t in enumerate(active) if k not in matched]
        active = keep
        for k, v in enumerate(new):
            if k not in used:
                active.append(_Track(next_id, i, [float(v)]))
                next_id += 1
    done += active
    curves = []
    mu2 = 2.0 * reduced_mass(mass)
    for t in sorted(done, key=lambda t: t.channel_id):
        Rs = grid[t.start : t.start + len(t.values)]
        lam = np.array(t.values)
        curve = PotentialCurve(F3b, t.channel_id, Rs, lam, (lam - 0.25) / (mu2 * Rs * Rs), diagnostics=list(t.notes))
        curve.diagnostics += continuity_violations(curve)
        if classify:
            curve.channel_class = classify_asymptotics(curve, a, f=f, mass=mass, s_max=s_max)
            if curve.channel_class.kind == "unclassified":
                curve.diagnostics.append(f"unclassified channel: {curve.channel_class.note}")
        curves.append(curve)
    return curves


def continuity_violations(curve: PotentialCurve, factor: float = 10.0) -> list[str]:
    """Steps in s^2 larger than ``factor`` times both neighbouring steps."""
    lam = curve.s_squared
    if len(lam) < 4:
        return []
    step = np.abs(np.diff(lam))
    out = []
    for k in range(1, len(step) - 1):
        local = max(step[k - 1], step[k + 1])
        if step[k] > factor * local and step[k] > 1e-6 * (1.0 + abs(lam[k])):
            out.append(f"jump in s^2 between R={curve.R_grid[k]:.6g} and R={curve.R_grid[k + 1]:.6g}")
    return out


def allowed_channels(f: int, F3b: int) -> tuple[int, ...]:
    return channel_overlap(f, F3b)[0]


def classify_asymptotics(
    curve: PotentialCurve,
    a: ScatteringLengths,
    *,
    f: int | None = None,
    mass: float = 1.0,
    s_max: float = DEFAULT_S_MAX,
) -> ChannelClass:
    """Label the large-R behaviour of a traced curve."""
    f = a.f if f is None else f
    R_end = float(curve.R_grid[-1])
    lam = float(curve.s_squared[-1])
    U = float(curve.U[-1])
    positive = {F: a[F] for F in allowed_channels(f, curve.F3b) if a[F] > 0}
    largest = max((v for v in a.values if v > 0), default=None)
    if lam < 0:
        if positive and largest is not None and R_end >= 100.0 * largest:
            for F, aF in sorted(positive.items()):
                E = -1.0 / (mass * aF * aF)
                if abs(U - E) <= DIMER_TOL * abs(E):
                    return ChannelClass("atom_dimer", F, E)
        return ChannelClass("efimov")
    s = np.sqrt(lam)
    nearest_even = 2.0 * round(s / 2.0)
    if nearest_even > 0 and abs(s - nearest_even) <= BARRIER_TOL:
        return ChannelClass("barrier", note=f"s -> {nearest_even:g}")
    if curve.R_grid[-1] < curve.R_grid[0] * 1.000001 or s >= s_max - BARRIER_TOL:
        return ChannelClass("barrier", note="leaves the real window upward")
    return ChannelClass("unclassified", note=f"s={s:.6g} at R={R_end:.6g}")
