"""Inner-bound polytopes for the DF/CF broadcast relay channel.

A region is a list of linear inequalities ``coeffs . rates <= bound`` over
named rate coordinates, always intersected with the non-negative orthant.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .info import ZHAT2, FiniteJointDistribution, Unit, conditional_mutual_information

DEFAULT_TOL = 1e-9
RATES3 = ("R0", "R1", "R2")


@dataclass(frozen=True)
class InfoQuantities:
    """Scalar terms that fix one polytope of the DF-CF inner bound.

    ``pen_u2_x1`` is I(U2;X1|U0,V0) and ``pen_u1x1_u2`` is I(U1,X1;U2|U0,V0).
    """

    i1: float
    i2: float
    j1: float
    j2: float
    pen_u2_x1: float = 0.0
    pen_u1x1_u2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{f.name} must be finite and non-negative, got {v}")

    @classmethod
    def from_dict(cls, doc: dict) -> "InfoQuantities":
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown quantity field(s): {sorted(unknown)}")
        missing = names - set(doc)
        if missing:
            raise ValueError(f"missing quantity field(s): {sorted(missing)}")
        return cls(**{k: float(v) for k, v in doc.items()})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BrcTerms:
    """Every mutual-information term that enters the coding constraints.

    The relay-1 and destination-1 terms are kept apart; ``i1``/``j1`` are
    their minima.
    """

    i_z1: float  # I(U0 U1; Z1 | X1 V0)
    i_y1: float  # I(U1 U0 X1 V0; Y1)
    j_z1: float  # I(U1; Z1 | X1 U0 V0)
    j_y1: float  # I(U1 X1; Y1 | U0 V0)
    i2: float  # I(U2 U0 V0; Zhat2 Y2 | X2)
    j2: float  # I(U2; Zhat2 Y2 | X2 U0 V0)
    pen_u2_x1: float = 0.0
    pen_u1x1_u2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or not np.isfinite(v):
                raise ValueError(f"missing or non-finite value for {f.name}")

    def quantities(self) -> InfoQuantities:
        return InfoQuantities(
            i1=min(self.i_z1, self.i_y1),
            i2=self.i2,
            j1=min(self.j_z1, self.j_y1),
            j2=self.j2,
            pen_u2_x1=self.pen_u2_x1,
            pen_u1x1_u2=self.pen_u1x1_u2,
        )


@dataclass(frozen=True)
class Inequality:
    coeffs: tuple[float, ...]
    bound: float
    label: str = ""


@dataclass(frozen=True)
class RateRegion:
    coords: tuple[str, ...] = RATES3
    inequalities: tuple[Inequality, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        for ineq in self.inequalities:
            if len(ineq.coeffs) != len(self.coords):
                raise ValueError(f"inequality {ineq.label!r} has wrong dimension")

    @property
    def matrix(self) -> np.ndarray:
        if not self.inequalities:
            return np.zeros((0, len(self.coords)))
        return np.array([q.coeffs for q in self.inequalities], dtype=float)

    @property
    def bounds(self) -> np.ndarray:
        return np.array([q.bound for q in self.inequalities], dtype=float)

    def slacks(self, point) -> np.ndarray:
        return self.bounds - self.matrix @ np.asarray(point, dtype=float)

    def contains(self, point, tol: float = DEFAULT_TOL) -> bool:
        return contains(self, point, tol)

    def contains_many(self, points, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Vectorised membership for an ``(n, dim)`` array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.all(pts >= -tol, axis=1)
        if self.inequalities:
            slack = self.bounds[None, :] - pts @ self.matrix.T
            ok &= np.all(slack >= -tol, axis=1)
        return ok

    def active_constraints(self, point, tol: float = DEFAULT_TOL) -> list[str]:
        """Labels of the inequalities that hold with equality (within ``tol``) at ``point``."""
        s = self.slacks(point)
        return [q.label for q, v in zip(self.inequalities, s) if abs(v) <= tol]

    def to_dict(self) -> dict:
        return {
            "coords": list(self.coords),
            "inequalities": [
                {"coeffs": list(q.coeffs), "bound": q.bound, "label": q.label} for q in self.inequalities
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RateRegion":
        ineqs = tuple(
            Inequality(tuple(float(c) for c in row["coeffs"]), float(row["bound"]), row.get("label", ""))
            for row in doc["inequalities"]
        )
        coords = tuple(doc.get("coords", RATES3))
        return cls(coords, ineqs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def contains(region: RateRegion, point, tol: float = DEFAULT_TOL) -> bool:
    """True iff every inequality and every non-negativity constraint holds within ``tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    point = np.asarray(point, dtype=float)
    if np.any(point < -tol):
        return False
    return bool(np.all(region.slacks(point) >= -tol))


def theorem1_region(q: InfoQuantities) -> RateRegion:
    """The five-inequality DF-CF inner bound for fixed information quantities."""
    pen = q.pen_u1x1_u2
    return RateRegion(
        RATES3,
        (
            Inequality((1, 1, 0), q.i1, "R0+R1<=I1"),
            Inequality((1, 0, 1), q.i2 - q.pen_u2_x1, "R0+R2<=I2-I(U2;X1|U0V0)"),
            Inequality((1, 1, 1), q.i1 + q.j2 - pen, "R0+R1+R2<=I1+J2-I(U1X1;U2|U0V0)"),
            Inequality((1, 1, 1), q.j1 + q.i2 - pen, "R0+R1+R2<=J1+I2-I(U1X1;U2|U0V0)"),
            Inequality((2, 1, 1), q.i1 + q.i2 - pen, "2R0+R1+R2<=I1+I2-I(U1X1;U2|U0V0)"),
        ),
    )


def binding_sum_constraint(q: InfoQuantities) -> str:
    """Label of the tighter of the two total-rate constraints (ties go to the I1+J2 form)."""
    a = q.i1 + q.j2
    b = q.j1 + q.i2
    return "R0+R1+R2<=I1+J2-I(U1X1;U2|U0V0)" if a <= b else "R0+R1+R2<=J1+I2-I(U1X1;U2|U0V0)"


def corollary2_common_rate(r_df_relay: float, r_df_direct: float, r_cf: float) -> float:
    """Common-message rate: the smallest of the relay-decoding, DF destination and CF terms."""
    rates = (r_df_relay, r_df_direct, r_cf)
    if any(r < 0 for r in rates):
        raise ValueError(f"rates must be non-negative, got {rates}")
    return min(rates)


def corollary3_region(r1_cap: float, r2_cap_minus_pen: float, sum_cap: float) -> RateRegion:
    return RateRegion(
        ("R1", "R2"),
        (
            Inequality((1, 0), r1_cap, "R1"),
            Inequality((0, 1), r2_cap_minus_pen, "R2"),
            Inequality((1, 1), sum_cap, "R1+R2"),
        ),
    )


def _mi(pd, a, b, c, unit):
    return conditional_mutual_information(pd, a, b, c, unit)


def brc_terms(pd: FiniteJointDistribution, unit: Unit | str = Unit.BITS) -> BrcTerms:
    """Evaluate every inner-bound term from a joint PD over
    V0, U0, U1, U2, X1, X2, Y1, Z1, Y2 and Zhat2."""
    return BrcTerms(
        i_z1=_mi(pd, ("U0", "U1"), "Z1", ("X1", "V0"), unit),
        i_y1=_mi(pd, ("U1", "U0", "X1", "V0"), "Y1", (), unit),
        j_z1=_mi(pd, "U1", "Z1", ("X1", "U0", "V0"), unit),
        j_y1=_mi(pd, ("U1", "X1"), "Y1", ("U0", "V0"), unit),
        i2=_mi(pd, ("U2", "U0", "V0"), (ZHAT2, "Y2"), "X2", unit),
        j2=_mi(pd, "U2", (ZHAT2, "Y2"), ("X2", "U0", "V0"), unit),
        pen_u2_x1=_mi(pd, "U2", "X1", ("U0", "V0"), unit),
        pen_u1x1_u2=_mi(pd, ("U1", "X1"), "U2", ("U0", "V0"), unit),
    )


def marton_region(pd: FiniteJointDistribution, unit: Unit | str = Unit.BITS) -> RateRegion:
    """Marton's inner bound with a common message, evaluated directly from the PD."""
    a1 = _mi(pd, ("U0", "U1"), "Y1", (), unit)
    a2 = _mi(pd, ("U0", "U2"), "Y2", (), unit)
    b1 = _mi(pd, "U1", "Y1", "U0", unit)
    b2 = _mi(pd, "U2", "Y2", "U0", unit)
    cross = _mi(pd, "U1", "U2", "U0", unit)
    return RateRegion(
        RATES3,
        (
            Inequality((1, 1, 0), a1, "R0+R1"),
            Inequality((1, 0, 1), a2, "R0+R2"),
            Inequality((1, 1, 1), a1 + b2 - cross, "R0+R1+R2 (a)"),
            Inequality((1, 1, 1), b1 + a2 - cross, "R0+R1+R2 (b)"),
            Inequality((2, 1, 1), a1 + a2 - cross, "2R0+R1+R2"),
        ),
    )


def grid_points(upper, step: float, dim: int = 3) -> np.ndarray:
    """All points of the lattice ``{0, step, 2 step, ...}^dim`` inside ``[0, upper]^dim``."""
    n = int(np.floor(upper / step + 1e-9)) + 1
    axis = np.arange(n) * step
    return np.array(list(itertools.product(axis, repeat=dim)), dtype=float)


def regions_agree(a: RateRegion, b: RateRegion, points, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.array_equal(a.contains_many(points, tol), b.contains_many(points, tol)))


def marton_reduction_check(
    pd: FiniteJointDistribution, step: float = 0.05, unit: Unit | str = Unit.BITS
) -> bool:
    """Check that the DF-CF region collapses to Marton's region when the relays vanish.

    Requires X1, X2 and V0 to be constant and Z1 = Y1, Zhat2 = Y2 in ``pd``.
    """
    for name in ("X1", "X2", "V0"):
        if not pd.is_constant(name):
            raise ValueError(f"{name} must be degenerate (constant) for the Marton reduction")
    terms = brc_terms(pd, unit)
    if terms.pen_u2_x1 > DEFAULT_TOL:
        return False
    q = terms.quantities()
    ours = theorem1_region(q)
    theirs = marton_region(pd, unit)
    upper = max(q.i1, q.i2, step)
    return regions_agree(ours, theirs, grid_points(upper, step))


BRC_VARIABLE_ORDER = ("V0", "U0", "U1", "U2", "X1", "X2", "X", "Y1", "Z1", "Y2", "Z2", ZHAT2)


def _random_conditional(rng: np.random.Generator, shape: tuple[int, ...], concentration: float) -> np.ndarray:
    """Random conditional PMF; the last axis is the conditioned-on variable's outcome."""
    table = rng.gamma(concentration, size=shape)
    return table / table.sum(axis=-1, keepdims=True)


def random_brc_distribution(
    rng: np.random.Generator, size: int = 2, concentration: float = 0.5
) -> FiniteJointDistribution:
    """Sample a joint PD with the factorisation required by the DF-CF inner bound.

    P(v0) P(x2) P(x1|v0) P(u0|v0) P(u1,u2|x1,u0) P(x|u1,u2) P(y1,z1,y2,z2|x,x1,x2) P(zhat2|x2,z2),
    every variable taking ``size`` values.
    """
    k = size
    p_v0 = _random_conditional(rng, (k,), concentration)
    p_x2 = _random_conditional(rng, (k,), concentration)
    p_x1 = _random_conditional(rng, (k, k), concentration)  # [v0, x1]
    p_u0 = _random_conditional(rng, (k, k), concentration)  # [v0, u0]
    p_u12 = _random_conditional(rng, (k, k, k * k), concentration).reshape(k, k, k, k)  # [x1, u0, u1, u2]
    p_x = _random_conditional(rng, (k, k, k), concentration)  # [u1, u2, x]
    p_ch = _random_conditional(rng, (k, k, k, k**4), concentration).reshape((k,) * 7)  # [x, x1, x2, y1, z1, y2, z2]
    p_zh = _random_conditional(rng, (k, k, k), concentration)  # [x2, z2, zhat2]
    joint = np.einsum(
        "a,f,ae,ab,ebcd,cdg,gefhijk,fkl->abcdefghijkl",
        p_v0, p_x2, p_x1, p_u0, p_u12, p_x, p_ch, p_zh,
    )
    return FiniteJointDistribution.from_array(BRC_VARIABLE_ORDER, joint / joint.sum())
