"""Fourier-Motzkin elimination over small named-variable inequality systems.

Rows mean ``coeffs . x <= bound``. Everything is plain floating point: rows are
rescaled so their largest coefficient magnitude is 1, and coefficients below
``COEFF_TOL`` are flushed to zero.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .region import RATES3, BrcTerms, Inequality, RateRegion, grid_points, theorem1_region

log = logging.getLogger(__name__)

COEFF_TOL = 1e-12
MAX_ROWS = 100_000


class EliminationLimitError(RuntimeError):
    """Intermediate system grew past ``MAX_ROWS``."""


@dataclass(frozen=True)
class Row:
    coeffs: tuple[float, ...]
    bound: float
    label: str = ""


@dataclass(frozen=True)
class LinearInequalitySystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        n = len(self.variables)
        for r in self.rows:
            if len(r.coeffs) != n:
                raise ValueError(f"row {r.label!r} has {len(r.coeffs)} coefficients, expected {n}")
            if not (np.all(np.isfinite(r.coeffs)) and np.isfinite(r.bound)):
                raise ValueError(f"row {r.label!r} has non-finite entries")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([r.coeffs for r in self.rows], dtype=float).reshape(len(self.rows), len(self.variables))

    @property
    def bounds(self) -> np.ndarray:
        return np.array([r.bound for r in self.rows], dtype=float)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; have {self.variables}") from None

    def satisfied(self, points, tol: float = 1e-9) -> np.ndarray:
        """Row-wise feasibility of an ``(n, len(variables))`` array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if not self.rows:
            return np.ones(len(pts), dtype=bool)
        slack = self.bounds[None, :] - pts @ self.matrix.T
        return np.all(slack >= -tol, axis=1)

    def is_infeasible_certificate(self) -> bool:
        """True when a row reads ``0 <= b`` with ``b < 0``."""
        return any(not any(r.coeffs) and r.bound < -COEFF_TOL for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "rows": [{"coeffs": list(r.coeffs), "bound": r.bound, "label": r.label} for r in self.rows],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearInequalitySystem":
        rows = tuple(
            Row(tuple(float(c) for c in r["coeffs"]), float(r["bound"]), r.get("label", "")) for r in doc["rows"]
        )
        return cls(tuple(doc["variables"]), rows)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LinearInequalitySystem":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EliminationReport:
    eliminated: tuple[str, ...] = ()
    rows_before: int = 0
    rows_after: int = 0
    redundant_removed: int = 0
    steps: tuple[tuple[str, int], ...] = field(default=())


def _normalize(coeffs: np.ndarray, bound: float) -> tuple[tuple[float, ...], float]:
    coeffs = np.where(np.abs(coeffs) < COEFF_TOL, 0.0, coeffs)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale > 0:
        coeffs = coeffs / scale
        bound = bound / scale
    return tuple(float(c) + 0.0 for c in coeffs), float(bound)


def eliminate(sys: LinearInequalitySystem, var: str) -> LinearInequalitySystem:
    """Project ``sys`` onto the remaining variables by eliminating ``var``."""
    k = sys.index(var)
    keep = [i for i in range(len(sys.variables)) if i != k]
    zero, pos, neg = [], [], []
    for r in sys.rows:
        a = r.coeffs[k]
        if abs(a) < COEFF_TOL:
            zero.append(r)
        elif a > 0:
            pos.append(r)
        else:
            neg.append(r)
    if len(zero) + len(pos) * len(neg) > MAX_ROWS:
        raise EliminationLimitError(
            f"eliminating {var!r} would produce {len(zero) + len(pos) * len(neg)} rows (limit {MAX_ROWS})"
        )
    out = []
    for r in zero:
        c, b = _normalize(np.asarray(r.coeffs, dtype=float)[keep], r.bound)
        out.append(Row(c, b, r.label))
    for p in pos:
        pc = np.asarray(p.coeffs, dtype=float)
        for n in neg:
            nc = np.asarray(n.coeffs, dtype=float)
            a, b = pc[k], -nc[k]
            combined = b * pc + a * nc
            c, bound = _normalize(combined[keep], b * p.bound + a * n.bound)
            out.append(Row(c, bound, f"{p.label}+{n.label}"))
    return LinearInequalitySystem(tuple(sys.variables[i] for i in keep), tuple(out))


def prune_redundant(sys: LinearInequalitySystem) -> LinearInequalitySystem:
    """Drop rows implied by a parallel row with a tighter bound, and trivially true ``0 <= b`` rows.

    Only positive multiples are merged, so the feasible set never changes.
    """
    best: dict[tuple[float, ...], Row] = {}
    order: list[tuple[float, ...]] = []
    worst_empty: Row | None = None
    for r in sys.rows:
        c, b = _normalize(np.asarray(r.coeffs, dtype=float), r.bound)
        if not any(c):
            if b < 0 and (worst_empty is None or b < worst_empty.bound):
                worst_empty = Row(c, b, r.label)
            continue
        key = tuple(round(x, 12) for x in c)
        if key not in best:
            order.append(key)
            best[key] = Row(c, b, r.label)
        elif b < best[key].bound:
            best[key] = Row(c, b, r.label)
    rows = [best[k] for k in order]
    if worst_empty is not None:
        rows.append(worst_empty)
    return LinearInequalitySystem(sys.variables, tuple(rows))


def eliminate_all(
    sys: LinearInequalitySystem, variables: Sequence[str]
) -> tuple[LinearInequalitySystem, EliminationReport]:
    before = len(sys.rows)
    removed = 0
    steps = []
    for v in variables:
        sys = eliminate(sys, v)
        n = len(sys.rows)
        sys = prune_redundant(sys)
        removed += n - len(sys.rows)
        steps.append((v, len(sys.rows)))
        log.debug("eliminated %s: %d rows (%d before pruning)", v, len(sys.rows), n)
    report = EliminationReport(tuple(variables), before, len(sys.rows), removed, tuple(steps))
    return sys, report


# --- the DF-CF coding constraints -------------------------------------------

BRC_VARIABLES = ("R0", "R1", "R2", "S0", "S1", "S2", "Sp1", "Sp2", "T1", "T2")
BRC_HELPERS = ("S0", "S1", "S2", "T1", "T2", "Sp1", "Sp2")


class _RowBuilder:
    def __init__(self, variables: Sequence[str]):
        self.variables = tuple(variables)
        self.rows: list[Row] = []

    def le(self, terms: dict[str, float], bound: float, label: str):
        c = [0.0] * len(self.variables)
        for name, v in terms.items():
            c[self.variables.index(name)] += v
        self.rows.append(Row(tuple(c), float(bound), label))

    def ge(self, terms: dict[str, float], bound: float, label: str):
        self.le({k: -v for k, v in terms.items()}, -bound, label)

    def eq(self, terms: dict[str, float], bound: float, label: str):
        self.le(terms, bound, label + "[<=]")
        self.ge(terms, bound, label + "[>=]")

    def build(self) -> LinearInequalitySystem:
        return LinearInequalitySystem(self.variables, tuple(self.rows))


def build_brc_constraints(terms: BrcTerms) -> LinearInequalitySystem:
    """Rate-splitting, Marton-binning and decoding constraints of the DF-CF scheme.

    ``Sp1``/``Sp2`` are the private parts moved into the common message; ``T1``,
    ``T2`` are the binning rates. The CF relay's compression constraints carry no
    message rate and are handled by :func:`cf_relay_constraints`.
    """
    if not isinstance(terms, BrcTerms):
        raise TypeError(f"expected BrcTerms, got {type(terms).__name__}")
    b = _RowBuilder(BRC_VARIABLES)
    b.ge({"T2": 1, "S2": -1}, terms.pen_u2_x1, "bin2")
    b.ge({"T1": 1, "T2": 1, "S1": -1, "S2": -1}, terms.pen_u1x1_u2, "bin12")
    b.le({"T1": 1, "S0": 1}, terms.i_z1, "relay1-all")
    b.le({"T1": 1}, terms.j_z1, "relay1-private")
    b.le({"T1": 1, "S0": 1}, terms.i_y1, "dest1-all")
    b.le({"T1": 1}, terms.j_y1, "dest1-private")
    b.le({"S0": 1, "T2": 1}, terms.i2, "dest2-all")
    b.le({"T2": 1}, terms.j2, "dest2-private")
    b.eq({"R1": 1, "Sp1": -1, "S1": -1}, 0.0, "split1")
    b.eq({"R2": 1, "Sp2": -1, "S2": -1}, 0.0, "split2")
    b.eq({"S0": 1, "R0": -1, "Sp1": -1, "Sp2": -1}, 0.0, "merge")
    for v in BRC_VARIABLES:
        b.ge({v: 1}, 0.0, f"{v}>=0")
    b.ge({"T1": 1, "S1": -1}, 0.0, "T1>=S1")
    b.ge({"T2": 1, "S2": -1}, 0.0, "T2>=S2")
    return b.build()


def cf_relay_constraints(i_z2_zhat2_x2: float, i_zhat2_y2_x2: float, i_x2_y2: float) -> LinearInequalitySystem:
    """Compression (relay 2) and bin-index decoding (destination 2) constraints over ``Rhat2``, ``Rx2``.

    Eliminating both variables leaves the single row
    ``0 <= I(X2;Y2) + I(Zhat2;Y2|X2) - I(Z2;Zhat2|X2)``; when Zhat2 - (X2,Z2) - Y2
    is Markov this is exactly ``I(X2;Y2) >= I(Z2;Zhat2|X2,Y2)``.
    """
    b = _RowBuilder(("Rhat2", "Rx2"))
    b.ge({"Rhat2": 1}, i_z2_zhat2_x2, "compress")
    b.le({"Rx2": 1}, i_x2_y2, "relay2-index")
    b.le({"Rhat2": 1, "Rx2": -1}, i_zhat2_y2_x2, "bin-index")
    return b.build()


def cf_admissible(i_z2_zhat2_x2: float, i_zhat2_y2_x2: float, i_x2_y2: float) -> tuple[bool, float]:
    """Admissibility flag obtained by eliminating ``Rhat2`` and ``Rx2``; returns ``(ok, slack)``."""
    reduced, _ = eliminate_all(cf_relay_constraints(i_z2_zhat2_x2, i_zhat2_y2_x2, i_x2_y2), ("Rhat2", "Rx2"))
    return not reduced.is_infeasible_certificate(), i_x2_y2 + i_zhat2_y2_x2 - i_z2_zhat2_x2


def derive_region(terms: BrcTerms, order: Iterable[str] = BRC_HELPERS) -> tuple[RateRegion, EliminationReport]:
    """Eliminate every helper rate and return the projection onto (R0, R1, R2)."""
    reduced, report = eliminate_all(build_brc_constraints(terms), tuple(order))
    idx = [reduced.index(v) for v in RATES3]
    ineqs = tuple(Inequality(tuple(r.coeffs[i] for i in idx), r.bound, r.label) for r in reduced.rows)
    return RateRegion(RATES3, ineqs), report


def binning_feasible(terms: BrcTerms, tol: float = 1e-12) -> bool:
    """Rate-free conditions left over by the elimination.

    The Marton binning needs ``I(U2;X1|U0V0) <= J2`` and
    ``I(U1X1;U2|U0V0) <= J1 + J2``; when either fails the projected region is
    empty even though the five-inequality form may not be.
    """
    q = terms.quantities()
    return terms.pen_u2_x1 <= q.j2 + tol and terms.pen_u1x1_u2 <= q.j1 + q.j2 + tol


def sample_brc_terms(rng: np.random.Generator, scale: float = 1.0) -> BrcTerms:
    """Random term values obeying the chain-rule orderings of a real PD and :func:`binning_feasible`.

    ``i_z1 >= j_z1``, ``i_y1 >= j_y1``, ``i2 >= j2`` and ``pen_u1x1_u2 >= pen_u2_x1``.
    """
    j_z1, j_y1, j2 = rng.uniform(0.0, scale, 3)
    i_z1 = j_z1 + rng.uniform(0.0, scale)
    i_y1 = j_y1 + rng.uniform(0.0, scale)
    i2 = j2 + rng.uniform(0.0, scale)
    j1 = min(j_z1, j_y1)
    pen_u2_x1 = rng.uniform(0.0, j2)
    pen_u1x1_u2 = pen_u2_x1 + rng.uniform(0.0, max(j1 + j2 - pen_u2_x1, 0.0))
    return BrcTerms(i_z1, i_y1, j_z1, j_y1, i2, j2, pen_u2_x1, pen_u1x1_u2)


@dataclass(frozen=True)
class EquivalenceResult:
    agree: bool
    points: int
    mismatches: int
    derived_only: int
    theorem_only: int


def compare_with_theorem(terms: BrcTerms, step: float = 0.05, tol: float = 1e-9) -> EquivalenceResult:
    """Pointwise comparison of the eliminated region and the five-inequality region on a lattice."""
    q = terms.quantities()
    derived, _ = derive_region(terms)
    pts = grid_points(max(q.i1, q.i2, step), step)
    a = derived.contains_many(pts, tol)
    b = theorem1_region(q).contains_many(pts, tol)
    d_only = int(np.count_nonzero(a & ~b))
    t_only = int(np.count_nonzero(b & ~a))
    return EquivalenceResult(d_only + t_only == 0, len(pts), d_only + t_only, d_only, t_only)
