"""Finite-alphabet joint distributions and the information measures built on them.

Distributions are stored as a flat mass vector in row-major mixed-radix order
(last variable fastest), which is also the JSON layout::

    {"variables": ["X", "Y"], "sizes": [2, 2], "mass": [0.5, 0, 0, 0.5]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12
ZERO_MASS = 1e-15

# Ẑ2 (the CF relay's compressed observation) is spelled in ASCII.
ZHAT2 = "Zhat2"


class Unit(str, Enum):
    BITS = "bits"
    NATS = "nats"

    @classmethod
    def parse(cls, value: "Unit | str") -> "Unit":
        if isinstance(value, Unit):
            return value
        aliases = {"bits": cls.BITS, "2": cls.BITS, "nats": cls.NATS, "e": cls.NATS}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown rate unit {value!r}; expected bits or nats") from None

    def log(self, x):
        return np.log2(x) if self is Unit.BITS else np.log(x)


def capacity_c(snr: float, unit: Unit | str = Unit.BITS) -> float:
    """Gaussian capacity function C(x) = 1/2 log(1 + x)."""
    if snr < 0:
        raise ValueError(f"snr must be non-negative, got {snr}")
    unit = Unit.parse(unit)
    return 0.5 * float(unit.log(1.0 + snr))


def nats_to_bits(value: float) -> float:
    return value / math.log(2.0)


@dataclass(frozen=True)
class FiniteJointDistribution:
    variables: tuple[str, ...]
    sizes: tuple[int, ...]
    mass: np.ndarray

    def __post_init__(self):
        variables = tuple(self.variables)
        sizes = tuple(int(s) for s in self.sizes)
        mass = np.asarray(self.mass, dtype=float).ravel()
        if len(variables) != len(sizes):
            raise ValueError("variables and sizes must have the same length")
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        if any(s < 1 for s in sizes):
            raise ValueError(f"alphabet sizes must be positive, got {sizes}")
        expected = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
        if mass.size != expected:
            raise ValueError(f"mass has {mass.size} entries, expected {expected}")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ValueError("mass entries must be finite and non-negative")
        total = float(mass.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"mass sums to {total!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_array(cls, variables: Sequence[str], table) -> "FiniteJointDistribution":
        table = np.asarray(table, dtype=float)
        return cls(tuple(variables), table.shape, table.ravel())

    @classmethod
    def from_dict(cls, doc: dict) -> "FiniteJointDistribution":
        return cls(tuple(doc["variables"]), tuple(doc["sizes"]), np.asarray(doc["mass"], dtype=float))

    @classmethod
    def load(cls, path) -> "FiniteJointDistribution":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"variables": list(self.variables), "sizes": list(self.sizes), "mass": self.mass.tolist()}

    @property
    def table(self) -> np.ndarray:
        return self.mass.reshape(self.sizes)

    def axes(self, names: Iterable[str]) -> tuple[int, ...]:
        out = []
        for name in names:
            try:
                out.append(self.variables.index(name))
            except ValueError:
                raise KeyError(f"unknown variable {name!r}; have {self.variables}") from None
        return tuple(out)

    def marginal(self, names: Iterable[str]) -> np.ndarray:
        """Marginal table over ``names``, axes in the order given."""
        keep = self.axes(names)
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        marg = self.table.sum(axis=drop)
        # sum() keeps surviving axes in their original order
        order = sorted(keep)
        return np.transpose(marg, [order.index(k) for k in keep])

    def is_constant(self, name: str) -> bool:
        return int(np.count_nonzero(self.marginal([name]) > ZERO_MASS)) <= 1


def normalize(table) -> np.ndarray:
    """Scale a non-negative table to unit total mass."""
    table = np.asarray(table, dtype=float)
    total = table.sum()
    if total <= 0:
        raise ValueError("cannot normalize a table with zero total mass")
    return table / total


def _as_names(names: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(names, str):
        return (names,)
    return tuple(names)


def _entropy_of(p: np.ndarray, unit: Unit) -> float:
    p = p[p > ZERO_MASS]
    return float(-(p * unit.log(p)).sum())


def entropy(pd: FiniteJointDistribution, subset: str | Iterable[str], unit: Unit | str = Unit.BITS) -> float:
    subset = _as_names(subset)
    unit = Unit.parse(unit)
    if not subset:
        return 0.0
    return _entropy_of(pd.marginal(subset).ravel(), unit)


def conditional_mutual_information(
    pd: FiniteJointDistribution,
    a: str | Iterable[str],
    b: str | Iterable[str],
    c: str | Iterable[str] = (),
    unit: Unit | str = Unit.BITS,
) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)."""
    a, b, c = _as_names(a), _as_names(b), _as_names(c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError(f"variable sets must be disjoint: {a}, {b}, {c}")
    if not a or not b:
        return 0.0
    pd.axes(a + b + c)
    value = (
        entropy(pd, a + c, unit)
        + entropy(pd, b + c, unit)
        - entropy(pd, a + b + c, unit)
        - entropy(pd, c, unit)
    )
    # cancellation noise only; true value is non-negative
    return max(value, 0.0)


def mutual_information(pd, a, b, unit: Unit | str = Unit.BITS) -> float:
    return conditional_mutual_information(pd, a, b, (), unit)


def admissibility_check(pd: FiniteJointDistribution, unit: Unit | str = Unit.BITS) -> tuple[bool, float]:
    """Check the CF side condition I(X2;Y2) >= I(Z2;Zhat2|X2,Y2).

    Returns ``(admissible, slack)`` with ``slack = I(X2;Y2) - I(Z2;Zhat2|X2,Y2)``.
    """
    lhs = conditional_mutual_information(pd, "X2", "Y2", (), unit)
    rhs = conditional_mutual_information(pd, "Z2", ZHAT2, ("X2", "Y2"), unit)
    slack = lhs - rhs
    return slack >= 0.0, slack
