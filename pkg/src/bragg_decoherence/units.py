"""Physical constants and a small dimension-checked scalar type.

Everything is evaluated in SI internally. Domain units (pm, nm, nm^-1, amu, ps)
are accepted at the boundary through :func:`convert`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType

# CODATA 2018, fixed on purpose.
HBAR = 1.054571817e-34  # J s
AMU = 1.66053906660e-27  # kg
ELEMENTARY_CHARGE = 1.602176634e-19  # C
PLANCK = 6.62607015e-34  # J s
ELECTRON_MASS = 9.1093837015e-31  # kg
SPEED_OF_LIGHT = 299792458.0  # m / s


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    amu: float = AMU
    elementary_charge: float = ELEMENTARY_CHARGE


CONSTANTS = PhysicalConstants()


class UnitError(ValueError):
    """Raised on dimension mismatches or unknown unit tags."""


# dimension exponents (length, mass, time)
_DIMENSIONS = MappingProxyType({
    "dimensionless": (0, 0, 0),
    "length": (1, 0, 0),
    "inverse_length": (-1, 0, 0),
    "mass": (0, 1, 0),
    "time": (0, 0, 1),
    "action": (2, 1, -1),
})
_NAMES = {v: k for k, v in _DIMENSIONS.items()}

# unit tag -> (dimension, SI scale)
UNITS = MappingProxyType({
    "1": ("dimensionless", 1.0),
    "m": ("length", 1.0),
    "nm": ("length", 1e-9),
    "pm": ("length", 1e-12),
    "angstrom": ("length", 1e-10),
    "1/m": ("inverse_length", 1.0),
    "1/nm": ("inverse_length", 1e9),
    "1/pm": ("inverse_length", 1e12),
    "1/angstrom": ("inverse_length", 1e10),
    "kg": ("mass", 1.0),
    "amu": ("mass", AMU),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "ns": ("time", 1e-9),
    "ps": ("time", 1e-12),
    "fs": ("time", 1e-15),
    "J*s": ("action", 1.0),
})
_ALIASES = {"m^-1": "1/m", "nm^-1": "1/nm", "pm^-1": "1/pm", "µs": "us", "Js": "J*s"}


def _lookup(unit: str) -> tuple[str, float]:
    unit = _ALIASES.get(unit, unit)
    try:
        return UNITS[unit]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}") from None


def convert(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between two units of the same dimension."""
    dim_a, scale_a = _lookup(from_unit)
    dim_b, scale_b = _lookup(to_unit)
    if dim_a != dim_b:
        raise UnitError(f"cannot convert {dim_a} ({from_unit}) to {dim_b} ({to_unit})")
    if scale_a == scale_b:
        return float(value)
    return value * scale_a / scale_b


def si(value: float, unit: str) -> float:
    return value * _lookup(unit)[1]


@dataclass(frozen=True)
class Quantity:
    """A real scalar in SI with (length, mass, time) exponents attached."""

    value: float
    dims: tuple[int, int, int] = (0, 0, 0)

    @classmethod
    def of(cls, value: float, unit: str) -> Quantity:
        dim, scale = _lookup(unit)
        return cls(value * scale, _DIMENSIONS[dim])

    @property
    def dimension(self) -> str:
        return _NAMES.get(self.dims, "derived")

    def to(self, unit: str) -> float:
        dim, scale = _lookup(unit)
        if _DIMENSIONS[dim] != self.dims:
            raise UnitError(f"cannot express {self.dimension} in {unit}")
        return self.value / scale

    def _check(self, other: Quantity) -> None:
        if not isinstance(other, Quantity):
            raise UnitError("can only combine a Quantity with another Quantity")
        if other.dims != self.dims:
            raise UnitError(f"dimension mismatch: {self.dimension} vs {other.dimension}")

    def __add__(self, other: Quantity) -> Quantity:
        self._check(other)
        return Quantity(self.value + other.value, self.dims)

    def __sub__(self, other: Quantity) -> Quantity:
        self._check(other)
        return Quantity(self.value - other.value, self.dims)

    def __mul__(self, other):
        if isinstance(other, Quantity):
            dims = tuple(a + b for a, b in zip(self.dims, other.dims))
            return Quantity(self.value * other.value, dims)
        return Quantity(self.value * other, self.dims)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Quantity):
            dims = tuple(a - b for a, b in zip(self.dims, other.dims))
            return Quantity(self.value / other.value, dims)
        return Quantity(self.value / other, self.dims)

    def __pow__(self, p: int) -> Quantity:
        return Quantity(self.value**p, tuple(d * p for d in self.dims))

    def __neg__(self) -> Quantity:
        return Quantity(-self.value, self.dims)

    def __float__(self) -> float:
        if self.dims != (0, 0, 0):
            raise UnitError(f"cannot take float() of a {self.dimension} quantity")
        return float(self.value)


def exp_neg(x: Quantity | float) -> float:
    """``exp(-x)`` for a dimensionless argument; anything else is a unit error."""
    if isinstance(x, Quantity):
        x = float(x)
    return math.exp(-x)
