"""Interlacing triangular arrays and the row-erasing projection.

A triangle of size n stores rows 1..n; row j holds j strictly increasing
reals, and consecutive rows interlace:

    lambda[j+1][k] <= lambda[j][k] <= lambda[j+1][k+1].

A trapezoid stores only rows m..n of such an array.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CannotProjectError, ShapeError

DEFAULT_TIE_RTOL = 1e-12


def _is_tie(x: float, y: float, rtol: float) -> bool:
    return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class DomainWindow:
    """Interval [lower, upper] a triangle is allowed to occupy.

    Infinite endpoints are IEEE infinities.
    """

    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"window requires lower < upper, got [{self.lower}, {self.upper}]")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


FULL_LINE = DomainWindow()
HALF_LINE = DomainWindow(lower=0.0)


@dataclass(frozen=True)
class ValidationVerdict:
    """Outcome of a validate() call.

    status is one of "ok", "interlacing-violation", "tie", "out-of-window";
    location carries the offending (j, k) or (j, alpha), 1-indexed, when
    status is not "ok".
    """

    status: str
    location: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _check_shape(rows: Sequence[Sequence[float]], base: int) -> None:
    if len(rows) == 0:
        raise ShapeError("no rows")
    for i, row in enumerate(rows):
        expected = base + i
        if len(row) != expected:
            raise ShapeError(f"row {expected} (stored index {i}) has {len(row)} entries, expected {expected}")


def _validate_rows(rows, base, window, tie_rtol) -> ValidationVerdict:
    # ties within a row / interlacing between adjacent rows, reported separately
    for i, row in enumerate(rows):
        j = base + i
        for k in range(len(row) - 1):
            if _is_tie(row[k], row[k + 1], tie_rtol):
                return ValidationVerdict("tie", (j, k + 1))
            if row[k] > row[k + 1]:
                return ValidationVerdict("interlacing-violation", (j, k + 1))
    for i in range(len(rows) - 1):
        upper, lower = rows[i], rows[i + 1]
        j = base + i
        for k in range(len(upper)):
            if _is_tie(upper[k], lower[k], tie_rtol) or _is_tie(upper[k], lower[k + 1], tie_rtol):
                return ValidationVerdict("tie", (j, k + 1))
            if not (lower[k] <= upper[k] <= lower[k + 1]):
                return ValidationVerdict("interlacing-violation", (j, k + 1))
    for i, row in enumerate(rows):
        for k, x in enumerate(row):
            if not window.contains(x):
                return ValidationVerdict("out-of-window", (base + i, k + 1))
    return ValidationVerdict("ok")


@dataclass(frozen=True)
class RayleighTriangle:
    """Immutable interlacing triangle; rows[j-1] is row j (length j)."""

    rows: tuple[tuple[float, ...], ...]

    def __init__(self, rows: Iterable[Iterable[float]]):
        frozen = tuple(tuple(float(x) for x in row) for row in rows)
        _check_shape(frozen, base=1)
        object.__setattr__(self, "rows", frozen)

    @property
    def size(self) -> int:
        return len(self.rows)

    def row(self, j: int) -> tuple[float, ...]:
        if not 1 <= j <= self.size:
            raise IndexError(f"row index {j} out of range 1..{self.size}")
        return self.rows[j - 1]

    def top_row(self) -> tuple[float, ...]:
        return self.rows[-1]

    def project(self) -> "RayleighTriangle":
        """Erase the last row, returning the size n-1 triangle."""
        if self.size < 2:
            raise CannotProjectError("cannot project a size-1 triangle")
        return RayleighTriangle(self.rows[:-1])

    @classmethod
    def from_spectra(cls, spectra: Iterable[Iterable[float]]) -> "RayleighTriangle":
        """Build from possibly unsorted per-level spectra (sorted eagerly)."""
        return cls(sorted(row) for row in spectra)

    def to_json(self) -> str:
        return json.dumps({"rows": [list(r) for r in self.rows]})

    @classmethod
    def from_json(cls, text: str) -> "RayleighTriangle":
        return cls(json.loads(text)["rows"])

    def to_csv(self) -> str:
        """One line per entry: j,alpha,value (1-indexed, 17 significant digits)."""
        buf = io.StringIO()
        for j, row in enumerate(self.rows, start=1):
            for alpha, x in enumerate(row, start=1):
                buf.write(f"{j},{alpha},{x:.16e}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class RayleighTrapezoid:
    """Rows m..n of an interlacing array; row j has j entries."""

    base_size: int
    rows: tuple[tuple[float, ...], ...] = field(default=())

    def __init__(self, base_size: int, rows: Iterable[Iterable[float]]):
        if base_size < 1:
            raise ShapeError(f"base size must be >= 1, got {base_size}")
        frozen = tuple(tuple(float(x) for x in row) for row in rows)
        _check_shape(frozen, base=base_size)
        object.__setattr__(self, "base_size", base_size)
        object.__setattr__(self, "rows", frozen)

    @property
    def top_size(self) -> int:
        return self.base_size + len(self.rows) - 1

    def row(self, j: int) -> tuple[float, ...]:
        if not self.base_size <= j <= self.top_size:
            raise IndexError(f"row index {j} out of range {self.base_size}..{self.top_size}")
        return self.rows[j - self.base_size]

    def top_row(self) -> tuple[float, ...]:
        return self.rows[-1]


def validate(
    tri: RayleighTriangle | RayleighTrapezoid,
    window: DomainWindow = FULL_LINE,
    tie_rtol: float = DEFAULT_TIE_RTOL,
) -> ValidationVerdict:
    """Check strict interlacing, strict increase, and window membership.

    Ties (within tie_rtol, relative) are reported as their own verdict since
    the interpolation densities are singular there.
    """
    base = 1 if isinstance(tri, RayleighTriangle) else tri.base_size
    return _validate_rows(tri.rows, base, window, tie_rtol)


def project(tri: RayleighTriangle) -> RayleighTriangle:
    """Erase the last row of a triangle of size >= 2."""
    return tri.project()


def top_row(tri: RayleighTriangle) -> tuple[float, ...]:
    return tri.top_row()


def row(tri: RayleighTriangle, j: int) -> tuple[float, ...]:
    return tri.row(j)
