"""Exact interval algebra for binary step functions and piecewise-constant densities.

Everything lives on a single real interval with the half-open convention
[lo, hi).  Point values at breakpoints carry zero measure and never affect a
risk, a region measure, or any almost-sure statement, so single-point
discrepancies are deliberately ignored.  Interval sets are kept in a unique
canonical form (sorted, disjoint, maximally merged), which makes equality a
structural comparison of endpoints.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatchError

# Absolute tolerance for geometric predicates; domains are O(1) scale by convention.
TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Half-open interval [lo, hi).  Empty intervals are never constructed."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"interval [{self.lo}, {self.hi}) is empty")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi

    def same_as(self, other: "Interval", tol: float = TOL) -> bool:
        return abs(self.lo - other.lo) <= tol and abs(self.hi - other.hi) <= tol


def _canonical(pairs) -> tuple[Interval, ...]:
    items = sorted((float(lo), float(hi)) for lo, hi in pairs if hi - lo > TOL)
    merged: list[list[float]] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1] + TOL:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple(Interval(lo, hi) for lo, hi in merged)


@dataclass(frozen=True, eq=False)
class IntervalSet:
    """Union of pairwise-disjoint, sorted, non-touching intervals.

    Construct through :meth:`from_pairs`, which merges and drops slivers below
    tolerance so that a given point set has exactly one representation.
    """

    intervals: tuple[Interval, ...] = ()

    @staticmethod
    def from_pairs(pairs) -> "IntervalSet":
        return IntervalSet(_canonical(pairs))

    @staticmethod
    def single(lo: float, hi: float) -> "IntervalSet":
        return IntervalSet.from_pairs([(lo, hi)])

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(())

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        if len(self.intervals) != len(other.intervals):
            return False
        return all(a.same_as(b) for a, b in zip(self.intervals, other.intervals))

    __hash__ = None  # tolerance-based equality is incompatible with hashing

    @property
    def total_length(self) -> float:
        return sum(iv.length for iv in self.intervals)

    def contains(self, x: float) -> bool:
        for iv in self.intervals:
            if iv.contains(x):
                return True
        return False

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_pairs(
            [(iv.lo, iv.hi) for iv in self.intervals]
            + [(iv.lo, iv.hi) for iv in other.intervals]
        )

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i].lo, b[j].lo)
            hi = min(a[i].hi, b[j].hi)
            if hi - lo > TOL:
                out.append((lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return IntervalSet.from_pairs(out)

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for iv in self.intervals:
            lo = iv.lo
            for cut in other.intervals:
                if cut.hi <= lo + TOL:
                    continue
                if cut.lo >= iv.hi - TOL:
                    break
                if cut.lo > lo + TOL:
                    out.append((lo, cut.lo))
                lo = max(lo, cut.hi)
                if lo >= iv.hi - TOL:
                    break
            if iv.hi - lo > TOL:
                out.append((lo, iv.hi))
        return IntervalSet.from_pairs(out)

    def complement(self, domain: Interval) -> "IntervalSet":
        return IntervalSet.single(domain.lo, domain.hi).subtract(self)


def set_algebra(op: str, a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Dispatch form of the three binary set operations."""
    if op == "intersect":
        return a.intersect(b)
    if op == "union":
        return a.union(b)
    if op == "subtract":
        return a.subtract(b)
    raise ValueError(f"unknown set operation {op!r}")


@dataclass(frozen=True)
class StepFunction:
    """Binary piecewise-constant function on a half-open interval.

    The value alternates at every breakpoint, starting from ``first_value``
    below the first one; the value at x is therefore
    ``first_value XOR (#breakpoints <= x mod 2)``.  Alternation is structural,
    so each function has exactly one representation.
    """

    domain: Interval
    breakpoints: tuple[float, ...]
    first_value: int

    def __post_init__(self):
        if self.first_value not in (0, 1):
            raise ValueError("first_value must be 0 or 1")
        prev = self.domain.lo
        for b in self.breakpoints:
            if not prev < b:
                raise ValueError(f"breakpoints not strictly increasing at {b}")
            prev = b
        if self.breakpoints and self.breakpoints[-1] >= self.domain.hi:
            raise ValueError("breakpoints must lie strictly inside the domain")

    def value(self, x: float) -> int:
        idx = bisect.bisect_right(self.breakpoints, x)
        return (self.first_value + idx) & 1

    def regions(self, value: int) -> IntervalSet:
        """All x with f(x) == value, as a canonical interval set."""
        pts = [self.domain.lo, *self.breakpoints, self.domain.hi]
        v = self.first_value
        out = []
        for lo, hi in zip(pts, pts[1:]):
            if v == value:
                out.append((lo, hi))
            v ^= 1
        return IntervalSet.from_pairs(out)

    def same_function(self, other: "StepFunction", tol: float = TOL) -> bool:
        return (
            self.domain.same_as(other.domain, tol)
            and self.first_value == other.first_value
            and len(self.breakpoints) == len(other.breakpoints)
            and all(abs(a - b) <= tol for a, b in zip(self.breakpoints, other.breakpoints))
        )


def disagreement_region(f: StepFunction, h: StepFunction) -> IntervalSet:
    """Canonical set {x : f(x) != h(x)}, by merging the two breakpoint lists."""
    if not f.domain.same_as(h.domain):
        raise DomainMismatchError(f"domains differ: {f.domain} vs {h.domain}")
    cuts = sorted(set(f.breakpoints) | set(h.breakpoints))
    pts = [f.domain.lo, *cuts, f.domain.hi]
    pairs = [
        (lo, hi)
        for lo, hi in zip(pts, pts[1:])
        if hi - lo > TOL and f.value(lo) != h.value(lo)
    ]
    return IntervalSet.from_pairs(pairs)


@dataclass(frozen=True)
class Density:
    """Piecewise-constant probability density, strictly positive on its domain."""

    domain: Interval
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one density value per segment")
        prev = self.domain.lo
        for b in self.breakpoints:
            if not prev < b:
                raise ValueError(f"density breakpoints not strictly increasing at {b}")
            prev = b
        if self.breakpoints and self.breakpoints[-1] >= self.domain.hi:
            raise ValueError("density breakpoints must lie strictly inside the domain")
        if any(v <= 0 for v in self.values):
            raise ValueError("density must be strictly positive on every segment")
        xs = [self.domain.lo, *self.breakpoints, self.domain.hi]
        cum = [0.0]
        for (lo, hi), v in zip(zip(xs, xs[1:]), self.values):
            cum.append(cum[-1] + v * (hi - lo))
        if abs(cum[-1] - 1.0) > TOL:
            raise ValueError(f"density integrates to {cum[-1]!r}, not 1")
        object.__setattr__(self, "_xk", np.asarray(xs, dtype=float))
        object.__setattr__(self, "_Fk", np.asarray(cum, dtype=float))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Density":
        return cls(Interval(lo, hi), (), (1.0 / (hi - lo),))

    @property
    def cdf_knots(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, F) knot arrays of the piecewise-linear CDF."""
        return self._xk, self._Fk

    def cdf(self, x: float) -> float:
        xk, Fk = self._xk, self._Fk
        if x <= xk[0]:
            return 0.0
        if x >= xk[-1]:
            return 1.0
        j = bisect.bisect_right(xk, x) - 1
        return float(Fk[j] + (x - xk[j]) * self.values[j])

    def measure(self, s: IntervalSet) -> float:
        """Probability of an interval set; exact closed form."""
        total = 0.0
        for iv in s.intervals:
            if iv.lo < self.domain.lo - TOL or iv.hi > self.domain.hi + TOL:
                raise DomainMismatchError(f"{iv} is outside the density domain {self.domain}")
            total += self.cdf(iv.hi) - self.cdf(iv.lo)
        return total

    def quantile(self, u: float) -> float:
        """Inverse CDF; strictly increasing since the density is positive."""
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"quantile argument {u} outside [0, 1]")
        return float(np.interp(u, self._Fk, self._xk))

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        return np.interp(u, self._Fk, self._xk)


def measure(s: IntervalSet, density: Density) -> float:
    return density.measure(s)
