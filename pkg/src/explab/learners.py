"""Hypothesis classes, risks, and exact empirical risk minimization.

Two classes are supported: alternating threshold ("k-boundary") classifiers on
a real interval, and 2-D linear separators.  The k-boundary side carries the
full machinery (exact risks, projection of a ground truth, ERM with the
worst-true-risk tie-break); the linear side is simulation-only.

ERM tie-breaking convention: among hypotheses minimizing the empirical risk,
return the one maximizing the true risk against the supplied reference
function, and break remaining ties by the lexicographically smallest boundary
vector.  The maximum is taken over the *closure* of each minimizing parameter
cell, so the returned vertex may sit exactly on a sample point (where that
sample's predicted label flips - a measure-zero parameter event that affects
nothing downstream).
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainMismatchError, ResourceLimitError, UnsupportedClassError
from .piecewise import (
    TOL,
    Density,
    Interval,
    StepFunction,
    disagreement_region,
)

K_BOUNDARY = "k_boundary"
LINEAR2D = "linear2d"

# Hard cap on enumerated candidates in exact searches.
MAX_CANDIDATES = 200_000


@dataclass(frozen=True)
class ClassSpec:
    """Hypothesis-class descriptor: k-boundary (with k >= 1) or 2-D linear."""

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind == K_BOUNDARY:
            if self.k < 1:
                raise ValueError("k-boundary class needs k >= 1")
        elif self.kind == LINEAR2D:
            pass
        else:
            raise ValueError(f"unknown class kind {self.kind!r}")

    @classmethod
    def k_boundary(cls, k: int) -> "ClassSpec":
        return cls(K_BOUNDARY, k)

    @classmethod
    def linear2d(cls) -> "ClassSpec":
        return cls(LINEAR2D)


@dataclass(frozen=True)
class Hypothesis:
    """A class member: k sorted boundaries, or linear coefficients (b0, b1, b2)."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind == K_BOUNDARY:
            if any(b > a for a, b in zip(self.params[1:], self.params)):
                raise ValueError("boundary vector must be sorted ascending")
        elif self.kind == LINEAR2D:
            if len(self.params) != 3:
                raise ValueError("linear hypothesis needs (b0, b1, b2)")
        else:
            raise ValueError(f"unknown hypothesis kind {self.kind!r}")


@dataclass(frozen=True)
class LabeledSample:
    """Training points (x, y); x is a real for k-boundary, a pair for linear2d."""

    points: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return len(self.points)

    @classmethod
    def of(cls, pairs) -> "LabeledSample":
        return cls(tuple((x, int(y)) for x, y in pairs))


def evaluate(h: Hypothesis, x) -> int:
    """Predicted label at a point."""
    if h.kind == K_BOUNDARY:
        # Value alternates starting at 0 below the first boundary: the label is
        # the parity of the number of boundaries at or below x.
        return bisect.bisect_right(h.params, x) & 1
    b0, b1, b2 = h.params
    x1, x2 = x
    return 1 if b0 + b1 * x1 + b2 * x2 > 0 else 0


def kboundary_step(params, domain: Interval) -> StepFunction:
    """Realize a boundary vector as the step function it computes on [lo, hi).

    A boundary exactly at the left edge flips the starting value; one at the
    right edge affects no point of the half-open domain; coincident interior
    boundaries cancel in pairs.
    """
    first = 0
    flips: list[float] = []
    for b in params:
        if b < domain.lo - TOL or b > domain.hi + TOL:
            raise ValueError(f"boundary {b} outside domain {domain}")
        if b == domain.lo:
            first ^= 1
        elif b == domain.hi:
            continue
        else:
            flips.append(float(b))
    breaks: list[float] = []
    for pos, group in itertools.groupby(sorted(flips)):
        if len(list(group)) % 2 == 1:
            breaks.append(pos)
    return StepFunction(domain, tuple(breaks), first)


def step_to_kboundary(step: StepFunction, k: int) -> Hypothesis:
    """Canonical k-vector realizing a step function (padding at the right edge)."""
    flips = ([step.domain.lo] if step.first_value else []) + list(step.breakpoints)
    if len(flips) > k:
        raise ValueError(f"function needs {len(flips)} boundaries, class has k={k}")
    flips += [step.domain.hi] * (k - len(flips))
    return Hypothesis(K_BOUNDARY, tuple(flips))


def _as_step(f, domain: Interval) -> StepFunction:
    if isinstance(f, StepFunction):
        if not f.domain.same_as(domain):
            raise DomainMismatchError(f"domains differ: {f.domain} vs {domain}")
        return f
    if isinstance(f, Hypothesis):
        if f.kind != K_BOUNDARY:
            raise UnsupportedClassError("exact risk is defined for k-boundary only")
        return kboundary_step(f.params, domain)
    raise TypeError(f"expected Hypothesis or StepFunction, got {type(f)!r}")


def risk(a, b, density: Density) -> float:
    """True risk under 0-1 loss: measure of the disagreement region."""
    fa = _as_step(a, density.domain)
    fb = _as_step(b, density.domain)
    return density.measure(disagreement_region(fa, fb))


def empirical_risk(h: Hypothesis, sample: LabeledSample) -> Fraction:
    """Exact mismatch count over n, as a rational number."""
    if sample.n == 0:
        raise ValueError("empirical risk of an empty sample is undefined")
    errors = sum(1 for x, y in sample.points if evaluate(h, x) != y)
    return Fraction(errors, sample.n)


def _count_candidates(m: int, k: int) -> int:
    return sum(math.comb(m, j) for j in range(min(k, m) + 1))


def grid_candidate_steps(g: StepFunction, k: int, extra: tuple[float, ...] = ()) -> list[StepFunction]:
    """Step functions with at most k flips placed on g's breakpoints / domain edges.

    A flip at the left edge realizes functions that start at 1.  Optional extra
    flip positions widen the grid (used for tie-break grids including density
    kinks).  Results are deduplicated by realized function.
    """
    domain = g.domain
    positions = sorted(set(g.breakpoints) | set(extra) | {domain.lo})
    positions = [p for p in positions if domain.lo <= p < domain.hi]
    if _count_candidates(len(positions), k) > MAX_CANDIDATES:
        raise ResourceLimitError(
            f"candidate grid too large: {len(positions)} positions, k={k}"
        )
    seen = set()
    out = []
    for j in range(min(k, len(positions)) + 1):
        for subset in itertools.combinations(positions, j):
            step = kboundary_step(subset, domain)
            key = (step.first_value, step.breakpoints)
            if key not in seen:
                seen.add(key)
                out.append(step)
    return out


def project_ground_truth(g: StepFunction, spec: ClassSpec, density: Density) -> Hypothesis:
    """Exact risk minimizer over the class for ground truth g.

    Every transition of a minimizer coincides with a breakpoint of g or a
    domain endpoint, so an exhaustive search over that grid is exact.  Ties go
    to the fewest boundaries, then the lexicographically smallest vector.
    """
    if spec.kind != K_BOUNDARY:
        raise UnsupportedClassError("projection is defined for the k-boundary class only")
    if not g.domain.same_as(density.domain):
        raise DomainMismatchError(f"domains differ: {g.domain} vs {density.domain}")
    best = None
    for step in grid_candidate_steps(g, spec.k):
        r = density.measure(disagreement_region(step, g))
        vec = step_to_kboundary(step, spec.k).params
        nflips = len(step.breakpoints) + step.first_value
        key = (r, nflips, vec)
        if best is None or r < best[0] - TOL or (abs(r - best[0]) <= TOL and key[1:] < best[1:]):
            best = key
    return Hypothesis(K_BOUNDARY, best[2])


# ---------------------------------------------------------------------------
# Exact ERM for the k-boundary class
# ---------------------------------------------------------------------------


def _risk_knots(ref: StepFunction, density: Density) -> list[float]:
    """Positions where the map b -> risk(threshold at b, ref) can kink."""
    pts = {density.domain.lo, density.domain.hi}
    pts.update(ref.breakpoints)
    pts.update(density.breakpoints)
    return sorted(pts)


def _minimizing_labelings(c0, c1, k: int):
    """All binary labelings of the unique sample positions that achieve the
    minimal weighted error among labelings whose flip cost is at most k.

    Cost = number of label changes, plus one if the first label is 1 (the
    leading flip).  Returns (min_errors, list of labelings).
    """
    m = len(c0)
    INF = float("inf")
    # dp[i][v][c] = min errors on positions 0..i ending with label v at cost c
    dp = [[[INF] * (k + 1) for _ in range(2)] for _ in range(m)]
    err0 = list(c1)  # predicting 0 misses the 1-labeled copies
    err1 = list(c0)
    for c in range(k + 1):
        dp[0][0][c] = err0[0]
        if c >= 1:
            dp[0][1][c] = err1[0]
    for i in range(1, m):
        for v in range(2):
            e = err0[i] if v == 0 else err1[i]
            for c in range(k + 1):
                stay = dp[i - 1][v][c]
                switch = dp[i - 1][1 - v][c - 1] if c >= 1 else INF
                dp[i][v][c] = min(stay, switch) + e
    best = min(dp[m - 1][v][c] for v in range(2) for c in range(k + 1))
    # Backtrack every optimal path; distinct paths can reach the same labeling.
    results = set()

    def walk(i, v, c, suffix):
        if i == 0:
            results.add(tuple([v] + suffix))
            return
        e = err0[i] if v == 0 else err1[i]
        target = dp[i][v][c] - e
        if dp[i - 1][v][c] == target:
            walk(i - 1, v, c, [v] + suffix)
        if c >= 1 and dp[i - 1][1 - v][c - 1] == target:
            walk(i - 1, 1 - v, c - 1, [v] + suffix)
        if len(results) > MAX_CANDIDATES:
            raise ResourceLimitError("too many tied labelings to enumerate")

    for v in range(2):
        for c in range(k + 1):
            if dp[m - 1][v][c] == best:
                walk(m - 1, v, c, [])
    return best, sorted(results)


def _gap_points(left: float, right: float, knots) -> list[float]:
    """Closure endpoints of a gap plus any risk kinks strictly inside it."""
    pts = [left]
    pts += [p for p in knots if left < p < right]
    pts.append(right)
    return pts


def _labeling_flip_configs(labeling, u, domain: Interval, knots, k: int):
    """Yield flip-position tuples covering every closure vertex of the
    parameter cell carved out by one labeling.

    Base flips realize the labeling (one per label change, confined to its
    gap).  Spare budget can add a tail flip beyond the last sample and/or
    bumps (flip pairs) inside any single gap; leftover budget pads at the
    right edge, which realizes nothing.
    """
    m = len(u)
    gap_bounds = []
    gap_bounds.append((domain.lo, u[0]))
    for i in range(1, m):
        gap_bounds.append((u[i - 1], u[i]))
    tail = (u[m - 1], domain.hi)

    transitions = []  # gap index per base flip
    if labeling[0] == 1:
        transitions.append(0)
    for i in range(1, m):
        if labeling[i] != labeling[i - 1]:
            transitions.append(i)
    spare = k - len(transitions)
    assert spare >= 0

    base_choices = [_gap_points(*gap_bounds[g], knots) for g in transitions]

    all_gaps = gap_bounds + [tail]
    tail_pts = [p for p in _gap_points(*tail, knots) if p < domain.hi]

    def extras_options():
        yield ()
        if spare >= 1:
            for p in tail_pts:
                yield (p,)
        if spare >= 2:
            max_bumps = spare // 2
            gap_pt_lists = [_gap_points(*gb, knots) for gb in all_gaps]

            def bumps(start_gap, budget_pairs):
                if budget_pairs == 0:
                    return
                for gidx in range(start_gap, len(all_gaps)):
                    for a, b in itertools.combinations(gap_pt_lists[gidx], 2):
                        yield (a, b)
                        for rest in bumps(gidx, budget_pairs - 1):
                            yield (a, b) + rest

            for bump in bumps(0, max_bumps):
                yield bump
                if spare - len(bump) >= 1:
                    for p in tail_pts:
                        yield bump + (p,)

    for base in itertools.product(*base_choices):
        if len(set(base)) != len(base):
            continue  # coincident flips cancel; covered by a cheaper labeling
        for extra in extras_options():
            yield base + extra


def erm_kboundary(
    sample: LabeledSample,
    spec: ClassSpec,
    density: Density,
    reference: StepFunction,
) -> Hypothesis:
    """Exact ERM with the worst-true-risk tie-break against ``reference``.

    Empirical risk is piecewise constant in the boundary vector, with cells
    delimited by sample points.  Minimizing cells are found by dynamic
    programming over the sorted sample; within the closure of each, the true
    risk is continuous piecewise-linear, so its maximum is attained at a
    closure vertex (cell corners and risk kinks).  Final ties go to the
    lexicographically smallest boundary vector.
    """
    if spec.kind != K_BOUNDARY:
        raise UnsupportedClassError("use erm_linear2d for the linear class")
    domain = density.domain
    ref = _as_step(reference, domain)
    knots = [p for p in _risk_knots(ref, density) if domain.lo < p < domain.hi]
    k = spec.k

    risk_cache: dict = {}

    def ref_risk(step: StepFunction) -> float:
        key = (step.first_value, step.breakpoints)
        if key not in risk_cache:
            risk_cache[key] = density.measure(disagreement_region(step, ref))
        return risk_cache[key]

    def better(cand_risk, cand_vec, best):
        if best is None:
            return True
        best_risk, best_vec = best
        if cand_risk > best_risk + TOL:
            return True
        return abs(cand_risk - best_risk) <= TOL and cand_vec < best_vec

    best = None

    if sample.n == 0:
        # Every hypothesis ties at empirical risk; maximize true risk over the
        # full class.  The maximum of a piecewise-linear risk sits on the grid
        # of its kinks.
        for step in grid_candidate_steps(ref, k, extra=tuple(knots)):
            vec = step_to_kboundary(step, k).params
            r = ref_risk(step)
            if better(r, vec, best):
                best = (r, vec)
        return Hypothesis(K_BOUNDARY, best[1])

    pts = sorted(sample.points)
    u: list[float] = []
    c0: list[int] = []
    c1: list[int] = []
    for x, y in pts:
        if not (domain.lo <= x < domain.hi):
            raise ValueError(f"sample point {x} outside domain {domain}")
        if u and x == u[-1]:
            c0[-1] += 1 - y
            c1[-1] += y
        else:
            u.append(x)
            c0.append(1 - y)
            c1.append(y)

    _, labelings = _minimizing_labelings(c0, c1, k)

    seen_steps = set()
    for labeling in labelings:
        for flips in _labeling_flip_configs(labeling, u, domain, knots, k):
            if len(set(flips)) != len(flips):
                continue
            step = kboundary_step(sorted(flips), domain)
            key = (step.first_value, step.breakpoints)
            if key in seen_steps:
                continue
            seen_steps.add(key)
            if len(seen_steps) > MAX_CANDIDATES:
                raise ResourceLimitError("tie-break enumeration exceeded the candidate cap")
            vec = step_to_kboundary(step, k).params
            r = ref_risk(step)
            if better(r, vec, best):
                best = (r, vec)
    return Hypothesis(K_BOUNDARY, best[1])


def erm_linear2d(sample: LabeledSample) -> Hypothesis:
    """Exact 0-1-loss minimizer for 2-D linear separators.

    Scans constant classifiers plus lines through every sample pair, in both
    orientations and with an infinitesimal offset to either side - a standard
    O(n^3) exact search.  Ties go to the first candidate in enumeration order
    (no true-risk tie-break for this class).
    """
    if sample.n == 0:
        raise ValueError("linear ERM needs at least one sample")
    pts = [(float(x[0]), float(x[1]), int(y)) for x, y in sample.points]

    def errors(b0, b1, b2):
        return sum(1 for x1, x2, y in pts if (1 if b0 + b1 * x1 + b2 * x2 > 0 else 0) != y)

    candidates = [(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)]
    for (x1a, x2a, _), (x1b, x2b, _) in itertools.combinations(
        [(p[0], p[1], p[2]) for p in pts], 2
    ):
        w1, w2 = -(x2b - x2a), (x1b - x1a)
        if w1 == 0.0 and w2 == 0.0:
            continue
        c = w1 * x1a + w2 * x2a
        eta = 1e-9 * (1.0 + abs(c))
        for s in (1.0, -1.0):
            for off in (eta, -eta):
                candidates.append((s * (-c) + off, s * w1, s * w2))

    best = None
    for cand in candidates:
        e = errors(*cand)
        if best is None or e < best[0]:
            best = (e, cand)
        if best[0] == 0:
            break
    return Hypothesis(LINEAR2D, best[1])
