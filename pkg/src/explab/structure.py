"""Learning-problem geometry: locally-optimal hypotheses and the induced alphabet.

Given a scenario (feature density, ground truth, hypothesis class, deviation
threshold delta), this module enumerates the GLPs - hypotheses no rival beats
uniformly - and derives the combinatorial objects that drive the rate
analysis: per-GLP dominating-region pairs, the disjointified symbol alphabet
with its probability vector q and sign matrix A, the threshold delta_max below
which leaving the optimum's region forces a detectable deviation, and the
stability check for individual GLPs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

from . import _rng
from .errors import AssumptionViolationError, PartitionError
from .learners import (
    K_BOUNDARY,
    ClassSpec,
    Hypothesis,
    _as_step,
    grid_candidate_steps,
    kboundary_step,
    project_ground_truth,
    step_to_kboundary,
)
from .piecewise import TOL, Density, Interval, IntervalSet, StepFunction, disagreement_region

# A region "exists" when its probability mass exceeds this.
MEASURE_TOL = 1e-12

_STABILITY_PROBES = 1000
_STABILITY_SEED = 0x5AB1E


@dataclass(frozen=True)
class Scenario:
    """Feature density + deterministic ground truth + class + deviation threshold."""

    density: Density
    ground_truth: StepFunction
    class_spec: ClassSpec
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.density.domain.same_as(self.ground_truth.domain):
            raise ValueError("density and ground truth must share a domain")
        witnesses = check_nondegenerate_parts(self.density, self.class_spec)
        if witnesses:
            raise ValueError(f"degenerate hypothesis class on segments {witnesses}")

    @property
    def domain(self) -> Interval:
        return self.density.domain


def check_nondegenerate_parts(density: Density, spec: ClassSpec) -> list[Interval]:
    """Segments of the density on which every class member coincides (empty = ok).

    For both supported classes the all-0 and all-1 members already disagree
    everywhere, so this returns witnesses only for genuinely broken setups.
    """
    domain = density.domain
    if spec.kind == K_BOUNDARY:
        lo_f = kboundary_step((domain.hi,) * spec.k, domain)  # constant 0
        hi_f = kboundary_step((domain.lo,) + (domain.hi,) * (spec.k - 1), domain)  # constant 1
        differ = disagreement_region(lo_f, hi_f)
    else:
        # Linear separators include both constant classifiers.
        differ = IntervalSet.single(domain.lo, domain.hi)
    pts = [domain.lo, *density.breakpoints, domain.hi]
    witnesses = []
    for lo, hi in zip(pts, pts[1:]):
        seg = IntervalSet.single(lo, hi)
        if density.measure(seg.intersect(differ)) <= MEASURE_TOL:
            witnesses.append(Interval(lo, hi))
    return witnesses


def check_nondegenerate(sc: Scenario) -> list[Interval]:
    return check_nondegenerate_parts(sc.density, sc.class_spec)


@dataclass(frozen=True)
class GlpAnalysis:
    """GLP set (index 0 is the risk minimizer) plus derived quantities."""

    glps: tuple[Hypothesis, ...]
    d_regions: tuple[tuple[IntervalSet, IntervalSet], ...]  # (D_i, D'_i) for i >= 1
    opt_risk: float
    stable: tuple[bool, ...] | None = None
    delta_max: float | None = None


def dominating_region(theta_a: Hypothesis, theta_b: Hypothesis, g: StepFunction) -> IntervalSet:
    """Feature set where theta_a classifies g correctly and theta_b does not."""
    fa = _as_step(theta_a, g.domain)
    fb = _as_step(theta_b, g.domain)
    wrong_a = disagreement_region(fa, g)
    wrong_b = disagreement_region(fb, g)
    return wrong_b.subtract(wrong_a)


def enumerate_glps(sc: Scenario) -> GlpAnalysis:
    """All GLPs of the scenario, with their dominating-region pairs.

    Candidates are the class members whose transitions sit on ground-truth
    breakpoints or domain endpoints (any other hypothesis is weakly beaten by
    snapping a transition to the adjacent one).  A candidate survives when,
    against every rival, it is strictly better on some positive-measure set.
    """
    if sc.class_spec.kind != K_BOUNDARY:
        from .errors import UnsupportedClassError

        raise UnsupportedClassError("GLP analysis is defined for the k-boundary class")
    g = sc.ground_truth
    density = sc.density
    k = sc.class_spec.k
    candidates = grid_candidate_steps(g, k)
    wrong = [disagreement_region(step, g) for step in candidates]

    glp_steps = []
    for i, step in enumerate(candidates):
        is_glp = True
        for j, other in enumerate(candidates):
            if i == j:
                continue
            # strictly better somewhere: other wrong while step is right
            better = wrong[j].subtract(wrong[i])
            if density.measure(better) <= MEASURE_TOL:
                is_glp = False
                break
        if is_glp:
            glp_steps.append(step)

    opt = project_ground_truth(g, sc.class_spec, density)
    opt_step = kboundary_step(opt.params, sc.domain)
    opt_risk = density.measure(disagreement_region(opt_step, g))

    rest = [s for s in glp_steps if not s.same_function(opt_step)]
    rest_h = sorted(
        (step_to_kboundary(s, k) for s in rest), key=lambda h: h.params
    )
    glps = (opt,) + tuple(rest_h)

    d_regions = []
    for h in glps[1:]:
        d_i = dominating_region(glps[0], h, g)
        d_pi = dominating_region(h, glps[0], g)
        if density.measure(d_i) <= MEASURE_TOL or density.measure(d_pi) <= MEASURE_TOL:
            raise PartitionError(
                f"GLP {h.params} lacks a positive-measure dominating pair against the optimum"
            )
        d_regions.append((d_i, d_pi))
    return GlpAnalysis(glps=glps, d_regions=tuple(d_regions), opt_risk=opt_risk)


def in_a_region(theta: Hypothesis, ga: GlpAnalysis, g: StepFunction, density: Density) -> int:
    """Index of the region owning theta.

    theta belongs to a GLP's raw region when it is nowhere strictly better
    than that GLP.  Overlaps are resolved deterministically: membership in any
    non-optimal region wins over the optimum's, and among non-optimal regions
    the smallest GLP index wins.
    """
    theta_step = _as_step(theta, g.domain)
    theta_wrong = disagreement_region(theta_step, g)
    members = []
    for i, glp in enumerate(ga.glps):
        glp_wrong = disagreement_region(_as_step(glp, g.domain), g)
        better = glp_wrong.subtract(theta_wrong)  # where theta beats the GLP
        if density.measure(better) <= MEASURE_TOL:
            members.append(i)
    if not members:
        raise PartitionError(f"hypothesis {theta.params} belongs to no region")
    nonzero = [i for i in members if i != 0]
    return nonzero[0] if nonzero else 0


def check_stability(theta: Hypothesis, sc: Scenario) -> bool:
    """True when no small parameter perturbation improves classification anywhere.

    Analytic test: every boundary parameter sits on a ground-truth breakpoint
    or a domain endpoint, and every ground-truth segment adjacent to a matched
    boundary is classified correctly.  A randomized falsification probe (small
    perturbations of the parameter vector) can override an analytic pass.
    """
    if theta.kind != K_BOUNDARY:
        from .errors import UnsupportedClassError

        raise UnsupportedClassError("stability is defined for k-boundary hypotheses")
    g = sc.ground_truth
    domain = sc.domain
    density = sc.density
    theta_step = kboundary_step(theta.params, domain)
    theta_wrong = disagreement_region(theta_step, g)

    grid = [domain.lo, *g.breakpoints, domain.hi]
    segments = list(zip(grid, grid[1:]))

    analytic = True
    for b in theta.params:
        matches = [i for i, p in enumerate(grid) if abs(b - p) <= TOL]
        if not matches:
            analytic = False
            break
        for gi in matches:
            adjacent = []
            if gi > 0:
                adjacent.append(segments[gi - 1])
            if gi < len(segments):
                adjacent.append(segments[gi])
            for lo, hi in adjacent:
                seg = IntervalSet.single(lo, hi)
                if density.measure(seg.intersect(theta_wrong)) > MEASURE_TOL:
                    analytic = False
        if not analytic:
            break

    seg_lengths = [hi - lo for lo, hi in segments]
    eps = min(seg_lengths) / 2.0
    k = len(theta.params)
    u = _rng.uniform_matrix(_STABILITY_SEED, list(range(_STABILITY_PROBES)), k)
    for row in u:
        perturbed = sorted(
            min(max(b + (2.0 * ui - 1.0) * eps, domain.lo), domain.hi)
            for b, ui in zip(theta.params, row)
        )
        pert_step = kboundary_step(perturbed, domain)
        improved = theta_wrong.subtract(disagreement_region(pert_step, g))
        if density.measure(improved) > MEASURE_TOL:
            return False
    return analytic


def _cell_signatures(n_slots: int, k: int):
    """Multisets of at most k slot indices (combinations with repetition)."""
    for j in range(k + 1):
        yield from itertools.combinations_with_replacement(range(n_slots), j)


def compute_delta_max(ga: GlpAnalysis, sc: Scenario) -> float:
    """Largest deviation threshold protected by the optimum's region.

    min over hypotheses outside the optimum's region of both the risk against
    the projected optimum and the excess risk against the ground truth.  Both
    risks are piecewise-linear in the boundary vector with kinks only on the
    grid of ground-truth breakpoints, density breakpoints, and endpoints, and
    region membership is constant on grid cells, so scanning cell
    representatives and taking risks at cell corners is exact.  Returns +inf
    when nothing lies outside (the realizable, single-GLP case).
    """
    g = sc.ground_truth
    domain = sc.domain
    density = sc.density
    k = sc.class_spec.k
    opt_step = _as_step(ga.glps[0], domain)

    grid = sorted({domain.lo, domain.hi, *g.breakpoints, *density.breakpoints})
    # Slots: even index 2i = vertex grid[i]; odd index 2i+1 = open gap (grid[i], grid[i+1]).
    n_vert = len(grid)
    slots = 2 * n_vert - 1

    def slot_rep(slot: int, ordinal: int, width: int) -> float:
        if slot % 2 == 0:
            return grid[slot // 2]
        lo, hi = grid[slot // 2], grid[slot // 2 + 1]
        return lo + (hi - lo) * (ordinal + 1.0) / (width + 1.0)

    def slot_corners(slot: int) -> tuple[float, ...]:
        if slot % 2 == 0:
            return (grid[slot // 2],)
        return (grid[slot // 2], grid[slot // 2 + 1])

    best_f = math.inf
    best_g = math.inf
    for sig in _cell_signatures(slots, k):
        counts: dict[int, int] = {}
        for s in sig:
            counts[s] = counts.get(s, 0) + 1
        rep = []
        for s in sig:
            rep.append(slot_rep(s, sum(1 for t in rep if False), counts[s]))
        # place multiple flips in the same gap at distinct quantiles
        rep = []
        seen: dict[int, int] = {}
        for s in sig:
            ordinal = seen.get(s, 0)
            seen[s] = ordinal + 1
            rep.append(slot_rep(s, ordinal, counts[s]))
        rep_h = Hypothesis(K_BOUNDARY, tuple(sorted(rep)) or (domain.hi,) * 0)
        rep_h = Hypothesis(K_BOUNDARY, tuple(sorted(rep)))
        try:
            region = in_a_region(rep_h, ga, g, density)
        except PartitionError:
            raise
        if region == 0:
            continue
        for corner in itertools.product(*(slot_corners(s) for s in sig)):
            step = kboundary_step(sorted(corner), domain)
            rf = density.measure(disagreement_region(step, opt_step))
            rg = density.measure(disagreement_region(step, g))
            best_f = min(best_f, rf)
            best_g = min(best_g, rg)
    if math.isinf(best_f):
        return math.inf
    return min(best_f, best_g - ga.opt_risk)


def analyze(sc: Scenario) -> GlpAnalysis:
    """Full GLP analysis: enumeration, stability flags, and delta_max."""
    ga = enumerate_glps(sc)
    stable = tuple(check_stability(h, sc) for h in ga.glps)
    dmax = compute_delta_max(ga, sc)
    return replace(ga, stable=stable, delta_max=dmax)


# ---------------------------------------------------------------------------
# Alphabet construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Symbol:
    name: str
    region: IntervalSet


@dataclass(frozen=True)
class AlphabetModel:
    """Disjoint symbol regions covering the domain, with q and the sign matrix.

    The matrix has one column per non-complement symbol, in symbol order; row
    i applied to per-symbol sample counts reproduces the count difference
    between the i-th dominating pair exactly.  The complement symbol, when
    present, is last and carried by no column.
    """

    symbols: tuple[Symbol, ...]
    q: tuple[float, ...]
    a_matrix: tuple[tuple[int, ...], ...]
    has_complement: bool


def _subset_name(mask: int, prime: bool) -> str:
    idx = [str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1]
    return ("X'_" if prime else "X_") + ",".join(idx)


def disjointify(pairs, domain: Interval) -> tuple[tuple[Symbol, int, bool], ...]:
    """Split dominating-region pairs into non-intersecting symbols.

    For every nonempty index subset S, the plain symbol is the intersection of
    the D regions over S minus the union outside S; primed symbols do the same
    for the D' regions; the complement symbol collects the rest of the domain.
    Subsets are ordered by their index bitmask; empty regions are dropped.
    Returns (symbol, subset mask, primed) triples, complement last with mask 0.
    """
    K = len(pairs)
    d_list = [p[0] for p in pairs]
    dp_list = [p[1] for p in pairs]
    out = []
    for prime, regions in ((False, d_list), (True, dp_list)):
        for mask in range(1, 1 << K):
            inter = None
            for j in range(K):
                if mask >> j & 1:
                    inter = regions[j] if inter is None else inter.intersect(regions[j])
            for j in range(K):
                if not mask >> j & 1:
                    inter = inter.subtract(regions[j])
            if inter:
                out.append((Symbol(_subset_name(mask, prime), inter), mask, prime))
    everything = IntervalSet.empty()
    for r in d_list + dp_list:
        everything = everything.union(r)
    rest = everything.complement(domain)
    if rest:
        out.append((Symbol("X_c", rest), 0, False))
    return tuple(out)


def build_alphabet(source, density: Density) -> AlphabetModel:
    """Alphabet, symbol distribution q, and sign matrix for a GLP analysis
    (or directly for a list of dominating-region pairs)."""
    if isinstance(source, GlpAnalysis):
        pairs = source.d_regions
    else:
        pairs = tuple(source)
    K = len(pairs)
    triples = [
        t for t in disjointify(pairs, density.domain) if density.measure(t[0].region) > MEASURE_TOL
    ]
    symbols = tuple(t[0] for t in triples)
    q = tuple(density.measure(s.region) for s in symbols)
    has_complement = bool(triples) and triples[-1][0].name == "X_c"
    columns = triples[:-1] if has_complement else triples
    a_matrix = tuple(
        tuple(
            (0 if not (mask >> i & 1) else (-1 if prime else 1))
            for (_, mask, prime) in columns
        )
        for i in range(K)
    )
    # Sanity: symbols must partition the domain.
    total = sum(q)
    if abs(total - 1.0) > 1e-9:
        raise PartitionError(f"symbol measures sum to {total!r}, not 1")
    return AlphabetModel(symbols=symbols, q=q, a_matrix=a_matrix, has_complement=has_complement)


def require_delta_valid(sc: Scenario, delta_max: float) -> None:
    """Raise when the scenario's delta is not below delta_max."""
    if not sc.delta < delta_max:
        raise AssumptionViolationError(
            f"delta={sc.delta} must lie strictly below delta_max={delta_max} "
            "for the region-escape analysis to apply"
        )
