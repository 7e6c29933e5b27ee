"""Exact subset selection under a parametrized objective.

Per-parameter optima (:func:`top_k`), the quota-constrained baseline and its
regret, the set of all theta-optimal selections over a parameter interval via
breakpoint enumeration, and extraction of the fairest member of that set.

Argmax ties are never broken silently: wherever several selections attain
the optimum, all of them are returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, InfeasibleError, ParameterError
from .model import (
    FairnessSpec,
    ObjectiveSpec,
    Population,
    Selection,
    ThetaDomain,
    fairness_score,
    score_item,
    score_selection,
)
from .numeric import Number, close, compare

__all__ = [
    "OptimalSetEntry",
    "FairestResult",
    "RegretReport",
    "all_selections",
    "top_k",
    "quota_constrained_optimum",
    "regret",
    "utility_gap",
    "crossing_points",
    "enumerate_optimal_set",
    "sample_optimal_set",
    "fairest_optimal",
]


@dataclass(frozen=True)
class OptimalSetEntry:
    """One member of the theta-optimal set together with where it is optimal.

    ``regions`` holds maximal closed parameter intervals (scalar theta only,
    possibly a single point). Sampled entries instead carry ``witnesses``,
    the parameter points at which the selection was observed to be optimal.
    """

    selection: Selection
    theta: object
    utility: Number
    regions: tuple = ()
    witnesses: tuple = ()
    approximate: bool = False

    @property
    def region(self):
        """Smallest interval containing every certifying region."""
        if not self.regions:
            return None
        return (self.regions[0][0], self.regions[-1][1])

    def covers(self, theta) -> bool:
        return any(
            (a <= theta or close(a, theta)) and (theta <= b or close(theta, b)) for a, b in self.regions
        )


@dataclass(frozen=True)
class FairestResult:
    winner: OptimalSetEntry
    fairness: int
    ties: tuple = ()

    @property
    def selection(self) -> Selection:
        return self.winner.selection

    @property
    def theta(self):
        return self.winner.theta

    @property
    def region(self):
        return self.winner.region

    @property
    def utility(self) -> Number:
        """Winner's utility at its own theta; not comparable across entries."""
        return self.winner.utility


@dataclass(frozen=True)
class RegretReport:
    theta: object
    optimum: tuple
    fair_optimum: tuple
    utility: Number
    fair_utility: Number
    regret: Number = field(init=False)

    def __post_init__(self):
        gap = self.utility - self.fair_utility
        if close(gap, 0):
            gap = gap * 0
        object.__setattr__(self, "regret", gap)


def all_selections(pop: Population, k: int) -> list[Selection]:
    """Every size-k subset of ``pop`` (the solution space), in lexicographic item order."""
    _check_k(pop, k, allow_zero=True)
    return [Selection.of(pop, ids) for ids in itertools.combinations(pop.ids, k)]


def _check_k(pop: Population, k: int, allow_zero: bool = False) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ConfigError(f"k must be an integer, got {k!r}")
    lo = 0 if allow_zero else 1
    if not lo <= k <= pop.n:
        raise ConfigError(f"k must satisfy {lo} <= k <= n = {pop.n}, got {k}")


def _best_subsets(scored: list, c: int):
    """All ways to pick ``c`` of the scored items with maximal total.

    ``scored`` is a list of ``(id, score)`` pairs. Returns
    ``(total, [frozenset, ...])``.
    """
    if c == 0:
        return Fraction(0), [frozenset()]
    ranked = sorted(scored, key=lambda p: p[1], reverse=True)
    kth = ranked[c - 1][1]
    above = [i for i, s in ranked if compare(s, kth) > 0]
    tied = [i for i, s in ranked if compare(s, kth) == 0]
    need = c - len(above)
    total = sum((s for _, s in ranked[:c]), Fraction(0))
    sets = [frozenset(above).union(extra) for extra in itertools.combinations(tied, need)]
    return total, sets


def _sorted_selections(pop: Population, sets) -> list[Selection]:
    return sorted((Selection.of(pop, s) for s in sets), key=lambda s: s.key)


def top_k(pop: Population, obj: ObjectiveSpec, theta, k: int) -> list[Selection]:
    """Every size-k selection of maximal utility at ``theta``.

    When the k-th and (k+1)-th scores differ this is the single set of the k
    highest-scoring items; otherwise every way of filling the last places
    from the tied items is returned.
    """
    _check_k(pop, k)
    theta = obj.check_theta(theta)
    scored = [(item.id, score_item(item, obj, theta)) for item in pop]
    _, sets = _best_subsets(scored, k)
    return _sorted_selections(pop, sets)


def quota_constrained_optimum(
    pop: Population, obj: ObjectiveSpec, theta, k: int, fs: FairnessSpec
) -> list[Selection]:
    """All utility-maximizing selections among those passing the hard quota.

    For a minimum-share quota on one label the search splits by the number
    ``c`` of members taken from that label: the best ``c`` of the label plus
    the best ``k - c`` of everyone else.
    """
    _check_k(pop, k)
    theta = obj.check_theta(theta)
    if fs.quota == 0 or fs.quota_label is None:
        if fs.quota != 0:
            raise ConfigError("quota given without a quota label")
        return top_k(pop, obj, theta, k)
    fs.validate(pop)
    label = fs.quota_label
    inside = [(it.id, score_item(it, obj, theta)) for it in pop if it.group == label]
    outside = [(it.id, score_item(it, obj, theta)) for it in pop if it.group != label]
    best = None
    found = []
    for c in range(k + 1):
        if c > len(inside) or k - c > len(outside):
            continue
        share = Fraction(c, k)
        if not (share >= fs.quota or close(share, fs.quota)):
            continue
        v_in, s_in = _best_subsets(inside, c)
        v_out, s_out = _best_subsets(outside, k - c)
        value = v_in + v_out
        sets = [a | b for a in s_in for b in s_out]
        if best is None or compare(value, best) > 0:
            best, found = value, sets
        elif compare(value, best) == 0:
            found.extend(sets)
    if best is None:
        raise InfeasibleError(
            f"no selection of size {k} has a {label!r} share of at least {fs.quota}"
        )
    return _sorted_selections(pop, found)


def utility_gap(pop: Population, obj: ObjectiveSpec, theta, sel: Selection) -> Number:
    """Optimal utility at ``theta`` minus the utility of ``sel`` at the same theta."""
    best = top_k(pop, obj, theta, sel.k)[0]
    gap = score_selection(best, obj, theta) - score_selection(sel, obj, theta)
    return gap * 0 if close(gap, 0) else gap


def regret(pop: Population, obj: ObjectiveSpec, theta, k: int, fs: FairnessSpec) -> RegretReport:
    """Utility sacrificed by the quota-constrained optimum at one fixed theta."""
    theta = obj.check_theta(theta)
    opt = top_k(pop, obj, theta, k)
    fair = quota_constrained_optimum(pop, obj, theta, k, fs)
    return RegretReport(
        theta=theta,
        optimum=tuple(opt),
        fair_optimum=tuple(fair),
        utility=score_selection(opt[0], obj, theta),
        fair_utility=score_selection(fair[0], obj, theta),
    )


def _require_interval(obj: ObjectiveSpec, domain: ThetaDomain) -> None:
    if obj.kind != "mixture":
        raise ParameterError("exact breakpoint enumeration needs the scalar mixture objective")
    if domain.dimension != 1:
        raise ParameterError(
            "exact enumeration is one-dimensional; use sample_optimal_set for m > 1"
        )


def _dedupe_sorted(values: list) -> list:
    out = []
    for v in sorted(values):
        if out and close(out[-1], v):
            continue
        out.append(v)
    return out


def crossing_points(
    pop: Population, obj: ObjectiveSpec, domain: ThetaDomain, k: Optional[int] = None
) -> list:
    """Sorted parameter values in ``domain`` where two item score lines cross.

    Parallel lines never cross and identical lines are skipped. With ``k``
    given, only crossings where the top-k set is not unique (the points
    where it can change) are kept.
    """
    _require_interval(obj, domain)
    lines = [obj.line(item) for item in pop]
    found = []
    for (s1, b1), (s2, b2) in itertools.combinations(lines, 2):
        if close(s1, s2):
            continue
        t = (b2 - b1) / (s1 - s2)
        if domain.contains(t):
            found.append(t)
    points = _dedupe_sorted(found)
    if k is not None:
        points = [t for t in points if len(top_k(pop, obj, t, k)) > 1]
    return points


def _merge(intervals: list) -> tuple:
    merged = []
    for a, b in sorted(intervals):
        if merged and (a <= merged[-1][1] or close(a, merged[-1][1])):
            lo, hi = merged[-1]
            merged[-1] = (lo, max(hi, b))
        else:
            merged.append((a, b))
    return tuple(merged)


def _midpoint(a, b):
    return (a + b) / 2


def enumerate_optimal_set(
    pop: Population, obj: ObjectiveSpec, domain: ThetaDomain, k: int
) -> list[OptimalSetEntry]:
    """Exact set of theta-optimal selections over a closed interval.

    The interval is cut at every score crossing. Optima are evaluated at each
    cut point and both endpoints (where ties live) and at the midpoint of
    every open piece (where the optimum is constant). Each selection is
    reported once with the union of the closed intervals certifying it.
    """
    _require_interval(obj, domain)
    _check_k(pop, k)
    lo, hi = domain.lo, domain.hi
    cuts = [t for t in crossing_points(pop, obj, domain) if not close(t, lo) and not close(t, hi)]
    points = [lo] + cuts + ([hi] if not close(lo, hi) else [])
    spans: dict = {}
    by_key: dict = {}

    def record(sel, a, b):
        by_key.setdefault(sel.key, sel)
        spans.setdefault(sel.key, []).append((a, b))

    for p in points:
        for sel in top_k(pop, obj, p, k):
            record(sel, p, p)
    for a, b in zip(points, points[1:]):
        for sel in top_k(pop, obj, _midpoint(a, b), k):
            record(sel, a, b)

    entries = []
    for key, sel in by_key.items():
        regions = _merge(spans[key])
        widest = max(regions, key=lambda r: r[1] - r[0])
        theta = _midpoint(*widest)
        entries.append(
            OptimalSetEntry(
                selection=sel,
                theta=theta,
                utility=score_selection(sel, obj, theta),
                regions=regions,
            )
        )
    entries.sort(key=lambda e: (e.regions[0][0], e.selection.key))
    return entries


def _theta_samples(domain: ThetaDomain, n: int, seed) -> list[tuple]:
    """Deterministic exact-rational sample of a box or hull domain.

    The first sample is the center (box) or vertex centroid (hull); hulls
    continue with their vertices, then random convex combinations, boxes
    with a jittered Latin-hypercube grid.
    """
    rng = np.random.default_rng(seed)
    m = domain.dimension
    out = []
    if domain.kind == "hull":
        verts = domain.vertices
        out.append(tuple(sum(v[j] for v in verts) / len(verts) for j in range(m)))
        out.extend(verts)
        while len(out) < n:
            w = [Fraction(float(x)) for x in rng.dirichlet(np.ones(len(verts)))]
            total = sum(w)
            w = [x / total for x in w]
            out.append(tuple(sum(wi * v[j] for wi, v in zip(w, verts)) for j in range(m)))
    else:
        lo, hi = domain.lo, domain.hi
        out.append(tuple((a + b) / 2 for a, b in zip(lo, hi)))
        rest = max(n - 1, 0)
        if rest:
            strata = np.stack([rng.permutation(rest) for _ in range(m)], axis=1)
            u = (strata + rng.random((rest, m))) / rest
            for row in u:
                out.append(tuple(a + Fraction(float(x)) * (b - a) for a, x, b in zip(lo, row, hi)))
    return out[:n]


def sample_optimal_set(
    pop: Population,
    obj: ObjectiveSpec,
    domain: ThetaDomain,
    k: int,
    samples: int = 1000,
    seed: int = 0,
) -> list[OptimalSetEntry]:
    """Approximate theta-optimal set for multi-dimensional parameter domains.

    Optima are computed exactly at a deterministic sample of ``domain``, so
    the result is always a subset of the true set (each entry keeps the
    points that witness its optimality) but may miss selections optimal only
    on small pieces of the domain.
    """
    if domain.dimension < 2:
        raise ParameterError("one-dimensional domains have an exact path: use enumerate_optimal_set")
    if obj.m != domain.dimension:
        raise ParameterError(f"objective has m = {obj.m} but the domain has dimension {domain.dimension}")
    if samples < 1:
        raise ConfigError("samples must be at least 1")
    _check_k(pop, k)
    witnesses: dict = {}
    by_key: dict = {}
    for theta in _theta_samples(domain, samples, seed):
        for sel in top_k(pop, obj, theta, k):
            by_key.setdefault(sel.key, sel)
            witnesses.setdefault(sel.key, []).append(theta)
    entries = []
    for key, sel in by_key.items():
        pts = tuple(witnesses[key])
        entries.append(
            OptimalSetEntry(
                selection=sel,
                theta=pts[0],
                utility=score_selection(sel, obj, pts[0]),
                witnesses=pts,
                approximate=True,
            )
        )
    entries.sort(key=lambda e: e.selection.key)
    return entries


def _distance_to_regions(regions, target) -> Number:
    return min(0 if a <= target <= b else min(abs(target - a), abs(target - b)) for a, b in regions)


def _clamp_to_regions(regions, target):
    best = None
    for a, b in regions:
        t = min(max(target, a), b)
        if best is None or abs(t - target) < abs(best - target):
            best = t
    return best


def fairest_optimal(
    entries: Sequence[OptimalSetEntry],
    fs: FairnessSpec,
    prefer=None,
    obj: Optional[ObjectiveSpec] = None,
) -> FairestResult:
    """The fairest theta-optimal selection.

    Every entry is optimal for some admissible theta, so choosing among them
    costs nothing in the primary objective. Ties in fairness are all
    reported; the winner is the first in (region start, id set) order, or,
    when ``prefer`` is a scalar theta, the tied entry whose region lies
    closest to it (its reported theta is then the closest point of the
    region to ``prefer`` instead of the region midpoint, and ``obj`` is
    needed to re-evaluate the utility there).
    """
    if not entries:
        raise ConfigError("fairest_optimal needs at least one optimal-set entry")
    scored = [(fairness_score(e.selection, fs), e) for e in entries]
    best = max(f for f, _ in scored)
    ties = tuple(e for f, e in scored if f == best)
    winner = ties[0]
    if prefer is not None and winner.regions:
        if obj is None:
            raise ConfigError("a preferred theta needs the objective to re-evaluate utilities")
        winner = min(ties, key=lambda e: _distance_to_regions(e.regions, prefer))
        theta = _clamp_to_regions(winner.regions, prefer)
        winner = OptimalSetEntry(
            selection=winner.selection,
            theta=theta,
            utility=score_selection(winner.selection, obj, theta),
            regions=winner.regions,
            witnesses=winner.witnesses,
            approximate=winner.approximate,
        )
    return FairestResult(winner=winner, fairness=best, ties=ties)

