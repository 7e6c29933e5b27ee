"""Pareto fronts of subset-selection problems with linear sub-utilities.

Three fronts are computed from the per-sub-utility sums of every selection:

* ``pareto_front``: not dominated (weakly better everywhere, strictly somewhere);
* ``weak_pareto_front``: no alternative strictly better in every coordinate;
* ``convex_pareto_front``: optimal for some strictly positive weighting.

For two sub-utilities the convex front is exact (upper-right convex hull);
for more it is approximated by weight sampling and a warning is issued.
:func:`front_report` stacks them into the inclusion chain
``fairest <= theta-optimal <= CPF <= PF <= WPF <= S``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .discrete import all_selections, enumerate_optimal_set, fairest_optimal, sample_optimal_set
from .errors import ConfigError, ParameterError
from .model import FairnessSpec, ObjectiveSpec, Population, Selection, ThetaDomain
from .numeric import compare

__all__ = [
    "UtilityPoint",
    "FrontReport",
    "ApproximationWarning",
    "utility_points",
    "pareto_front",
    "weak_pareto_front",
    "convex_pareto_front",
    "front_report",
    "CHAIN_LABELS",
]


class ApproximationWarning(UserWarning):
    """Result is a sampled subset of the exact answer."""


@dataclass(frozen=True)
class UtilityPoint:
    selection: Selection
    vector: tuple

    @property
    def key(self):
        return self.selection.key


def utility_points(pop: Population, obj: ObjectiveSpec, k: int) -> list[UtilityPoint]:
    """Image of every size-k selection under the objective's sub-utilities."""
    return [UtilityPoint(s, s.utility_vector(obj)) for s in all_selections(pop, k)]


def _dim(points: Sequence[UtilityPoint]) -> int:
    dims = {len(p.vector) for p in points}
    if len(dims) > 1:
        raise ParameterError(f"inconsistent utility dimensions {sorted(dims)}")
    return dims.pop() if dims else 0


def _ordered(points):
    return sorted(points, key=lambda p: p.key)


def dominates(a: Sequence, b: Sequence) -> bool:
    """``a`` is at least as good as ``b`` everywhere and strictly better somewhere."""
    cmp = [compare(x, y) for x, y in zip(a, b)]
    return all(c >= 0 for c in cmp) and any(c > 0 for c in cmp)


def strictly_dominates(a: Sequence, b: Sequence) -> bool:
    return all(compare(x, y) > 0 for x, y in zip(a, b))


def pareto_front(points: Sequence[UtilityPoint]) -> list[UtilityPoint]:
    _dim(points)
    return _ordered(p for p in points if not any(dominates(q.vector, p.vector) for q in points))


def weak_pareto_front(points: Sequence[UtilityPoint]) -> list[UtilityPoint]:
    _dim(points)
    return _ordered(p for p in points if not any(strictly_dominates(q.vector, p.vector) for q in points))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _positive_weight_hull(vectors: list) -> list:
    """Distinct 2-d vectors maximizing ``w1*x + w2*y`` for some ``w1, w2 > 0``.

    The upper hull is built with a monotone chain that keeps collinear points
    (they tie on an edge and are therefore optimal for that edge's normal),
    then cut to the strictly decreasing stretch between the rightmost point
    (highest among those) and the topmost point (rightmost among those).
    """
    pts = sorted(set(vectors))
    if len(pts) == 1:
        return pts
    hull = []
    for p in pts:
        while len(hull) >= 2 and compare(_cross(hull[-2], hull[-1], p), 0) > 0:
            hull.pop()
        hull.append(p)
    top_y = max(p[1] for p in pts)
    top = max((p for p in pts if compare(p[1], top_y) == 0), key=lambda p: p[0])
    right_x = max(p[0] for p in pts)
    right = max((p for p in pts if compare(p[0], right_x) == 0), key=lambda p: p[1])
    start = hull.index(top)
    stop = hull.index(right)
    return hull[start : stop + 1]


def convex_pareto_front(
    points: Sequence[UtilityPoint], samples: int = 2000, seed: int = 0
) -> list[UtilityPoint]:
    """Selections optimal for some strictly positive weighting of the sub-utilities.

    Exact for two sub-utilities. With three or more, ``samples`` random
    interior weights are tried and an :class:`ApproximationWarning` is
    issued: the result then never contains a non-member but may miss some.
    """
    m = _dim(points)
    if not points:
        return []
    if m == 1:
        best = max(p.vector[0] for p in points)
        return _ordered(p for p in points if compare(p.vector[0], best) == 0)
    if m == 2:
        keep = set(_positive_weight_hull([p.vector for p in points]))
        return _ordered(p for p in points if p.vector in keep)
    warnings.warn(
        f"convex Pareto front for m = {m} sub-utilities is sampled and may be incomplete",
        ApproximationWarning,
        stacklevel=2,
    )
    rng = np.random.default_rng(seed)
    found = set()
    for w in rng.dirichlet(np.ones(m), size=samples):
        w = [Fraction(float(x)) for x in w]
        values = [sum(wi * vi for wi, vi in zip(w, p.vector)) for p in points]
        best = max(values)
        found.update(p.key for p, v in zip(points, values) if compare(v, best) == 0)
    return _ordered(p for p in points if p.key in found)


CHAIN_LABELS = (
    ("fairest", "optimal fair solution"),
    ("theta_optimal", "theta-optimal solution set"),
    ("convex_pareto", "convex Pareto front"),
    ("pareto", "Pareto front"),
    ("weak_pareto", "weak Pareto front"),
    ("solution_space", "solution space"),
)


@dataclass(frozen=True)
class FrontReport:
    """The nested selection sets, each as a tuple of selections in id order.

    ``inclusions[i]`` says whether set ``i`` is contained in set ``i + 1``
    and ``strict[i]`` whether that containment is proper.
    """

    fairest: tuple
    theta_optimal: tuple
    convex_pareto: tuple
    pareto: tuple
    weak_pareto: tuple
    solution_space: tuple
    inclusions: tuple
    strict: tuple
    approximate: bool = False

    def sets(self) -> list[tuple[str, tuple]]:
        return [(name, getattr(self, name)) for name, _ in CHAIN_LABELS]

    def residuals(self) -> list[tuple[str, tuple]]:
        """What each level adds to the one before it."""
        out = []
        prev = set()
        for name, sels in self.sets():
            keys = {s.key for s in sels}
            out.append((name, tuple(s for s in sels if s.key not in prev)))
            prev = keys
        return out


def front_report(
    pop: Population,
    obj: ObjectiveSpec,
    domain: ThetaDomain,
    k: int,
    fs: FairnessSpec,
    samples: int = 2000,
    seed: int = 0,
) -> FrontReport:
    """Assemble and check the chain of fronts for a linear-mixture objective."""
    if domain.dimension == 1:
        if obj.kind != "mixture":
            raise ConfigError("a one-dimensional domain needs the scalar mixture objective")
        if domain.lo <= 0 or domain.hi >= 1:
            warnings.warn(
                "theta domain touches 0 or 1: the theta-optimal set may leave the convex Pareto front",
                UserWarning,
                stacklevel=2,
            )
        entries = enumerate_optimal_set(pop, obj, domain, k)
        approximate = False
    else:
        entries = sample_optimal_set(pop, obj, domain, k, samples=samples, seed=seed)
        approximate = True
    fair = fairest_optimal(entries, fs)
    points = utility_points(pop, obj, k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApproximationWarning)
        cpf = convex_pareto_front(points, samples=samples, seed=seed)
    approximate = approximate or len(obj.attributes) > 2
    chain = [
        tuple(sorted((e.selection for e in fair.ties), key=lambda s: s.key)),
        tuple(sorted((e.selection for e in entries), key=lambda s: s.key)),
        tuple(p.selection for p in cpf),
        tuple(p.selection for p in pareto_front(points)),
        tuple(p.selection for p in weak_pareto_front(points)),
        tuple(p.selection for p in points),
    ]
    keys = [{s.key for s in level} for level in chain]
    inclusions = tuple(a <= b for a, b in zip(keys, keys[1:]))
    strict = tuple(a < b for a, b in zip(keys, keys[1:]))
    return FrontReport(*chain, inclusions=inclusions, strict=strict, approximate=approximate)
