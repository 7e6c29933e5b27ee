"""Fairest completion of interval-valued data, and why not to use it.

DIAGNOSTIC ONLY. Choosing the completion of uncertain attributes that makes
the resulting optimal selection fairest looks similar to choosing the
fairest objective from a family, but it is not a fair procedure: it gets
there by imputing favourable values for one group and unfavourable values
for another. :func:`fairest_completion` runs the procedure so that its
:class:`ImputationAudit` can expose exactly that asymmetry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .discrete import top_k
from .errors import ComplexityError, ConfigError, ConsistencyError, SchemaError
from .model import FairnessSpec, ItemRecord, ObjectiveSpec, Population, Schema, Selection, fairness_score
from .numeric import as_number

__all__ = [
    "DIAGNOSTIC_WARNING",
    "IntervalRecord",
    "IntervalPopulation",
    "Completion",
    "ImputationAudit",
    "CompletionResult",
    "fairest_completion",
    "audit_only",
    "MAX_FREE_INTERVALS",
]

DIAGNOSTIC_WARNING = (
    "DIAGNOSTIC: optimizing fairness over imputations of uncertain data is not a fair "
    "procedure; inspect the imputation audit for group-asymmetric choices."
)

MAX_FREE_INTERVALS = 20


@dataclass(frozen=True)
class IntervalRecord:
    """An item whose attributes are closed intervals ``(lo, hi)``."""

    id: str
    intervals: tuple
    group: str
    name: Optional[str] = None

    def __post_init__(self):
        cells = []
        for attr, cell in self.intervals:
            if isinstance(cell, (tuple, list)):
                lo, hi = (as_number(x) for x in cell)
            else:
                lo = hi = as_number(cell)
            if lo > hi:
                raise SchemaError(f"item {self.id!r}, {attr}: interval lo {lo} > hi {hi}")
            cells.append((str(attr), (lo, hi)))
        object.__setattr__(self, "intervals", tuple(cells))
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "group", str(self.group))

    @property
    def attribute_names(self):
        return tuple(a for a, _ in self.intervals)

    def interval(self, attribute: str):
        for a, cell in self.intervals:
            if a == attribute:
                return cell
        raise SchemaError(f"item {self.id!r} has no attribute {attribute!r}")


@dataclass(frozen=True)
class IntervalPopulation:
    records: tuple
    schema: Schema

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise SchemaError("an interval population needs at least one record")
        ids = [r.id for r in records]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate ids among interval records")
        for r in records:
            if r.attribute_names != self.schema.names:
                raise SchemaError(f"record {r.id!r} does not match schema {self.schema.names}")
        object.__setattr__(self, "records", records)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def get(self, item_id):
        for r in self.records:
            if r.id == str(item_id):
                return r
        raise SchemaError(f"unknown id {item_id!r}")

    def free_cells(self, attributes=None) -> list[tuple[str, str]]:
        """(id, attribute) pairs with a non-degenerate interval."""
        attrs = self.schema.names if attributes is None else attributes
        return [(r.id, a) for r in self.records for a in attrs if r.interval(a)[0] != r.interval(a)[1]]


@dataclass(frozen=True)
class Completion:
    """One concrete value per (item, attribute), as an ordinary population."""

    values: tuple  # ((id, ((attr, value), ...)), ...)
    population: Population

    @classmethod
    def build(cls, records: IntervalPopulation, choose) -> "Completion":
        """``choose(record, attribute, (lo, hi))`` returns the imputed value."""
        rows = []
        items = []
        for r in records:
            vals = tuple((a, choose(r, a, r.interval(a))) for a in records.schema.names)
            rows.append((r.id, vals))
            items.append(ItemRecord(r.id, vals, r.group, r.name))
        return cls(tuple(rows), Population(tuple(items), records.schema))

    def value(self, item_id: str, attribute: str):
        return self.population.get(item_id).value(attribute)


@dataclass(frozen=True)
class ImputationAudit:
    """Where in its interval each imputed value sits.

    Positions are fractions in [0, 1] (0 = low end); degenerate intervals
    count as 0.5. An item's position is the mean over its cells, a group's
    the mean over its items. ``asymmetry`` is the gap between the two
    audited groups' means: 0 is even-handed, 1 is the maximal red flag.
    """

    cell_positions: tuple  # ((id, attr, position), ...)
    item_positions: tuple  # ((id, position), ...)
    group_means: tuple  # ((group, mean), ...)
    groups: tuple
    asymmetry: Fraction


@dataclass(frozen=True)
class CompletionResult:
    completion: Completion
    selection: Selection
    fairness: int
    audit: ImputationAudit
    completions_searched: int
    warning: str = DIAGNOSTIC_WARNING


def _position(lo, hi, value):
    if lo == hi:
        return Fraction(1, 2)
    return (value - lo) / (hi - lo)


def audit_only(completion: Completion, records: IntervalPopulation, groups=None) -> ImputationAudit:
    """Audit the positions of imputed values within their intervals.

    ``groups`` names the two groups compared by the asymmetry score; by
    default the first two group labels in record order.
    """
    if groups is None:
        groups = tuple(dict.fromkeys(r.group for r in records))[:2]
    groups = tuple(groups)
    if len(groups) != 2:
        raise ConfigError("the audit compares exactly two groups")
    cells = []
    items = []
    per_group: dict = {g: [] for g in groups}
    for r in records:
        pos = []
        for a in records.schema.names:
            lo, hi = r.interval(a)
            v = completion.value(r.id, a)
            if not lo <= v <= hi:
                raise ConsistencyError(f"item {r.id!r}, {a}: value {v} outside [{lo}, {hi}]")
            p = _position(lo, hi, v)
            cells.append((r.id, a, p))
            pos.append(p)
        item_pos = sum(pos, Fraction(0)) / len(pos) if pos else Fraction(1, 2)
        items.append((r.id, item_pos))
        if r.group in per_group:
            per_group[r.group].append(item_pos)
    means = tuple((g, sum(v, Fraction(0)) / len(v) if v else Fraction(1, 2)) for g, v in per_group.items())
    asym = abs(means[0][1] - means[1][1])
    return ImputationAudit(tuple(cells), tuple(items), means, groups, asym)


def fairest_completion(
    records: IntervalPopulation,
    obj: ObjectiveSpec,
    theta,
    k: int,
    fs: FairnessSpec,
    max_free: int = MAX_FREE_INTERVALS,
) -> CompletionResult:
    """Search endpoint completions for the one whose optimal selection is fairest.

    The objective is linear in every attribute, so any selection optimal for
    some completion stays optimal when its members' uncertain values move to
    their favourable ends and everyone else's to the unfavourable ends;
    searching interval endpoints is therefore exhaustive. When the optimum of
    a completion is tied, its fairest optimal selection counts. Ties between
    completions go to the first in enumeration order (items in order, then
    attributes, low end before high end).

    Attributes the objective does not use are imputed at their midpoints.
    """
    if obj.kind not in ("mixture", "linear"):
        raise ConfigError("endpoint search needs an objective linear in each attribute")
    if obj.schema.names != records.schema.names:
        raise SchemaError("objective and records use different schemas")
    used = set(obj.attributes)
    free = records.free_cells([a for a in records.schema.names if a in used])
    if len(free) > max_free:
        raise ComplexityError(
            f"{len(free)} non-degenerate intervals exceed the endpoint-search cap of {max_free}",
            count=len(free),
        )
    theta = obj.check_theta(theta)
    groups = fs.labels[:2] if len(fs.labels) >= 2 else None
    index = {cell: i for i, cell in enumerate(free)}
    best = None
    searched = 0
    for ends in itertools.product((0, 1), repeat=len(free)):

        def choose(r, a, cell, ends=ends):
            lo, hi = cell
            if lo == hi:
                return lo
            if a not in used:
                return (lo + hi) / 2
            return hi if ends[index[(r.id, a)]] else lo

        completion = Completion.build(records, choose)
        searched += 1
        options = top_k(completion.population, obj, theta, k)
        scored = [(fairness_score(s, fs), s) for s in options]
        f = max(v for v, _ in scored)
        sel = next(s for v, s in scored if v == f)
        if best is None or f > best[0]:
            best = (f, completion, sel)
    f, completion, sel = best
    audit = audit_only(completion, records, groups)
    return CompletionResult(completion, sel, f, audit, searched)
