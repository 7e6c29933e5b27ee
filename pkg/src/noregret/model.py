"""Domain types and pure evaluation of utilities and fairness scores.

Items carry raw attribute values; the per-attribute rescaling divisors
(for example IQ/10) belong to the :class:`Schema`, so trying a different
scaling is a matter of building a new schema rather than a new objective.

All values are immutable. Exact rationals flow through unchanged, floats
switch comparisons to a relative tolerance (see :mod:`noregret.numeric`).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigError, ParameterError, SchemaError
from .numeric import Number, as_number, close

__all__ = [
    "ItemRecord",
    "Schema",
    "Population",
    "ThetaDomain",
    "ObjectiveSpec",
    "Selection",
    "FairnessSpec",
    "score_item",
    "score_selection",
    "fairness_score",
    "is_fair",
]


@dataclass(frozen=True)
class ItemRecord:
    """One selectable unit, e.g. a student applying for admission."""

    id: str
    attributes: tuple[tuple[str, Number], ...]
    group: str
    name: Optional[str] = None

    def __post_init__(self):
        attrs = self.attributes
        if isinstance(attrs, Mapping):
            attrs = attrs.items()
        attrs = tuple((str(k), as_number(v)) for k, v in attrs)
        names = [k for k, _ in attrs]
        if len(set(names)) != len(names):
            raise SchemaError(f"item {self.id!r}: duplicate attribute names {names}")
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "group", str(self.group))

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.attributes)

    def value(self, attribute: str) -> Number:
        for k, v in self.attributes:
            if k == attribute:
                return v
        raise SchemaError(f"item {self.id!r} has no attribute {attribute!r}")

    @property
    def label(self) -> str:
        return self.name if self.name is not None else self.id


@dataclass(frozen=True)
class Schema:
    """Attribute names in order plus a strictly positive divisor per attribute."""

    names: tuple[str, ...]
    divisors: tuple[Number, ...] = ()

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names {names}")
        divisors = self.divisors
        if isinstance(divisors, Mapping):
            unknown = set(divisors) - set(names)
            if unknown:
                raise SchemaError(f"divisors given for unknown attributes {sorted(unknown)}")
            divisors = tuple(divisors.get(n, 1) for n in names)
        elif not divisors:
            divisors = (1,) * len(names)
        divisors = tuple(as_number(d) for d in divisors)
        if len(divisors) != len(names):
            raise SchemaError("one divisor per attribute is required")
        if any(d <= 0 for d in divisors):
            raise SchemaError(f"divisors must be strictly positive, got {divisors}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "divisors", divisors)

    def index(self, attribute: str) -> int:
        try:
            return self.names.index(attribute)
        except ValueError:
            raise SchemaError(f"unknown attribute {attribute!r}; schema has {list(self.names)}") from None

    def divisor(self, attribute: str) -> Number:
        return self.divisors[self.index(attribute)]

    def rescaled(self, item: ItemRecord, attribute: str) -> Number:
        return item.value(attribute) / self.divisor(attribute)

    def with_divisors(self, divisors: Mapping[str, object]) -> "Schema":
        merged = dict(zip(self.names, self.divisors))
        merged.update(divisors)
        return Schema(self.names, merged)


@dataclass(frozen=True)
class Population:
    """Ordered, nonempty pool of items sharing one attribute schema."""

    items: tuple[ItemRecord, ...]
    schema: Schema = None

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise SchemaError("a population needs at least one item")
        names = items[0].attribute_names
        schema = self.schema if self.schema is not None else Schema(names)
        if isinstance(schema, Mapping):
            schema = Schema(names, schema)
        seen = set()
        for item in items:
            if item.id in seen:
                raise SchemaError(f"duplicate id {item.id!r}")
            seen.add(item.id)
            if item.attribute_names != schema.names:
                raise SchemaError(
                    f"item {item.id!r} attributes {item.attribute_names} do not match schema {schema.names}"
                )
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "_by_id", {item.id: i for i, item in enumerate(items)})

    @classmethod
    def from_records(
        cls,
        rows: Iterable[Mapping[str, object]],
        *,
        attributes: Sequence[str],
        group: str,
        id: str = "ID",
        name: Optional[str] = "name",
        divisors: Optional[Mapping[str, object]] = None,
    ) -> "Population":
        items = [
            ItemRecord(
                id=row[id],
                attributes=tuple((a, row[a]) for a in attributes),
                group=row[group],
                name=row.get(name) if name else None,
            )
            for row in rows
        ]
        return cls(tuple(items), Schema(tuple(attributes), divisors or {}))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.items)

    @property
    def groups(self) -> tuple[str, ...]:
        """Distinct group labels in order of first appearance."""
        return tuple(dict.fromkeys(item.group for item in self.items))

    def get(self, item_id: str) -> ItemRecord:
        try:
            return self.items[self._by_id[str(item_id)]]
        except KeyError:
            raise SchemaError(f"unknown id {item_id!r}") from None

    def position(self, item_id: str) -> int:
        self.get(item_id)
        return self._by_id[str(item_id)]

    def lookup(self, label: str) -> ItemRecord:
        """Find an item by id or, failing that, by display name."""
        if str(label) in self._by_id:
            return self.get(label)
        for item in self.items:
            if item.name == label:
                return item
        raise SchemaError(f"no item with id or name {label!r}")

    def with_divisors(self, divisors: Mapping[str, object]) -> "Population":
        return Population(self.items, self.schema.with_divisors(divisors))

    def select(self, ids: Iterable[str]) -> "Selection":
        return Selection.of(self, ids)


def _scalar_theta(theta) -> Number:
    if isinstance(theta, (tuple, list)):
        if len(theta) != 1:
            raise ParameterError(f"expected a scalar parameter, got dimension {len(theta)}")
        theta = theta[0]
    try:
        return as_number(theta)
    except (TypeError, ValueError) as exc:
        raise ParameterError(str(exc)) from None


def _vector_theta(theta, m: int) -> tuple[Number, ...]:
    if not isinstance(theta, (tuple, list)) and not hasattr(theta, "__len__"):
        theta = (theta,)
    theta = tuple(theta)
    if len(theta) != m:
        raise ParameterError(f"expected parameter dimension {m}, got {len(theta)}")
    try:
        return tuple(as_number(t) for t in theta)
    except (TypeError, ValueError) as exc:
        raise ParameterError(str(exc)) from None


@dataclass(frozen=True)
class ThetaDomain:
    """Admissible parameter set.

    ``m == 1``: a closed interval inside [0, 1]. ``m > 1``: either an
    axis-aligned box or the convex hull of expert weight vectors, with
    strictly positive bounds or vertices.
    """

    dimension: int
    lo: object = None
    hi: object = None
    vertices: tuple = ()

    @classmethod
    def interval(cls, lo, hi) -> "ThetaDomain":
        lo, hi = _scalar_theta(lo), _scalar_theta(hi)
        if not 0 <= lo <= hi <= 1:
            raise ParameterError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
        return cls(1, lo, hi)

    @classmethod
    def point(cls, theta) -> "ThetaDomain":
        return cls.interval(theta, theta)

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "ThetaDomain":
        lo = _vector_theta(lo, len(lo))
        hi = _vector_theta(hi, len(lo))
        if len(lo) < 2:
            raise ParameterError("use ThetaDomain.interval for one-dimensional domains")
        if any(a <= 0 or a > b for a, b in zip(lo, hi)):
            raise ParameterError(f"box bounds must satisfy 0 < lo <= hi, got {lo}, {hi}")
        return cls(len(lo), lo, hi)

    @classmethod
    def hull(cls, points: Sequence[Sequence]) -> "ThetaDomain":
        if not points:
            raise ParameterError("a hull needs at least one vertex")
        m = len(points[0])
        if m < 2:
            raise ParameterError("use ThetaDomain.interval for one-dimensional domains")
        verts = tuple(_vector_theta(p, m) for p in points)
        if any(c <= 0 for v in verts for c in v):
            raise ParameterError("hull vertices must be strictly positive componentwise")
        return cls(m, vertices=verts)

    @property
    def kind(self) -> str:
        if self.dimension == 1:
            return "interval"
        return "hull" if self.vertices else "box"

    @property
    def is_point(self) -> bool:
        if self.kind == "interval":
            return close(self.lo, self.hi)
        if self.kind == "box":
            return all(close(a, b) for a, b in zip(self.lo, self.hi))
        return all(v == self.vertices[0] for v in self.vertices)

    def contains(self, theta) -> bool:
        if self.kind == "interval":
            t = _scalar_theta(theta)
            return (self.lo <= t or close(self.lo, t)) and (t <= self.hi or close(t, self.hi))
        t = _vector_theta(theta, self.dimension)
        if self.kind == "box":
            return all((a <= x or close(a, x)) and (x <= b or close(x, b)) for a, x, b in zip(self.lo, t, self.hi))
        # hull membership by LP feasibility
        import numpy as np
        from scipy.optimize import linprog

        V = np.array(self.vertices, dtype=float).T
        n = V.shape[1]
        A_eq = np.vstack([V, np.ones((1, n))])
        b_eq = np.append(np.array(t, dtype=float), 1.0)
        res = linprog(np.zeros(n), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
        return res.status == 0


@dataclass(frozen=True)
class ObjectiveSpec:
    """Parametrized utility family over a schema.

    ``kind == "mixture"``: ``U(item) = t*a1/d1 + (1-t)*a2/d2`` with scalar t.
    ``kind == "linear"``: ``U(item) = sum_j t_j * a_j/d_j`` with t of length m.
    """

    schema: Schema
    attributes: tuple[str, ...]
    kind: str = "mixture"

    def __post_init__(self):
        if isinstance(self.schema, Population):
            object.__setattr__(self, "schema", self.schema.schema)
        attrs = tuple(self.attributes)
        for a in attrs:
            self.schema.index(a)
        if self.kind == "mixture":
            if len(attrs) != 2:
                raise ConfigError("a mixture objective needs exactly two attributes")
        elif self.kind == "linear":
            if not attrs:
                raise ConfigError("a linear objective needs at least one attribute")
        else:
            raise ConfigError(f"unknown objective kind {self.kind!r}")
        object.__setattr__(self, "attributes", attrs)

    @classmethod
    def mixture(cls, schema, first: str, second: str) -> "ObjectiveSpec":
        return cls(schema, (first, second), "mixture")

    @classmethod
    def linear(cls, schema, *attributes: str) -> "ObjectiveSpec":
        return cls(schema, tuple(attributes), "linear")

    @property
    def m(self) -> int:
        """Dimension of the parameter point."""
        return 1 if self.kind == "mixture" else len(self.attributes)

    def check_theta(self, theta):
        if self.kind == "mixture":
            return _scalar_theta(theta)
        return _vector_theta(theta, self.m)

    def weights(self, theta) -> tuple[Number, ...]:
        """Weights applied to the sub-utilities at ``theta``."""
        theta = self.check_theta(theta)
        if self.kind == "mixture":
            return (theta, 1 - theta)
        return theta

    def sub_utilities(self, item: ItemRecord) -> tuple[Number, ...]:
        return tuple(self.schema.rescaled(item, a) for a in self.attributes)

    def line(self, item: ItemRecord) -> tuple[Number, Number]:
        """(slope, intercept) of the item's score as a function of scalar theta."""
        if self.kind != "mixture":
            raise ParameterError("score lines are defined for the scalar mixture only")
        u1, u2 = self.sub_utilities(item)
        return u1 - u2, u2


def score_item(item: ItemRecord, obj: ObjectiveSpec, theta) -> Number:
    """Theta-weighted rescaled score of one item."""
    weights = obj.weights(theta)
    return sum((w * u for w, u in zip(weights, obj.sub_utilities(item))), Fraction(0))


@dataclass(frozen=True)
class Selection:
    """A set of item ids drawn from one population.

    Equality and hashing use the id set only; the cached rescaled attribute
    sums and group counts ride along for cheap scoring.
    """

    ids: frozenset
    sums: tuple = field(default=(), compare=False)
    group_counts: tuple = field(default=(), compare=False)
    population: Optional[Population] = field(default=None, compare=False, repr=False)

    @classmethod
    def of(cls, population: Population, ids: Iterable[str]) -> "Selection":
        ids = [str(i) for i in ids]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"repeated ids in selection {ids}")
        items = [population.get(i) for i in ids]
        schema = population.schema
        sums = tuple(
            sum((schema.rescaled(it, a) for it in items), Fraction(0)) for a in schema.names
        )
        counts = Counter(it.group for it in items)
        return cls(frozenset(ids), sums, tuple(sorted(counts.items())), population)

    @property
    def k(self) -> int:
        return len(self.ids)

    @property
    def key(self) -> tuple[str, ...]:
        """Deterministic sort key: the sorted id tuple."""
        return tuple(sorted(self.ids))

    @property
    def items(self) -> tuple[ItemRecord, ...]:
        pop = self.population
        return tuple(sorted((pop.get(i) for i in self.ids), key=lambda it: pop.position(it.id)))

    @property
    def labels(self) -> tuple[str, ...]:
        """Display names (falling back to ids) in population order."""
        return tuple(it.label for it in self.items)

    def count(self, group: str) -> int:
        return dict(self.group_counts).get(group, 0)

    def utility_vector(self, obj: ObjectiveSpec) -> tuple[Number, ...]:
        """Per-sub-utility sums, read from the cache."""
        return tuple(self.sums[obj.schema.index(a)] for a in obj.attributes)

    def __str__(self):
        return "{" + ", ".join(self.labels) + "}"


def score_selection(sel: Selection, obj: ObjectiveSpec, theta) -> Number:
    """Sum of :func:`score_item` over the members of ``sel``."""
    pop = sel.population
    if pop is None:
        raise SchemaError("selection is not bound to a population")
    return sum((score_item(pop.get(i), obj, theta) for i in sel.key), Fraction(0))


@dataclass(frozen=True)
class FairnessSpec:
    """Soft mismatch score and/or hard minimum-share quota.

    ``labels``: groups whose counts are balanced by the soft score,
    ``F = -(max count - min count)``; for two labels this is
    ``-|#g1 - #g2|``. Larger is fairer and 0 is perfect balance.

    ``quota_label``/``quota``: the selection is fair iff the share of
    ``quota_label`` members is at least ``quota``.
    """

    labels: tuple[str, ...] = ()
    quota_label: Optional[str] = None
    quota: Number = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        q = as_number(self.quota)
        if not 0 <= q <= 1:
            raise ConfigError(f"quota must lie in [0, 1], got {q}")
        object.__setattr__(self, "quota", q)

    @classmethod
    def mismatch(cls, first: str, second: str, *more: str) -> "FairnessSpec":
        return cls(labels=(first, second) + more)

    @classmethod
    def min_share(cls, label: str, quota) -> "FairnessSpec":
        return cls(quota_label=label, quota=quota)

    def validate(self, population: Population) -> None:
        present = set(population.groups)
        wanted = set(self.labels)
        if self.quota_label is not None:
            wanted.add(self.quota_label)
        missing = sorted(wanted - present)
        if missing:
            raise SchemaError(f"fairness labels {missing} do not occur in the population")


def _check_labels(sel: Selection, fs: FairnessSpec) -> None:
    if sel.population is not None:
        fs.validate(sel.population)


def fairness_score(sel: Selection, fs: FairnessSpec) -> int:
    """Group-count mismatch score, larger is fairer (0 at perfect balance)."""
    if len(fs.labels) < 2:
        raise ConfigError("the mismatch score needs at least two group labels")
    _check_labels(sel, fs)
    counts = [sel.count(g) for g in fs.labels]
    return -(max(counts) - min(counts))


def is_fair(sel: Selection, fs: FairnessSpec) -> bool:
    """True iff the share of ``fs.quota_label`` in ``sel`` reaches ``fs.quota``."""
    if fs.quota == 0:
        return True
    if fs.quota_label is None:
        raise ConfigError("no hard quota configured")
    _check_labels(sel, fs)
    if sel.k == 0:
        return False
    share = Fraction(sel.count(fs.quota_label), sel.k)
    return share >= fs.quota or close(share, fs.quota)
