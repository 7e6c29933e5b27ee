"""Run configuration: one YAML file plus command-line overrides.

Example::

    data: students.csv
    k: 2
    divisors: {IQ: 10}
    objective: {kind: mixture, attributes: [IQ, grade]}
    theta: {lo: 1/3, hi: 2/3}
    fairness: {labels: [m, f], quota_label: f, quota: 0.3}
    reference_theta: 1/2

Decimal literals in the file are read exactly (``0.35`` is 7/20).
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional

import yaml

from .continuous import PROBLEMS, AscentConfig
from .errors import ConfigError, NoRegretError
from .io import load_interval_records, load_population
from .model import FairnessSpec, ObjectiveSpec, Population, ThetaDomain
from .numeric import as_number

__all__ = ["RunConfig", "load_config", "config_number"]


def config_number(value):
    """Exact number from a config value; floats are read by their decimal text."""
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return as_number(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad number {value!r}: {exc}") from None


def _numbers(values):
    return [config_number(v) for v in values]


@dataclass
class RunConfig:
    data: Optional[str] = None
    k: Optional[int] = None
    divisors: dict = field(default_factory=dict)
    objective: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    fairness: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)
    reference_theta: Any = None
    prefer_theta: Any = None
    sweep: dict = field(default_factory=dict)
    samples: int = 1000
    seed: int = 0
    eps: Any = 1e-5
    ascent: dict = field(default_factory=dict)
    base_dir: str = "."

    KEYS = (
        "data", "k", "divisors", "objective", "theta", "fairness", "columns",
        "reference_theta", "prefer_theta", "sweep", "samples", "seed", "eps", "ascent",
    )

    @classmethod
    def from_mapping(cls, raw: Mapping, base_dir: str = ".") -> "RunConfig":
        if raw is None:
            raw = {}
        if not isinstance(raw, Mapping):
            raise ConfigError("the config file must hold a mapping at top level")
        unknown = set(raw) - set(cls.KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**copy.deepcopy(dict(raw)), base_dir=base_dir)

    def override(self, **flags) -> "RunConfig":
        """Apply command-line flags; ``None`` means not given."""
        new = copy.deepcopy(self)
        if flags.get("data") is not None:
            new.data = flags["data"]
            new.base_dir = "."
        if flags.get("k") is not None:
            new.k = flags["k"]
        if flags.get("seed") is not None:
            new.seed = flags["seed"]
        if flags.get("theta_lo") is not None:
            new.theta = {**{k: v for k, v in new.theta.items() if k in ("lo", "hi")}, "lo": flags["theta_lo"]}
        if flags.get("theta_hi") is not None:
            new.theta = {**{k: v for k, v in new.theta.items() if k in ("lo", "hi")}, "hi": flags["theta_hi"]}
        if flags.get("problem") is not None:
            new.ascent = {**new.ascent, "problem": flags["problem"]}
        return new

    def echo(self) -> dict:
        """Plain, deterministic view of the configuration for reports."""
        out = {}
        for key in self.KEYS:
            out[key] = _plain(getattr(self, key))
        return out

    # ---- resolution against data -------------------------------------------------

    def data_path(self) -> str:
        if not self.data:
            raise ConfigError("no data file given (config 'data' or --data)")
        path = str(self.data)
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def _load_kwargs(self) -> dict:
        cols = self.columns or {}
        extra = set(cols) - {"id", "name", "group", "attributes"}
        if extra:
            raise ConfigError(f"unknown column settings {sorted(extra)}")
        return dict(
            divisors={k: config_number(v) for k, v in (self.divisors or {}).items()},
            id_column=cols.get("id"),
            name_column=cols.get("name", "name"),
            group_column=cols.get("group"),
            attributes=cols.get("attributes"),
        )

    def population(self) -> Population:
        return load_population(self.data_path(), **self._load_kwargs())

    def interval_records(self):
        return load_interval_records(self.data_path(), **self._load_kwargs())

    def objective_for(self, schema) -> ObjectiveSpec:
        spec = self.objective or {}
        kind = spec.get("kind", "mixture")
        attrs = spec.get("attributes")
        if attrs is None:
            attrs = list(schema.names[:2]) if kind == "mixture" else list(schema.names)
        try:
            return ObjectiveSpec(schema, tuple(attrs), kind)
        except NoRegretError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad objective {spec!r}: {exc}") from None

    def domain(self) -> ThetaDomain:
        spec = self.theta or {}
        if "hull" in spec:
            return ThetaDomain.hull([_numbers(v) for v in spec["hull"]])
        if "box" in spec:
            return ThetaDomain.box(_numbers(spec["box"]["lo"]), _numbers(spec["box"]["hi"]))
        if "point" in spec:
            return ThetaDomain.point(config_number(spec["point"]))
        lo = config_number(spec.get("lo", 0))
        hi = config_number(spec.get("hi", 1))
        return ThetaDomain.interval(lo, hi)

    def fairness_spec(self, pop_groups) -> FairnessSpec:
        spec = self.fairness or {}
        labels = spec.get("labels")
        if labels is None:
            labels = list(pop_groups[:2])
        return FairnessSpec(
            labels=tuple(str(x) for x in labels),
            quota_label=spec.get("quota_label"),
            quota=config_number(spec.get("quota", 0)),
        )

    def k_value(self, n: int) -> int:
        if self.k is None:
            raise ConfigError("k is required (config 'k' or --k)")
        if isinstance(self.k, bool) or not isinstance(self.k, int):
            raise ConfigError(f"k must be an integer, got {self.k!r}")
        if not 1 <= self.k <= n:
            raise ConfigError(f"k must satisfy 1 <= k <= n = {n}, got {self.k}")
        return self.k

    def reference(self, domain: ThetaDomain):
        if self.reference_theta is not None:
            ref = self.reference_theta
            return _numbers(ref) if isinstance(ref, (list, tuple)) else config_number(ref)
        if domain.kind == "interval":
            return (domain.lo + domain.hi) / 2
        if domain.kind == "box":
            return [(a + b) / 2 for a, b in zip(domain.lo, domain.hi)]
        verts = domain.vertices
        return [sum(v[j] for v in verts) / len(verts) for j in range(domain.dimension)]

    def sweep_thetas(self, domain: ThetaDomain) -> list:
        spec = self.sweep or {}
        if "thetas" in spec:
            return _numbers(spec["thetas"])
        if domain.kind != "interval":
            raise ConfigError("sweep over a multi-dimensional domain needs explicit 'sweep.thetas'")
        steps = int(spec.get("steps", 10))
        if steps < 1:
            raise ConfigError("sweep.steps must be >= 1")
        lo, hi = domain.lo, domain.hi
        return [lo + (hi - lo) * Fraction(i, steps) for i in range(steps + 1)]

    def ascent_setup(self):
        spec = dict(self.ascent or {})
        name = spec.pop("problem", "quadratic-toy")
        if name not in PROBLEMS:
            raise ConfigError(f"unknown problem {name!r}; registered: {sorted(PROBLEMS)}")
        s0 = spec.pop("s0", None)
        theta0 = spec.pop("theta0", None)
        try:
            cfg = AscentConfig(**{k: (float(v) if k in ("alpha", "beta", "tol") else v) for k, v in spec.items()})
        except TypeError as exc:
            raise ConfigError(f"bad ascent settings: {exc}") from None
        problem = PROBLEMS[name]()
        if s0 is None:
            s0 = [0.0] * problem.dim_s
        if theta0 is None:
            theta0 = [0.5] * problem.dim_theta
        return name, problem, cfg, [float(x) for x in _listify(s0)], [float(x) for x in _listify(theta0)]


def _listify(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path!r}: {exc}") from None
    return RunConfig.from_mapping(raw, base_dir=os.path.dirname(os.path.abspath(path)))
