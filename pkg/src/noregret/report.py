"""Command dispatch and machine-readable run reports.

A :class:`RunReport` is a set of named tables (columns plus rows of plain
values). Rationals are rendered ``p/q`` and floats by ``repr`` so nothing is
lost; the structured (JSON) form parses back into an equal report. Timing is
kept on the object but left out of structured output unless asked for, which
keeps reports byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from .config import RunConfig, config_number
from .continuous import alternating_ascent, finite_difference_audit
from .discrete import (
    enumerate_optimal_set,
    fairest_optimal,
    regret,
    sample_optimal_set,
    top_k,
    utility_gap,
)
from .errors import ConfigError, SingularHessian
from .model import fairness_score, score_item, score_selection
from .numeric import decimal_text, fmt
from .pareto import CHAIN_LABELS, front_report
from .uncertain import DIAGNOSTIC_WARNING, fairest_completion

__all__ = ["COMMANDS", "FORMATS", "SCHEMA_VERSION", "Table", "RunReport", "run", "emit_report", "write_atomic"]

COMMANDS = ("solve", "sweep", "pareto", "compare", "ascent", "audit")
FORMATS = ("json", "csv", "summary")
SCHEMA_VERSION = 1


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append([_cell(v) for v in values])

    def to_dict(self):
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def _cell(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (Fraction, float)):
        return fmt(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) if not isinstance(v, str) else v for v in value)
    if hasattr(value, "tolist"):
        return _cell(value.tolist())
    return str(value)


@dataclass
class RunReport:
    command: str
    config: dict
    sections: dict
    version: str = __version__
    schema_version: int = SCHEMA_VERSION
    timing: Optional[float] = field(default=None, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "schema_version": self.schema_version,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "sections": {name: t.to_dict() for name, t in self.sections.items()},
        }
        if include_timing:
            out["timing_seconds"] = self.timing
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        sections = {
            name: Table(list(t["columns"]), [list(r) for r in t["rows"]])
            for name, t in data["sections"].items()
        }
        return cls(
            command=data["command"],
            config=data["config"],
            sections=sections,
            version=data["version"],
            schema_version=data["schema_version"],
            timing=data.get("timing_seconds"),
        )

    @classmethod
    def from_json(cls, blob) -> "RunReport":
        if isinstance(blob, bytes):
            blob = blob.decode("utf-8")
        return cls.from_dict(json.loads(blob))


def _ids(sel):
    return list(sel.key)


def _names(sel):
    return list(sel.labels)


def _solve(cfg: RunConfig) -> dict:
    pop = cfg.population()
    obj = cfg.objective_for(pop.schema)
    domain = cfg.domain()
    k = cfg.k_value(pop.n)
    fs = cfg.fairness_spec(pop.groups)
    fs.validate(pop)
    if domain.dimension == 1:
        entries = enumerate_optimal_set(pop, obj, domain, k)
    else:
        entries = sample_optimal_set(pop, obj, domain, k, samples=cfg.samples, seed=cfg.seed)
    prefer = None if cfg.prefer_theta is None else config_number(cfg.prefer_theta)
    fair = fairest_optimal(entries, fs, prefer=prefer, obj=obj)
    opt = Table(["ids", "names", "region_lo", "region_hi", "theta", "utility", "fairness", "approximate"])
    for e in entries:
        lo, hi = e.region if e.region else (None, None)
        opt.add(_ids(e.selection), _names(e.selection), lo, hi, e.theta, e.utility,
                fairness_score(e.selection, fs), e.approximate)
    best = Table(["ids", "names", "fairness", "theta", "region_lo", "region_hi", "utility", "tied_ids"])
    lo, hi = fair.region if fair.region else (None, None)
    best.add(_ids(fair.selection), _names(fair.selection), fair.fairness, fair.theta, lo, hi,
             fair.utility, [" ".join(t.selection.key) for t in fair.ties])
    return {"optimal_set": opt, "fairest": best}


def _sweep(cfg: RunConfig) -> dict:
    pop = cfg.population()
    obj = cfg.objective_for(pop.schema)
    domain = cfg.domain()
    k = cfg.k_value(pop.n)
    fs = cfg.fairness_spec(pop.groups)
    scores = Table(["theta", "id", "name", "group", "score"])
    optima = Table(["theta", "ids", "names", "utility", "fairness"])
    for theta in cfg.sweep_thetas(domain):
        for item in pop:
            scores.add(theta, item.id, item.label, item.group, score_item(item, obj, theta))
        for sel in top_k(pop, obj, theta, k):
            optima.add(theta, _ids(sel), _names(sel), score_selection(sel, obj, theta), fairness_score(sel, fs))
    return {"scores": scores, "optima": optima}


def _pareto(cfg: RunConfig) -> dict:
    pop = cfg.population()
    obj = cfg.objective_for(pop.schema)
    domain = cfg.domain()
    k = cfg.k_value(pop.n)
    fs = cfg.fairness_spec(pop.groups)
    rep = front_report(pop, obj, domain, k, fs, samples=cfg.samples, seed=cfg.seed)
    out = {}
    added = dict((name, {s.key for s in sels}) for name, sels in rep.residuals())
    cols = ["ids", "names"] + [f"sum_{a}" for a in obj.attributes] + ["new_at_this_level"]
    for name, sels in rep.sets():
        t = Table(list(cols))
        for s in sels:
            t.add(_ids(s), _names(s), *s.utility_vector(obj), s.key in added[name])
        out[name] = t
    chain = Table(["subset", "superset", "included", "strict"])
    labels = [name for name, _ in CHAIN_LABELS]
    for i, (inc, strict) in enumerate(zip(rep.inclusions, rep.strict)):
        chain.add(labels[i], labels[i + 1], inc, strict)
    out["chain"] = chain
    return out


def _compare(cfg: RunConfig) -> dict:
    pop = cfg.population()
    obj = cfg.objective_for(pop.schema)
    domain = cfg.domain()
    k = cfg.k_value(pop.n)
    fs = cfg.fairness_spec(pop.groups)
    ref = cfg.reference(domain)
    base = Table(["theta", "ids", "names", "utility", "optimum_ids", "optimum_utility", "regret", "fairness"])
    if fs.quota_label is not None:
        rep = regret(pop, obj, ref, k, fs)
        opt_ids = [" ".join(s.key) for s in rep.optimum]
        for sel in rep.fair_optimum:
            base.add(ref, _ids(sel), _names(sel), rep.fair_utility, opt_ids, rep.utility, rep.regret,
                     fairness_score(sel, fs))
    if domain.dimension == 1:
        entries = enumerate_optimal_set(pop, obj, domain, k)
    else:
        entries = sample_optimal_set(pop, obj, domain, k, samples=cfg.samples, seed=cfg.seed)
    fair = fairest_optimal(entries, fs)
    nr = Table(["theta", "ids", "names", "utility", "fairness", "regret"])
    nr.add(fair.theta, _ids(fair.selection), _names(fair.selection), fair.utility, fair.fairness,
           utility_gap(pop, obj, fair.theta, fair.selection))
    return {"quota_baseline": base, "fairest_optimal": nr}


def _ascent(cfg: RunConfig) -> dict:
    name, problem, acfg, s0, theta0 = cfg.ascent_setup()
    trace = alternating_ascent(problem, acfg, s0, theta0)
    if trace.reason == "singular-hessian":
        raise SingularHessian(
            f"problem {name!r}: the solution-space Hessian is singular after {len(trace) - 1} iterations"
        )
    steps = Table(["iteration", "s", "theta", "utility", "fairness", "step_s", "step_theta"])
    for i in range(len(trace)):
        steps.add(i, [float(x) for x in trace.s[i]], [float(x) for x in trace.theta[i]],
                  trace.utility[i], trace.fairness[i], trace.step_s[i], trace.step_theta[i])
    result = Table(["problem", "reason", "iterations", "final_theta", "final_s", "final_fairness"])
    result.add(name, trace.reason, len(trace) - 1, [float(x) for x in trace.final_theta],
               [float(x) for x in trace.final_s], trace.fairness[-1])
    out = {"result": result, "trace": steps}
    if problem.solve_inner is not None:
        eps = float(cfg.eps)
        audit = finite_difference_audit(problem, trace.final_theta, eps)
        t = Table(["theta", "eps", "implicit_gradient", "finite_difference", "max_deviation"])
        t.add([float(x) for x in audit.theta], eps, [float(x) for x in audit.analytic],
              [float(x) for x in audit.numeric], audit.max_deviation)
        out["gradient_audit"] = t
    return out


def _audit(cfg: RunConfig) -> dict:
    records = cfg.interval_records()
    obj = cfg.objective_for(records.schema)
    domain = cfg.domain()
    k = cfg.k_value(len(records))
    groups = tuple(dict.fromkeys(r.group for r in records))
    fs = cfg.fairness_spec(groups)
    res = fairest_completion(records, obj, cfg.reference(domain), k, fs)
    positions = {(rid, a): p for rid, a, p in res.audit.cell_positions}
    cells = Table(["id", "name", "group", "attribute", "lo", "hi", "value", "position"])
    for r in records:
        for a in records.schema.names:
            lo, hi = r.interval(a)
            cells.add(r.id, r.name or r.id, r.group, a, lo, hi, res.completion.value(r.id, a), positions[(r.id, a)])
    sel = Table(["ids", "names", "fairness"])
    sel.add(_ids(res.selection), _names(res.selection), res.fairness)
    groups_t = Table(["group", "mean_position"])
    for g, mean in res.audit.group_means:
        groups_t.add(g, mean)
    summary = Table(["warning", "asymmetry", "completions_searched"])
    summary.add(DIAGNOSTIC_WARNING, res.audit.asymmetry, res.completions_searched)
    return {"diagnostic": summary, "selection": sel, "completion": cells, "groups": groups_t}


_DISPATCH = {
    "solve": _solve,
    "sweep": _sweep,
    "pareto": _pareto,
    "compare": _compare,
    "ascent": _ascent,
    "audit": _audit,
}


def run(cfg: RunConfig, command: str) -> RunReport:
    """Execute one command and collect its tables into a report."""
    if command not in _DISPATCH:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    start = time.perf_counter()
    sections = _DISPATCH[command](cfg)
    return RunReport(command, cfg.echo(), sections, timing=time.perf_counter() - start)


def _csv_bytes(report: RunReport) -> bytes:
    buf = io.StringIO()
    for i, (name, table) in enumerate(report.sections.items()):
        if i:
            buf.write("\n")
        buf.write(f"# section: {name}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


def _summary_value(v):
    if isinstance(v, str) and "/" in v:
        try:
            return decimal_text(Fraction(v))
        except (ValueError, ZeroDivisionError):
            return v
    return "" if v is None else str(v)


def _summary_bytes(report: RunReport) -> bytes:
    lines = [f"noregret {report.version}: {report.command}"]
    if report.command == "audit":
        lines.append(DIAGNOSTIC_WARNING)
    for name, table in report.sections.items():
        lines.append("")
        lines.append(f"[{name}]")
        if not table.rows:
            lines.append("  (empty)")
        for row in table.rows:
            lines.append("  " + ", ".join(f"{c}={_summary_value(v)}" for c, v in zip(table.columns, row)))
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_report(report: RunReport, fmt: str = "json", include_timing: bool = False) -> bytes:
    """Serialize a report as ``json`` (structured), ``csv`` tables or a ``summary``."""
    if fmt == "json":
        text = json.dumps(report.to_dict(include_timing), indent=2, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if fmt == "csv":
        return _csv_bytes(report)
    if fmt == "summary":
        return _summary_bytes(report)
    raise ConfigError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_atomic(path: str, data: bytes) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
