import io
import json
import os
from fractions import Fraction

import pytest
import yaml

from noregret import ConfigError, IngestionError, load_interval_records, load_population, students, top_k
from noregret.cli import main
from noregret.config import RunConfig, load_config
from noregret.io import fixture_path
from noregret.report import RunReport, emit_report, run, write_atomic

from conftest import SCORE_TABLE

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")
STUDENTS = os.path.join(CONFIGS, "students.yaml")
AUDIT = os.path.join(CONFIGS, "students_audit.yaml")
TOY = os.path.join(CONFIGS, "quadratic_toy.yaml")

def csv_text(text):
    return io.StringIO(text)


# ---- ingestion ------------------------------------------------------------------


def test_fixture_loads():
    pop = students()
    assert pop.n == 6 and pop.ids == ("A", "B", "E", "I", "M", "Z")
    assert pop.schema.names == ("IQ", "grade")
    assert pop.groups == ("f", "m") or set(pop.groups) == {"f", "m"}
    assert pop.get("B").label == "Bob"
    assert pop.schema.divisor("IQ") == 10


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "empty"),
        ("id,x,g\n", "no data"),
        ("id,x,g\na,1,m\nb,2\n", "row 3"),
        ("id,x,g\na,1,m\na,2,f\n", "duplicate id"),
        ("id,x,y,g\na,1,2,m\nb,oops,3,f\n", None),
    ],
)
def test_ingestion_errors(text, fragment):
    with pytest.raises(IngestionError) as info:
        load_population(csv_text(text))
    if fragment:
        assert fragment in str(info.value)
    assert info.value.exit_code == 3


def test_non_numeric_attribute_named_by_row_and_column():
    with pytest.raises(IngestionError, match=r"row 3, column 'x'"):
        load_population(csv_text("id,x,g\na,1,m\nb,zz,f\n"), attributes=["x"], group_column="g")


def test_missing_file():
    with pytest.raises(IngestionError):
        load_population("/nonexistent/file.csv")


def test_single_row_population_then_k_rejected():
    pop = load_population(csv_text("id,x,y,g\na,1,2,m\n"))
    assert pop.n == 1
    cfg = RunConfig(k=2)
    with pytest.raises(ConfigError):
        cfg.k_value(pop.n)
    with pytest.raises(Exception):
        top_k(pop, None, Fraction(1, 2), 2)


def test_decimal_cells_are_exact():
    pop = load_population(csv_text("id,x,y,g\na,9.4,0.1,m\nb,1,2,f\n"))
    assert pop.get("a").value("x") == Fraction(47, 5)
    assert pop.get("a").value("y") == Fraction(1, 10)


def test_interval_parsing():
    recs = load_interval_records(fixture_path("students_intervals.csv"), divisors={"IQ": 10})
    assert recs.get("B").interval("IQ") == (140, 160)
    assert recs.get("E").interval("grade") == (5, 7)
    assert recs.get("A").interval("IQ") == (100, 100)
    assert recs.free_cells() == [("B", "IQ"), ("E", "grade")]
    with pytest.raises(IngestionError):
        load_interval_records(csv_text("id,x,g\na,3..1,m\nb,1,f\n"))


# ---- commands ---------------------------------------------------------------------


def cfg_students(**changes):
    cfg = load_config(STUDENTS)
    for key, value in changes.items():
        setattr(cfg, key, value)
    return cfg


def test_compare_report():
    rep = run(cfg_students(), "compare")
    base = rep.sections["quota_baseline"]
    assert len(base.rows) == 6
    col = base.columns.index
    assert {r[col("regret")] for r in base.rows} == {"1"}
    assert {r[col("utility")] for r in base.rows} == {"21"}
    assert {r[col("optimum_utility")] for r in base.rows} == {"22"}
    fair = rep.sections["fairest_optimal"]
    row = dict(zip(fair.columns, fair.rows[0]))
    assert row["ids"] == "A;Z" and row["regret"] == "0" and row["fairness"] == 0


def test_sweep_reproduces_all_scores():
    rep = run(cfg_students(), "sweep")
    cells = {(Fraction(r[0]), r[1]): Fraction(r[4]) for r in rep.sections["scores"].rows}
    assert len(cells) == 18
    for theta, row in SCORE_TABLE.items():
        for item, score in row.items():
            assert cells[(Fraction(theta), item)] == Fraction(score)


def test_solve_interval_and_point():
    rep = run(cfg_students(), "solve")
    opt = rep.sections["optimal_set"]
    assert [r[0] for r in opt.rows] == ["A;Z", "B;Z"]
    assert [(r[2], r[3]) for r in opt.rows] == [("1/3", "3/8"), ("3/8", "2/3")]
    best = dict(zip(rep.sections["fairest"].columns, rep.sections["fairest"].rows[0]))
    assert best["ids"] == "A;Z" and best["region_hi"] == "3/8"
    point = run(cfg_students(theta={"point": "1/2"}), "solve")
    assert len(point.sections["optimal_set"].rows) == 1


def test_pareto_sections():
    rep = run(cfg_students(), "pareto")
    assert list(rep.sections) == [
        "fairest", "theta_optimal", "convex_pareto", "pareto", "weak_pareto", "solution_space", "chain",
    ]
    sizes = [len(rep.sections[n].rows) for n in list(rep.sections)[:-1]]
    assert sizes == [1, 2, 4, 7, 9, 15]
    assert all(r[2] is True and r[3] is True for r in rep.sections["chain"].rows)


def test_ascent_and_audit_commands():
    rep = run(load_config(TOY), "ascent")
    res = dict(zip(rep.sections["result"].columns, rep.sections["result"].rows[0]))
    assert res["reason"] == "converged"
    assert float(res["final_theta"]) == pytest.approx(1.0, abs=1e-6)
    audit = dict(zip(rep.sections["gradient_audit"].columns, rep.sections["gradient_audit"].rows[0]))
    assert float(audit["max_deviation"]) < 1e-6

    rep = run(load_config(AUDIT), "audit")
    diag = dict(zip(rep.sections["diagnostic"].columns, rep.sections["diagnostic"].rows[0]))
    assert diag["asymmetry"] == "1/6" and diag["warning"].startswith("DIAGNOSTIC")
    assert rep.sections["selection"].rows[0][0] == "E;Z"


# ---- emission ---------------------------------------------------------------------


@pytest.mark.parametrize("command", ["solve", "sweep", "pareto", "compare"])
@pytest.mark.parametrize("fmt", ["json", "csv", "summary"])
def test_emission_deterministic(command, fmt):
    a = emit_report(run(cfg_students(), command), fmt)
    b = emit_report(run(cfg_students(), command), fmt)
    assert a == b


def test_json_round_trip():
    rep = run(cfg_students(), "pareto")
    blob = emit_report(rep, "json")
    back = RunReport.from_json(blob)
    assert back == rep
    assert emit_report(back, "json") == blob
    data = json.loads(blob)
    assert data["schema_version"] == 1 and "timing_seconds" not in data
    assert "timing_seconds" in json.loads(emit_report(rep, "json", include_timing=True))


def test_empty_section_is_header_only():
    cfg = cfg_students(fairness={"labels": ["m", "f"]})
    text = emit_report(run(cfg, "compare"), "csv").decode()
    block = text.split("# section: quota_baseline\n")[1].split("\n\n")[0]
    assert block.strip().splitlines() == ["theta,ids,names,utility,optimum_ids,optimum_utility,regret,fairness"]
    assert "(empty)" in emit_report(run(cfg, "compare"), "summary").decode()


def test_summary_uses_decimals():
    text = emit_report(run(cfg_students(), "solve"), "summary").decode()
    assert "region_hi=0.375" in text


def test_unknown_format_and_command():
    rep = run(cfg_students(), "solve")
    with pytest.raises(ConfigError):
        emit_report(rep, "xml")
    with pytest.raises(ConfigError):
        run(cfg_students(), "frobnicate")


def test_config_errors():
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"kk": 2})
    with pytest.raises(ConfigError):
        RunConfig(data=None).data_path()
    with pytest.raises(ConfigError):
        cfg_students(ascent={"problem": "nope"}).ascent_setup()


def test_write_atomic(tmp_path):
    target = tmp_path / "out.json"
    write_atomic(str(target), b"abc")
    assert target.read_bytes() == b"abc"
    assert os.listdir(tmp_path) == ["out.json"]


# ---- CLI --------------------------------------------------------------------------


def write_config(tmp_path, **entries):
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(entries))
    return str(path)


def test_cli_success_writes_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["compare", "--config", STUDENTS, "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["command"] == "compare"
    assert capsys.readouterr().out == ""


def test_cli_flag_overrides(capsys):
    assert main(["solve", "--config", STUDENTS, "--theta-lo", "1/2", "--theta-hi", "1/2", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.count("B;Z") >= 1 and "A;Z" not in out.split("# section: fairest")[0]


def test_cli_stdout_deterministic(capsys):
    main(["pareto", "--config", STUDENTS, "--seed", "7"])
    first = capsys.readouterr().out
    main(["pareto", "--config", STUDENTS, "--seed", "7"])
    assert capsys.readouterr().out == first


def test_cli_exit_codes(tmp_path, capsys):
    data = fixture_path("students.csv")
    assert main(["solve", "--config", write_config(tmp_path, k=2, unknown=1), "--data", data]) == 2
    assert main(["solve", "--data", data]) == 2  # k missing
    bad = tmp_path / "bad.csv"
    bad.write_text("id,x,g\na,1,m\na,2,f\n")
    assert main(["solve", "--data", str(bad), "--k", "1"]) == 3
    infeasible = write_config(tmp_path, data=data, k=4, divisors={"IQ": 10},
                              fairness={"labels": ["m", "f"], "quota_label": "f", "quota": 1})
    assert main(["compare", "--config", infeasible]) == 4
    assert main(["ascent", "--problem", "simplex-relaxation"]) == 5
    wide = tmp_path / "wide.csv"
    rows = ["id,x,y,g"] + [f"r{i},0..1,0..1,{'mf'[i % 2]}" for i in range(11)]
    wide.write_text("\n".join(rows) + "\n")
    assert main(["audit", "--data", str(wide), "--k", "2", "--config", write_config(tmp_path, theta={"point": "1/2"})]) == 6
    err = capsys.readouterr().err
    assert "ComplexityError" in err and "22" in err


def test_cli_failure_leaves_no_file(tmp_path):
    out = tmp_path / "never.json"
    assert main(["ascent", "--problem", "simplex-relaxation", "--out", str(out)]) == 5
    assert not out.exists() and os.listdir(tmp_path) == []
