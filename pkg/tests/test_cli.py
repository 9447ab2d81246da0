import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from harmonic_fields import cli, config
from harmonic_fields.report import jsonable, to_json, to_markdown
from harmonic_fields.runner import run


def run_cli(tmp_path, *args):
    out = tmp_path / "out.json"
    code = cli.main([*args, "--json", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_analyze_hopf(tmp_path):
    code, rep = run_cli(tmp_path, "analyze", "--model", "catalog:hopf")
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["classification"]["case"] == "KillingSasakianRescale"
    assert all(r["anchor"] for r in rep["residuals"])


def test_classify_123(tmp_path):
    code, rep = run_cli(tmp_path, "classify", "--model", "unimodular:1,2,3", "--field", "e3")
    assert code == 0
    c = rep["classification"]
    assert c["emitted_brackets"] == ["2", "3", "-1"]
    assert c["milnor_type"] == "SL2R"


def test_analyze_non_harmonic_direction(tmp_path):
    code, rep = run_cli(tmp_path, "analyze", "--model", "unimodular:1,2,3", "--field", "1,1,1")
    assert code == 0 and rep["verdict"] == "pass"
    uh = next(r for r in rep["residuals"] if r["name"] == "unit_harmonic")
    assert not uh["asserted"] and float(uh["value"]) > 0


def test_config_file_and_md(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "analyze", "model": {"type": "catalog", "name": "hyperbolic-torus"}}))
    md = tmp_path / "r.md"
    code = cli.main(["analyze", "--config", str(cfg), "--json", str(tmp_path / "o.json"), "--md", str(md)])
    assert code == 0
    text = md.read_text()
    assert "## Ricci" in text and "## Classification" in text and "| e1 | e2 | e3 |" in text


def test_frame_model_spec(tmp_path):
    c = np.zeros((3, 3, 3), dtype=int)
    c[0, 2, 0], c[2, 0, 0], c[1, 2, 1], c[2, 1, 1] = 1, -1, 1, -1
    spec = json.dumps({"type": "frame", "c": c.tolist()})
    code, rep = run_cli(tmp_path, "classify", "--model", spec)
    assert code == 0
    assert rep["classification"]["case"] == "HypothesisFailed"
    assert rep["classification"]["compact_obstruction"] is True


def test_find_and_chart_verify(tmp_path):
    code, rep = run_cli(tmp_path, "find", "--model", "unimodular:1,2,3")
    assert code == 0 and len(rep["finder"]["directions"]) == 3
    code, rep = run_cli(tmp_path, "chart-verify", "--model", "chart:hyperbolic-torus")
    assert code == 0 and rep["chart"]["points"] == 27


def test_catalog_mode(tmp_path):
    code, rep = run_cli(tmp_path, "catalog")
    assert code == 0 and len(rep["catalog"]) == 8


@pytest.mark.parametrize("args", [
    ["analyze"],
    ["analyze", "--model", "catalog:nope"],
    ["analyze", "--model", "unimodular:1,2"],
    ["analyze", "--model", "unimodular:1,2,3", "--field", "0,0,0"],
    ["analyze", "--model", "unimodular:1,2,3", "--tol", "-1"],
    ["sweep"],
    ["chart-verify", "--model", "unimodular:1,2,3"],
    ["analyze", "--config", "/does/not/exist.json"],
])
def test_usage_errors_exit_2(tmp_path, args, capsys):
    assert cli.main(args) == 2
    assert capsys.readouterr().err


def test_validation_reports_field_paths(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"mode": "analyze", "model": {"type": "unimodular", "alpha": 1, "beta": "x",
                                                            "gamma": 2}, "extra": 1}))
    assert cli.main(["analyze", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "model.unimodular.beta" in err and "extra" in err


def test_unknown_subcommand_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_fail_verdict_exit_1(tmp_path):
    # a coarse step leaves O(h^2) error far above the 1e-5 tolerance
    code, rep = run_cli(tmp_path, "chart-verify", "--model", "chart:hyperbolic-torus", "--fd-step", "0.3")
    assert code == 1
    assert rep["verdict"] == "fail" and rep["failures"] == ["chart:cross_validation"]


def test_sweep_order_independent_of_workers(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"mode": "sweep", "sweep": {"random": 12, "seed": 3}}))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["sweep", "--config", str(cfg), "--workers", "1", "--json", str(a)]) == 0
    assert cli.main(["sweep", "--config", str(cfg), "--workers", "3", "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_grid():
    rep = run(config.parse({"mode": "sweep", "sweep": {"grid": [[1, 2, 3], ["1/2", 0, "-1/2"], [2, -2, 2]]}}))
    rows = rep["sweep"]["rows"]
    assert [r["case"] for r in rows][0] == "NonKilling_b_nonzero"
    assert rows[2]["case"] == "KillingSasakianRescale"


def test_reports_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        m = tmp_path / f"r{i}.md"
        cli.main(["analyze", "--model", "catalog:hyperbolic-torus", "--json", str(p), "--md", str(m)])
        outs.append((p.read_bytes(), m.read_bytes()))
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "harmonic_fields", "classify", "--model", "catalog:hopf"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["classification"]["b"] == "1"


def test_jsonable_number_formats():
    data = {"q": Fraction(-3, 4), "f": 0.1, "n": 3, "b": np.bool_(True), "a": np.array([1.5, 2.0])}
    assert jsonable(data) == {"q": "-3/4", "f": "0.10000000000000001", "n": 3, "b": True,
                              "a": ["1.5", "2"]}
    assert to_json({"x": Fraction(1, 2)}).endswith("\n")


def test_markdown_renders_every_mode():
    for data in ({"mode": "catalog"},
                 {"mode": "find", "model": {"type": "catalog", "name": "hyperbolic-torus"}},
                 {"mode": "chart-verify", "model": {"type": "chart", "name": "round-sphere"}},
                 {"mode": "sweep", "sweep": {"random": 3}}):
        text = to_markdown(run(config.parse(data)))
        assert text.startswith("# Report: " + data["mode"])


def test_config_defaults():
    cfg = config.parse({"mode": "analyze", "model": {"type": "unimodular", "alpha": 1, "beta": 2, "gamma": 3}})
    assert cfg.field == "e3"
    assert cfg.tolerances.algebraic == 1e-10 and cfg.tolerances.fd == 1e-5 and cfg.tolerances.fd_step == 1e-3
