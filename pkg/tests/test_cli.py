"""
命令行：退出码、JSON 报告、种子优先级、CSV 导出
"""

import json

import pytest

from hojman.cli import build_parser, main
from hojman.expr import evaluate, parse_expr


# ==================== 退出码 ====================

@pytest.mark.parametrize("name, code", [("pass.json", 0), ("fail.json", 1), ("error.json", 2)])
def test_exit_codes(run_cli, fixtures_dir, name, code):
    exit_code, report = run_cli("check", fixtures_dir / name, "--json")
    assert exit_code == code
    assert report["verdict"] == {0: "pass", 1: "fail", 2: "error"}[code]


def test_failure_carries_witness(run_cli, fixtures_dir):
    code, report = run_cli("invariant", fixtures_dir / "fail.json", "--json")
    assert code == 1
    failed = [c for c in report["checks"] if not c["passed"]]
    assert failed and set(failed[0]["witness"]) == {"x", "y"}


@pytest.mark.parametrize("name", ["malformed.json", "degenerate.json", "missing.json"])
def test_input_errors(run_cli, fixtures_dir, name):
    command = "lagrangian" if name == "degenerate.json" else "check"
    code, report = run_cli(command, fixtures_dir / name, "--json")
    assert code == 2
    assert report["message"]


def test_wrong_candidate_fails_verification(run_cli, fixtures_dir):
    code, report = run_cli("verify", fixtures_dir / "wrong_candidate.json", "--json")
    assert code == 1
    assert evaluate(parse_expr(report["invariant"]), {"x": 1.0, "y": 1.0}) == 3.0
    assert any(not c["passed"] and c["witness"] for c in report["checks"])


def test_text_output(run_cli, fixtures_dir):
    code, text = run_cli("check", fixtures_dir / "pass.json")
    assert code == 0
    assert "结论: pass" in text


# ==================== invariant ====================

@pytest.mark.parametrize("name, theorem, point, value", [
    ("oscillator", "divfree_symmetry", {"x": 0.5, "y": 0.5}, 2.0),
    ("dilation", "multiplier_symmetry", {"x": 1.0, "y": 0.5}, -0.5),
    ("nonautonomous", "nonautonomous_divfree", {"t": 1.0, "x": 1.0}, 1.0),
    ("quartic_lagrangian", "lagrangian_prolonged", {"t": 1.0, "x": 1.0, "v_x": 2.0}, -1.0),
    ("forces_oscillator", "sode_lifted", {"x": 0.5, "v_x": 0.5}, 2.0),
    ("hamiltonian_oscillator", "divfree_symmetry", {"q": 0.5, "p": 0.5}, 2.0),
])
def test_invariant_examples(run_cli, problems_dir, name, theorem, point, value):
    code, report = run_cli("invariant", problems_dir / f"{name}.json", "--json")
    assert code == 0, report["message"]
    assert report["theorem"] == theorem
    assert not report["trivial"]
    assert evaluate(parse_expr(report["invariant"]), point) == pytest.approx(value)


@pytest.mark.parametrize("name, theorem", [
    ("time_scaling", "nonautonomous_divfree"),
    ("caldirola_kanai", "lagrangian_prolonged"),
])
def test_trivial_invariants(run_cli, problems_dir, name, theorem):
    code, report = run_cli("invariant", problems_dir / f"{name}.json", "--json")
    assert code == 0
    assert report["theorem"] == theorem
    assert report["trivial"]
    assert report["constant_value"] == pytest.approx(2.0)


def test_theorem_flag(run_cli, problems_dir):
    code, report = run_cli("invariant", problems_dir / "oscillator.json", "--theorem", "normalizer", "--json")
    assert code == 0
    assert report["theorem"] == "normalizer"
    code, report = run_cli("invariant", problems_dir / "oscillator.json", "--theorem", "lagrangian", "--json")
    assert code == 2


def test_json_is_deterministic(run_cli, problems_dir):
    first = run_cli("invariant", problems_dir / "dilation.json", "--json", "--seed", "11")
    second = run_cli("invariant", problems_dir / "dilation.json", "--json", "--seed", "11")
    assert first == second


def test_seed_precedence(run_cli, problems_dir, monkeypatch):
    _, report = run_cli("check", problems_dir / "oscillator.json", "--json", "--seed", "5")
    assert report["provenance"]["seed"] == 5
    monkeypatch.setenv("HOJMAN_SEED", "17")
    _, report = run_cli("check", problems_dir / "oscillator.json", "--json")
    assert report["provenance"]["seed"] == 17
    _, report = run_cli("check", problems_dir / "oscillator.json", "--json", "--seed", "5")
    assert report["provenance"]["seed"] == 5
    assert len(report["provenance"]["file_sha256"]) == 64


# ==================== check / verify / lagrangian ====================

def test_check_reports_symmetry_kind(run_cli, problems_dir):
    code, report = run_cli("check", problems_dir / "time_scaling.json", "--json")
    assert code == 0
    assert report["outputs"]["symmetry"] == "normalizer"
    code, report = run_cli("check", problems_dir / "forces_oscillator.json", "--json")
    assert code == 0
    assert report["outputs"]["sode_symmetry"] == "commuting"


def test_verify_writes_csv(run_cli, problems_dir, tmp_path):
    target = tmp_path / "traj.csv"
    code, report = run_cli(
        "verify", problems_dir / "oscillator.json", "--json",
        "--step", "0.01", "--span", "0", "1", "--csv", target,
    )
    assert code == 0, report["message"]
    assert target.read_text().splitlines()[0] == "t_param,x,y"
    drift = [c for c in report["checks"] if c["name"] == "drift"]
    assert drift and drift[0]["detail"]["step"] == 0.01


@pytest.mark.parametrize("name", ["nonautonomous", "quartic_lagrangian", "forces_oscillator"])
def test_verify_examples(run_cli, problems_dir, name):
    code, report = run_cli("verify", problems_dir / f"{name}.json", "--json", "--span", "0", "1")
    assert code == 0, report["message"]


def test_lagrangian_show_forces(run_cli, problems_dir):
    code, report = run_cli("lagrangian", problems_dir / "caldirola_kanai.json", "--show", "forces", "--json")
    assert code == 0
    assert set(report["outputs"]) == {"forces"}
    force = parse_expr(report["outputs"]["forces"][0])
    assert evaluate(force, {"t": 0.3, "x": 0.5, "v_x": 0.25}) == pytest.approx(-1.0)


def test_lagrangian_all_outputs(run_cli, problems_dir):
    code, report = run_cli("lagrangian", problems_dir / "quartic_lagrangian.json", "--json")
    assert code == 0
    assert {"hessian", "det_w", "forces", "multiplier", "energy"} <= set(report["outputs"])
    assert [c["name"] for c in report["checks"]] == ["euler_lagrange", "det_w_multiplier"]


@pytest.mark.parametrize("argv", [
    ["verify", "x.json", "--step", "0"],
    ["verify", "x.json", "--step", "abc"],
    ["check", "x.json", "--theorem", "bogus"],
])
def test_bad_arguments(argv):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(argv)
    assert info.value.code == 2


def test_reversed_span(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["verify", "x.json", "--span", "2", "1", "--config", str(tmp_path / "absent.yaml")])
    assert info.value.code == 2


# ==================== --theorem 名称 ====================

@pytest.mark.parametrize("name, theorem, tag", [
    ("oscillator", "t21", "divfree_symmetry"),
    ("dilation", "t22", "multiplier_symmetry"),
    ("oscillator", "t23", "normalizer"),
    ("nonautonomous", "t41", "nonautonomous_divfree"),
    ("quartic_lagrangian", "lagrangian", "lagrangian_prolonged"),
    ("hamiltonian_oscillator", "hamiltonian", "divfree_symmetry"),
    ("oscillator", "divfree", "divfree_symmetry"),
    ("dilation", "multiplier", "multiplier_symmetry"),
    ("nonautonomous", "nonautonomous", "nonautonomous_divfree"),
])
def test_theorem_names(run_cli, problems_dir, name, theorem, tag):
    code, report = run_cli("invariant", problems_dir / f"{name}.json", "--theorem", theorem, "--json")
    assert code == 0, report["message"]
    assert report["theorem"] == tag


def test_t21_on_non_divergence_free_field_fails(run_cli, problems_dir):
    code, report = run_cli("invariant", problems_dir / "dilation.json", "--theorem", "t21", "--json")
    assert code == 1
    assert report["verdict"] == "fail"


# ==================== 输入错误一律退出码 2 ====================

OSCILLATOR = {
    "schema_version": 1,
    "chart": {"coords": ["x", "y"]},
    "vector_field": ["y", "-x"],
    "symmetry": ["x", "y"],
    "box": {"intervals": {"x": [-1, 1], "y": [-1, 1]}},
}


def _write(tmp_path, data, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.mark.parametrize("patch", [
    {"vector_field": ["1e400", "0"]},
    {"chart": {"coords": ["1x", "y"]}},
    {"box": {"intervals": {"x": [-1, 1], "y": [-1, 1]}, "seed": "abc"}},
    {"box": {"intervals": {"x": [-1, 1], "y": [-1, 1]}, "count": 2.5}},
])
def test_bad_first_order_input(run_cli, tmp_path, patch):
    path = _write(tmp_path, {**OSCILLATOR, **patch})
    code, report = run_cli("check", path, "--json")
    assert code == 2
    assert report["verdict"] == "error"


@pytest.mark.parametrize("n", ["two", 0, True])
def test_bad_lagrangian_dimension(run_cli, tmp_path, n):
    data = {
        "schema_version": 1,
        "chart": {"coords": ["x"]},
        "lagrangian": {"L": "v_x^2/2 - x^2/2", "n": n},
        "box": {"intervals": {"x": [-1, 1], "v_x": [-1, 1]}},
    }
    code, report = run_cli("lagrangian", _write(tmp_path, data), "--json")
    assert code == 2
    assert "lagrangian.n" in report["message"]


def test_bad_seed_environment(run_cli, problems_dir, monkeypatch):
    monkeypatch.setenv("HOJMAN_SEED", "abc")
    code, report = run_cli("check", problems_dir / "oscillator.json", "--json")
    assert code == 2
    assert "HOJMAN_SEED" in report["message"]


@pytest.mark.parametrize("text", ["sampling:\n  count: many\n", "numeric:\n  span: 3\n", "sampling: [1, 2\n"])
def test_bad_config_file(problems_dir, tmp_path, capsys, text):
    config = tmp_path / "config.yaml"
    config.write_text(text, encoding="utf-8")
    code = main(["check", str(problems_dir / "oscillator.json"), "--json", "--config", str(config)])
    assert code == 2
    assert json.loads(capsys.readouterr().out)["verdict"] == "error"


def test_config_logging_section(problems_dir, tmp_path, capsys):
    log_file = tmp_path / "logs" / "run.log"
    config = tmp_path / "config.yaml"
    config.write_text(
        "logging:\n"
        "  level: DEBUG\n"
        "  format: \"%(levelname)s|%(message)s\"\n"
        f"  file: \"{log_file.as_posix()}\"\n",
        encoding="utf-8",
    )
    code = main(["check", str(problems_dir / "oscillator.json"), "--config", str(config)])
    assert code == 0
    lines = log_file.read_text(encoding="utf-8").splitlines()
    assert lines and all("|" in line for line in lines)
    assert any(line.startswith("DEBUG|") for line in lines)
    assert "DEBUG|" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["oscillator", "dilation", "nonautonomous", "quartic_lagrangian", "hamiltonian_oscillator"])
def test_verify_examples_over_long_span(run_cli, problems_dir, name):
    code, report = run_cli(
        "verify", problems_dir / f"{name}.json", "--json", "--span", "0", "10", "--step", "1e-3",
    )
    assert code == 0, report["message"]
    assert all(c["passed"] for c in report["checks"])
