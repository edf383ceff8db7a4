"""CLI contract: subcommands, exit codes, JSON envelope, config precedence."""

import json

import pytest

from nambu_forge.cli import load_schema, main, validate_output


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_star_su2_display(capsys):
    code, out, _ = run(capsys, "star", "--product", "su2", "L1", "L2")
    assert code == 0
    assert out.strip() == "L1*L2 + nu*L3"


def test_check_fi_pass_line(capsys):
    code, out, _ = run(
        capsys, "check-fi", "--bracket", "canonical3", "--degree", "2",
        "--trials", "25", "--seed", "7",
    )
    assert code == 0
    assert out.strip() == "PASS residual=0 (25/25)"


def test_check_fi_jobs_deterministic(capsys):
    _, out1, _ = run(capsys, "check-fi", "--trials", "10", "--seed", "3")
    _, out2, _ = run(capsys, "check-fi", "--trials", "10", "--seed", "3", "--jobs", "4")
    assert out1 == out2


def test_coeffs_agreement(capsys):
    code, out, _ = run(capsys, "coeffs", "--a", "6", "3")
    assert code == 0
    assert "recursion=17/45" in out and "closed-form=17/45" in out and "agree=True" in out


def test_factor_text(capsys):
    code, out, _ = run(capsys, "factor", "x1^2 - x2^2")
    assert code == 0
    assert out.strip() == "1 * (x1 - x2) * (x1 + x2)"


def test_json_envelope_validates(capsys):
    for argv in (
        ["--json", "factor", "6*x1"],
        ["--json", "star", "--product", "moyal", "q", "p"],
        ["--json", "coeffs", "--a", "2", "1"],
        ["--json", "spectrum", "--dim", "30", "--levels", "3"],
        ["--json", "nambu", "--bracket", "canonical3", "x1", "x2", "x3"],
        ["--json", "zariski", "mul", "Z[x1]", "Z[x1]"],
    ):
        code, out, _ = run(capsys, *argv)
        assert code == 0, argv
        doc = json.loads(out)
        assert validate_output(doc), argv
        assert doc["status"] == "ok"


def test_json_and_text_encode_same_data(capsys):
    _, text_out, _ = run(capsys, "star", "--product", "su2", "L1", "L2")
    _, json_out, _ = run(capsys, "--json", "star", "--product", "su2", "L1", "L2")
    doc = json.loads(json_out)
    assert doc["data"]["result"] == text_out.strip()


def test_domain_error_exit_code(capsys):
    code, out, err = run(capsys, "factor", "x1^20")
    assert code == 1
    assert "factor.resource-limit" in err


def test_syntax_error_code(capsys):
    code, out, err = run(capsys, "factor", "x1 +")
    assert code == 1
    assert "factor.syntax" in err


def test_json_error_envelope(capsys):
    code, out, _ = run(capsys, "--json", "factor", "x1^20")
    assert code == 1
    doc = json.loads(out)
    assert validate_output(doc)
    assert doc["status"] == "error"
    assert doc["error"]["code"] == "factor.resource-limit"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as err:
        main(["star", "--product", "bogus", "q", "p"])
    assert err.value.code == 2


def test_zariski_qnambu(capsys):
    code, out, _ = run(capsys, "zariski", "qnambu", "J(Z[x1])", "J(Z[x2])", "J(Z[x3])")
    assert code == 0
    assert out.strip() == "Z[]"


def test_zariski_frobenius(capsys):
    code, out, _ = run(capsys, "zariski", "frobenius", "--max-degree", "3")
    assert code == 0
    assert "witness" in out


def test_evolve_with_csv(tmp_path, capsys):
    target = tmp_path / "traj.csv"
    code, out, _ = run(
        capsys, "evolve", "--system", "nahm", "--horizon", "0.01",
        "--step", "0.001", "--csv", str(target),
    )
    assert code == 0
    lines = target.read_text().strip().splitlines()
    assert lines[0] == "t,x1,x2,x3,H1,H2"
    assert len(lines) == 12
    assert "divergence identically zero: True" in out


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "forge.conf"
    cfg.write_text("t-order=2\n# comment\n")
    # file value
    _, out, _ = run(capsys, "--config", str(cfg), "star", "--product", "moyal", "--exp", "q")
    assert out.strip().splitlines()[-1].startswith("t^2:")
    # env overrides file
    monkeypatch.setenv("NAMBU_FORGE_T_ORDER", "3")
    _, out, _ = run(capsys, "--config", str(cfg), "star", "--product", "moyal", "--exp", "q")
    assert out.strip().splitlines()[-1].startswith("t^3:")
    # flag overrides env
    _, out, _ = run(
        capsys, "--config", str(cfg), "star", "--product", "moyal", "--exp", "q", "--t-order", "1"
    )
    assert out.strip().splitlines()[-1].startswith("t^1:")


def test_vars_override(capsys):
    code, out, _ = run(capsys, "--vars", "a,b", "factor", "a^2 - b^2")
    assert code == 0
    assert out.strip() == "1 * (a - b) * (a + b)"


def test_equiv_weak_trivializer(capsys):
    code, out, _ = run(
        capsys, "equiv", "--mode", "B", "--left", "usual", "--right", "su2",
        "--s", "weak-trivializer", "L3^2", "L1*L2",
    )
    assert code == 0
    assert "residual: 0" in out


def test_spectrum_deviation(capsys):
    code, out, _ = run(
        capsys, "spectrum", "--dim", "30", "--deviation", "q", "p", "--band", "15"
    )
    assert code == 0
    assert "deviation" in out


def test_schema_file_loads():
    schema = load_schema()
    assert schema["title"].startswith("nambu-forge")
    assert schema["properties"]["tool"]["const"] == "nambu-forge"


def test_stdin_expression(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("x1^2 - x2^2"))
    code, out, _ = run(capsys, "factor", "-")
    assert code == 0
    assert out.strip() == "1 * (x1 - x2) * (x1 + x2)"
