import json

import pytest

from rmtorus import cli
from rmtorus.cli import main, parse_complex, parse_matrix, parse_theta
from rmtorus.precision import get_precision, set_precision


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _report(out):
    payload = json.loads(out)
    return payload["report"], payload


# -- parsing helpers --------------------------------------------------------------

def test_parse_complex_grammar():
    assert parse_complex("0.3+1.1i") == 0.3 + 1.1j
    assert parse_complex("-2+0.5i") == -2 + 0.5j
    assert parse_complex("1e-2-3e1i") == 0.01 - 30j
    for bad in ["1+2j", "i", "0.3", "0.3 + 1.1i", "1.1i"]:
        with pytest.raises(cli.InputError):
            parse_complex(bad)


def test_parse_matrix_validates_determinant():
    assert parse_matrix("[[2,1],[1,1]]").to_list() == [[2, 1], [1, 1]]
    with pytest.raises(cli.InputError):
        parse_matrix("[[1,1],[1,1]]")
    with pytest.raises(cli.InputError):
        parse_matrix("not json")


def test_parse_theta_error():
    with pytest.raises(cli.InputError):
        parse_theta("sqrt(-2)")


# -- fix ---------------------------------------------------------------------------

def test_fix_golden(capsys):
    code, out, err = _run(capsys, "fix", "--theta", "(1+sqrt5)/2")
    assert code == 0
    rep, payload = _report(out)
    assert rep["g"] == [[2, 1], [1, 1]]
    assert rep["trace"] == 3
    assert rep["minimal_polynomial"] == [1, -1, -1]
    assert rep["discriminant"] == 5
    assert rep["multiplier_conductor"] == 1
    assert rep["continued_fraction"]["period"] == [1]
    assert rep["conditions"] == {"generated": False, "quadratic": False, "koszul": False}
    assert payload["command"] == "fix"


def test_fix_ring_case(capsys):
    code, out, _ = _run(capsys, "fix", "--theta", "(-5+sqrt5)/10")
    assert code == 0
    rep, _ = _report(out)
    assert rep["g"] == [[-1, -1], [5, 4]]
    assert rep["conditions"] == {"generated": True, "quadratic": True, "koszul": True}


def test_fix_rational_rejected(capsys):
    code, out, err = _run(capsys, "fix", "--theta", "3/4")
    assert code == 2
    assert out == ""
    assert "error" in err


def test_fix_missing_theta(capsys):
    code, out, err = _run(capsys, "fix")
    assert code == 2
    assert "--theta" in err


def test_fix_trace_cap_exit_code(capsys):
    # cap below the minimal trace: numerical/search failure, not bad input
    code, out, err = _run(capsys, "fix", "--theta", "sqrt2", "--max-trace", "5")
    assert code == 3
    assert "error" in err


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["notacommand"])
    assert exc.value.code == 2


def test_bad_precision_choice(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fix", "--theta", "sqrt2", "--precision", "quad"])
    assert exc.value.code == 2


# -- determinism and output --------------------------------------------------------

def test_stdout_is_deterministic(capsys):
    _, first, _ = _run(capsys, "fix", "--theta", "sqrt2")
    _, second, _ = _run(capsys, "fix", "--theta", "sqrt2")
    assert first == second
    parsed = json.loads(first)
    assert list(parsed) == sorted(parsed)


def test_output_file_copy(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = _run(capsys, "fix", "--theta", "(1+sqrt5)/2", "--output", str(target))
    assert code == 0
    assert target.read_text() == out  # stdout plus the same trailing newline
    json.loads(target.read_text())


# -- config file --------------------------------------------------------------------

def test_config_supplies_options(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta": "(1+sqrt5)/2"}))
    code, out, _ = _run(capsys, "fix", "--config", str(cfg))
    assert code == 0
    rep, payload = _report(out)
    assert rep["g"] == [[2, 1], [1, 1]]
    assert payload["config"]["theta"] == "(1+sqrt5)/2"


def test_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta": "(1+sqrt5)/2", "max_trace": 1000}))
    code, out, _ = _run(capsys, "fix", "--config", str(cfg), "--theta", "sqrt2")
    assert code == 0
    rep, payload = _report(out)
    assert rep["g"] == [[3, 4], [2, 3]]
    assert payload["config"]["max_trace"] == 1000


def test_config_must_be_object(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1,2,3]")
    code, _, err = _run(capsys, "fix", "--config", str(cfg), "--theta", "sqrt2")
    assert code == 2
    code2, _, _ = _run(capsys, "fix", "--config", str(tmp_path / "missing.json"),
                       "--theta", "sqrt2")
    assert code2 == 2


# -- algebra --------------------------------------------------------------------------

def test_algebra_passes(capsys):
    code, out, _ = _run(capsys, "algebra", "--theta", "(-5+sqrt5)/10",
                        "--count", "10", "--support", "8")
    assert code == 0
    rep, payload = _report(out)
    assert rep["max_residual"] < 1e-12
    assert set(rep["residuals"]) == {"uv_relation", "associativity", "star_involution",
                                     "star_antimult", "tracial", "trace_positivity",
                                     "leibniz"}
    assert payload["config"]["count"] == 10


def test_algebra_impossible_tolerance(capsys):
    code, _, err = _run(capsys, "algebra", "--theta", "sqrt2",
                        "--count", "3", "--support", "5", "--tol", "1e-300")
    assert code == 3
    assert "tolerance" in err


# -- module-check -----------------------------------------------------------------------

def test_module_check_passes(capsys):
    code, out, _ = _run(capsys, "module-check", "--theta", "(-5+sqrt5)/10",
                        "--degrees", "1")
    assert code == 0
    rep, _ = _report(out)
    deg = rep["degrees"]["1"]
    for key in ("right_relation", "left_relation", "bimodule_commutation",
                "leibniz", "curvature", "holomorphic_annihilation"):
        assert deg[key] < 1e-12
    assert rep["heisenberg"]["finite_rep_exact"] is True
    assert rep["heisenberg"]["pairing_nondegenerate"] is True
    assert rep["max_residual"] < 1e-12


def test_module_check_rejects_real_tau(capsys):
    code, _, err = _run(capsys, "module-check", "--theta", "sqrt2",
                        "--tau", "0.3+0.0i")
    assert code == 2
    assert "tau" in err


# -- theta ---------------------------------------------------------------------------

def test_theta_reference_value(capsys):
    code, out, _ = _run(capsys, "theta", "--r", "0", "--m", "0+1i")
    assert code == 0
    rep, _ = _report(out)
    re, im = rep["value"]
    assert abs(re - 1.0864348112133080146) < 1e-12
    assert abs(im) < 1e-15
    assert rep["tail_bound"] <= 1e-14


def test_theta_with_argument(capsys):
    code, out, _ = _run(capsys, "theta", "--r", "1/4", "--m", "0.3+1.1i",
                        "--z", "0.1+0.2i")
    assert code == 0
    rep, _ = _report(out)
    val = complex(*rep["value"])
    assert abs(val - (0.9409357556338423202 + 0.14870195549561798467j)) < 1e-12


def test_theta_uncertifiable_is_exit_3(capsys):
    code, _, err = _run(capsys, "theta", "--r", "0", "--m", "0+1e-300i")
    assert code == 3


def test_theta_rejects_bad_inputs(capsys):
    code, _, _ = _run(capsys, "theta", "--r", "1/3", "--m", "1-2i")
    assert code == 2
    code, _, _ = _run(capsys, "theta", "--r", "x", "--m", "0+1i")
    assert code == 2


# -- ring -----------------------------------------------------------------------------

def test_ring_small_run(capsys):
    code, out, _ = _run(capsys, "ring", "--theta", "(-5+sqrt5)/10",
                        "--g", "[[-1,-1],[5,4]]", "--tau", "0.3+1.1i",
                        "--max-degree", "2", "--assoc-triples", "2")
    assert code == 0
    rep, payload = _report(out)
    assert rep["dims"] == [1, 5, 15]
    assert rep["generation"] == [True]
    assert rep["assoc_residual"] < 1e-8
    assert rep["quadratic"] is None
    assert payload["config"]["max_degree"] == 2


def test_ring_wrong_matrix_for_theta(capsys):
    code, _, err = _run(capsys, "ring", "--theta", "sqrt2",
                        "--g", "[[2,1],[1,1]]", "--tau", "0.3+1.1i")
    assert code == 2


# -- precision flag ---------------------------------------------------------------------

def test_precision_flag_applies(capsys):
    before = get_precision()
    try:
        code, out, _ = _run(capsys, "fix", "--theta", "sqrt2",
                            "--precision", "extended")
        assert code == 0
        assert get_precision() == "extended"
    finally:
        set_precision(before)
