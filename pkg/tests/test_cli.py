import json

import pytest

from milnorfibre.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_germ(capsys):
    assert run(capsys, "germ", "A3+s0n1")[:2] == (EXIT_OK, "x^4 + y^2\n")


def test_germ_with_tail(capsys):
    code, out, _ = run(capsys, "germ", "D4-s1n2")
    assert code == EXIT_OK and out.strip() == "x^2*y - y^3 - x1^2"


@pytest.mark.parametrize("bad", ["D3-s0n1", "A1+s0n1", "Q5", "E7+s0n1", "A3+s2n2"])
def test_invalid_codes_exit_two(capsys, bad):
    code, _, err = run(capsys, "germ", bad)
    assert code == EXIT_ERROR and err.startswith("error:")


def test_predict_text(capsys):
    assert run(capsys, "predict", "E7s2n4")[:2] == (EXIT_OK, "1+u^1, 1+u^2\n")
    assert run(capsys, "predict", "D6-s1n3")[1].strip() == "unresolved"


def test_predict_json(capsys):
    code, out, _ = run(capsys, "predict", "A3+s1n2", "--format", "json")
    js = json.loads(out)
    assert code == EXIT_OK and js["schema_version"] == 1 and js["germ"] == "A3+s1n2"


def test_predict_all_is_csv(capsys):
    code, out, _ = run(capsys, "predict", "--all", "--kmax", "5", "--nmax", "1")
    lines = out.splitlines()
    assert code == EXIT_OK and "code" in lines[0] and len(lines) > 5


def test_predict_needs_something(capsys):
    assert run(capsys, "predict")[0] == EXIT_ERROR


def test_critical(capsys):
    code, out, _ = run(capsys, "critical", "D5+s0n1")
    assert code == EXIT_OK and "critical points: 1" in out and "index 1" in out


def test_critical_negative_parameter(capsys):
    code, out, _ = run(capsys, "critical", "A3-s0n1", "--t", "-1/2")
    assert code == EXIT_OK and "critical points: 1" in out


def test_critical_json(capsys):
    code, out, _ = run(capsys, "critical", "E8s0n1", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["schema_version"] == 1


def test_decimals_are_refused(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["critical", "A3-s0n1", "--t", "0.5"])
    assert exc.value.code == 2


def test_parameter_outside_interval(capsys):
    assert run(capsys, "critical", "A3-s0n1", "--t", "7")[0] == EXIT_ERROR


def test_morsify(capsys):
    code, out, _ = run(capsys, "morsify", "A4-s0n1")
    js = json.loads(out)
    assert code == EXIT_OK and js["schema_version"] == 1 and js["germ"] == "A4-s0n1"


def test_verify_single(capsys):
    code, out, _ = run(capsys, "verify", "A3-s0n1")
    assert code == EXIT_OK and out.startswith("A3-s0n1: match")


def test_verify_json_one_side(capsys):
    code, out, _ = run(capsys, "verify", "E6+s0n1", "--side", "minus", "--format", "json")
    js = json.loads(out)
    assert code == EXIT_OK and js["status"] == "match" and list(js["reports"]) == ["minus"]


def test_verify_bad_eta(capsys):
    assert run(capsys, "verify", "A2-s0n1", "--eta", "1/2")[0] == EXIT_ERROR


def test_table_curve_markdown(capsys):
    code, out, _ = run(capsys, "table", "theorem", "--kmax", "4", "--nmax", "1")
    assert code == EXIT_OK and out.startswith("|")


def test_table_suspension_json(capsys):
    code, out, _ = run(capsys, "table", "corollary", "--kmax", "5", "--nmax", "3", "--format", "json")
    js = json.loads(out)
    assert js["table"] == "corollary" and any(r["status"] == "unresolved" for r in js["rows"])


def test_output_is_deterministic(capsys):
    first = run(capsys, "table", "corollary", "--kmax", "6", "--nmax", "2")[1]
    assert run(capsys, "table", "corollary", "--kmax", "6", "--nmax", "2")[1] == first


def test_plot_svg(capsys, tmp_path):
    target = tmp_path / "fibre.svg"
    code, out, _ = run(capsys, "plot-svg", "A4-s0n1", "--side", "minus", "-o", str(target))
    assert code == EXIT_OK and target.read_text().startswith("<svg")
