"""The bl command line: outputs, exit codes, and report determinism."""

import json

import pytest

from branchlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_act_example(capsys):
    code, out = run(capsys, "act", "--group", "grigorchuk", "--elem", "b",
                    "--word", "100")
    assert code == 0
    assert out == "101\n"


def test_treeprim_example(capsys):
    code, out = run(capsys, "treeprim", "--group", "grigorchuk", "--level", "4")
    assert code == 0
    assert out.splitlines()[0] == "proven"
    assert "levels 0..4: 1,2,3,4,5 invariant partitions" in out


def test_ggs_torsion_example(capsys):
    code, out = run(capsys, "ggs", "--p", "3", "--e", "1,1", "--torsion")
    assert code == 1
    assert out == "torsion: false\n"
    code, out = run(capsys, "ggs", "--p", "3", "--e", "1,2", "--torsion")
    assert code == 0
    assert out == "torsion: true\n"


def test_eq_exit_codes(capsys):
    code, _ = run(capsys, "eq", "--group", "grigorchuk", "--left", "a a",
                  "--right", "e")
    assert code == 0
    code, _ = run(capsys, "eq", "--group", "grigorchuk", "--left", "a",
                  "--right", "e")
    assert code == 1


def test_section_and_quotient(capsys):
    code, out = run(capsys, "section", "--group", "grigorchuk", "--elem", "b",
                    "--vertex", "1")
    assert code == 0 and out.strip() == "c"
    code, out = run(capsys, "quotient", "--group", "grigorchuk", "-n", "3")
    assert code == 0
    assert "order 128" in out and "2^7" in out


def test_orbits(capsys):
    code, out = run(capsys, "orbits", "--group", "grigorchuk", "-n", "3")
    assert code == 0
    assert out.count("transitive") == 3


def test_json_reports_are_byte_identical(capsys):
    argv = ["detect", "--group", "grigorchuk", "--parts", "0|1",
            "--budget-levels", "3", "--report", "json"]
    code1, out1 = run(capsys, *argv)
    code2, out2 = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["verdict"]["status"] == "proven"
    assert "regular-over: K" in payload["structure"]


def test_detect_with_generator_words(capsys):
    code, out = run(capsys, "detect", "--group", "grigorchuk", "--gens",
                    "a b a b, a d a b a d a b, a b a d a b a d",
                    "--budget-levels", "3", "--report", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["structure"].count("part:") == 8


def test_block_build_and_verify(capsys):
    code, out = run(capsys, "block-build", "--group", "grigorchuk",
                    "--parts", "00,01|1")
    assert code == 0
    assert "part: {00, 01}" in out
    code, out = run(capsys, "block-verify", "--group", "grigorchuk",
                    "--parts", "0|1", "-n", "4")
    assert code == 0
    assert "support: proven" in out


def test_branch_check_and_prop_commands(capsys):
    code, out = run(capsys, "branch-check", "--group", "grigorchuk", "-n", "4")
    assert code == 0
    code, out = run(capsys, "prop43", "--group", "grigorchuk", "-n", "3")
    assert code == 0
    code, out = run(capsys, "prop42", "--group", "ggs:3:1,2", "-n", "3")
    assert code == 0


def test_usage_errors_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["act", "--group", "grigorchuk"])  # missing --elem/--word
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 64
    assert main(["act", "--group", "nope", "--elem", "a", "--word", "0"]) == 64


def test_group_file_loading(tmp_path, capsys):
    from branchlab.group_defs import grigorchuk, print_group
    path = tmp_path / "grig.txt"
    path.write_text(print_group(grigorchuk()))
    code, out = run(capsys, "act", "--group", str(path), "--elem", "b",
                    "--word", "100")
    assert code == 0 and out == "101\n"
