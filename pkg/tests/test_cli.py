import io
import json
import subprocess
import sys

import pytest

from semdiff.cli import history_report, run

from conftest import fixture_path

EXPECTED_FORWARD_WITNESS = """\
objectmodel om {
  employee1: Employee;
  task1: Task;
  task2: Task;
  task3: Task;
  link worksOn employee1 -- task1;
  link worksOn employee1 -- task2;
  link worksOn employee1 -- task3;
}
"""


def go(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def fx(name):
    return str(fixture_path(name))


def test_cd_diff_identity_is_clean():
    code, out, err = go("cd", "diff", fx("cd1v1.cd"), fx("cd1v1.cd"))
    assert (code, err) == (0, "")
    assert out == "no witnesses (exhausted, k=3)\n"


def test_cd_diff_reports_witnesses():
    code, out, err = go(
        "cd", "diff", fx("cd1v1.cd"), fx("cd1v2.cd"), "--max-witnesses", "1"
    )
    assert (code, err) == (1, "")
    assert out == (
        "1 witness (not exhausted, k=3)\nwitness 1:\n" + EXPECTED_FORWARD_WITNESS
    )


def test_cd_diff_json_document():
    code, out, err = go(
        "cd", "diff", fx("cd1v1.cd"), fx("cd1v2.cd"),
        "--max-witnesses", "1", "--format", "json",
    )
    assert code == 1
    document = json.loads(out)
    assert document["direction"] == "AtoB"
    assert document["exhausted"] is False
    assert document["bound"] == 3
    (witness,) = document["witnesses"]
    assert [o["id"] for o in witness["objects"]] == [
        "employee1", "task1", "task2", "task3",
    ]
    assert len(witness["links"]) == 3
    assert all(link["assoc"] == "worksOn" for link in witness["links"])


def test_cd_diff_dot_output_is_wellformed():
    code, out, err = go(
        "cd", "diff", fx("cd1v1.cd"), fx("cd1v2.cd"),
        "--max-witnesses", "2", "--format", "dot",
    )
    assert code == 1
    assert out.count("digraph") == 2
    from semdiff.render import validate_dot

    for chunk in out.split("\n\n"):
        if chunk.strip():
            validate_dot(chunk if chunk.endswith("\n") else chunk + "\n")


def test_cd_compare_verdict_lines():
    code, out, _ = go("cd", "compare", fx("cd5v1.cd"), fx("cd5v2.cd"))
    assert (code, out) == (0, "EQUIVALENT (bounded k=3)\n")
    code, out, _ = go("cd", "compare", fx("cd1v1.cd"), fx("cd1v2.cd"))
    assert (code, out) == (1, "INCOMPARABLE (bounded k=3)\n")
    code, out, _ = go("cd", "compare", fx("cd5v1.cd"), fx("cd5v2.cd"), "--bound", "4")
    assert (code, out) == (0, "EQUIVALENT (bounded k=4)\n")


def test_ad_diff_text_output():
    code, out, err = go("ad", "diff", fx("adv3.ad"), fx("adv4.ad"))
    assert (code, err) == (1, "")
    assert out == (
        "1 witness (exhausted)\n"
        "witness 1:\n"
        "inputs: isInternal=false\n"
        "  1. register\n"
        "  2. assignExternalProject\n"
        "  3. authorizePayments\n"
    )


def test_ad_diff_identity_is_clean():
    code, out, err = go("ad", "diff", fx("adv2.ad"), fx("adv2.ad"))
    assert (code, err) == (0, "")
    assert out == "no witnesses (exhausted)\n"


def test_ad_diff_json_document():
    code, out, _ = go("ad", "diff", fx("adv3.ad"), fx("adv4.ad"), "--format", "json")
    assert code == 1
    assert json.loads(out) == {
        "direction": "AtoB",
        "exhausted": True,
        "bound": None,
        "witnesses": [
            {
                "inputs": {"isInternal": "false"},
                "actions": ["register", "assignExternalProject", "authorizePayments"],
            }
        ],
    }


def test_ad_diff_max_len_appears_as_bound():
    code, out, _ = go(
        "ad", "diff", fx("adv2.ad"), fx("adv3.ad"), "--max-len", "5", "--format", "json"
    )
    document = json.loads(out)
    assert (code, document["bound"], document["exhausted"]) == (0, 5, False)


def test_ad_compare_verdicts():
    code, out, _ = go("ad", "compare", fx("adv2.ad"), fx("adv3.ad"))
    assert (code, out) == (1, "RIGHT_REFINES_LEFT\n")
    code, out, _ = go("ad", "compare", fx("adv1.ad"), fx("adv1.ad"))
    assert (code, out) == (0, "EQUIVALENT\n")


def test_history_table():
    code, out, err = go(
        "history", "ad", fx("adv1.ad"), fx("adv2.ad"), fx("adv3.ad"), fx("adv4.ad")
    )
    assert (code, err) == (1, "")
    assert out == (
        "from     to       verdict             forward  backward\n"
        "adv1.ad  adv2.ad  INCOMPARABLE        2        6\n"
        "adv2.ad  adv3.ad  RIGHT_REFINES_LEFT  4        0\n"
        "adv3.ad  adv4.ad  INCOMPARABLE        1        1\n"
    )


def test_history_json():
    code, out, _ = go(
        "history", "ad", fx("adv2.ad"), fx("adv3.ad"), "--format", "json"
    )
    assert code == 1
    assert json.loads(out) == {
        "rows": [
            {
                "from": "adv2.ad",
                "to": "adv3.ad",
                "verdict": "RIGHT_REFINES_LEFT",
                "forward": 4,
                "backward": 0,
            }
        ]
    }


def test_history_mirror_swaps_refinement():
    forward = history_report([fx("adv2.ad"), fx("adv3.ad")], "ad")
    backward = history_report([fx("adv3.ad"), fx("adv2.ad")], "ad")
    (f,) = forward.rows
    (b,) = backward.rows
    assert str(f.verdict) == "RIGHT_REFINES_LEFT"
    assert str(b.verdict) == "LEFT_REFINES_RIGHT"
    assert (f.forward, f.backward) == (b.backward, b.forward)


def test_history_palindrome_mirrors_rows():
    report = history_report([fx("adv2.ad"), fx("adv3.ad"), fx("adv2.ad")], "ad")
    first, second = report.rows
    assert str(first.verdict) == "RIGHT_REFINES_LEFT"
    assert str(second.verdict) == "LEFT_REFINES_RIGHT"
    assert (first.forward, first.backward) == (second.backward, second.forward)


def test_history_all_equivalent_exits_zero():
    code, out, _ = go("history", "cd", fx("cd5v1.cd"), fx("cd5v2.cd"))
    assert code == 0
    assert "EQUIVALENT" in out


def test_render_om(tmp_path):
    source = "objectmodel tiny {\n  e1: Employee;\n}\n"
    path = tmp_path / "tiny.om"
    path.write_text(source)
    code, out, err = go("render", "om", str(path))
    assert (code, out, err) == (0, source, "")
    code, out, _ = go("render", "om", str(path), "--format", "json")
    assert code == 0
    assert json.loads(out) == {
        "objects": [{"id": "e1", "class": "Employee"}],
        "links": [],
    }
    code, out, _ = go("render", "om", str(path), "--format", "dot")
    assert code == 0 and out.startswith('digraph "tiny" {')


def test_render_trace(tmp_path):
    path = tmp_path / "w.trace"
    path.write_text(
        "inputs: isInternal=false\n"
        "  1. register\n  2. assignExternalProject\n  3. authorizePayments\n"
    )
    code, out, err = go("render", "trace", fx("adv1.ad"), str(path))
    assert (code, err) == (0, "")
    assert out == path.read_text()
    code, out, _ = go("render", "trace", fx("adv1.ad"), str(path), "--format", "dot")
    assert code == 0
    assert 'label="register [1]"' in out


def error_invocations():
    return [
        (("cd", "diff", "/nonexistent.cd", fx("cd1v1.cd")), "No such file"),
        (("cd", "diff", fx("adv1.ad"), fx("cd1v1.cd")), "expected 'classdiagram'"),
        (("ad", "diff", fx("cd1v1.cd"), fx("adv1.ad")), "expected 'activity'"),
        (("render", "om", fx("cd1v1.cd")), "expected 'objectmodel'"),
        (("cd", "diff", fx("cd1v1.cd"), fx("cd1v2.cd"), "--bound", "-1"),
         "--bound must be >= 0"),
        (("cd", "diff", fx("cd1v1.cd"), fx("cd1v2.cd"), "--max-witnesses", "0"),
         "--max-witnesses must be >= 1"),
        (("ad", "diff", fx("adv1.ad"), fx("adv2.ad"), "--max-len", "-2"),
         "--max-len must be >= 0"),
        (("history", "cd", fx("cd1v1.cd")), "at least two files"),
        (("history", "cd", fx("cd1v1.cd"), fx("adv1.ad")), "adv1.ad"),
    ]


@pytest.mark.parametrize("argv, fragment", error_invocations())
def test_usage_and_input_errors_exit_two(argv, fragment):
    code, out, err = go(*argv)
    assert code == 2
    assert fragment in err


def test_parse_errors_carry_file_positions():
    code, out, err = go("cd", "diff", fx("adv1.ad"), fx("cd1v1.cd"))
    assert code == 2
    assert err.startswith(f"{fx('adv1.ad')}:4:1: ")


def test_unknown_commands_exit_two(capsys):
    assert go("bogus")[0] == 2
    assert go("cd", "bogus")[0] == 2
    assert go("cd", "diff", "only-one-file")[0] == 2
    capsys.readouterr()  # swallow argparse usage noise


def test_module_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "semdiff", "cd", "compare",
         fx("cd5v1.cd"), fx("cd5v2.cd")],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert result.stdout == "EQUIVALENT (bounded k=3)\n"
