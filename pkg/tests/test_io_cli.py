import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qslkit.cli import main
from qslkit.errors import ValidationError
from qslkit.io import dump_state, dumps, format_number, loads_state, to_csv
from qslkit.saturation import saturating_state
from qslkit.spectrum import ContinuousSpectrum, build_state

from conftest import states


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def write_state(tmp_path, levels, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"levels": [{"energy": e, "weight": w} for e, w in levels]}))
    return str(path)


# -- serialization ---------------------------------------------------------------------

def test_number_format():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(math.inf) == '"inf"'
    assert format_number(-math.inf) == '"-inf"'
    assert format_number(True) == "true"
    assert json.loads(dumps({"a": [1.5, math.inf, None]})) == {"a": [1.5, "inf", None]}


@given(state=states())
def test_state_round_trip_bit_exact(state):
    again = loads_state(dump_state(state))
    assert np.array_equal(again.energies, state.energies)
    assert np.array_equal(again.weights, state.weights)
    assert dump_state(again) == dump_state(state)


@given(p=st.floats(0.05, 1.0), se=st.floats(0.0, 0.9), scale=st.floats(0.1, 10.0))
def test_saturating_state_round_trip(p, se, scale):
    st_ = saturating_state(p, se * se, scale=scale).state(name="sat")
    again = loads_state(dump_state(st_))
    assert again == st_ and again.name == "sat"


def test_continuous_document():
    doc = '{"density": [{"energy": 0, "rho": 1}, {"energy": 1, "rho": 1}]}'
    assert isinstance(loads_state(doc), ContinuousSpectrum)


@pytest.mark.parametrize("text", [
    "{not json", "[]", '{"levels": 3}', '{"levels": [{"energy": 0}]}',
    '{"levels": [{"energy": "x", "weight": 1}]}',
    '{"levels": [{"energy": 0, "weight": 0.5}]}',
    '{"levels": [], "density": []}', '{"name": 3, "levels": []}', "{}",
])
def test_malformed_documents(text):
    with pytest.raises(ValidationError):
        loads_state(text)


def test_csv_inf_and_empty():
    text = to_csv([{"a": math.inf, "b": None, "c": True}], ["a", "b", "c"])
    assert text == "a,b,c\ninf,,true\n"


# -- compute ---------------------------------------------------------------------------

def test_compute_all_two_level(tmp_path):
    path = write_state(tmp_path, [(0, 0.5), (1, 0.5)])
    code, out = run(["compute", "--state", path, "--sqrt-fidelity", "0", "--bound", "all",
                     "--format", "json"])
    assert code == 0
    recs = json.loads(out)
    assert [r["kind"] for r in recs] == ["MT", "ML", "DualML", "LZ", "LC", "CZ"]
    for r in recs:
        assert r["value"] == pytest.approx(3.1416, rel=5e-5)


def test_compute_divergent_record(tmp_path):
    path = write_state(tmp_path, [(0, 0.3), (1, 0.6), (2, 0.1)])
    code, out = run(["compute", "--state", path, "--sqrt-fidelity", "0.19", "--bound", "cz",
                     "--optimize-p", "--format", "json"])
    assert code == 0
    (rec,) = json.loads(out)
    assert rec["divergent"] is True and rec["value"] == "inf"


def test_compute_fixed_p_and_theta():
    code, out = run(["compute", "--builtin", "g", "--sqrt-fidelity", "0.35", "--bound", "cz",
                     "--p", "1", "--theta", "-0.1", "--format", "json"])
    (rec,) = json.loads(out)
    assert rec["value"] == pytest.approx(0.7577, rel=5e-4)
    assert rec["value_at_theta"] <= rec["value"]


def test_compute_chau():
    code, out = run(["compute", "--builtin", "d", "--sqrt-fidelity", "0.1", "--bound", "chau",
                     "--format", "json"])
    assert json.loads(out)[0]["value"] == pytest.approx(12.4204, rel=5e-5)


def test_compute_deterministic_json_and_csv():
    for fmt in ("json", "csv"):
        argv = ["compute", "--builtin", "g", "--sqrt-fidelity", "0.15", "--format", fmt,
                "--no-timing"]
        assert run(argv)[1] == run(argv)[1]


def test_compute_pretty():
    code, out = run(["compute", "--builtin", "a", "--sqrt-fidelity", "0"])
    assert code == 0 and out.splitlines()[0].startswith("kind")


@pytest.mark.parametrize("argv", [
    ["compute", "--builtin", "a", "--sqrt-fidelity", "0", "--bound", "lc"],
    ["compute", "--builtin", "a", "--sqrt-fidelity", "0", "--bound", "lc", "--p", "1",
     "--optimize-p"],
    ["compute", "--builtin", "a", "--sqrt-fidelity", "0", "--bound", "lc", "--p", "3"],
    ["compute", "--builtin", "zz", "--sqrt-fidelity", "0"],
    ["compute", "--state", "/nonexistent.json", "--sqrt-fidelity", "0"],
])
def test_compute_input_errors(argv):
    assert run(argv)[0] == 2


def test_malformed_json_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{levels: ")
    assert run(["compute", "--state", str(path), "--sqrt-fidelity", "0"])[0] == 2


def test_continuous_state_rejected(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"density": [{"energy": 0, "rho": 1}, {"energy": 1, "rho": 1}]}')
    assert run(["compute", "--state", str(path), "--sqrt-fidelity", "0"])[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--builtin", "a", "--sqrt-fidelity", "1.5"])
    assert exc.value.code == 2


# -- saturate / verify ---------------------------------------------------------------

def test_saturate_then_verify(tmp_path):
    target = tmp_path / "sat.json"
    code, _ = run(["saturate", "--p", "0.5", "--sqrt-fidelity", "0", "--e-r", "0",
                   "--scale", "1", "--output", str(target)])
    assert code == 0
    doc = json.loads(target.read_text())
    code, out = run(["verify", "--state", str(target), "--sqrt-fidelity", "0",
                     "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    tau = rep["oracle"]["tau_first"]
    assert tau == pytest.approx(doc["predicted_tau"], rel=1e-8)
    cz = next(r for r in rep["bounds"] if r["kind"] == "CZ")
    assert abs(cz["value"] - tau) / tau <= 1e-8


def test_saturate_stdout_round_trips():
    code, out = run(["saturate", "--p", "0.7", "--sqrt-fidelity", "0.2", "--theta", "0.05"])
    assert code == 0
    st_ = loads_state(out)
    ref = saturating_state(0.7, 0.2**2, 0.05).state()
    assert np.array_equal(st_.energies, ref.energies)
    assert np.array_equal(st_.weights, ref.weights)


@pytest.mark.parametrize("argv", [["saturate", "--p", "2", "--sqrt-fidelity", "0.5"],
                                  ["saturate", "--p", "1.9", "--sqrt-fidelity", "0"]])
def test_saturate_not_saturable(argv):
    assert run(argv)[0] == 5


def test_verify_uniform_2048():
    code, out = run(["verify", "--builtin", "b", "--sqrt-fidelity", "0", "--horizon", "10",
                     "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert rep["oracle"]["tau_first"] == pytest.approx(0.0030680, rel=1e-4)
    assert all(r["dominated"] for r in rep["bounds"])


def test_verify_two_level_includes_closed_form():
    code, out = run(["verify", "--builtin", "a", "--sqrt-fidelity", "0.3", "--format", "csv",
                     "--no-timing"])
    assert code == 0 and "CZ2D" in out


# -- table ---------------------------------------------------------------------------

def test_table_check_reports_known_conflicts_only(capsys):
    buf = io.StringIO()
    code = main(["table", "--check", "--format", "json", "--no-timing"], out=buf)
    doc = json.loads(buf.getvalue())
    bad = [c for c in doc["cells"] if c.get("status") == "fail"]
    conflicts = [c for c in doc["cells"] if c.get("status") == "known-conflict"]
    assert bad == []
    assert {c["case"] for c in conflicts} == {"c", "d"}
    assert code == (0 if doc["check"]["passed"] else 4)
    assert "table check" in capsys.readouterr().err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qslkit.cli", "compute", "--builtin", "a",
                           "--sqrt-fidelity", "0", "--bound", "mt", "--format", "csv",
                           "--no-timing"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("MT,3.14159265358979")
