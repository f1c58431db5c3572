import json

import numpy as np
import pytest

from strobo import cli
from strobo.reporting import dumps


def run(capsysbinary, *argv):
    code = cli.main(list(argv))
    out = capsysbinary.readouterr()
    return code, out.out, out.err


def test_spectrum_csv_is_byte_identical(capsysbinary):
    args = ("spectrum", "--model", "osc-a", "--N", "16", "--omega", "2", "--delta", "0.3")
    c1, a, _ = run(capsysbinary, *args)
    c2, b, _ = run(capsysbinary, *args)
    assert c1 == c2 == 0 and a == b
    lines = a.decode().splitlines()
    assert lines[0] == "# schema_version: 1"
    assert lines[1].startswith("# config: ")
    assert lines[2].split(",")[0] == "m"
    assert len(lines) == 3 + 16
    assert max(float(l.split(",")[-1]) for l in lines[3:]) < 1e-10


def test_json_output_has_schema_and_config(capsysbinary):
    code, out, _ = run(capsysbinary, "su2-check", "--s", "2.5", "--omega", "3")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert doc["config"]["s"] == 2.5
    assert doc["result"]["max_residual"] < 1e-10


def test_converge_expands_ellipsis(capsysbinary):
    code, out, _ = run(capsysbinary, "converge", "--model", "osc-b", "--Ns", "32,64,...,512")
    doc = json.loads(out)
    assert doc["result"]["Ns"] == [32, 64, 128, 256, 512]
    assert doc["result"]["accepted"]
    assert doc["result"]["fitted_order"] == pytest.approx(-2, abs=0.05)


def test_svg_is_deterministic(tmp_path, capsysbinary):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for path in (a, b):
        assert cli.main(["converge", "--Ns", "16,32,64", "--format", "svg", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().lstrip().startswith(b"<?xml")


def test_particle_table(capsysbinary):
    code, out, _ = run(capsysbinary, "particle", "--s", "1")
    rows = out.decode().splitlines()[3:]
    assert code == 0 and len(rows) == 27
    header = out.decode().splitlines()[2].split(",")
    i, j = header.index("reduced_energy"), header.index("emergent_energy")
    assert all(float(r.split(",")[i]) == float(r.split(",")[j]) for r in rows)


def test_evolve_tracks_exact_solution(capsysbinary):
    code, out, _ = run(capsysbinary, "evolve", "--clock", "uniform", "--width", "1.5", "--steps", "4", "--N", "16")
    rows = [r.split(",") for r in out.decode().splitlines()[3:]]
    assert code == 0 and len(rows) == 5
    assert max(float(r[-1]) for r in rows) < 1e-10


def test_config_file_and_flag_precedence(tmp_path, capsysbinary):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "spectrum", "format": "json",
                               "parameters": {"N": 8, "omega": 3.0, "model": "osc-a"}}))
    code, out, _ = run(capsysbinary, "spectrum", "--config", str(cfg), "--N", "6")
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["N"] == 6 and doc["config"]["omega"] == 3.0 and doc["config"]["model"] == "osc-a"
    assert len(doc["result"]["rows"]) == 6


@pytest.mark.parametrize("argv", [
    ["spectrum", "--N", "0"],
    ["spectrum", "--omega", "-1"],
    ["spectrum", "--model", "osc-c"],
    ["spectrum", "--format", "svg"],
    ["su2-check", "--s", "0.3"],
    ["converge", "--Ns", "64,32"],
    ["converge", "--Ns", "64,128,...,1000"],
    ["spectrum", "--delta", "nan"],
    ["spectrum", "--unknown", "1"],
])
def test_bad_parameters_exit_2(argv, capsysbinary):
    with pytest.raises(SystemExit) as exc_info:
        code = cli.main(argv)
        raise SystemExit(code)
    assert exc_info.value.code == 2


def test_unknown_config_keys_exit_2(tmp_path, capsysbinary):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"command": "spectrum", "parameters": {"N": 8, "colour": "red"}}))
    code, _, err = run(capsysbinary, "spectrum", "--config", str(cfg))
    assert code == 2 and b"colour" in err
    cfg.write_text(json.dumps({"command": "spectrum", "extra": 1}))
    assert run(capsysbinary, "spectrum", "--config", str(cfg))[0] == 2


def test_resource_failure_exits_3(capsysbinary):
    code, _, err = run(capsysbinary, "spectrum", "--N", "20000", "--solver", "dense")
    assert code == 3 and b"numerical failure" in err


def test_runconfig_direct():
    cfg = cli.RunConfig("particle", {"s": "1.5"})
    assert cfg.parameters["s"] == 1.5 and cfg.format == "csv"
    with pytest.raises(cli.UsageError):
        cli.RunConfig("fly", {})


def test_dumps_formats_special_values():
    text = dumps({"x": float("nan"), "z": 1 + 2j, "a": np.arange(2), "f": 0.1})
    doc = json.loads(text)
    assert doc == {"x": None, "z": {"re": 1, "im": 2}, "a": [0, 1], "f": 0.1}
    assert "0.10000000000000001" in text
