"""End-to-end checks of the command-line surface.

main() is invoked in-process with stdout/stderr captured explicitly so
the tests stay independent of pytest's own capture mode.
"""

import io
import json
import re
from contextlib import redirect_stderr, redirect_stdout

import pytest

from tsr_sim import load, serialize
from tsr_sim.cli import main

FLOAT_17 = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, mutate=None, name="run.json"):
    d = serialize(load())
    if mutate:
        mutate(d)
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


def test_design_stdout_csv_format():
    code, out, err = run_cli(["design"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# tsr-sim ")
    assert any(l.startswith("# parameter_hash = ") for l in lines)
    assert any(l.startswith("# command = design") for l in lines)
    header = [l for l in lines if not l.startswith("#")][0]
    assert header.split(",")[0] == "f_sp_hz"
    row = [l for l in lines if not l.startswith("#")][1].split(",")
    assert len(row) == len(header.split(","))
    for cell in row:
        assert FLOAT_17.match(cell), cell
    assert "tsr-sim design:" in err


def test_design_zero_splitting_warns_but_succeeds():
    code, out, err = run_cli(["design", "--fsp", "0"])
    assert code == 0
    assert "degenerates" in err
    row = [l for l in out.splitlines() if not l.startswith("#")][1].split(",")
    assert float(row[4]) == 0.0


def test_design_above_quarter_fsr_is_config_error():
    code, out, err = run_cli(["design", "--fsp", "40000"])
    assert code == 2
    assert "configuration error" in err


def test_design_overrides_change_solution():
    code, out, _ = run_cli(["design", "--fsp", "500", "--rho-end", "0.9"])
    assert code == 0
    row = [l for l in out.splitlines() if not l.startswith("#")][1].split(",")
    assert float(row[3]) == pytest.approx(0.9)
    assert float(row[0]) == 500.0


def test_doublet_file_output_and_determinism(tmp_path):
    target = tmp_path / "doublet.csv"
    code, _, err = run_cli(["doublet", "--out", str(target)])
    assert code == 0
    first = target.read_bytes()
    code, _, _ = run_cli(["doublet", "--out", str(target)])
    assert target.read_bytes() == first

    text = first.decode()
    peaks = {
        k: float(v)
        for k, v in re.findall(r"# summary\.(f_\w+_hz) = (\S+)", text)
    }
    assert peaks["f_plus_hz"] == pytest.approx(1000.0, rel=0.01)
    assert peaks["f_minus_hz"] == pytest.approx(-peaks["f_plus_hz"])
    data = [l for l in text.splitlines() if not l.startswith("#")]
    assert data[0] == "frequency_hz,buildup"
    assert len(data) == 1 + 1200


def test_doublet_plot_renders_alongside(tmp_path):
    target = tmp_path / "scan.csv"
    code, _, _ = run_cli(["doublet", "--out", str(target), "--plot"])
    assert code == 0
    png = tmp_path / "scan.png"
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_doublet_without_peaks_is_numerical_failure(tmp_path):
    def clip_grid(d):
        d["grid"]["f_min"] = 2000.0
        d["grid"]["f_max"] = 4000.0

    cfg = write_config(tmp_path, clip_grid)
    code, _, err = run_cli(["doublet", "--config", cfg])
    assert code == 3
    assert "numerical failure" in err


def test_nsd_json_output(tmp_path):
    cfg = write_config(tmp_path, lambda d: d["output"].update(format="json"))
    code, out, _ = run_cli(["nsd", "--config", cfg])
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "nsd"
    assert payload["columns"] == ["frequency_hz", "nsd"]
    assert len(payload["rows"]) == 600
    assert payload["parameter_hash"] == load(cfg).parameter_hash()
    assert payload["summary"]["units"] == "phase"
    # keys serialized in sorted order
    assert out.index('"columns"') < out.index('"command"') < out.index('"rows"')


def test_doublet_single_cavity_is_numerical_failure(tmp_path):
    # transparent coupler: one long cavity, no doublet to report
    cfg = write_config(tmp_path, lambda d: d["topology"].update(srm={"R": 0.0}))
    code, _, err = run_cli(["doublet", "--config", cfg])
    assert code == 3
    assert "numerical failure" in err


def test_nsd_zero_r_matches_disabled_squeezing(tmp_path):
    def enable_zero_r(d):
        d["squeezing"].update(enabled=True, r=0.0)

    cfg_a = write_config(tmp_path, name="a.json")
    cfg_b = write_config(tmp_path, enable_zero_r, name="b.json")
    code_a, out_a, _ = run_cli(["nsd", "--config", cfg_a])
    code_b, out_b, _ = run_cli(["nsd", "--config", cfg_b])
    assert code_a == code_b == 0
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("#")]
    assert strip(out_a) == strip(out_b)
    # the configs differ, so the metadata block does too
    assert out_a != out_b


def test_nsd_respects_detuned_sr_config(tmp_path):
    def sr_topo(d):
        d["topology"] = {
            "variant": "detuned_sr",
            "length": 1200.0,
            "recycling": {"R": 0.963, "T": 0.037},
            "resonance_hz": 1000.0,
            "sideband": "lower",
        }
        d["readout"] = {"quadrature_angle": 0.0}
        d["output"]["format"] = "json"

    cfg = write_config(tmp_path, sr_topo)
    code, out, _ = run_cli(["nsd", "--config", cfg])
    assert code == 0
    assert json.loads(out)["summary"]["min_nsd"] > 0


def test_format_flag_overrides_config(tmp_path):
    code, out, _ = run_cli(["nsd", "--format", "json"])
    assert code == 0
    json.loads(out)


def test_compare_csv_columns_and_summary(tmp_path):
    target = tmp_path / "cmp.csv"
    code, _, err = run_cli(["compare", "--out", str(target)])
    assert code == 0
    text = target.read_text()
    data = [l for l in text.splitlines() if not l.startswith("#")]
    assert data[0] == "frequency_hz,nsd_tsr,nsd_sr_upper,nsd_sr_lower"
    m = re.search(r"# summary\.crossover_hz = (\S+)", text)
    assert m and 10.0 < float(m.group(1)) < 100.0
    m = re.search(r"# summary\.max_improvement = (\S+)", text)
    assert m and 1.0 < float(m.group(1)) <= 2.5


def test_compare_rejects_detuned_sr_topology(tmp_path):
    def sr_topo(d):
        d["topology"] = {
            "variant": "detuned_sr",
            "length": 1200.0,
            "recycling": {"R": 0.963, "T": 0.037},
            "resonance_hz": 1000.0,
        }

    cfg = write_config(tmp_path, sr_topo)
    code, _, err = run_cli(["compare", "--config", cfg])
    assert code == 2
    assert "twin-recycling" in err


def test_missing_config_is_io_error():
    code, _, err = run_cli(["nsd", "--config", "/no/such/file.json"])
    assert code == 4
    assert "I/O error" in err


def test_unwritable_output_is_io_error():
    code, _, err = run_cli(["design", "--out", "/no-such-dir/x.csv"])
    assert code == 4


def test_schema_violation_is_config_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"interferometer": {}}')
    code, _, err = run_cli(["nsd", "--config", str(p)])
    assert code == 2
    assert "configuration error" in err


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        run_cli(["--version"])
    assert exc.value.code == 0
