import csv
import io
import json
import subprocess
import sys

import pytest
from scipy.integrate import quad

from sieve_bounds.cli import EXIT_FLAGGED, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def grid_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def area_of_a():
    # 1/4 <= a1 <= 2/5, (1 - a1)/3 <= a2 <= min(a1, 1 - 2 a1)
    f = lambda a: max(0.0, min(a, 1 - 2 * a) - (1 - a) / 3)  # noqa: E731
    return quad(f, 0.25, 0.4, points=[1 / 3])[0]


def test_out_of_range_theta(capsys):
    code, _, err = run(capsys, "compute", "--theta", "0.60")
    assert code == EXIT_USAGE and "outside" in err


def test_unknown_integral(capsys):
    code, _, err = run(capsys, "integral", "BOGUS")
    assert code == EXIT_USAGE and "BOGUS" in err


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--side", "sideways"])
    assert exc.value.code == EXIT_USAGE


def test_integral_json_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "integral", "U_A1", "--theta", "0.52")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["name"] == "U_A1"
    assert doc["value"] == pytest.approx(0.239221, abs=2e-4)
    assert doc["reference"] == 0.239221
    assert doc["metadata"]["policy"]["seed"] == 42
    path = tmp_path / "ua1.csv"
    code, _, _ = run(capsys, "integral", "UA1", "--out", str(path))
    text = path.read_text()
    assert text.startswith("# {") and "U_A1,0.52," in text


def test_integral_mc_path(capsys):
    code, out, _ = run(capsys, "integral", "U_C07", "--samples", "16384")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["value"] == 0.0 and doc["method"] == "QMC"


def test_region_grid_a_area(capsys):
    code, out, _ = run(capsys, "region-grid", "A", "--theta", "0.52", "--grid", "500")
    rows = grid_rows(out)
    assert code == EXIT_OK and rows[0] == ["t1", "t2", "in_region"]
    data = rows[1:]
    assert len(data) == 250000
    frac = sum(int(r[2]) for r in data) / len(data)
    assert frac * 0.25 == pytest.approx(area_of_a(), rel=0.02)


def test_region_grid_h_empty(capsys):
    code, out, _ = run(capsys, "region-grid", "H", "--theta", "0.524", "--grid", "100")
    data = grid_rows(out)[1:]
    assert code == EXIT_OK and len(data) == 100
    assert all(r[1] == "0" for r in data)


def test_region_grid_pins(capsys):
    code, out, _ = run(capsys, "region-grid", "UC01", "--grid", "10", "--pin", "3=0.1", "--pin", "4=0.05")
    assert code == EXIT_OK and grid_rows(out)[0] == ["t1", "t2", "in_region"]
    code, _, err = run(capsys, "region-grid", "UC01", "--grid", "10")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "region-grid", "NOPE")
    assert code == EXIT_USAGE


def test_selftest_default_and_toggle(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == EXIT_OK and "FAIL" not in out
    code, out, _ = run(capsys, "selftest", "--no-eq13-bound-as-printed")
    assert code == EXIT_OK


def test_selftest_injected_fault(capsys):
    code, out, _ = run(capsys, "selftest", "--inject-fault", "gamma")
    assert code == EXIT_FLAGGED and "FAIL gamma matches the branch table" in out


def test_compute_upper_0524(capsys, tmp_path):
    path = tmp_path / "ub.json"
    code, _, _ = run(capsys, "compute", "--theta", "0.524", "--side", "upper", "--samples", "16384",
                     "--method", "mc", "--out", str(path))
    doc = json.loads(path.read_text())
    assert code == EXIT_OK
    assert doc["region_losses"]["H"] == 0.0
    assert doc["metadata"]["thetas"] == [0.524]
    assert {"artifact_version", "config", "policy"} <= doc["metadata"].keys()


def test_env_threads(capsys, monkeypatch):
    monkeypatch.setenv("SIEVE_BOUNDS_THREADS", "zero")
    code, _, err = run(capsys, "integral", "H")
    assert code == EXIT_USAGE and "SIEVE_BOUNDS_THREADS" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sieve_bounds", "--version"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.strip()
