import csv
import io
import math

import pytest

from nhdm.cli import COLUMNS, DEFAULT_RANGES, SweepConfig, UsageError, main, parse_range, run_sweep


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    assert tuple(header) == COLUMNS
    return [dict(zip(header, r)) for r in reader]


class TestParseRange:
    def test_valid(self):
        assert parse_range("-0.5:0.5:11") == (-0.5, 0.5, 11)

    @pytest.mark.parametrize("text", ["1:2", "a:1:3", "0:1:2.5", "0:1:3:4"])
    def test_invalid(self, text):
        with pytest.raises(UsageError):
            parse_range(text)

    @pytest.mark.parametrize("start,stop,count", [(0, 1, 1), (1, 1, 5), (0, math.inf, 3)])
    def test_config_rejects(self, start, stop, count):
        with pytest.raises(UsageError):
            SweepConfig("gdm", start, stop, count)


class TestSweeps:
    @pytest.mark.parametrize("command", list(DEFAULT_RANGES))
    def test_default_ranges_run(self, capsys, command):
        code, out, _ = run(capsys, command)
        assert code == 0
        assert len(rows(out)) == DEFAULT_RANGES[command][2]

    def test_byte_identical_reruns(self, capsys):
        first = run(capsys, "swanson-thermal", "--range", "-0.4:2:7", "--beta", "2")[1]
        second = run(capsys, "swanson-thermal", "--range", "-0.4:2:7", "--beta", "2")[1]
        assert first == second

    def test_reversed_range_is_ascending(self, capsys):
        fwd = run(capsys, "gdm", "--range", "0:1:11")[1]
        rev = run(capsys, "gdm", "--range", "1:0:11")[1]
        assert fwd == rev
        params = [float(r["parameter"]) for r in rows(fwd)]
        assert params == sorted(params)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "gdm.csv"
        code, out, _ = run(capsys, "gdm", "--range", "0:1:5", "--out", str(target))
        assert code == 0 and out == ""
        assert len(rows(target.read_text())) == 5

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, err = run(capsys, "gdm", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 2 and "error" in err

    def test_gdm_purity_minimum(self, capsys):
        data = rows(run(capsys, "gdm", "--range", "0:1:101")[1])
        best = min(data, key=lambda r: float(r["purity"]))
        assert float(best["parameter"]) == pytest.approx(0.2)
        assert float(best["purity"]) == pytest.approx(0.2, abs=1e-12)
        assert all(r["cond_R"] == "inf" and r["region"] == "Exceptional" for r in data)

    def test_rdm1_purity_falls_toward_third(self, capsys):
        data = rows(run(capsys, "swanson-rdm1")[1])
        pur = [float(r["purity"]) for r in data]
        assert all(a <= b + 1e-12 for a, b in zip(pur, pur[1:]))
        assert pur[0] == pytest.approx(1 / 3, abs=1e-3)
        for r in data:
            assert float(r["trace_real"]) == pytest.approx(1.0, abs=1e-9)

    def test_thermal_low_temperature_edge(self, capsys):
        data = rows(run(capsys, "swanson-thermal", "--beta", "2")[1])
        assert float(data[-1]["purity"]) > 0.99
        assert float(data[0]["purity"]) < float(data[-1]["purity"])

    def test_two_state_invariants(self, capsys):
        data = rows(run(capsys, "two-state", "--range", "-0.5:0.5:11", "--time", "1.3")[1])
        for r in data:
            assert float(r["purity"]) == pytest.approx(5 / 9, abs=1e-10)
            assert float(r["entropy_trace"]) == pytest.approx(math.log(3) - 2 / 3 * math.log(2), abs=1e-10)

    def test_two_state_out_of_region(self, capsys):
        code, _, err = run(capsys, "two-state", "--range", "1:2:3")
        assert code == 3 and "OutOfRegion" in err


class TestExceptionalPoint:
    def test_refused_without_flag(self, capsys):
        code, _, err = run(capsys, "swanson-rdm1", "--range", "-0.5:-0.45:6")
        assert code == 2 and "--allow-ep" in err

    def test_allowed_with_flag(self, capsys):
        code, out, _ = run(capsys, "swanson-rdm1", "--range", "-0.5:-0.45:6", "--allow-ep")
        assert code == 0
        first = rows(out)[0]
        assert first["region"] == "Exceptional" and first["cond_R"] == "inf"
        # uniform weights through the generalized state: trace 2/3, tr rho^2 = 2/9
        assert float(first["trace_real"]) == pytest.approx(2 / 3, abs=1e-12)
        assert float(first["purity"]) == pytest.approx(2 / 9, abs=1e-12)

    def test_run_sweep_raises(self):
        with pytest.raises(UsageError):
            run_sweep(SweepConfig("swanson-thermal", -0.5, 0.0, 3))


class TestVerify:
    def test_single_criterion(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "counterexample")
        assert code == 0
        assert out.startswith("PASS [1] counterexample")

    def test_numbers_and_commas(self, capsys):
        code, out, _ = run(capsys, "verify", "--only", "1,2", "--only", "8")
        assert code == 0
        assert [line.split()[1] for line in out.splitlines()] == ["[1]", "[2]", "[8]"]

    def test_verbose_lists_checks(self, capsys):
        out = run(capsys, "verify", "--only", "2", "--verbose")[1]
        assert len(out.splitlines()) > 1

    def test_unknown_criterion(self, capsys):
        code, _, err = run(capsys, "verify", "--only", "nonsense")
        assert code == 2 and "error" in err

    def test_tolerance_override_fails(self, capsys, monkeypatch):
        monkeypatch.setenv("NHDM_TOL", "1e-16")
        code, out, _ = run(capsys, "verify", "--only", "2")
        assert code == 1 and out.startswith("FAIL")

    def test_bad_env_tolerance(self, capsys, monkeypatch):
        monkeypatch.setenv("NHDM_TOL", "abc")
        assert run(capsys, "verify", "--only", "1")[0] == 2

    def test_bad_flag_tolerance(self, capsys):
        assert run(capsys, "verify", "--tol", "-1")[0] == 2
