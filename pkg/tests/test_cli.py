import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qboson import DeformationParameter, ModePoint, Variant, deformed_distribution_zpe
from qboson.cli import (
    EXIT_DOMAIN,
    EXIT_IO,
    EXIT_OK,
    EXIT_VERIFICATION,
    KELVIN_PER_EV,
    ROW_COLUMNS,
    build_row,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_eval_csv_basic(capsys):
    code, out, err = run_cli(capsys, "eval", "--x", "1.0", "--gamma", "0.1")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert len(rows) == 1
    assert list(rows[0]) == list(ROW_COLUMNS)
    assert rows[0]["variant"] == "deformed-zpe"
    f = deformed_distribution_zpe(
        ModePoint(1.0, DeformationParameter.from_gamma(0.1))).value
    assert float(rows[0]["f"]) == f  # .17g survives the round trip
    assert rows[0]["regime"] == "Intermediate"
    assert rows[0]["deviation_from_asymptote"] == ""


def test_eval_trivial_undeformed_value(capsys):
    code, out, _ = run_cli(capsys, "eval", "--x", "0.693147", "--gamma", "0",
                           "--variant", "undeformed-zpe")
    assert code == EXIT_OK
    f = float(parse_csv(out)[0]["f"])
    assert f == pytest.approx(1.5, abs=1e-6)


def test_eval_json_single_object(capsys):
    code, out, _ = run_cli(capsys, "eval", "--x", "1", "--q", "1.1",
                           "--format", "json")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert isinstance(obj, dict)
    assert obj["variant"] == "deformed-zpe"
    assert obj["f"] == pytest.approx(1.0911090275059306, rel=1e-12)
    assert obj["deviation_from_asymptote"] is None


def test_eval_unit_conversion_metadata(capsys):
    code, out, _ = run_cli(capsys, "eval", "--hbar-omega-ev", "0.025",
                           "--temperature-k", "290", "--format", "json")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert obj["x"] == 0.025 * KELVIN_PER_EV / 290.0
    meta = obj["metadata"]
    assert meta["hbar_omega_ev"] == 0.025
    assert meta["kelvin_per_ev"] == KELVIN_PER_EV
    # CSV carries the same conversion as a comment line
    code, out, _ = run_cli(capsys, "eval", "--hbar-omega-ev", "0.025",
                           "--temperature-k", "290")
    assert out.startswith("# hbar_omega_ev=")


def test_eval_pole_exits_nonzero(capsys):
    code, out, err = run_cli(capsys, "eval", "--x", "0.05", "--gamma", "0.1")
    assert code == EXIT_DOMAIN
    assert "x must exceed gamma" in err


def test_eval_usage_errors(capsys):
    code, _, err = run_cli(capsys, "eval", "--x", "1", "--hbar-omega-ev", "2",
                           "--temperature-k", "300")
    assert code == EXIT_DOMAIN and "not both" in err
    code, _, err = run_cli(capsys, "eval", "--x", "1", "--gamma", "0.1",
                           "--q", "1.1")
    assert code == EXIT_DOMAIN
    code, _, err = run_cli(capsys, "eval")
    assert code == EXIT_DOMAIN
    code, _, err = run_cli(capsys, "eval", "--x", "1", "--variant", "bogus")
    assert code == EXIT_DOMAIN
    code, _, err = run_cli(capsys, "nonsense")
    assert code == EXIT_DOMAIN


def test_scan_cardinality_and_order(capsys):
    code, out, _ = run_cli(capsys, "scan", "--gammas", "0,0.05,0.1",
                           "--x-min", "0.5", "--x-max", "2", "--x-count", "10",
                           "--variants", "undeformed-zpe,deformed-zpe")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert len(rows) == 3 * 10 * 2
    gammas = [float(r["gamma"]) for r in rows]
    assert gammas == sorted(gammas)  # gamma-major
    for i in range(0, len(rows), 20):
        xs = [float(r["x"]) for r in rows[i:i + 20:2]]
        assert xs == sorted(xs)  # x ascending inside each gamma block


def test_scan_gamma_zero_matches_undeformed(capsys):
    code, out, _ = run_cli(capsys, "scan", "--gammas", "0", "--x-min", "0.5",
                           "--x-max", "5", "--x-count", "5",
                           "--variants", "undeformed-zpe,deformed-zpe")
    rows = parse_csv(out)
    by_x = {}
    for r in rows:
        by_x.setdefault(r["x"], {})[r["variant"]] = r["f"]
    for pair in by_x.values():
        # last-ulp agreement: the two closed forms round differently
        assert float(pair["undeformed-zpe"]) == pytest.approx(
            float(pair["deformed-zpe"]), rel=1e-15)


def test_scan_null_rows_have_reason(capsys):
    code, out, _ = run_cli(capsys, "scan", "--gammas", "0.3", "--x-min", "0.1",
                           "--x-max", "1", "--x-count", "4",
                           "--variants", "deformed-zpe,undeformed-no-zpe")
    assert code == EXIT_OK
    rows = parse_csv(out)
    null_rows = [r for r in rows if r["f"] == ""]
    assert null_rows, "sweep crossing the pole must emit null rows"
    for r in null_rows:
        assert r["variant"] == "deformed-zpe"
        assert r["reason"] == "x-not-above-gamma"
        assert r["beta_u_per_n"] == "" and r["ln_z_per_mode"] == ""
    # the undeformed variant evaluates but regime diagnostics do not
    undeformed_below = [r for r in rows
                        if r["variant"] == "undeformed-no-zpe"
                        and float(r["x"]) <= 0.3]
    assert undeformed_below
    for r in undeformed_below:
        assert r["f"] != ""
        assert r["regime"] == ""
        assert r["reason"] == "regime-undefined-x-not-above-gamma"


def test_scan_deformed_no_zpe_reason(capsys):
    code, out, _ = run_cli(capsys, "scan", "--gammas", "0.1", "--x-min", "1",
                           "--x-max", "2", "--x-count", "2",
                           "--variants", "deformed-no-zpe")
    rows = parse_csv(out)
    for r in rows:
        assert r["ln_z_per_mode"] == ""
        assert "ln-z-undefined-for-deformed-no-zpe" in r["reason"]
        assert r["f"] != ""


def test_scan_json_csv_identical_values(capsys):
    args = ("scan", "--gammas", "0,0.1", "--x-min", "0.5", "--x-max", "8",
            "--x-count", "7")
    code, csv_out, _ = run_cli(capsys, *args)
    code2, json_out, _ = run_cli(capsys, *args, "--format", "json")
    assert code == code2 == EXIT_OK
    csv_rows = parse_csv(csv_out)
    json_rows = json.loads(json_out)
    assert isinstance(json_rows, list)
    assert len(csv_rows) == len(json_rows)
    for cr, jr in zip(csv_rows, json_rows):
        for col in ROW_COLUMNS:
            cell = cr[col]
            val = jr[col]
            if cell == "":
                assert val is None
            elif col in ("variant", "regime", "reason"):
                assert cell == val
            else:
                # bit-exact numeric round trip through both formats
                assert float(cell) == val


def test_scan_high_t_trend(capsys):
    code, out, _ = run_cli(capsys, "scan", "--gammas", "1e-6",
                           "--x-min", "1e-3", "--x-max", "10",
                           "--x-count", "8", "--variants", "deformed-zpe")
    rows = parse_csv(out)
    devs = [abs(float(r["beta_u_per_n"]) - 1.0) for r in rows]
    assert devs == sorted(devs)  # smallest x closest to the classical value
    assert devs[0] <= 1e-5


def test_limits_report(capsys):
    code, out, _ = run_cli(capsys, "limits")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert len(rows) == 3 * 2  # default three gammas, two probes each
    high = rows[0]
    assert high["regime"] == "HighT"
    assert float(high["deviation_from_asymptote"]) <= 1e-5
    low = rows[1]
    assert low["regime"] == "LowT"
    assert float(low["deviation_from_asymptote"]) <= 1e-12


def test_limits_flags_large_gamma(capsys):
    code, out, _ = run_cli(capsys, "limits", "--gammas", "0.5",
                           "--x-min", "0.6")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert "small-deformation-condition-violated" in rows[0]["reason"]
    assert rows[1]["reason"] == ""  # gamma=0.5 is small against x=50


def test_verify_default_grid_passes(capsys):
    code, out, _ = run_cli(capsys, "verify")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert all(r["pass"] == "true" for r in rows)


def test_verify_json_schema(capsys):
    code, out, _ = run_cli(capsys, "verify", "--gammas", "0.1",
                           "--x-count", "3", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["overall_pass"] is True
    assert {"name", "point", "residual", "tolerance", "pass"} == \
        set(report["checks"][0])


def test_verify_negative_control(capsys):
    code, out, _ = run_cli(capsys, "verify", "--gammas", "0.1",
                           "--x-count", "3",
                           "--tolerance", "beta-derivative=1e-16")
    assert code == EXIT_VERIFICATION
    rows = parse_csv(out)
    assert any(r["pass"] == "false" for r in rows)


def test_verify_empty_grid(capsys):
    code, out, _ = run_cli(capsys, "verify", "--grid", "empty")
    assert code == EXIT_OK
    assert parse_csv(out) == []
    code, _, err = run_cli(capsys, "verify", "--grid", "empty",
                           "--gammas", "0.1")
    assert code == EXIT_DOMAIN


def test_verify_bad_tolerance_args(capsys):
    code, _, err = run_cli(capsys, "verify", "--tolerance", "nope=1")
    assert code == EXIT_DOMAIN and "unknown tolerance" in err
    code, _, err = run_cli(capsys, "verify", "--tolerance", "beta-derivative")
    assert code == EXIT_DOMAIN
    code, _, err = run_cli(capsys, "verify",
                           "--tolerance", "beta-derivative=abc")
    assert code == EXIT_DOMAIN


def test_output_file_and_io_error(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    code, out, _ = run_cli(capsys, "eval", "--x", "1", "--output", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert target.read_text(encoding="utf-8").startswith("x,gamma,")
    code, _, err = run_cli(capsys, "eval", "--x", "1",
                           "--output", str(tmp_path / "no" / "dir" / "f.csv"))
    assert code == EXIT_IO


def test_figures_rendered(tmp_path, capsys):
    figs = tmp_path / "figs"
    code, _, _ = run_cli(capsys, "scan", "--gammas", "0,0.1", "--x-count",
                         "6", "--figures-dir", str(figs))
    assert code == EXIT_OK
    assert (figs / "scan_distributions.png").stat().st_size > 0
    assert (figs / "scan_internal_energy.png").stat().st_size > 0
    code, _, _ = run_cli(capsys, "limits", "--figures-dir", str(figs))
    assert (figs / "limits_deviations.png").stat().st_size > 0
    code, _, _ = run_cli(capsys, "verify", "--gammas", "0.1", "--x-count",
                         "3", "--figures-dir", str(figs))
    assert (figs / "verification_residuals.png").stat().st_size > 0


def test_build_row_matches_library():
    d = DeformationParameter.from_gamma(0.1)
    row = build_row(1.0, d, Variant.DEFORMED_ZPE)
    assert row.f == deformed_distribution_zpe(ModePoint(1.0, d)).value
    assert row.beta_u_per_n == 1.0 * row.f
    assert row.reason == "no-asymptote-in-intermediate-regime"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qboson", "eval", "--x", "1", "--gamma", "0"],
        capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.startswith("x,gamma,")
