"""Command-line surface: config parsing, artifact emission, exit codes."""

import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracheat.cli import emit_table, main, parse_config
from fracheat.report import VerificationReport
from fracheat.suites import SUITES


class TestParseConfig:
    def test_minimal_config_fills_defaults(self):
        cfg = parse_config('{"N": 1, "s": 0.75, "datum": "cosine:1"}')
        assert cfg.params.dim == 1
        assert cfg.params.s == 0.75
        assert cfg.datum == "cosine:1"
        assert cfg.grid.box == ((-3.0, 3.0),)
        assert cfg.grid.counts == (25,)
        assert cfg.grid.times == (0.25, 1.0)
        assert cfg.suites == tuple(SUITES)
        assert cfg.out == "artifacts"
        assert cfg.seed == 0

    def test_two_dim_default_grid_is_coarser(self):
        cfg = parse_config('{"dim": 2, "s": 0.75, "datum": "ruled:1.2"}')
        assert cfg.grid.counts == (9, 9)
        assert cfg.grid.box == ((-3.0, 3.0), (-3.0, 3.0))

    def test_order_outside_unit_interval_is_rejected(self):
        with pytest.raises(ValueError, match="config field s/dim"):
            parse_config('{"N": 1, "s": 1.2, "datum": "cosine:1"}')

    def test_datum_growing_too_fast_is_rejected(self):
        with pytest.raises(ValueError, match="does not converge"):
            parse_config('{"N": 1, "s": 0.75, "datum": "abs_power:1.6"}')

    def test_unknown_field_is_named(self):
        with pytest.raises(ValueError, match="'bogus' is not recognized"):
            parse_config('{"s": 0.5, "bogus": 1}')

    def test_unknown_suite_is_named(self):
        with pytest.raises(ValueError, match="unknown suite 'nope'"):
            parse_config('{"s": 0.5, "suites": ["nope"]}')

    def test_dim_aliases_must_agree(self):
        with pytest.raises(ValueError, match="N and dim disagree"):
            parse_config('{"N": 1, "dim": 2, "s": 0.5}')

    def test_malformed_json_reports_position(self):
        with pytest.raises(ValueError, match="line 1 column"):
            parse_config('{"s": 0.5,,}')

    def test_non_object_document_is_rejected(self):
        with pytest.raises(ValueError, match="JSON object"):
            parse_config("[1, 2]")

    def test_explicit_grid_is_validated(self):
        with pytest.raises(ValueError, match="config field grid"):
            parse_config('{"s": 0.5, "grid": {"box": [[3, -3]]}}')


class TestEmitTable:
    def test_csv_layout(self, tmp_path):
        path = str(tmp_path / "t.csv")
        emit_table((["a", "b"], [[math.pi, True], [-1.0, False]]), path)
        text = open(path).read()
        assert text == "a,b\n3.1415926535897931,true\n-1,false\n"

    def test_empty_rows_leave_header_only(self, tmp_path):
        path = str(tmp_path / "t.csv")
        emit_table((["x"], []), path)
        assert open(path).read() == "x\n"

    def test_json_is_sorted_and_newline_terminated(self, tmp_path):
        path = str(tmp_path / "t.json")
        emit_table({"b": 1, "a": [2.5, "s"]}, path, format="json")
        text = open(path).read()
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"b": 1, "a": [2.5, "s"]}

    def test_identical_data_identical_bytes(self, tmp_path):
        p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        data = (["v"], [[0.1 + 0.2]])
        emit_table(data, p1)
        emit_table(data, p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_unknown_format_is_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="csv or json"):
            emit_table((["x"], []), str(tmp_path / "t"), format="xml")

    def test_unwritable_path_names_the_file(self, tmp_path):
        blocker = tmp_path / "f"
        blocker.write_text("")
        target = str(blocker / "sub" / "t.csv")
        with pytest.raises(OSError, match="t.csv"):
            emit_table((["x"], []), target)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_float_cells_round_trip_exactly(self, value):
        # 17 significant digits reproduce every double exactly
        buf = io.StringIO()
        emit_csv = "%.17g" % value
        buf.write(emit_csv)
        assert float(buf.getvalue()) == value


def _failing_suite(cfg):
    rep = VerificationReport(suite="alwaysfail")
    rep.add(name="boom", measured=1.0, bound=0.0, tolerance=0.0, passed=False)
    return rep


class TestVerifyCommand:
    def test_passing_suite_exits_zero_and_writes_artifacts(self, tmp_path, capsys):
        out = tmp_path / "art"
        code = main(["verify", "derivative-recursion", "--out", str(out)])
        assert code == 0
        assert "[PASS]" in capsys.readouterr().out
        report = VerificationReport.from_json(
            (out / "derivative-recursion.json").read_text()
        )
        assert report.overall_pass
        rows = list(csv.reader(open(out / "derivative-recursion.csv")))
        assert rows[0] == ["name", "measured", "bound", "tolerance", "passed", "worst_point"]
        assert len(rows) == len(report.records) + 1

    def test_failing_suite_exits_one(self, tmp_path, monkeypatch):
        monkeypatch.setitem(SUITES, "alwaysfail", _failing_suite)
        code = main(["verify", "alwaysfail", "--out", str(tmp_path / "a")])
        assert code == 1
        data = json.loads((tmp_path / "a" / "alwaysfail.json").read_text())
        assert data["overall_pass"] is False

    def test_config_error_exits_two(self, tmp_path, capsys):
        code = main(["verify", "definiteness", "--s", "1.2", "--out", str(tmp_path)])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_flags_override_config_file(self, tmp_path):
        cfg_file = tmp_path / "c.json"
        cfg_file.write_text('{"s": 0.6, "datum": "cosine:1"}')
        code = main(
            ["verify", "definiteness", "--config", str(cfg_file), "--s", "1.5",
             "--out", str(tmp_path / "o")]
        )
        assert code == 2

    def test_reruns_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["verify", "derivative-recursion", "--out", str(out)]) == 0
        for name in ("derivative-recursion.json", "derivative-recursion.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_help_documents_the_datum_grammar(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "abs_power:power" in text
        assert "piecewise_linear_1d:left_slope" in text


class TestKernelCommand:
    def test_eval_csv_layout_and_half_order_value(self, capsys):
        code = main(["kernel", "eval", "--dim", "1", "--s", "0.5",
                     "--x", "0;1", "--t", "1"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["N", "s", "x1", "t", "p", "g1", "p_t",
                           "ratio_lower", "ratio_upper"]
        assert len(rows) == 3
        origin = [float(v) for v in rows[1]]
        assert origin[4] == pytest.approx(1.0 / math.pi, abs=1e-12)
        assert origin[5] == 0.0
        # ratio interval must be positive and ordered
        assert 0.0 < origin[7] <= origin[8]

    def test_eval_two_dim_point_parsing(self, capsys):
        code = main(["kernel", "eval", "--dim", "2", "--s", "0.5",
                     "--x", "0,0; 1,1", "--t", "0.5,2"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0][:5] == ["N", "s", "x1", "x2", "t"]
        assert len(rows) == 5

    def test_table_goes_to_file(self, tmp_path):
        path = tmp_path / "tab.csv"
        assert main(["kernel", "table", "--dim", "1", "--s", "0.75",
                     "--out", str(path)]) == 0
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["r", "value"]
        assert float(rows[1][0]) == 0.0
        assert all(float(r[1]) > 0.0 for r in rows[1:])

    def test_verify_bounds_passes(self, capsys):
        assert main(["kernel", "verify-bounds", "--dim", "1", "--s", "0.6"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["overall_pass"] is True

    def test_wrong_coordinate_count_exits_two(self, capsys):
        code = main(["kernel", "eval", "--dim", "2", "--s", "0.5", "--x", "1"])
        assert code == 2
        assert "coordinates" in capsys.readouterr().err


class TestFraclapCommand:
    def test_eval_reports_the_eigenvalue_identity(self, capsys):
        assert main(["fraclap", "eval", "--function", "cosine:1",
                     "--s", "0.6", "--x", "0.5"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["value"] == pytest.approx(math.cos(0.5), abs=1e-9)
        assert data["near_part"] + data["tail_part"] == pytest.approx(
            data["value"], abs=1e-12
        )
        assert data["error_estimate"] >= 0.0

    def test_classify_constant(self, capsys):
        assert main(["fraclap", "classify", "--function", "constant:2",
                     "--s", "0.6"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["outcome"] == "identically-zero"

    def test_vanish_check_control_fails(self, capsys):
        code = main(["fraclap", "vanish-check", "--function", "cosine:1",
                     "--s", "0.75", "--radii", "1,100"])
        assert code == 1
        data = json.loads(capsys.readouterr().out)
        assert data["overall_pass"] is False


class TestSolveCommand:
    def test_artifacts_and_determinism(self, tmp_path):
        argv = ["solve", "--datum", "cosine:1", "--s", "0.6",
                "--grid=-1:1:5", "--times", "0.5", "--out"]
        assert main(argv + [str(tmp_path / "r1")]) == 0
        assert main(argv + [str(tmp_path / "r2")]) == 0
        sol = (tmp_path / "r1" / "solution.csv").read_bytes()
        assert sol == (tmp_path / "r2" / "solution.csv").read_bytes()
        man = (tmp_path / "r1" / "manifest.json").read_bytes()
        assert man == (tmp_path / "r2" / "manifest.json").read_bytes()

        rows = list(csv.reader(io.StringIO(sol.decode())))
        assert rows[0] == ["t", "x1", "u", "err_est"]
        assert len(rows) == 6
        # the middle node sits at the origin, where u = exp(-t)
        mid = [float(v) for v in rows[3]]
        assert mid[1] == 0.0
        assert mid[2] == pytest.approx(math.exp(-0.5), abs=1e-4)
        assert mid[3] >= 0.0

        manifest = json.loads(man.decode())
        assert manifest["params"] == {"dim": 1, "s": 0.6}
        assert manifest["residual"]["max_abs"] <= 1e-3
        assert manifest["residual"]["samples"][0]["t"] == 0.5
        assert "amplitudes" in manifest["envelope"]

    def test_grid_syntax_error_exits_two(self, tmp_path, capsys):
        code = main(["solve", "--datum", "cosine:1", "--s", "0.6",
                     "--grid", "oops", "--times", "0.5",
                     "--out", str(tmp_path)])
        assert code == 2
        assert "lo:hi:count" in capsys.readouterr().err


class TestBenchCommand:
    def test_bench_reports_positive_timings(self, capsys):
        assert main(["bench"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["operation", "repetitions", "seconds_per_call"]
        assert len(rows) >= 4
        assert all(float(r[2]) > 0.0 for r in rows[1:])
