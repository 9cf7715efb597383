import json

import pandas as pd
import pytest

from hyperwalls import cli
from hyperwalls.cli import run
from hyperwalls.errors import DegenerateFitError


def run_json(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


class TestVerdicts:
    def test_volume_at_n_four(self, capsys):
        report = run_json(capsys, "volume", "--arrangement", "extended", "--n", "4")
        assert report["status"] == "FiniteVolume"
        assert len(report["finite_vertices"]) == 12
        assert report["t_squared"] == "1/3"

    def test_arithmetic_at_n_five(self, capsys):
        report = run_json(capsys, "arithmetic", "--n", "5")
        assert report["verdict"] == "NonArithmetic"
        assert report["failing_cycles"]

    def test_tangent_dimension(self, capsys):
        report = run_json(capsys, "tangent", "--arrangement", "family22", "--t-squared", "16/25")
        assert report["dimension"] == 1
        assert report["mode"] == "Gamma22Slice"

    def test_text_format(self, capsys):
        assert run(["volume", "--n", "6", "--format", "text"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("InfiniteVolume")
        assert "bad edge: {L,M,N}" in out

    def test_scan_with_dash_labels(self, capsys):
        report = run_json(capsys, "scan", "--walls=-0,+1,+3,+5;+1,+3,+5,+7", "--grid", "2/5,11/20,7/10")
        assert len(report["changes"]) == 2
        assert report["grid"] == ["2/5", "11/20", "7/10"]


class TestBadInput:
    @pytest.mark.parametrize("literal", ["1/0", "abc"])
    def test_bad_literal(self, capsys, literal):
        assert run(["tangent", "--t-squared", literal]) == 1
        assert "Error" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert run(["volume", "--no-such-flag"]) == 1

    def test_formal_tangent_refused(self, capsys):
        assert run(["tangent"]) == 1

    def test_two_parameters_refused(self, capsys):
        assert run(["volume", "--n", "4", "--t-squared", "1/3"]) == 1

    def test_csv_needs_a_table(self, capsys):
        assert run(["arithmetic", "--n", "4", "--format", "csv"]) == 1

    def test_svg_only_for_slices(self, capsys):
        assert run(["volume", "--n", "4", "--format", "svg"]) == 1

    def test_missing_arrangement_file(self, capsys, tmp_path):
        assert run(["relations", "--arrangement", f"file:{tmp_path / 'missing.json'}"]) == 1

    def test_failed_fit_is_a_refusal(self, capsys, monkeypatch):
        def refuse(arr, base):
            raise DegenerateFitError("points on wall A are collinear")

        monkeypatch.setattr(cli, "slice_figure", refuse)
        code = run(["slice", "--arrangement", "family22", "--t", "0.8", "--base", "A"])
        assert code == 1
        assert "❌ Error: points on wall A are collinear" in capsys.readouterr().err

    def test_unexpected_failure_is_internal(self, capsys, monkeypatch):
        def crash(arr, base):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli, "slice_figure", crash)
        assert run(["slice", "--arrangement", "family22", "--t", "0.8", "--base", "A"]) == 2
        assert "Internal error" in capsys.readouterr().err


class TestOutputs:
    def test_relations_round_trip_through_a_file(self, capsys, tmp_path):
        path = tmp_path / "p24.json"
        assert run(["relations", "--arrangement", "p24", "--out", str(path)]) == 0
        assert "✓" in capsys.readouterr().out
        first = json.loads(path.read_text())
        again = run_json(capsys, "relations", "--arrangement", f"file:{path}")
        assert again["relations"] == first["relations"]

    def test_csv_keeps_wall_labels(self, capsys, tmp_path):
        path = tmp_path / "relations.csv"
        assert run(["relations", "--arrangement", "p24", "--format", "csv", "--out", str(path)]) == 0
        frame = pd.read_csv(path)
        assert {"A", "G", "H"} <= set(frame["wall"])
        assert frame.shape == (24, 25)

    def test_json_is_reproducible(self, capsys):
        run(["diagram", "--arrangement", "extended", "--n", "4"])
        first = capsys.readouterr().out
        run(["diagram", "--arrangement", "extended", "--n", "4"])
        assert capsys.readouterr().out == first

    def test_slice_svg(self, capsys, tmp_path):
        path = tmp_path / "slice_A.svg"
        code = run(["slice", "--arrangement", "family22", "--t", "0.8", "--base", "A", "--format", "svg",
                    "--out", str(path)])
        assert code == 0
        assert b"<svg" in path.read_bytes()

    def test_limit(self, capsys):
        report = run_json(capsys, "limit")
        assert report["walls"] == 14
        assert report["orthogonal_pairs"] == 24
        assert report["ideal_vertices"] == 12
        assert report["non_right_angles"] == []
