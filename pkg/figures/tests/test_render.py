import csv
import math

import numpy as np
import pytest

from chargefig.figures import FigureSpec, FilterError, reference_line, render
from chargefig.schema import SWEEP_COLUMNS, SchemaError, load_rows


def write_csv(path, rows):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(rows)
    return path


def harmonic_rows():
    rows = []
    for side in ("quantum", "classical"):
        for n in (1, 4, 9, 16, 25):
            gamma = math.sqrt(n)
            ratio = "1" if side == "quantum" else ""
            rows.append([
                "harmonic", side, n, "0.2", "0.001", "", "5.8278", "0.8445",
                "0.1449", f"{gamma:.12g}", ratio, "1e-15", "1e-12", "", "ok",
            ])
    # one failed row that must be ignored by every renderer
    rows.append(["harmonic", "quantum", 36, "0.2", "0.001", "", "", "", "",
                 "", "", "", "", "", "error: synthetic"])
    return rows


@pytest.fixture
def harmonic_csv(tmp_path):
    return write_csv(tmp_path / "harmonic.csv", harmonic_rows())


class TestSchema:
    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            load_rows(tmp_path / "nope.csv")

    def test_wrong_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaError, match="schema"):
            load_rows(bad)

    def test_non_ok_rows_dropped(self, harmonic_csv):
        rows = load_rows(harmonic_csv)
        assert all(r["status"] == "ok" for r in rows)
        assert len(rows) == 10


class TestRender:
    def test_writes_png_and_svg(self, harmonic_csv, tmp_path):
        spec = FigureSpec(str(harmonic_csv), "gamma_vs_N", str(tmp_path / "fig"),
                          model="harmonic", side="quantum", ref_slope=0.5)
        paths = render(spec)
        assert [p.suffix for p in paths] == [".png", ".svg"]
        assert all(p.exists() and p.stat().st_size > 0 for p in paths)

    def test_rerender_is_byte_identical(self, harmonic_csv, tmp_path):
        spec = FigureSpec(str(harmonic_csv), "gamma_vs_N", str(tmp_path / "fig"),
                          model="harmonic", side="quantum", ref_slope=0.5)
        first = [p.read_bytes() for p in render(spec)]
        second = [p.read_bytes() for p in render(spec)]
        assert first == second

    def test_empty_selection_errors_before_writing(self, harmonic_csv, tmp_path):
        out = tmp_path / "fig"
        spec = FigureSpec(str(harmonic_csv), "gamma_vs_N", str(out),
                          model="dicke")
        with pytest.raises(FilterError):
            render(spec)
        assert not out.with_suffix(".png").exists()

    def test_ratio_figure_needs_ratio_column(self, harmonic_csv, tmp_path):
        # classical rows carry no ratio value: selection must come up empty
        spec = FigureSpec(str(harmonic_csv), "R_vs_N", str(tmp_path / "fig"),
                          model="harmonic", side="classical")
        with pytest.raises(FilterError):
            render(spec)

    def test_unknown_figure_id_rejected(self, harmonic_csv, tmp_path):
        with pytest.raises(ValueError, match="figure id"):
            FigureSpec(str(harmonic_csv), "bogus", str(tmp_path / "f"))

    def test_bad_ref_slope_rejected(self, harmonic_csv, tmp_path):
        with pytest.raises(ValueError, match="ref_slope"):
            FigureSpec(str(harmonic_csv), "gamma_vs_N", str(tmp_path / "f"),
                       ref_slope=0.7)


class TestReferenceLine:
    def test_passes_through_anchor(self):
        xs = np.array([2.0, 4.0, 8.0])
        ys = reference_line(xs, 0.5, 2.0, 3.0)
        assert ys[0] == 3.0

    def test_slope_on_loglog(self):
        xs = np.array([1.0, 10.0, 100.0])
        ys = reference_line(xs, 1.0, 1.0, 0.25)
        slopes = np.diff(np.log(ys)) / np.diff(np.log(xs))
        np.testing.assert_allclose(slopes, 1.0)
