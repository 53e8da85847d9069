import math

import numpy as np
import pytest

from levy3d_plots import cli
from levy3d_plots.reader import (
    CSV_COLUMNS,
    MissingBaselineError,
    SchemaError,
    read_records,
)
from levy3d_plots.render import FigureSpec, build_figure, render

DEFAULTS = {
    "scenario": "unit", "n": 32768.0, "d": 1.0, "p2": None,
    "trials": 10, "truncated_frac": 0.0, "sem_time": 1.0,
    "mean_steps": 10.0, "sem_steps": 0.5,
    "universal_lb": None, "cauchy_ub": None, "regime_lb": None, "overhead": None,
}


def make_row(**kw):
    row = dict(DEFAULTS)
    row.update(kw)
    return row


def rows_to_csv(path, rows):
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, str):
            return v
        if isinstance(v, int):
            return str(v)
        return f"{float(v):.17g}"

    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(fmt(row[c]) for c in CSV_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def ball_row(mu, R, mean_time, **kw):
    return make_row(mu=mu, shape="ball", p1=R, delta_B=4 * R * R,
                    delta_P=math.pi * R * R, elong=0.5,
                    V=4 * math.pi * R**3 / 3, mean_time=mean_time, **kw)


def line_row(mu, L, mean_time, **kw):
    db = 2.0 * (L + 2.0)
    return make_row(mu=mu, shape="line", p1=L, delta_B=db,
                    delta_P=2.0 * L + math.pi,
                    elong=1.0 - math.log(2.0) / math.log(db),
                    V=math.pi * L + 4 * math.pi / 3, mean_time=mean_time, **kw)


# ---------------------------------------------------------------------------
# reader
# ---------------------------------------------------------------------------

def test_reader_rejects_foreign_schema(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    with pytest.raises(SchemaError):
        read_records(bad)


def test_reader_skips_comment_lines(tmp_path):
    path = tmp_path / "ok.csv"
    rows_to_csv(path, [ball_row(2.0, 4.0, 100.0)])
    text = "# levy3d-config: {}\n" + path.read_text()
    path.write_text(text)
    recs = read_records(path)
    assert len(recs) == 1
    assert recs[0]["shape"] == "ball"
    assert recs[0]["p2"] is None


# ---------------------------------------------------------------------------
# figure families
# ---------------------------------------------------------------------------

def test_ratio_vs_mu_normalizes_to_one_at_cauchy(tmp_path):
    path = tmp_path / "rel.csv"
    rows = [ball_row(mu, 4.0, mt) for mu, mt in ((1.5, 300.0), (2.0, 120.0), (2.5, 180.0))]
    rows += [ball_row(mu, 8.0, mt) for mu, mt in ((1.5, 90.0), (2.0, 60.0), (2.5, 75.0))]
    rows_to_csv(path, rows)
    fig = build_figure(FigureSpec((str(path),), "ratio-vs-mu", str(tmp_path / "o.png")))
    series = [ln for ln in fig.axes[0].get_lines() if len(ln.get_xdata()) == 3]
    assert len(series) == 2
    for ln in series:
        x, y = np.asarray(ln.get_xdata(), dtype=float), np.asarray(ln.get_ydata(), dtype=float)
        assert y[np.isclose(x, 2.0)] == pytest.approx(1.0)


def test_ratio_vs_mu_requires_baseline(tmp_path):
    path = tmp_path / "nob.csv"
    rows_to_csv(path, [ball_row(1.5, 4.0, 300.0), ball_row(2.5, 4.0, 180.0)])
    with pytest.raises(MissingBaselineError):
        build_figure(FigureSpec((str(path),), "ratio-vs-mu", "x.png"))


def test_cauchy_shapes_has_dashed_lower_bound(tmp_path):
    path = tmp_path / "cs.csv"
    rows = [ball_row(2.0, R, 1000.0 / R, universal_lb=32768.0 / (4 * R * R))
            for R in (2.0, 4.0, 8.0)]
    rows += [line_row(2.0, L, 900.0 / L, universal_lb=32768.0 / (2 * (L + 2)))
             for L in (5.0, 23.0, 99.0)]
    rows_to_csv(path, rows)
    fig = build_figure(FigureSpec((str(path),), "cauchy-shapes", "x.png"))
    dashed = [ln for ln in fig.axes[0].get_lines()
              if ln.get_linestyle() == "--" and "lower bound" in ln.get_label()]
    assert len(dashed) == 1
    labels = {ln.get_label() for ln in fig.axes[0].get_lines()}
    assert {"ball", "line"} <= labels


def test_delta_sweep_one_curve_per_mu(tmp_path):
    path = tmp_path / "ds.csv"
    rows = []
    for mu in (2.0, 2.5, 3.0):
        for delta in (0.5, 0.7, 0.9):
            rows.append(make_row(mu=mu, shape="rect", p1=40**delta, p2=40 ** (1 - delta),
                                 delta_B=40.0, delta_P=40.0, elong=delta, V=80.0,
                                 mean_time=1000.0 * 40 ** (-(mu - 2) * delta)))
    rows_to_csv(path, rows)
    fig = build_figure(FigureSpec((str(path),), "delta-sweep", "x.png"))
    curves = [ln for ln in fig.axes[0].get_lines() if len(ln.get_xdata()) == 3]
    assert len(curves) == 3


def test_ratio_fixed_reference_line(tmp_path):
    path = tmp_path / "rf.csv"
    rows = []
    for mu in (1.5, 2.0):
        for L in (8.0, 16.0):
            V = math.pi * L + 4 * math.pi / 3
            R = (3 * V / (4 * math.pi)) ** (1 / 3)
            rows.append(line_row(mu, L, 500.0 / L, scenario="ratio-fixed-volume"))
            rows.append(ball_row(mu, R, 700.0 / L, scenario="ratio-fixed-volume"))
    rows_to_csv(path, rows)
    fig = build_figure(FigureSpec((str(path),), "ratio-fixed", "x.png"))
    dashed = [ln for ln in fig.axes[0].get_lines() if ln.get_linestyle() == "--"]
    assert len(dashed) == 1
    assert "surface" in dashed[0].get_label()


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        FigureSpec(("a.csv",), "no-such-family", "x.png")


# ---------------------------------------------------------------------------
# rendering and CLI
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("ext", ["png", "svg"])
def test_render_is_deterministic(tmp_path, ext):
    path = tmp_path / "rel.csv"
    rows = [ball_row(mu, 4.0, mt) for mu, mt in ((1.5, 300.0), (2.0, 120.0), (2.5, 180.0))]
    rows_to_csv(path, rows)
    out1, out2 = tmp_path / f"a.{ext}", tmp_path / f"b.{ext}"
    render(FigureSpec((str(path),), "ratio-vs-mu", str(out1)))
    render(FigureSpec((str(path),), "ratio-vs-mu", str(out2)))
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.stat().st_size > 1000


def test_cli_renders(tmp_path):
    path = tmp_path / "rel.csv"
    rows_to_csv(path, [ball_row(2.0, 4.0, 120.0), ball_row(2.5, 4.0, 180.0)])
    out = tmp_path / "fig.png"
    code = cli.main(["--csv", str(path), "--family", "ratio-vs-mu", "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_cli_bad_schema_is_usage_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    code = cli.main(["--csv", str(bad), "--family", "ratio-vs-mu",
                     "--out", str(tmp_path / "fig.png")])
    assert code == 2
