"""Figure rendering from the shipped sample CSVs, plus the shared-formula
contract with the analysis package (test-only dependency)."""
import os
from pathlib import Path

import numpy as np
import pytest

from erasurecirc_figures import cli, collapse, plots

SAMPLES = Path(__file__).resolve().parents[1] / "src" / "erasurecirc_figures" / "sample_data"


def spec_for(kind, out, inputs, exponents=None):
    return plots.PlotSpec(
        inputs=[str(p) for p in inputs], kind=kind, out=str(out), exponents=exponents or {}
    )


def test_decay_renders(tmp_path):
    out = tmp_path / "decay.png"
    plots.render(spec_for("decay", out, [SAMPLES / "decay_sample.csv"]))
    assert out.stat().st_size > 0


def test_crossing_with_inset_renders_and_prints_objective(tmp_path):
    out = tmp_path / "crossing.png"
    obj = plots.render(
        spec_for(
            "crossing", out, [SAMPLES / "sweep_sample.csv"],
            {"z": 1.51, "nu": 1.1, "p_c": 0.081},
        )
    )
    assert out.stat().st_size > 0
    assert obj is not None and obj >= 0


def test_collapse_renders(tmp_path):
    out = tmp_path / "collapse.png"
    obj = plots.render(
        spec_for(
            "collapse", out, [SAMPLES / "sweep_sample.csv"],
            {"z": 1.51, "nu": 1.1, "p_c": 0.081},
        )
    )
    assert out.stat().st_size > 0
    assert obj >= 0


def test_heatmap_renders(tmp_path):
    out = tmp_path / "phase.png"
    plots.render(spec_for("heatmap", out, [SAMPLES / "phase_sample.csv"]))
    assert out.stat().st_size > 0


def test_mi_renders(tmp_path):
    out = tmp_path / "mi.png"
    plots.render(spec_for("mi", out, [SAMPLES / "mi_sample.csv"]))
    assert out.stat().st_size > 0


def test_missing_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,s_mean\n0,1.0\n")
    with pytest.raises(ValueError, match="s_stderr"):
        plots.render(spec_for("decay", tmp_path / "x.png", [bad]))


def test_empty_data_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t,s_mean,s_stderr,n,p,q,h\n")
    with pytest.raises(ValueError, match="no data rows"):
        plots.render(spec_for("decay", tmp_path / "x.png", [empty]))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        spec_for("sparkline", tmp_path / "x.png", [SAMPLES / "decay_sample.csv"])


def test_objective_matches_analysis_package():
    # shared formula contract, checked against the analysis implementation
    scaling = pytest.importorskip("erasurecirc.scaling")
    cols = plots.read_table(str(SAMPLES / "sweep_sample.csv"))
    params = {"z": 1.51, "nu": 1.1, "p_c": 0.081}
    curves_fig = []
    curves_ana = []
    for n in np.unique(cols["n"]):
        mask = (cols["n"] == n) & np.isfinite(cols["tau_mean"])
        if mask.sum() < 2:
            continue
        order = np.argsort(cols["p"][mask])
        p = cols["p"][mask][order]
        tau = cols["tau_mean"][mask][order]
        err = cols["tau_stderr"][mask][order]
        curves_fig.append(collapse.tau_rescale(n, p, tau, err, **params))
        curves_ana.append(
            scaling.DecayCurve(times=p, values=tau, std_errors=err, labels={"n": int(n)})
        )
    ours = collapse.collapse_objective(curves_fig)
    theirs = scaling.collapse_objective(curves_ana, scaling.tau_crossing_spec(), params)
    assert abs(ours - theirs) <= 1e-6 * max(1.0, abs(theirs))


def test_cli_end_to_end(tmp_path, capsys):
    out = tmp_path / "fig.png"
    code = cli.main(
        ["collapse", "--in", str(SAMPLES / "sweep_sample.csv"), "--out", str(out),
         "--exponents", "z=1.51,nu=1.1,pc=0.081"]
    )
    assert code == 0
    assert out.exists()
    assert "collapse objective" in capsys.readouterr().out


def test_cli_error_exit(tmp_path):
    code = cli.main(["decay", "--in", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o.png")])
    assert code == 1
