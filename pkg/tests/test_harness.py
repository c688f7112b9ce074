import xml.etree.ElementTree as ET

import numpy as np
import pytest

from cutscape.graph import ResourceCapError
from cutscape.harness import (
    ExperimentConfig,
    ExperimentRecord,
    emit_plot,
    instance_graphs,
    instance_seed,
    parameter_count,
    result_csv,
    run_experiment,
    with_overrides,
    write_outputs,
)

NS = "{http://www.w3.org/2000/svg}"


def small(experiment, **kw):
    base = dict(experiment=experiment, n=4, instance_count=3, seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


def data_rows(text):
    return [l for l in text.splitlines()[1:] if not l.startswith("# summary")]


def summary_rows(text):
    return [l for l in text.splitlines() if l.startswith("# summary")]


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fig7")
    with pytest.raises(ValueError):
        ExperimentConfig(instance_count=0)
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="depth_sweep", variants=("qaoa_standard",))
    with pytest.raises(ResourceCapError):
        ExperimentConfig(n=21)
    assert ExperimentConfig(experiment="gw_compare", n=24).n == 24
    with pytest.raises(ResourceCapError):
        ExperimentConfig(experiment="gw_compare", n=25)


def test_seeds_are_stable_and_distinct():
    assert instance_seed(0, 1, 2) == instance_seed(0, 1, 2)
    seeds = {instance_seed(0, i, 0) for i in range(100)}
    assert len(seeds) == 100
    assert instance_seed(0, 1, 0) != instance_seed(1, 1, 0)


def test_instance_graphs_do_not_depend_on_count():
    a = instance_graphs(small("depth_sweep", instance_count=5))
    b = instance_graphs(small("depth_sweep", instance_count=3))
    assert a[:3] == b


@pytest.mark.parametrize("experiment,variants,grid", [
    ("depth_sweep", ("x",), 3),
    ("xz_sweep", ("x", "xz_kbody", "xz_global"), 3 * 3),
    ("landscape_audit", ("full", "path"), 2),
    ("variance_audit", ("random_x",), 1),
])
def test_row_counts(experiment, variants, grid):
    cfg = small(experiment, variants=variants, samples=200)
    res = run_experiment(cfg)
    text = result_csv(res)
    assert len(data_rows(text)) == grid * cfg.instance_count
    assert len(summary_rows(text)) == grid
    assert text.splitlines()[0].startswith("variant,x,instance,")


def test_qaoa_grid_uses_parameter_counts():
    cfg = small("qaoa_compare", variants=("qaoa_standard", "qaoa_local_x_zero_start", "x"), layers=(1, 2), depths=(1,))
    res = run_experiment(cfg)
    xs = {(r.variant, r.x) for r in res.records}
    assert xs == {("qaoa_standard", 2), ("qaoa_standard", 4), ("qaoa_local_x_zero_start", 5),
                  ("qaoa_local_x_zero_start", 10), ("x", 4)}
    assert parameter_count("xz_kbody", 8, 4) == 324


def test_gw_compare_small():
    cfg = small("gw_compare", n=8, degrees=(2, 3))
    res = run_experiment(cfg)
    assert [r.x for r in res.records] == [2, 3]
    for row in res.rows:
        assert row["ratio"] == pytest.approx(row["alpha_grad"] / row["alpha_gw"])
        assert 0 < row["alpha_gw"] <= 1


def test_pipeline_is_deterministic_and_paired():
    cfg = small("xz_sweep", depths=(1, 2))
    a, b = result_csv(run_experiment(cfg)), result_csv(run_experiment(cfg))
    assert a == b
    # a variant's rows do not change when other variants join the run
    alone = result_csv(run_experiment(with_overrides(cfg, variants=("xz_global",))))
    assert set(data_rows(alone)) <= set(data_rows(a))


def test_threads_do_not_change_results():
    cfg = small("depth_sweep", depths=(1, 2), instance_count=4)
    assert result_csv(run_experiment(cfg)) == result_csv(run_experiment(with_overrides(cfg, threads=2)))


def test_landscape_audit_finds_no_traps_for_full_ansatz():
    res = run_experiment(small("landscape_audit", n=5, instance_count=5, variants=("full", "ring")))
    assert all(r.mean == 0 for r in res.records)


def test_records_use_population_std():
    rec = ExperimentRecord.from_values("x", 1, [1.0, 2.0, 3.0])
    assert rec.mean == 2.0 and rec.std == pytest.approx(np.sqrt(2 / 3))


def records_for_plot():
    return [ExperimentRecord.from_values("x", d, v) for d, v in
            [(1, [0.9, 0.95, 0.97]), (2, [0.85, 0.9, 0.99]), (3, [0.96, 0.97, 0.99])]] + [
        ExperimentRecord.from_values("xz", d, v) for d, v in [(1, [0.8, 0.85]), (3, [0.9, 1.0])]]


def test_plot_is_deterministic(tmp_path):
    recs = records_for_plot()
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(recs, path=p1)
    emit_plot(recs, path=p2)
    assert p1.read_bytes() == p2.read_bytes()
    ET.fromstring(p1.read_text())


def test_plot_single_point_and_empty():
    svg = emit_plot([ExperimentRecord.from_values("x", 1, [0.5])])
    root = ET.fromstring(svg)
    assert len(root.findall(f"{NS}circle")) == 1
    with pytest.raises(ValueError):
        emit_plot([])
    with pytest.raises(ValueError):
        emit_plot(records_for_plot(), style="scatter")


def test_plot_band_geometry():
    recs = records_for_plot()
    root = ET.fromstring(emit_plot(recs))
    x0, xs = float(root.get("data-x0")), float(root.get("data-xscale"))
    y0, ys = float(root.get("data-y0")), float(root.get("data-yscale"))
    ox, oy = float(root.get("data-origin-x")), float(root.get("data-origin-y"))
    for poly in root.findall(f"{NS}polygon"):
        pts = [tuple(map(float, p.split(","))) for p in poly.get("points").split()]
        half = len(pts) // 2
        upper, lower = pts[:half], pts[half:][::-1]
        series = sorted((r for r in recs if r.variant == poly.get("data-variant")), key=lambda r: r.x)
        px = [p[0] for p in upper]
        assert px == sorted(px)
        for (ux, uy), (lx, ly), r in zip(upper, lower, series):
            assert ux == lx == pytest.approx(ox + (r.x - x0) * xs, abs=1e-3)
            assert ly - uy == pytest.approx(2 * r.std * ys, abs=2e-3)
            assert (uy + ly) / 2 == pytest.approx(oy - (r.mean - y0) * ys, abs=2e-3)
    for c in root.findall(f"{NS}circle"):
        assert float(c.get("cy")) == pytest.approx(oy - (float(c.get("data-mean")) - y0) * ys, abs=1e-3)


def test_line_style_has_no_band():
    root = ET.fromstring(emit_plot(records_for_plot(), style="line"))
    assert root.findall(f"{NS}polygon") == []
    assert len(root.findall(f"{NS}polyline")) == 2


def test_write_outputs(tmp_path):
    res = run_experiment(small("landscape_audit", variants=("classical",)))
    text = write_outputs(res, tmp_path / "out.csv", tmp_path / "out.svg")
    assert (tmp_path / "out.csv").read_text() == text
    assert (tmp_path / "out.svg").read_text().startswith("<svg")
