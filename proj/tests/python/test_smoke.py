import math

import numpy as np
import pytest

import sbtm
from sbtm import io


TINY = """
version: 1
method: {method}
n: 200
dt: 0.01
T: 0.1
target:
  kind: gaussian
  dim: 1
initial:
  kind: analytic_gaussian
model:
  width: 8
  hidden_layers: 1
training:
  batch_size: 100
  inner_steps: 2
  pretrain_max_steps: 20
diagnostics:
  record_every: 2
  snapshot_every: 5
seed: 3
"""


def test_score_model_shapes_and_divergence():
    arch = sbtm.Architecture(input_dim=2, width=8, hidden_layers=2)
    model = sbtm.ScoreModel.glorot(arch, seed=1)
    assert model.parameter_count == arch.parameter_count
    x = np.random.default_rng(0).normal(size=(5, 2))
    # zero output layer at initialization
    assert np.all(model(x) == 0.0)
    model.params = model.params + 0.1
    div = model.divergence(x)
    assert div.shape == (5,)
    jac = np.array([np.trace(model.jacobian(row)) for row in x])
    np.testing.assert_allclose(div, jac, atol=1e-12)


def test_targets():
    g = sbtm.standard_gaussian(1)
    np.testing.assert_allclose(g.score(np.array([[1.5], [-2.0]])), [[-1.5], [2.0]])
    assert abs(g.log_normalizer - 0.5 * math.log(2 * math.pi)) < 1e-4
    mix = sbtm.gaussian_mixture([0.5, 0.5], [np.array([-3.0]), np.array([3.0])], [1.0, 1.0])
    assert abs(mix.score(np.zeros((1, 1)))[0, 0]) < 1e-15
    circle = sbtm.noisy_circle(np.array([4.0, 0.0]))
    np.testing.assert_allclose(circle.score(np.array([[4.0, 0.0]])), 0.0)
    assert sbtm.grid_mixture().dim == 2


def test_kl_and_kde():
    g = sbtm.standard_gaussian(1)
    x = np.random.default_rng(1).normal(size=(10000, 1))
    assert abs(sbtm.estimate_kl(x, g)) < 0.02
    assert abs(sbtm.estimate_kl(x, g, "smoothed")) < 0.02
    nodes, values = sbtm.kde(x, g)
    assert abs(values.sum() * (nodes[1] - nodes[0]) - 1.0) < 1e-9
    with pytest.raises(ValueError):
        sbtm.estimate_kl(x, g, "fancy")


def test_analytic_and_fokker_planck():
    a = sbtm.AnalyticSolution()
    g = sbtm.standard_gaussian(1)
    kl = sbtm.fp_kl_trajectory(g, a.variance_at(0.0), [0.0, 0.5, 1.0], spacing=0.02)
    for t, v in zip([0.0, 0.5, 1.0], kl):
        assert abs(v - a.kl_to_target_at(t)) < 2e-3


def test_dissipation_and_ntk():
    t = np.linspace(0, 1, 11)
    rate = sbtm.dissipation_rate(list(t), list(np.exp(-t)))
    np.testing.assert_allclose(rate, -np.exp(-t), atol=5e-3)
    model = sbtm.ScoreModel.glorot(sbtm.Architecture(1, 4, 1), seed=2)
    model.params = model.params + 0.2
    h = sbtm.ntk_matrix(model, np.array([[0.1], [0.5], [-1.0]]))
    assert h.shape == (3, 3)
    assert sbtm.ntk_min_eigenvalue(h) >= -1e-8


def test_configs():
    text = sbtm.load_preset("exp1")
    assert "dt: 0.002" in text
    assert sbtm.normalize_config(text) == text
    with pytest.raises(sbtm.ConfigError, match=":2:"):
        sbtm.normalize_config("version: 1\nbogus: 3\n")


def test_run_in_memory():
    out = sbtm.run(TINY.format(method="sbtm"))
    rec = out["records"]
    assert set(io.DIAGNOSTICS_COLUMNS) == set(rec)
    assert len(rec["t"]) == 6
    assert out["positions"].shape == (200, 1)
    assert out["steps_taken"] == 10
    assert isinstance(out["model"], sbtm.ScoreModel)
    again = sbtm.run(TINY.format(method="sbtm"))
    np.testing.assert_array_equal(out["positions"], again["positions"])


def test_artifacts_round_trip(tmp_path):
    run_dir = tmp_path / "run"
    res = sbtm.run_to_directory(TINY.format(method="sbtm-bypass"), str(run_dir))
    assert res["exit_code"] == 0 and res["status"] == "ok"
    diag = io.read_diagnostics(run_dir / "diagnostics.csv")
    assert list(diag) == list(io.DIAGNOSTICS_COLUMNS)
    assert np.isfinite(diag["l2_error"]).all()
    bin_snaps = io.read_snapshots_bin(run_dir / "snapshots.bin")
    csv_snaps = io.read_snapshots_csv(run_dir / "snapshots.csv")
    assert [s[0] for s in bin_snaps] == [0, 5, 10]
    for (s1, t1, x1), (s2, t2, x2) in zip(bin_snaps, csv_snaps):
        assert s1 == s2 and t1 == t2
        np.testing.assert_array_equal(x1, x2)

    other = tmp_path / "langevin"
    sbtm.run_to_directory(TINY.format(method="langevin"), str(other))
    joined = tmp_path / "joined.csv"
    sbtm.compare_runs([str(run_dir), str(other)], str(joined))
    table = io.read_table(joined)
    assert "kl_sbtm-bypass" in table and "kl_langevin" in table


def test_bad_snapshot_file(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"NOTSNAPS" + b"\0" * 8)
    with pytest.raises(ValueError):
        io.read_snapshots_bin(p)
