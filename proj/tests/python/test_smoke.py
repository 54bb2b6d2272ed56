import json
import math
import os
import tempfile

import numpy as np
import pytest

import bayesbench as bb


def test_catalog_and_evaluate():
    assert "sphere6d" in bb.benchmarks()
    assert "NelderMead" in bb.algorithms()
    assert bb.evaluate("sphere6d", [0.0] * 6) == pytest.approx(0.0)
    entries = bb.catalog()
    assert any(e["id"] == "qing2d" for e in entries)
    with pytest.raises(bb.NotFoundError):
        bb.evaluate("nosuchfn", [0.0])
    with pytest.raises(ValueError):
        bb.evaluate("sphere6d", [0.0, 0.0])


def test_optimize_is_deterministic():
    a = bb.optimize("DifferentialEvolution", "sphere6d", 3000, seed=4)
    b = bb.optimize("DifferentialEvolution", "sphere6d", 3000, seed=4)
    assert a == b
    assert a["evaluations_used"] == 3000
    deltas = [d for _, d in a["trace"]]
    assert deltas == sorted(deltas, reverse=True)


def test_hpd_waic_davidson():
    rng = np.random.default_rng(1)
    lo, hi = bb.hpd_interval(rng.standard_normal(100_000).tolist())
    assert lo == pytest.approx(-1.96, abs=0.05)
    assert hi == pytest.approx(1.96, abs=0.05)
    w = bb.waic(np.log([[0.5], [0.25]]))
    assert w["waic"] == pytest.approx(2.442, abs=5e-4)
    assert sum(bb.davidson_probabilities(0.3, -0.2, 0.1)) == pytest.approx(1.0, abs=1e-12)


def test_bench_and_fit_round_trip():
    config = {
        "algorithms": ["PSO", "DifferentialEvolution", "NelderMead"],
        "benchmarks": ["sphere6d", "discus2d"],
        "noise_levels": [0, 3],
        "budgets_per_dim": [50],
        "repetitions": 3,
        "master_seed": 5,
        "measure_cpu": False,
    }
    with tempfile.TemporaryDirectory() as tmp:
        data = os.path.join(tmp, "data.csv")
        assert bb.bench(config, data) == 36
        request = {"model": "bradley_terry", "seed": 2,
                   "sampler": {"chains": 2, "warmup": 200, "iterations": 200}}
        out = os.path.join(tmp, "fit")
        fit = bb.fit(request, data=data, out=out)
        assert fit["draws"].shape == (2, 200, len(fit["names"]))
        assert "ranks" in fit["tables"]
        loaded = bb.load_fit(out)
        assert np.array_equal(loaded["draws"], fit["draws"])
        with pytest.raises(ValueError):
            bb.fit(request, data=data, out=out)
        with pytest.raises(ValueError):
            bb.fit({"model": "binomial", "chain": 4}, data=data)
        with pytest.raises(OSError):
            bb.load_fit(os.path.join(tmp, "missing"))
