"""Monte Carlo harness: seeding, failure accounting and aggregation"""

from dataclasses import replace

import numpy as np
import pytest
from pydantic import ValidationError

from backend import montecarlo
from backend.exceptions import ExperimentError, ParameterError
from backend.montecarlo import CellResult, ExperimentResult, ExperimentSpec
from backend.sagarch_model import ReturnSeries, SimulatedPath, simulate


def _small_spec(**overrides) -> ExperimentSpec:
    values = dict(
        design_id="stationary_a15",
        sample_sizes=[100],
        replications=2,
        multistart=1,
        reference_length=1000,
        master_seed=99,
    )
    values.update(overrides)
    return ExperimentSpec(**values)


# Test 1: specification

def test_spec_defaults_and_design_lookup():
    spec = ExperimentSpec(design_id="stationary_a15")
    assert spec.sample_sizes == [200, 500, 1000]
    assert spec.true_theta().alpha == 1.5
    assert spec.regime() == "stationary"
    assert ExperimentSpec(design_id="explosive_a10").regime() == "explosive"


@pytest.mark.parametrize("bad", [
    {"sample_sizes": [10]},
    {"sample_sizes": []},
    {"innovation": "student_t"},
    {"theta": [0.1, 0.1, 0.1]},
    {"replications": 0},
    {"unknown": 1},
])
def test_spec_validation(bad):
    with pytest.raises(ValidationError):
        ExperimentSpec(design_id="stationary_a15", **bad)


def test_explicit_theta_overrides_design():
    spec = ExperimentSpec(design_id="custom", theta=[0.1, 0.2, 0.2, 0.4, 1.2])
    assert spec.true_theta().psi == 0.4


# Test 2: seeding

def test_replication_seeds_are_counter_based():
    a = montecarlo.replication_seed(1, 200, 3).generate_state(4)
    b = montecarlo.replication_seed(1, 200, 3).generate_state(4)
    c = montecarlo.replication_seed(1, 200, 4).generate_state(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


# Test 3: experiments

def test_mle_experiment_is_reproducible():
    spec = _small_spec()
    first = montecarlo.run_mle_experiment(spec)
    second = montecarlo.run_mle_experiment(spec)
    assert first.to_dict() == second.to_dict()
    cell = first.cell(100)
    assert cell.replications == 2
    assert cell.failures == 0
    assert len(cell.bias) == len(cell.esd) == len(cell.asd) == 5
    assert "elapsed_seconds" not in first.to_dict()
    assert "elapsed_seconds" in first.to_dict(include_timing=True)


def test_estimates_frame():
    result = montecarlo.run_mle_experiment(_small_spec())
    frame = result.estimates_frame()
    assert len(frame) == 2
    assert {"n", "replication", "alpha", "asd_res_psi"} <= set(frame.columns)


@pytest.mark.slow
def test_worker_count_does_not_change_results():
    serial = montecarlo.run_mle_experiment(_small_spec(replications=3))
    parallel = montecarlo.run_mle_experiment(_small_spec(replications=3, workers=2))
    assert serial.to_dict()["cells"] == parallel.to_dict()["cells"]


def test_student_t_rejected_for_mle_tables():
    with pytest.raises(ParameterError):
        montecarlo.run_mle_experiment(_small_spec(innovation="student_t", df=3.0))


def test_failure_threshold(mocker):
    def flaky(spec, n, r):
        if r == 0:
            return {"n": n, "r": r, "ok": False, "error": "OptimizationError: boom"}
        return {"n": n, "r": r, "ok": True, "estimate": [0.2, 0.1, 0.2, 0.5, 1.5],
                "asd_int": [0.1] * 5, "asd_res": [0.1] * 5}

    mocker.patch.object(montecarlo, "_mle_replication", side_effect=flaky)
    mocker.patch.object(montecarlo, "theoretical_asd", return_value=[0.1] * 5)
    with pytest.raises(ExperimentError) as info:
        montecarlo.run_mle_experiment(_small_spec(replications=4))
    assert info.value.failures == 1
    assert info.value.replications == 4

    result = montecarlo.run_mle_experiment(_small_spec(replications=40))
    assert result.cell(100).failures == 1
    assert result.cell(100).bias == pytest.approx([0.0] * 5)


def test_rejection_curve():
    result = montecarlo.run_test_experiment(_small_spec(), "stationarity", "phi_minus", [0.2])
    assert result.kind == "test"
    assert len(result.curve) == 1
    point = result.curve[0]
    assert point.n == 100 and point.value == 0.2
    assert 0.0 <= point.frequency <= 1.0


@pytest.mark.parametrize("test_id,axis,values", [
    ("other", "alpha", [1.0]),
    ("symmetry", "beta", [1.0]),
    ("symmetry", "phi_minus", []),
])
def test_rejection_curve_validation(test_id, axis, values):
    with pytest.raises(ParameterError):
        montecarlo.run_test_experiment(_small_spec(), test_id, axis, values)


# Test 4: coherence

def test_coherence_skips_omega():
    spec = _small_spec()
    cell = CellResult(
        n=1000, replications=10, failures=0, bias=[0.0] * 5,
        esd=[1.0, 0.11, 0.09, 0.1, 0.2], asd=[0.5, 0.1, 0.1, 0.1, 0.1],
        asd_int=[0.1] * 5, asd_res=[0.1] * 5,
    )
    result = ExperimentResult(spec=spec, kind="mle", cells=[cell])
    out = montecarlo.coherence(result)
    assert set(out) == {"phi_plus", "phi_minus", "psi", "alpha"}
    assert out["phi_plus"] == pytest.approx(0.1)
    assert out["alpha"] == pytest.approx(1.0)


def test_coherence_needs_mle_result():
    with pytest.raises(ParameterError):
        montecarlo.coherence(ExperimentResult(spec=_small_spec(), kind="test"))


# Test 5: explosive designs

def test_explosive_spec_defaults():
    spec = ExperimentSpec(design_id="explosive_a10")
    assert spec.regime() == "explosive"
    assert spec.burn_in == 0
    assert spec.fit_mode == "free"
    assert ExperimentSpec(design_id="explosive_a10", burn_in=100).burn_in == 100
    assert ExperimentSpec(design_id="stationary_a15").burn_in == 500
    custom = ExperimentSpec(design_id="custom", theta=[0.1, 0.3, 0.3, 0.9, 1.0], fit_mode="free")
    assert custom.burn_in == 0


def test_explosive_design_paths_stay_finite_at_n_5000():
    spec = ExperimentSpec(design_id="explosive_a10", sample_sizes=[5000])
    for r in range(10):
        seed = montecarlo.replication_seed(spec.master_seed, 5000, r)
        path = simulate(spec.true_theta(), 5000, seed=seed, burn_in=spec.burn_in)
        assert not path.truncated
        assert path.series.n == 5000


def test_truncated_path_keeps_its_prefix(explosive_theta):
    path = simulate(explosive_theta, 20000, seed=1, burn_in=0)
    assert path.truncated
    assert montecarlo._usable_path(path) is path.series
    short = SimulatedPath(series=ReturnSeries(np.zeros(10)), eta=np.zeros(10), sigma2=np.ones(10),
                          truncated=True, requested_n=5000)
    with pytest.raises(ExperimentError):
        montecarlo._usable_path(short)


def test_truncated_replications_are_counted(stationary_theta, mocker):
    path = replace(simulate(stationary_theta, 100, seed=31), truncated=True)
    mocker.patch.object(montecarlo, "simulate", return_value=path)
    mocker.patch.object(montecarlo, "theoretical_asd", return_value=[0.1] * 5)
    cell = montecarlo.run_mle_experiment(_small_spec()).cell(100)
    assert cell.failures == 0
    assert cell.truncated == 2
    assert len(cell.asd_universal) == 5
    assert np.isnan(cell.asd_universal[0])
    assert all(value > 0.0 for value in cell.asd_universal[1:])


@pytest.mark.slow
def test_explosive_replication_at_n_5000():
    spec = ExperimentSpec(design_id="explosive_a10", sample_sizes=[5000], replications=1, multistart=2)
    record = montecarlo._mle_replication(spec, 5000, 0)
    assert record["ok"], record.get("error")
    assert not record["truncated"]
    assert np.all(np.isfinite(record["estimate"]))
    assert all(value > 0.0 for value in record["asd_universal"][1:])


@pytest.mark.slow
@pytest.mark.parametrize("design_id", ["stationary_a15", "explosive_a10"])
def test_universal_estimator_matches_sampling_variance(design_id):
    spec = ExperimentSpec(design_id=design_id, sample_sizes=[5000], replications=200, multistart=2,
                          fit_mode="free", reference_length=5000)
    cell = montecarlo.run_mle_experiment(spec).cell(5000)
    np.testing.assert_allclose(np.square(cell.asd_universal[1:]), np.square(cell.esd[1:]), rtol=0.25)
