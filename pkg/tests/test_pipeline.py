import json
import math

import numpy as np
import pytest

from niph.errors import DataError, PipelineError, ResourceBudgetError
from niph.pipeline import NiphConfig, ProbePlan, run_niph
from niph.synth import ShapeFieldSpec, gen_shape_field


@pytest.fixture(scope="module")
def small_field():
    spec = ShapeFieldSpec(count=8, phi=0.5, var=0.0, s=2.0,
                          size_range=(0.5, 1.5), points_per_shape=40,
                          region=80.0, shape="rectangle", seed=21)
    return gen_shape_field(spec)


def test_probe_plan_validation():
    with pytest.raises(DataError):
        ProbePlan(n_directions=1)
    with pytest.raises(DataError):
        ProbePlan(factors=(1.0,))
    with pytest.raises(DataError):
        ProbePlan(factors=())
    with pytest.raises(DataError):
        ProbePlan(dim=2)


def test_probe_plan_angles_and_probes():
    plan = ProbePlan(n_directions=4, factors=(1.5, 2.0))
    assert np.allclose(plan.angles, [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    probes = plan.probes
    assert len(probes) == 8
    assert {p.factor for p in probes} == {1.5, 2.0}


def test_default_plans():
    road = ProbePlan.road_default()
    assert road.n_directions == 15 and road.dim == 0 and road.weighting == "unit"
    assert len(road.factors) == 9
    assert road.factors[0] == pytest.approx(1.2)
    assert road.factors[-1] == pytest.approx(2.5)
    synth = ProbePlan.synthetic_default()
    assert synth.n_directions == 8 and synth.factors == (2.0,)
    assert synth.dim == 1 and synth.weighting == "persistence-diff"


def test_dim1_requires_rmax(small_field):
    with pytest.raises(DataError):
        run_niph(small_field, ProbePlan(n_directions=2, dim=1), NiphConfig())


def test_run_deterministic(small_field):
    plan = ProbePlan(n_directions=4, factors=(2.0,), dim=1,
                     weighting="persistence-diff")
    cfg = NiphConfig(r_max=2.2, seed=3)
    r1 = run_niph(small_field, plan, cfg)
    r2 = run_niph(small_field, plan, cfg)
    assert r1.to_json() == r2.to_json()


def test_threads_do_not_change_results(small_field):
    plan = ProbePlan(n_directions=4, factors=(2.0,), dim=1,
                     weighting="persistence-diff")
    serial = run_niph(small_field, plan, NiphConfig(r_max=2.2, threads=1))
    parallel = run_niph(small_field, plan, NiphConfig(r_max=2.2, threads=4))
    assert serial.to_json() == parallel.to_json()


def test_threads_env(monkeypatch):
    monkeypatch.setenv("NIPH_THREADS", "6")
    assert NiphConfig().resolved_threads() == 6
    assert NiphConfig(threads=2).resolved_threads() == 2
    monkeypatch.delenv("NIPH_THREADS")
    assert NiphConfig().resolved_threads() == 1


def test_report_structure(small_field):
    plan = ProbePlan(n_directions=4, factors=(2.0,), dim=1,
                     weighting="persistence-diff")
    report = run_niph(small_field, plan, NiphConfig(r_max=2.2, track_death_edges=True))
    doc = json.loads(report.to_json())
    assert set(doc) == {"input_sha256", "plan", "probes", "fit",
                        "death_edge_angles"}
    assert len(doc["probes"]) == 4
    for probe in doc["probes"]:
        assert probe["peak"] > 0
        assert probe["n_atoms"] > 0
    assert 0.0 <= doc["fit"]["phi_rad"] < math.pi
    assert doc["fit"]["s"] >= 1.0
    assert len(doc["death_edge_angles"]["angles_rad"]) > 0
    # canonical reports round floats to 9 significant digits
    for probe in doc["probes"]:
        assert probe["peak"] == float(f"{probe['peak']:.9g}")
    # timing is excluded unless requested
    assert "elapsed_s" in json.loads(report.to_json(include_timing=True))


def test_pipeline_error_carries_completed(small_field):
    plan = ProbePlan(n_directions=3, factors=(2.0,), dim=1,
                     weighting="persistence-diff")
    # base diagram fits the budget; the widened probe radius does not
    probe_failure = None
    for budget in (74_000, 72_000, 71_000, 70_500):
        try:
            run_niph(small_field, plan, NiphConfig(r_max=2.2, triangle_budget=budget))
        except PipelineError as exc:
            probe_failure = exc
            break
        except ResourceBudgetError:
            continue  # budget already too small for the base diagram
    assert probe_failure is not None, "expected a budget failure inside a probe"
    assert isinstance(probe_failure.completed, list)
    assert isinstance(probe_failure.__cause__, ResourceBudgetError)


def test_fingerprint_tracks_input(small_field):
    plan = ProbePlan(n_directions=3, factors=(2.0,), dim=0)
    a = run_niph(small_field, plan, NiphConfig())
    b = run_niph(small_field + 1.0, plan, NiphConfig())
    assert a.fingerprint != b.fingerprint
