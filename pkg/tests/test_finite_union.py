import pytest

from experiments import finite_union
from geometry.euclid import distance
from schemas.experiment_schemas import ConvergenceVerdict, UnionScenario
from schemas.projector_schemas import BoxSpec
from utils.errors import DomainError


def test_same_seed_same_scenario():
    assert finite_union.generate_scenario(11) == finite_union.generate_scenario(11)
    assert finite_union.generate_scenario(11) != finite_union.generate_scenario(12)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_members_contain_planted_point(dim):
    for seed in range(20):
        scenario = finite_union.generate_scenario(seed, dim=dim)
        assert scenario.dim == dim
        assert len(scenario.a_members) == len(scenario.b_members) == 3
        for member in scenario.a_members + scenario.b_members:
            assert distance(member, scenario.planted) == 0.0


@pytest.mark.parametrize("kwargs", [{"dim": 1}, {"dim": 5}, {"members_per_side": 0}, {"members_per_side": 5}])
def test_generator_ranges(kwargs):
    with pytest.raises(DomainError):
        finite_union.generate_scenario(0, **kwargs)


def test_adversarial_branches_do_not_meet_hypotheses():
    verdict = finite_union.check_theorem(finite_union.adversarial_scenario())
    assert verdict.status == "hypotheses_not_met"
    assert not verdict.gaps_vanished
    assert verdict.final_gap == pytest.approx(1.0)
    assert verdict.bounded


def test_single_convex_members_pass():
    for seed in range(10):
        scenario = finite_union.generate_scenario(seed, members_per_side=1)
        verdict = finite_union.check_theorem(scenario)
        assert verdict.status in ("pass", "hypotheses_not_met")
        if verdict.status == "pass":
            assert verdict.limit_in_intersection
            assert verdict.converged


def test_tol_must_be_positive():
    with pytest.raises(DomainError):
        finite_union.check_theorem(finite_union.adversarial_scenario(), tol=0.0)


def test_batch_planar_has_no_failures():
    verdicts = finite_union.run_batch(range(200), dim=2)
    summary = finite_union.summarize(verdicts)
    assert summary.total == 200
    assert summary.failed == 0, [v.seed for v in verdicts if v.status == "fail"]
    assert summary.passed > 0
    assert [v.seed for v in verdicts] == list(range(200))


def test_batch_three_dimensional_has_no_failures():
    verdicts = finite_union.run_batch(range(50), dim=3)
    assert finite_union.summarize(verdicts).failed == 0
    assert all(v.dim == 3 for v in verdicts)


def test_parallel_batch_keeps_seed_order():
    serial = finite_union.run_batch(range(6), n_jobs=1)
    parallel = finite_union.run_batch(range(6), n_jobs=2)
    assert serial == parallel


def test_n_jobs_default_from_env(monkeypatch):
    monkeypatch.setenv("ALTPROJ_N_JOBS", "1")
    verdicts = finite_union.run_batch([3])
    assert len(verdicts) == 1


def test_summary_counts():
    def verdict(seed, status):
        return ConvergenceVerdict(seed=seed, dim=2, status=status, converged=False,
                                  limit_in_intersection=False, gaps_vanished=False, bounded=True,
                                  iterations_used=1, final_gap=1.0, tail_spread=0.0)

    summary = finite_union.summarize([verdict(0, "pass"), verdict(1, "fail"), verdict(2, "hypotheses_not_met"),
                                      verdict(3, "pass")])
    assert (summary.total, summary.passed, summary.failed, summary.hypotheses_not_met) == (4, 2, 1, 1)


def test_overlapping_boxes_land_exactly_and_pass():
    scenario = UnionScenario(
        a_members=[BoxSpec(lower=[0, 0], upper=[1, 1])],
        b_members=[BoxSpec(lower=[0.5, 0], upper=[2, 1])],
        start=[-3, 0.5],
        seed=0,
    )
    verdict = finite_union.check_theorem(scenario)
    assert verdict.iterations_used <= 3
    assert verdict.final_gap == 0.0
    assert verdict.status == "pass"
    assert verdict.converged
    assert verdict.limit == [0.5, 0.5]
    assert verdict.tail_spread == 0.0


class TestSettledIndex:
    def test_skips_steps_before_landing(self):
        assert finite_union.settled_index([0.5, 0.0], [0.5], 1e-9) == 1

    def test_caps_tail_length(self):
        steps = [1e-12] * 20
        assert finite_union.settled_index(steps, steps[:-1], 1e-9) == 20 - finite_union.TAIL

    def test_keeps_final_pair(self):
        assert finite_union.settled_index([1.0, 1.0], [1.0], 1e-9) == 1


def test_four_members_per_side_have_no_failures():
    verdicts = finite_union.run_batch(range(60), dim=2, members_per_side=4)
    assert finite_union.summarize(verdicts).failed == 0, [v.seed for v in verdicts if v.status == "fail"]
    verdicts = finite_union.run_batch(range(30), dim=3, members_per_side=4)
    assert finite_union.summarize(verdicts).failed == 0
