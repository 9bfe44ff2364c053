import numpy as np
import pytest

from medsite.layers.plan import EXCEEDS_L, SitingPlan
from medsite.layers.pipeline import run_pipeline
from medsite.tools.siting_solver import assign_to_centers, solve_siting_exact
from medsite.utils.domain import Instance, ModelParams, OrgType
from medsite.utils.errors import ContractViolation, InfeasibleError, SizeLimitError
from medsite.utils.evaluate import (OpsCoefficients, baseline_metrics, brute_force_optimum, cost_audit,
                                    operational_metrics, plan_from_solution, validate_plan)
from medsite.utils.geo import DistanceMatrix
from medsite.utils.violation_list import ViolationCode

from tests.helpers import common_site, instance, large_site, make_problem, random_problem

PARAMS = ModelParams()


def hand_instance():
    inst = instance(large_site(0, 0, 0, beds=250), common_site(1, 400, 0, OrgType.Outpatient))
    dm = DistanceMatrix(np.array([[0.0, 400.0], [400.0, 0.0]]), (0, 1))
    return inst, dm


def hand_plan():
    plan = SitingPlan()
    plan.add_center(0, 1)
    plan.attach(1, 0, 1)
    return plan


def test_audit_of_empty_plan():
    audit = cost_audit(Instance.from_sites([]), PARAMS, SitingPlan())
    assert audit.total_cny == 0.0
    assert audit.fixed_cny == audit.disposal_cny == audit.transfer_cny == 0.0


def test_audit_hand_value():
    inst, dm = hand_instance()
    audit = cost_audit(inst, PARAMS, hand_plan(), dm)
    assert audit.fixed_cny == 3000.0
    assert audit.disposal_cny == pytest.approx(3 * 117.5)
    assert audit.disposal_subsidy_cny == pytest.approx(17.5)
    assert audit.transfer_cny == pytest.approx(2 * 17.5 * 0.4)
    assert audit.transfer_subsidy_cny == pytest.approx(0.5 * 17.5 * 0.4)
    assert audit.total_cny == pytest.approx(3345.5, abs=1e-9)


def test_audit_rejects_structurally_broken_plan():
    inst, dm = hand_instance()
    plan = SitingPlan()
    plan.attach(1, 0, 1)
    with pytest.raises(ContractViolation):
        cost_audit(inst, PARAMS, plan, dm)


@pytest.mark.parametrize('seed', range(10))
def test_audit_matches_solver_objective(seed):
    prob = random_problem(seed, 6, 8, capacitated=seed % 2 == 1)
    try:
        sol = solve_siting_exact(prob, require_full_assignment=True)
    except InfeasibleError:
        pytest.skip('no full assignment exists')
    # positions come from prob.dm, only the waste matters here
    inst = instance(*[common_site(i, 0, 0, OrgType.Outpatient, q=prob.q_kg[i]) for i in prob.dm.ids])
    layer = 2 if prob.enforce_capacity else 1
    audit = cost_audit(inst, prob.params, plan_from_solution(prob, sol, layer), prob.dm)
    assert audit.total_cny == pytest.approx(sol.objective_cny, abs=1e-6)


def test_validate_accepts_hand_plan():
    inst, dm = hand_instance()
    assert validate_plan(inst, PARAMS, hand_plan(), dm).codes() == []


def test_validate_layer_one_distance():
    inst = instance(large_site(0, 0, 0), common_site(1, 600, 0))
    assert validate_plan(inst, PARAMS, hand_plan()).codes() == [ViolationCode.DIST_EXCEEDED]


def test_validate_layer_three_distance_needs_flag():
    inst = instance(common_site(1, 0, 0), common_site(2, 900, 0))
    plan = SitingPlan()
    plan.add_center(1, 3)
    plan.attach(2, 1, 3)
    assert validate_plan(inst, PARAMS, plan).codes() == [ViolationCode.DIST_EXCEEDED]
    plan.attach(2, 1, 3, (EXCEEDS_L,))
    assert validate_plan(inst, PARAMS, plan).codes() == []


def test_validate_capacity_in_layer_two():
    inst = instance(common_site(1, 0, 0, OrgType.Outpatient, q=800.0),
                    common_site(2, 100, 0, OrgType.Outpatient, q=400.0),
                    common_site(3, 0, 100, OrgType.Outpatient, q=400.0))
    plan = SitingPlan()
    plan.add_center(1, 2)
    plan.attach(2, 1, 2)
    plan.attach(3, 1, 2)
    assert validate_plan(inst, PARAMS, plan).codes() == [ViolationCode.CAPACITY_EXCEEDED]


def test_validate_structural_codes():
    inst = instance(large_site(0, 0, 0), common_site(1, 100, 0), common_site(2, 200, 0))
    plan = SitingPlan()
    plan.add_center(0, 1)
    plan.add_center(1, 1)
    plan.attach(1, 0, 1)
    plan.attach(2, 2, 1)
    plan.attach(9, 0, 1)
    codes = validate_plan(inst, PARAMS, plan).codes()
    assert ViolationCode.LAYER_MISMATCH in codes
    assert ViolationCode.MULTI_ASSIGN in codes
    assert ViolationCode.CLOSED_CENTER in codes
    assert ViolationCode.UNKNOWN_SITE in codes


def test_validate_unassigned_site():
    inst = instance(large_site(0, 0, 0), common_site(1, 100, 0))
    plan = SitingPlan()
    plan.add_center(0, 1)
    assert validate_plan(inst, PARAMS, plan).codes() == [ViolationCode.UNASSIGNED_SITE]


def test_working_time_formula():
    inst = instance(*[common_site(i, 1000.0 * i, 0, OrgType.Outpatient, q=q) for i, q in enumerate([20, 30, 50])])
    plan = SitingPlan()
    for i in range(3):
        plan.add_center(i, 3)
    ops = operational_metrics(inst, plan, OpsCoefficients(tau0_min=8, tau1_min_kg=0.1), PARAMS)
    assert ops.operating_sites == 3
    assert ops.working_time_min == pytest.approx(34.0)


def test_nothing_to_operate():
    empty = Instance.from_sites([])
    ops = operational_metrics(empty, SitingPlan())
    assert ops.working_time_min == 0.0
    assert ops.maintenance_cny == 0.0
    assert ops.reduction_time_pct == 0.0


def test_maintenance_formula():
    inst = instance(large_site(0, 0, 0, beds=250), common_site(1, 0, 0, OrgType.Outpatient, q=100.0))
    dm = DistanceMatrix(np.zeros((2, 2)), (0, 1))
    coeffs = OpsCoefficients(m0_cny=50)
    both = SitingPlan()
    both.add_center(0, 1)
    both.add_center(1, 3)
    assert operational_metrics(inst, both, coeffs, PARAMS, dm).maintenance_cny == pytest.approx(2 * 50 + 3 * 200)

    merged = hand_plan()
    ops = operational_metrics(inst, merged, coeffs, PARAMS, dm)
    assert ops.transferred_kg == 100.0
    assert ops.transfer_kg_km == 0.0
    assert ops.maintenance_cny == pytest.approx(50 + 3 * 200 - 100)


def test_baseline_operates_every_site():
    inst = instance(large_site(0, 0, 0), *[common_site(i, 300.0 * i, 0) for i in range(1, 6)])
    base = baseline_metrics(inst)
    assert base.operating_sites == 6
    assert base.transferred_kg == 0.0
    assert base.transfer_kg_km == 0.0


def test_single_site_baseline_equals_plan():
    inst = instance(common_site(3, 0, 0))
    plan = run_pipeline(inst, PARAMS)
    ops = operational_metrics(inst, plan)
    base = baseline_metrics(inst)
    assert ops.working_time_min == base.working_time_min
    assert ops.maintenance_cny == base.maintenance_cny


def test_fewer_operating_sites_take_less_time():
    inst = instance(*[common_site(i, 100.0 * i, 0) for i in range(6)])
    times = []
    for n_centers in range(6, 0, -1):
        plan = SitingPlan()
        for c in range(n_centers):
            plan.add_center(c, 3)
        times.append(operational_metrics(inst, plan).working_time_min)
    assert times == sorted(times, reverse=True)
    assert len(set(times)) == len(times)


def test_brute_force_single_pair_matches_exact():
    prob = make_problem([(0, 0), (400, 0)], [0], [1], {0: 100.0, 1: 17.5})
    brute = brute_force_optimum(prob)
    exact = solve_siting_exact(prob)
    assert brute.open_centers == exact.open_centers
    assert brute.assignment == exact.assignment
    assert brute.objective_cny == pytest.approx(3345.5, abs=1e-9)


def test_brute_force_size_limit():
    xy = [(float(k), 0.0) for k in range(14)]
    prob = make_problem(xy, range(13), [13], [1.0] * 14)
    with pytest.raises(SizeLimitError):
        brute_force_optimum(prob)


def test_brute_force_infeasible():
    prob = make_problem([(0, 0), (900, 0)], [0], [1], [100, 1.5])
    with pytest.raises(InfeasibleError):
        brute_force_optimum(prob)


@pytest.mark.parametrize('seed', range(10))
def test_uncapacitated_brute_force_assigns_cheapest_open(seed):
    prob = random_problem(seed, 5, 8)
    try:
        brute = brute_force_optimum(prob)
    except InfeasibleError:
        pytest.skip('no full assignment exists')
    nearest, _ = assign_to_centers(brute.open_centers, prob)
    assert brute.assignment == nearest
