# Copyright (2025) The medsite authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     https://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cost audit, operating metrics, plan validation and the brute-force oracle.

Nothing here reuses solver bookkeeping: every cost term is recomputed from the
instance, the parameters and the plan.
"""

import math
from collections import Counter
from dataclasses import dataclass, fields

from medsite.layers.plan import EXCEEDS_L, SitingPlan
from medsite.tools.siting_solver import (SitingProblem, SitingSolution, assign_to_centers,
                                         objective_value)
from medsite.utils.domain import Instance, ModelParams
from medsite.utils.errors import ContractViolation, InfeasibleError, InvalidInputError, SizeLimitError
from medsite.utils.violation_list import ViolationCode, ViolationList

BRUTE_FORCE_LIMIT = 12
DIST_TOL_M = 1e-9
CAPACITY_TOL_KG = 1e-9

OPS_MODEL_NOTE = ('working time and maintenance use the configurable OpsCoefficients model '
                  '(tau0, tau1, m0), a stand-in for formulas that are not published')

# codes that make a plan impossible to price
STRUCTURAL_CODES = (ViolationCode.UNKNOWN_SITE, ViolationCode.CLOSED_CENTER, ViolationCode.MULTI_ASSIGN)


@dataclass(frozen=True)
class CostBreakdown:
    fixed_cny: float = 0.0
    disposal_cny: float = 0.0
    disposal_subsidy_cny: float = 0.0
    transfer_cny: float = 0.0
    transfer_subsidy_cny: float = 0.0

    @property
    def total_cny(self):
        return (self.fixed_cny + self.disposal_cny - self.disposal_subsidy_cny
                + self.transfer_cny - self.transfer_subsidy_cny)


@dataclass(frozen=True)
class OpsCoefficients:
    tau0_min: float = 8.0
    tau1_min_kg: float = 0.1
    m0_cny: float = 50.0

    def check(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidInputError(f'{item.name} must be a finite number, got {value!r}')
            if value < 0:
                raise InvalidInputError(f'{item.name} must be non-negative, got {value}')
        return self


@dataclass(frozen=True)
class OpsReport:
    operating_sites: int
    total_waste_kg: float
    transferred_kg: float
    transfer_kg_km: float
    working_time_min: float
    maintenance_cny: float
    reduction_time_pct: float = 0.0
    reduction_cost_pct: float = 0.0
    note: str = OPS_MODEL_NOTE


def _distances(inst, dm):
    return dm if dm is not None else inst.distance_matrix


def validate_plan(inst: Instance, params: ModelParams, plan: SitingPlan, dm=None) -> ViolationList:
    violations = ViolationList()
    known = set(inst.ids)
    counts = Counter(c.site_id for c in plan.centers)
    centers = {}
    for c in plan.centers:
        if c.site_id not in known:
            violations.add(ViolationCode.UNKNOWN_SITE, f'center {c.site_id} is not a site', c.site_id)
            continue
        if counts[c.site_id] > 1 and c.site_id in centers:
            violations.add(ViolationCode.MULTI_ASSIGN, f'center {c.site_id} listed {counts[c.site_id]} times', c.site_id)
            continue
        centers[c.site_id] = c.layer
        large = inst.site(c.site_id).is_large
        if (c.layer == 1) != large:
            tier = 'large' if large else 'common'
            violations.add(ViolationCode.LAYER_MISMATCH, f'{tier} site {c.site_id} is a layer-{c.layer} center', c.site_id)

    dm = None if not plan.assignments else _distances(inst, dm)
    load = {j: inst.site(j).q_kg_day for j in centers}
    for site_id in sorted(plan.assignments):
        a = plan.assignments[site_id]
        if site_id not in known or a.center_id not in known:
            bad = site_id if site_id not in known else a.center_id
            violations.add(ViolationCode.UNKNOWN_SITE, f'assignment {site_id} -> {a.center_id} names an unknown site', bad)
            continue
        if site_id in centers:
            violations.add(ViolationCode.MULTI_ASSIGN, f'site {site_id} is a center and also attached to {a.center_id}', site_id)
            continue
        if a.center_id == site_id or a.center_id not in centers:
            violations.add(ViolationCode.CLOSED_CENTER, f'site {site_id} is attached to {a.center_id}, which is not a center', site_id)
            continue
        if a.layer != centers[a.center_id]:
            violations.add(ViolationCode.LAYER_MISMATCH,
                           f'layer-{a.layer} assignment to a layer-{centers[a.center_id]} center {a.center_id}', site_id)
        d = dm.meters(site_id, a.center_id)
        if d > params.L_m + DIST_TOL_M and (a.layer in (1, 2) or EXCEEDS_L not in a.flags):
            violations.add(ViolationCode.DIST_EXCEEDED, f'{site_id} -> {a.center_id} is {d:.1f} m, L={params.L_m:g} m', site_id)
        load[a.center_id] += inst.site(site_id).q_kg_day

    for j in sorted(centers):
        if centers[j] != 2:
            continue
        cap = inst.site(j).capacity_kg
        if load[j] > cap + CAPACITY_TOL_KG:
            violations.add(ViolationCode.CAPACITY_EXCEEDED, f'center {j} holds {load[j]:.1f} kg of {cap:.1f} kg', j)

    for site_id in inst.ids:
        if site_id not in centers and site_id not in plan.assignments:
            violations.add(ViolationCode.UNASSIGNED_SITE, f'site {site_id} has no center', site_id)
    return violations


def cost_audit(inst: Instance, params: ModelParams, plan: SitingPlan, dm=None) -> CostBreakdown:
    """Every objective term recomputed from the plan.

    A center pays ``f + b*q_j``; an attached site adds ``b*q_i`` disposal,
    ``a1*q_i`` subsidy, and ``t``/``a2`` per kg-km of transfer.
    """
    broken = [v for v in validate_plan(inst, params, plan, dm) if v.code in STRUCTURAL_CODES]
    if broken:
        raise ContractViolation('cannot audit the plan: ' + '; '.join(str(v) for v in broken))

    fixed = disposal = subsidy = transfer = transfer_subsidy = 0.0
    for site_id in sorted(plan.center_ids()):
        fixed += params.f_cny
        disposal += params.b_cny_kg * inst.site(site_id).q_kg_day
    if plan.assignments:
        dm = _distances(inst, dm)
    for site_id in sorted(plan.assignments):
        q = inst.site(site_id).q_kg_day
        kg_km = q * dm.km(site_id, plan.assignments[site_id].center_id)
        disposal += params.b_cny_kg * q
        subsidy += params.a1_cny_kg * q
        transfer += params.t_cny_kg_km * kg_km
        transfer_subsidy += params.a2_cny_kg_km * kg_km
    return CostBreakdown(fixed, disposal, subsidy, transfer, transfer_subsidy)


def plan_from_solution(prob: SitingProblem, sol: SitingSolution, layer: int) -> SitingPlan:
    plan = SitingPlan()
    for j in sorted(sol.open_centers):
        plan.add_center(j, layer)
    for i in sorted(sol.assignment):
        plan.attach(i, sol.assignment[i], layer)
    return plan


def _pct(before, after):
    if before <= 0:
        return 0.0
    return 100.0 * (before - after) / before


def _report(operating, total, transferred, kg_km, coeffs, params, baseline=None):
    working = operating * coeffs.tau0_min + coeffs.tau1_min_kg * total
    maintenance = (operating * coeffs.m0_cny + params.b_cny_kg * total
                   - params.a1_cny_kg * transferred + params.net_transfer * kg_km)
    time_pct = cost_pct = 0.0
    if baseline is not None:
        time_pct = _pct(baseline.working_time_min, working)
        cost_pct = _pct(baseline.maintenance_cny, maintenance)
    return OpsReport(operating, total, transferred, kg_km, working, maintenance, time_pct, cost_pct)


def baseline_metrics(inst: Instance, coeffs: OpsCoefficients = OpsCoefficients(),
                     params: ModelParams = ModelParams()) -> OpsReport:
    """Every site disposes of its own waste; nothing is transferred."""
    total = sum(s.q_kg_day for s in inst.sites)
    return _report(len(inst.sites), total, 0.0, 0.0, coeffs, params)


def operational_metrics(inst: Instance, plan: SitingPlan, coeffs: OpsCoefficients = OpsCoefficients(),
                        params: ModelParams = ModelParams(), dm=None) -> OpsReport:
    total = sum(s.q_kg_day for s in inst.sites)
    transferred = kg_km = 0.0
    if plan.assignments:
        dm = _distances(inst, dm)
    for site_id in sorted(plan.assignments):
        q = inst.site(site_id).q_kg_day
        transferred += q
        kg_km += q * dm.km(site_id, plan.assignments[site_id].center_id)
    baseline = baseline_metrics(inst, coeffs, params)
    return _report(len(plan.centers), total, transferred, kg_km, coeffs, params, baseline)


def _enumerate_capacitated(prob, opened, pending, require_full):
    """Cheapest capacity-feasible attachment by full enumeration, pruned by cost only."""
    remaining = {j: prob.free_capacity(j) for j in opened}
    options = {}
    for i in pending:
        opts = [(prob.marginal(i, j), j) for j in sorted(opened) if prob.feasible(i, j)]
        if not require_full:
            opts.append((0.0, None))
        options[i] = opts
    best = {'cost': math.inf, 'picked': None}
    picked = {}

    def walk(k, cost):
        if cost >= best['cost']:
            return
        if k == len(pending):
            best['cost'], best['picked'] = cost, dict(picked)
            return
        i = pending[k]
        for price, j in options[i]:
            if j is not None:
                if prob.q_kg[i] > remaining[j] + CAPACITY_TOL_KG:
                    continue
                remaining[j] -= prob.q_kg[i]
            picked[i] = j
            walk(k + 1, cost + price)
            if j is not None:
                remaining[j] += prob.q_kg[i]
        picked.pop(i, None)

    walk(0, 0.0)
    return best['picked']


def brute_force_optimum(prob: SitingProblem, require_full_assignment: bool = True) -> SitingSolution:
    """Exhaustive reference optimum over every subset of candidates.

    Subsets are visited in increasing bitmask order (bit k is the k-th lowest
    candidate id) and only a strictly cheaper one replaces the incumbent.
    """
    if len(prob.candidates) > BRUTE_FORCE_LIMIT or len(prob.assignees) > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(
            f'brute force handles at most {BRUTE_FORCE_LIMIT} candidates and {BRUTE_FORCE_LIMIT} assignees, '
            f'got {len(prob.candidates)} and {len(prob.assignees)}; use solve_siting_greedy')

    best, best_value = None, math.inf
    for mask in range(1 << len(prob.candidates)):
        opened = frozenset(j for k, j in enumerate(prob.candidates) if mask >> k & 1)
        opening = sum(prob.opening_cost(j) for j in sorted(opened))
        if opening >= best_value:
            continue
        pending = [i for i in prob.assignees if not prob.self_served(i, opened)]

        if prob.enforce_capacity:
            picked = _enumerate_capacitated(prob, opened, pending, require_full_assignment)
            if picked is None:
                continue
            assignment = {i: j for i, j in picked.items() if j is not None}
        elif require_full_assignment:
            assignment, left = assign_to_centers(opened, prob)
            if left:
                continue
        else:
            # marginals are never negative, so an optional site stays home
            assignment = {}

        unassigned = frozenset(i for i in pending if i not in assignment)
        candidate = SitingSolution(opened, assignment, unassigned, 0.0, optimal=True, solver='brute_force')
        value = objective_value(prob, candidate)
        if value < best_value:
            best, best_value = candidate, value

    if best is None:
        raise InfeasibleError('no subset of candidates attaches every assignee')
    best.objective_cny = best_value
    return best
