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

"""0-1 siting programs for temporary storage & disposal centers.

A problem opens centers among ``candidates`` and attaches ``assignees`` to
them. Opening center j costs ``f + b*q_j``; attaching site i to j costs
``(b - a1)*q_i + (t - a2)*q_i*d_ij`` with d in km. Attachments need d <= L,
and, with ``enforce_capacity``, a center holds at most its capacity including
its own waste. With ``allow_self_service`` a site may be both candidate and
assignee; opening it covers its own waste.

Layer 1 uses the large sites as candidates and the covered commons as
assignees. Layer 2 uses the uncovered commons as both, with capacity.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Mapping

from medsite.utils.domain import Instance, ModelParams
from medsite.utils.errors import ContractViolation, InfeasibleError, InvalidInputError, SizeLimitError
from medsite.utils.geo import DistanceMatrix

logger = logging.getLogger(__name__)

EXACT_SIZE_LIMIT = 20
EPS = 1e-9


@dataclass(frozen=True, eq=False)
class SitingProblem:
    candidates: tuple
    assignees: tuple
    dm: DistanceMatrix
    params: ModelParams
    q_kg: Mapping[int, float]
    capacity_kg: Mapping[int, float]
    enforce_capacity: bool = False
    allow_self_service: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'candidates', tuple(sorted(set(self.candidates))))
        object.__setattr__(self, 'assignees', tuple(sorted(set(self.assignees))))
        for site_id in self.candidates + self.assignees:
            if site_id not in self.q_kg:
                raise InvalidInputError(f'site {site_id} has no daily waste')
            try:
                self.dm.index(site_id)
            except KeyError:
                raise InvalidInputError(f'site {site_id} is not in the distance matrix') from None
        both = set(self.candidates) & set(self.assignees)
        if both and not self.allow_self_service:
            raise InvalidInputError(f'sites {sorted(both)} are both candidates and assignees without self-service')

    @classmethod
    def from_instance(cls, inst: Instance, params: ModelParams, candidates, assignees,
                      enforce_capacity=False, allow_self_service=False, dm=None):
        ids = set(candidates) | set(assignees)
        return cls(
            candidates=tuple(candidates),
            assignees=tuple(assignees),
            dm=dm if dm is not None else inst.distance_matrix,
            params=params,
            q_kg={i: inst.site(i).q_kg_day for i in ids},
            capacity_kg={i: inst.site(i).capacity_kg for i in ids},
            enforce_capacity=enforce_capacity,
            allow_self_service=allow_self_service,
        )

    def subproblem(self, site_ids):
        keep = set(site_ids)
        return SitingProblem(
            candidates=tuple(j for j in self.candidates if j in keep),
            assignees=tuple(i for i in self.assignees if i in keep),
            dm=self.dm,
            params=self.params,
            q_kg=self.q_kg,
            capacity_kg=self.capacity_kg,
            enforce_capacity=self.enforce_capacity,
            allow_self_service=self.allow_self_service,
        )

    def feasible(self, i, j):
        return i != j and self.dm.meters(i, j) <= self.params.L_m

    def opening_cost(self, j):
        return self.params.f_cny + self.params.b_cny_kg * self.q_kg[j]

    def marginal(self, i, j):
        q = self.q_kg[i]
        return self.params.net_disposal * q + self.params.net_transfer * q * self.dm.km(i, j)

    def self_served(self, i, open_centers):
        return self.allow_self_service and i in open_centers

    def free_capacity(self, j):
        return self.capacity_kg[j] - self.q_kg[j]

    def options(self, i):
        """Candidates that may receive site i, ascending id."""
        return [j for j in self.candidates if self.feasible(i, j)]


@dataclass
class SitingSolution:
    open_centers: frozenset
    assignment: Dict[int, int]
    unassigned: frozenset
    objective_cny: float
    optimal: bool = False
    solver: str = ''

    def covered(self):
        return set(self.assignment) | set(self.open_centers)


def objective_value(prob: SitingProblem, sol: SitingSolution) -> float:
    total = 0.0
    for j in sorted(sol.open_centers):
        total += prob.opening_cost(j)
    for i in sorted(sol.assignment):
        j = sol.assignment[i]
        if j not in sol.open_centers:
            raise ContractViolation(f'site {i} is assigned to {j}, which is not an open center')
        if i == j:
            raise ContractViolation(f'site {i} is assigned to itself')
        total += prob.marginal(i, j)
    return total


def assign_to_centers(open_centers, prob: SitingProblem):
    """Attach every assignee to its cheapest feasible open center.

    Assignees are served in decreasing waste, ties by ascending id, so that
    capacity goes to the heaviest sites first. Center ties go to the lower id.
    """
    open_sorted = sorted(open_centers)
    remaining = {j: prob.free_capacity(j) for j in open_sorted}
    assignment = {}
    unassigned = set()
    for i in sorted(prob.assignees, key=lambda s: (-prob.q_kg[s], s)):
        if prob.self_served(i, open_centers):
            continue
        best_j, best_cost = None, None
        for j in open_sorted:
            if not prob.feasible(i, j):
                continue
            if prob.enforce_capacity and prob.q_kg[i] > remaining[j] + EPS:
                continue
            cost = prob.marginal(i, j)
            if best_cost is None or cost < best_cost:
                best_j, best_cost = j, cost
        if best_j is None:
            unassigned.add(i)
            continue
        assignment[i] = best_j
        if prob.enforce_capacity:
            remaining[best_j] -= prob.q_kg[i]
    return assignment, frozenset(unassigned)


def split_components(prob: SitingProblem):
    """Independent sub-problems of the candidate/assignee feasibility graph."""
    nodes = sorted(set(prob.candidates) | set(prob.assignees))
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i in prob.assignees:
        for j in prob.options(i):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)

    groups = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    return [prob.subproblem(groups[root]) for root in sorted(groups)]


def optimal_assignment(open_centers, prob: SitingProblem, require_full: bool):
    """Cheapest attachment of every assignee given fixed openings.

    Returns ``(assignment, unassigned, cost)`` or None when no attachment
    satisfies the constraints. An optional assignee stays unattached unless
    attaching it lowers the cost.
    """
    open_sorted = sorted(open_centers)
    pending = [i for i in prob.assignees if not prob.self_served(i, open_centers)]

    choices = {}
    for i in pending:
        opts = sorted(((prob.marginal(i, j), j) for j in open_sorted if prob.feasible(i, j)))
        if not require_full:
            opts = sorted(opts + [(0.0, None)], key=lambda c: (c[0], c[1] is not None, c[1] or 0))
        if not opts:
            return None
        choices[i] = opts

    if not prob.enforce_capacity:
        assignment, unassigned, cost = {}, set(), 0.0
        for i in pending:
            price, j = choices[i][0]
            if j is None:
                unassigned.add(i)
            else:
                assignment[i] = j
                cost += price
        return assignment, frozenset(unassigned), cost

    order = sorted(pending, key=lambda s: (-prob.q_kg[s], s))
    floor = [0.0] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        floor[k] = floor[k + 1] + choices[order[k]][0][0]
    remaining = {j: prob.free_capacity(j) for j in open_sorted}
    picked = {}
    best = {'cost': float('inf'), 'picked': None}

    def dfs(k, cost):
        if cost + floor[k] >= best['cost'] - EPS:
            return
        if k == len(order):
            best['cost'], best['picked'] = cost, dict(picked)
            return
        i = order[k]
        q = prob.q_kg[i]
        for price, j in choices[i]:
            if j is None:
                picked[i] = None
                dfs(k + 1, cost)
                continue
            if q > remaining[j] + EPS:
                continue
            remaining[j] -= q
            picked[i] = j
            dfs(k + 1, cost + price)
            remaining[j] += q
        picked.pop(i, None)

    dfs(0, 0.0)
    if best['picked'] is None:
        return None
    assignment = {i: j for i, j in best['picked'].items() if j is not None}
    unassigned = frozenset(i for i, j in best['picked'].items() if j is None)
    return assignment, unassigned, best['cost']


class _BranchAndBound:
    """Depth-first search over open/close bits of one component's candidates."""

    def __init__(self, prob: SitingProblem, require_full: bool, upper_bound=float('inf')):
        self.prob = prob
        self.require_full = require_full
        self.cands = list(prob.candidates)
        self.position = {j: k for k, j in enumerate(self.cands)}
        self.opening = [prob.opening_cost(j) for j in self.cands]
        # per assignee: (candidate position, marginal); self-service at cost 0
        self.reach = {}
        for i in prob.assignees:
            reach = [(self.position[j], prob.marginal(i, j)) for j in prob.options(i)]
            if prob.allow_self_service and i in self.position:
                reach.append((self.position[i], 0.0))
            self.reach[i] = reach
        self.best_value = upper_bound
        self.best = None
        self.nodes = 0

    def bound(self, k, state, fixed):
        if not self.require_full:
            return fixed
        total = fixed
        for i, reach in self.reach.items():
            low = None
            for pos, price in reach:
                if pos >= k or state[pos]:
                    if low is None or price < low:
                        low = price
            if low is None:
                return None
            total += low
        return total

    def run(self):
        state = [False] * len(self.cands)
        self._visit(0, state, 0.0)
        return self.best

    def _visit(self, k, state, fixed):
        self.nodes += 1
        lower = self.bound(k, state, fixed)
        if lower is None or lower >= self.best_value - EPS:
            return
        if k == len(self.cands):
            opened = frozenset(j for j, on in zip(self.cands, state) if on)
            result = optimal_assignment(opened, self.prob, self.require_full)
            if result is None:
                return
            assignment, unassigned, cost = result
            value = fixed + cost
            if value < self.best_value - EPS:
                self.best_value = value
                self.best = (opened, assignment, unassigned)
            return
        # close first, then open
        self._visit(k + 1, state, fixed)
        state[k] = True
        self._visit(k + 1, state, fixed + self.opening[k])
        state[k] = False


def _check_coverable(prob: SitingProblem):
    for i in prob.assignees:
        if prob.options(i):
            continue
        if prob.allow_self_service and i in prob.candidates:
            continue
        raise InfeasibleError(f'site {i} has no candidate center within {prob.params.L_m} m', site_id=i)


def solve_siting_exact(prob: SitingProblem, require_full_assignment: bool = True,
                       size_limit: int = EXACT_SIZE_LIMIT) -> SitingSolution:
    if require_full_assignment:
        _check_coverable(prob)
    components = split_components(prob)
    largest = max((len(c.candidates) for c in components), default=0)
    if largest > size_limit:
        raise SizeLimitError(
            f'a component has {largest} candidates, over the exact limit of {size_limit}; '
            f'use solve_siting_greedy for problems of this size')

    open_centers, assignment, unassigned = set(), {}, set()
    for comp in components:
        if not comp.assignees and not require_full_assignment:
            continue
        upper, warm = float('inf'), None
        if require_full_assignment:
            warm = solve_siting_greedy(comp, require_full_assignment=True)
            if warm.unassigned:
                warm = None
            else:
                upper = warm.objective_cny + 1e-6
        search = _BranchAndBound(comp, require_full_assignment, upper)
        found = search.run()
        if found is None and warm is not None:
            found = (warm.open_centers, warm.assignment, warm.unassigned)
        logger.debug('component of %d candidates / %d assignees: %d nodes',
                     len(comp.candidates), len(comp.assignees), search.nodes)
        if found is None:
            first = comp.assignees[0] if comp.assignees else None
            raise InfeasibleError(
                f'no choice of centers attaches every site of the component holding site {first} '
                f'within capacity', site_id=first)
        opened, attach, left = found
        open_centers |= opened
        assignment.update(attach)
        unassigned |= left

    sol = SitingSolution(frozenset(open_centers), assignment, frozenset(unassigned), 0.0,
                         optimal=True, solver='exact')
    sol.objective_cny = objective_value(prob, sol)
    return sol


def _delta_by_reassign(prob, open_centers, j, current_cost, current_covered):
    trial = open_centers | {j}
    attach, _ = assign_to_centers(trial, prob)
    cost = sum(prob.opening_cost(c) for c in trial) + sum(prob.marginal(i, c) for i, c in attach.items())
    covered = len(attach) + sum(1 for i in prob.assignees if prob.self_served(i, trial))
    return cost - current_cost, covered - current_covered


def solve_siting_greedy(prob: SitingProblem, require_full_assignment: bool = False) -> SitingSolution:
    """Add-heuristic: open the candidate with the best cost per newly covered site.

    Without capacity, each step prices every closed candidate incrementally, so
    a full run is O(|candidates|^2 * |assignees|). With capacity, a step
    re-runs assign_to_centers per closed candidate.
    """
    reach = {j: [] for j in prob.candidates}
    for i in prob.assignees:
        for j in prob.options(i):
            reach[j].append(i)

    open_centers = frozenset()
    best = {}
    cost_now = 0.0

    def price(j):
        if prob.enforce_capacity:
            covered_now = len(best) + sum(1 for i in prob.assignees if prob.self_served(i, open_centers))
            return _delta_by_reassign(prob, open_centers, j, cost_now, covered_now)
        delta, newly = prob.opening_cost(j), 0
        if prob.allow_self_service and j in best:
            delta -= best[j][1]
        elif prob.allow_self_service and j in prob.assignees:
            newly += 1
        for i in reach[j]:
            if prob.self_served(i, open_centers):
                continue
            m = prob.marginal(i, j)
            if i not in best:
                delta += m
                newly += 1
            elif m < best[i][1]:
                delta += m - best[i][1]
        return delta, newly

    def open_one(j):
        nonlocal open_centers, best, cost_now
        open_centers = open_centers | {j}
        attach, _ = assign_to_centers(open_centers, prob)
        best = {i: (c, prob.marginal(i, c)) for i, c in attach.items()}
        cost_now = sum(prob.opening_cost(c) for c in open_centers) + sum(m for _, m in best.values())

    if require_full_assignment:
        while True:
            pick, pick_ratio = None, None
            for j in prob.candidates:
                if j in open_centers:
                    continue
                delta, newly = price(j)
                if newly <= 0:
                    continue
                ratio = delta / newly
                if pick_ratio is None or ratio < pick_ratio - EPS:
                    pick, pick_ratio = j, ratio
            if pick is None:
                break
            open_one(pick)

    while True:
        pick, pick_delta = None, -EPS
        for j in prob.candidates:
            if j in open_centers:
                continue
            delta, _ = price(j)
            if delta < pick_delta:
                pick, pick_delta = j, delta
        if pick is None:
            break
        open_one(pick)

    assignment, unassigned = assign_to_centers(open_centers, prob)
    sol = SitingSolution(open_centers, assignment, unassigned, 0.0, optimal=False, solver='greedy')
    sol.objective_cny = objective_value(prob, sol)
    return sol
