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

"""Three-layer hierarchical siting.

1. Large sites become centers; the covered commons (set S) attach to them
   through the layer-1 program, every one of them required.
2. The uncovered commons (set N) site centers among themselves with capacity.
3. Whatever is left is clustered with K-means; each cluster's member closest
   to its centroid becomes a center and the rest attach to it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from medsite.layers.layer import Layer
from medsite.layers.plan import EXCEEDS_L, LayerSummary, SitingPlan
from medsite.tools.kmeans import best_kmeans, choose_k_elbow, snap_to_sites
from medsite.tools.siting_solver import (EXACT_SIZE_LIMIT, SitingProblem, solve_siting_exact,
                                         solve_siting_greedy)
from medsite.utils.coverage import partition_coverage
from medsite.utils.domain import Instance, ModelParams, require_valid
from medsite.utils.errors import ContractViolation, InvalidInputError, SizeLimitError

logger = logging.getLogger(__name__)


class Layer2Mode(Enum):
    exact = {
        "description": "Branch-and-bound on the uncovered commons; fails over the exact size limit."
    }
    kmeans = {
        "description": "Skip the second program; every uncovered common goes to K-means."
    }
    hybrid = {
        "description": "Branch-and-bound when every component fits the exact size limit, greedy otherwise."
    }

    @classmethod
    def parse(cls, text):
        try:
            return cls[str(text).strip().lower()]
        except KeyError:
            raise InvalidInputError(f"unknown layer-2 mode '{text}', expected one of {[m.name for m in cls]}") from None


@dataclass(frozen=True)
class PipelineConfig:
    layer2_mode: Layer2Mode = Layer2Mode.hybrid
    exact_size_limit: int = EXACT_SIZE_LIMIT
    layer2_full_assignment: bool = False
    kmeans_k: Optional[int] = None
    k_max: int = 12
    seed: int = 0

    def check(self):
        if self.exact_size_limit < 1:
            raise InvalidInputError(f'exact_size_limit must be at least 1, got {self.exact_size_limit}')
        if self.k_max < 2:
            raise InvalidInputError(f'k_max must be at least 2, got {self.k_max}')
        if self.kmeans_k is not None and self.kmeans_k < 1:
            raise InvalidInputError(f'kmeans_k must be at least 1, got {self.kmeans_k}')
        if self.seed < 0:
            raise InvalidInputError(f'seed must be non-negative, got {self.seed}')
        return self


class PipelineState:
    def __init__(self, inst, params, cfg):
        self.inst = inst
        self.params = params
        self.cfg = cfg
        self.dm = inst.distance_matrix
        self.partition = partition_coverage(inst, self.dm, params.L_m)
        self.plan = SitingPlan()

    def pending(self, site_ids):
        handled = self.plan.handled()
        return sorted(s for s in site_ids if s not in handled)


class LargeSiteLayer(Layer):
    number = 1
    name = 'large sites'

    def run(self, state):
        inst, cfg = state.inst, state.cfg
        large = sorted(inst.large_ids)
        covered = sorted(state.partition.covered)
        for j in large:
            state.plan.add_center(j, self.number)
        self.note(f'{len(large)} large sites are centers; {len(covered)} commons lie within L of one')
        if not large:
            return LayerSummary(self.number, 'skipped', messages=tuple(self.messages))

        prob = SitingProblem.from_instance(inst, state.params, large, covered, dm=state.dm)
        try:
            sol = solve_siting_exact(prob, require_full_assignment=True, size_limit=cfg.exact_size_limit)
        except SizeLimitError as e:
            logger.warning('layer 1 falls back to the greedy solver: %s', e)
            sol = solve_siting_greedy(prob, require_full_assignment=True)
        if sol.unassigned:
            raise ContractViolation(f'covered sites {sorted(sol.unassigned)} lost every large site')
        for i in sorted(sol.assignment):
            state.plan.attach(i, sol.assignment[i], self.number)
        self.note(f'{sol.solver} solve opened {len(sol.open_centers)} large sites for transfers, '
                  f'Z1={sol.objective_cny:.2f} CNY')
        return LayerSummary(self.number, sol.solver, sol.objective_cny, sol.optimal,
                            centers=len(large), assigned=len(sol.assignment),
                            messages=tuple(self.messages))


class UncoveredSiteLayer(Layer):
    number = 2
    name = 'uncovered commons'

    def run(self, state):
        cfg = state.cfg
        uncovered = state.pending(state.partition.uncovered)
        if not uncovered or cfg.layer2_mode is Layer2Mode.kmeans:
            self.note(f'skipped ({len(uncovered)} uncovered commons, mode {cfg.layer2_mode.name})')
            return LayerSummary(self.number, 'skipped', messages=tuple(self.messages))

        prob = SitingProblem.from_instance(state.inst, state.params, uncovered, uncovered,
                                           enforce_capacity=True, allow_self_service=True, dm=state.dm)
        full = cfg.layer2_full_assignment
        if cfg.layer2_mode is Layer2Mode.exact:
            sol = solve_siting_exact(prob, require_full_assignment=full, size_limit=cfg.exact_size_limit)
        else:
            try:
                sol = solve_siting_exact(prob, require_full_assignment=full, size_limit=cfg.exact_size_limit)
            except SizeLimitError:
                self.note('over the exact size limit, using the greedy solver')
                sol = solve_siting_greedy(prob, require_full_assignment=full)

        for j in sorted(sol.open_centers):
            state.plan.add_center(j, self.number)
        for i in sorted(sol.assignment):
            state.plan.attach(i, sol.assignment[i], self.number)
        left = len(uncovered) - len(sol.open_centers) - len(sol.assignment)
        self.note(f'{sol.solver} solve opened {len(sol.open_centers)} centers, attached '
                  f'{len(sol.assignment)} sites, left {left}; Z2={sol.objective_cny:.2f} CNY')
        return LayerSummary(self.number, sol.solver, sol.objective_cny, sol.optimal,
                            centers=len(sol.open_centers), assigned=len(sol.assignment),
                            messages=tuple(self.messages))


class ClusterLayer(Layer):
    number = 3
    name = 'k-means'

    def pick_k(self, state, ids, points):
        cfg = state.cfg
        n = len(ids)
        if cfg.kmeans_k is not None:
            return min(cfg.kmeans_k, n)
        if n == 1:
            return 1
        if n == 2:
            return 1 if state.dm.meters(ids[0], ids[1]) <= state.params.L_m else 2
        return choose_k_elbow(points, min(cfg.k_max, n), cfg.seed)

    def run(self, state):
        inst = state.inst
        left = state.pending(inst.common_ids)
        if not left:
            self.note('nothing left to cluster')
            return LayerSummary(self.number, 'skipped', messages=tuple(self.messages))

        position = {s.id: n for n, s in enumerate(inst.sites)}
        points = [inst.planar_points[position[s]] for s in left]
        k = self.pick_k(state, left, points)
        clustering = best_kmeans(points, k, state.cfg.seed)
        snapped = snap_to_sites(clustering, points, left)
        exceeded = 0
        for c, center in enumerate(snapped):
            state.plan.add_center(center, self.number)
            for m in clustering.members(c):
                site = left[m]
                if site == center:
                    continue
                flags = ()
                if state.dm.meters(site, center) > state.params.L_m:
                    flags = (EXCEEDS_L,)
                    exceeded += 1
                state.plan.attach(site, center, self.number, flags)
        self.note(f'{len(left)} sites in K={k} clusters (WCSS {clustering.wcss:.1f} m^2), '
                  f'{exceeded} attachments beyond L')
        return LayerSummary(self.number, 'kmeans', centers=k, assigned=len(left) - k, k=k,
                            messages=tuple(self.messages))


def run_pipeline(inst: Instance, params: ModelParams, cfg: PipelineConfig = PipelineConfig()) -> SitingPlan:
    require_valid(inst)
    params.check()
    cfg.check()
    state = PipelineState(inst, params, cfg)
    logger.info('%d sites: %d large, %d covered commons, %d uncovered commons', len(inst.sites),
                len(inst.large_ids), len(state.partition.covered), len(state.partition.uncovered))
    for layer in (LargeSiteLayer(), UncoveredSiteLayer(), ClusterLayer()):
        state.plan.layers.append(layer.run(state))
    missing = set(inst.ids) - state.plan.handled()
    if missing:
        raise ContractViolation(f'sites {sorted(missing)} ended without a center')
    logger.info('plan has %d centers', len(state.plan.centers))
    return state.plan
