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

"""Siting plan: every site is a center or attached to exactly one center."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

EXCEEDS_L = 'EXCEEDS_L'


@dataclass(frozen=True, order=True)
class PlanCenter:
    site_id: int
    layer: int


@dataclass(frozen=True)
class PlanAssignment:
    site_id: int
    center_id: int
    layer: int
    flags: tuple = ()


@dataclass(frozen=True)
class LayerSummary:
    layer: int
    solver: str
    objective_cny: float = 0.0
    optimal: bool = False
    centers: int = 0
    assigned: int = 0
    k: Optional[int] = None
    messages: tuple = ()


@dataclass
class SitingPlan:
    centers: List[PlanCenter] = field(default_factory=list)
    assignments: Dict[int, PlanAssignment] = field(default_factory=dict)
    layers: List[LayerSummary] = field(default_factory=list)

    def add_center(self, site_id, layer):
        self.centers.append(PlanCenter(site_id, layer))
        self.centers.sort()

    def attach(self, site_id, center_id, layer, flags=()):
        self.assignments[site_id] = PlanAssignment(site_id, center_id, layer, tuple(flags))

    def center_ids(self):
        return [c.site_id for c in self.centers]

    def handled(self):
        return set(self.center_ids()) | set(self.assignments)

    def structure(self):
        """Comparable form without the per-layer provenance."""
        return (
            tuple(sorted(self.centers)),
            tuple(self.assignments[s] for s in sorted(self.assignments)),
        )
