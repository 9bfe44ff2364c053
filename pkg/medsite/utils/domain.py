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

"""Collection sites, instances and the cost/subsidy parameters of the siting models."""

import math
from dataclasses import dataclass, fields
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

from medsite.utils.errors import InvalidInputError
from medsite.utils.geo import GeoPoint, build_distance_matrix, project_all
from medsite.utils.violation_list import ViolationCode, ViolationList

DEFAULT_CAPACITY_KG = 1500.0
WASTE_PER_BED_KG = 0.4


class OrgType(Enum):
    PrimaryHospitalOrAbove = {
        "large": True,
        "kg_day": None,
        "description": "Primary hospital and above, 0.4 kg/day per bed"
    }
    # 15-20 kg/day, midpoint
    CommunityHospital = {
        "large": False,
        "kg_day": 17.5,
        "description": "Community hospital, 15-20 kg/day"
    }
    Outpatient = {
        "large": False,
        "kg_day": 17.5,
        "description": "Outpatient department, 15-20 kg/day"
    }
    Clinic = {
        "large": False,
        "kg_day": 1.5,
        "description": "Clinic, 1.5 kg/day"
    }

    @property
    def is_large(self):
        return self.value["large"]

    @classmethod
    def parse(cls, text):
        key = str(text).strip().replace('_', '').replace(' ', '').lower()
        for member in cls:
            if member.name.lower() == key:
                return member
        raise InvalidInputError(f"unknown org_type '{text}', expected one of {[m.name for m in cls]}")


COMMON_TYPES = (OrgType.CommunityHospital, OrgType.Outpatient, OrgType.Clinic)


@dataclass(frozen=True)
class CollectionSite:
    id: int
    name: str
    location: GeoPoint
    org_type: OrgType
    q_kg_day: float
    capacity_kg: float = DEFAULT_CAPACITY_KG
    beds: Optional[int] = None

    @property
    def is_large(self):
        return self.org_type.is_large


@dataclass(frozen=True)
class Instance:
    sites: tuple
    large_ids: frozenset
    common_ids: frozenset

    @classmethod
    def from_sites(cls, sites: Sequence[CollectionSite]):
        sites = tuple(sites)
        large = frozenset(s.id for s in sites if s.is_large)
        common = frozenset(s.id for s in sites if not s.is_large)
        return cls(sites, large, common)

    @property
    def ids(self):
        return [s.id for s in self.sites]

    @cached_property
    def by_id(self):
        return {s.id: s for s in self.sites}

    def site(self, site_id):
        return self.by_id[site_id]

    def __len__(self):
        return len(self.sites)

    @cached_property
    def planar_points(self):
        return project_all([s.location for s in self.sites])

    @cached_property
    def distance_matrix(self):
        return build_distance_matrix(self.planar_points, self.ids)


@dataclass(frozen=True)
class ModelParams:
    f_cny: float = 3000.0
    b_cny_kg: float = 3.0
    t_cny_kg_km: float = 2.0
    a1_cny_kg: float = 1.0
    a2_cny_kg_km: float = 0.5
    L_m: float = 500.0

    def check(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise InvalidInputError(f'{item.name} must be a finite number, got {value!r}')
            if value < 0:
                raise InvalidInputError(f'{item.name} must be non-negative, got {value}')
        if self.L_m <= 0:
            raise InvalidInputError(f'L_m must be positive, got {self.L_m}')
        # disposal cost above its subsidy, transfer cost above its subsidy
        if not self.b_cny_kg > self.a1_cny_kg:
            raise InvalidInputError(f'b_cny_kg ({self.b_cny_kg}) must exceed a1_cny_kg ({self.a1_cny_kg})')
        if not self.t_cny_kg_km > self.a2_cny_kg_km:
            raise InvalidInputError(f't_cny_kg_km ({self.t_cny_kg_km}) must exceed a2_cny_kg_km ({self.a2_cny_kg_km})')
        return self

    @property
    def net_disposal(self):
        return self.b_cny_kg - self.a1_cny_kg

    @property
    def net_transfer(self):
        return self.t_cny_kg_km - self.a2_cny_kg_km


def default_params() -> ModelParams:
    return ModelParams()


def estimate_daily_waste(org_type: OrgType, beds: Optional[int] = None) -> float:
    if org_type.is_large:
        if beds is None or beds <= 0:
            raise InvalidInputError(f'{org_type.name} needs a positive bed count to estimate its waste')
        return WASTE_PER_BED_KG * beds
    return org_type.value["kg_day"]


def validate_instance(inst: Instance) -> ViolationList:
    violations = ViolationList()
    if len(inst.sites) == 0:
        violations.add(ViolationCode.EMPTY_INSTANCE, 'no sites')
        return violations

    seen = set()
    for site in inst.sites:
        if site.id in seen:
            violations.add(ViolationCode.DUPLICATE_ID, f'id {site.id} appears more than once', site.id)
        seen.add(site.id)
        if site.id < 0:
            violations.add(ViolationCode.NEGATIVE_ID, f'id {site.id}', site.id)
        if not site.location.is_valid():
            violations.add(ViolationCode.INVALID_COORDINATE,
                           f'lat={site.location.lat_deg}, lon={site.location.lon_deg}', site.id)
        if site.q_kg_day < 0:
            violations.add(ViolationCode.NEGATIVE_WASTE, f'q_kg_day={site.q_kg_day}', site.id)
        if site.capacity_kg <= 0:
            violations.add(ViolationCode.NON_POSITIVE_CAPACITY, f'capacity_kg={site.capacity_kg}', site.id)
        elif site.capacity_kg < site.q_kg_day:
            violations.add(ViolationCode.CAPACITY_BELOW_OWN_WASTE,
                           f'q_kg_day={site.q_kg_day} > capacity_kg={site.capacity_kg}', site.id)
        if site.is_large and (site.beds is None or site.beds <= 0):
            violations.add(ViolationCode.BEDS_MISMATCH, f'{site.org_type.name} without beds', site.id)
        if not site.is_large and site.beds is not None:
            violations.add(ViolationCode.BEDS_MISMATCH, f'{site.org_type.name} with beds={site.beds}', site.id)

    for site_id in sorted((inst.large_ids | inst.common_ids) - seen):
        violations.add(ViolationCode.UNKNOWN_ID, f'id {site_id} is not a site', site_id)
    for site_id in sorted(inst.large_ids & inst.common_ids):
        violations.add(ViolationCode.TIER_MISMATCH, 'listed as both large and common', site_id)
    for site in inst.sites:
        tier_ok = site.id in (inst.large_ids if site.is_large else inst.common_ids)
        if not tier_ok:
            violations.add(ViolationCode.TIER_MISMATCH, f'{site.org_type.name} filed in the wrong tier', site.id)
    return violations


def require_valid(inst: Instance):
    violations = validate_instance(inst)
    if violations:
        raise InvalidInputError(violations.get_message(), violations)
    return inst
