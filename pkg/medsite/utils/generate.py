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

"""Seeded synthetic site inventories."""

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from medsite.utils.domain import (COMMON_TYPES, DEFAULT_CAPACITY_KG, WASTE_PER_BED_KG, CollectionSite,
                                  Instance, OrgType, estimate_daily_waste, require_valid)
from medsite.utils.errors import InvalidInputError
from medsite.utils.geo import GeoPoint
from medsite.utils.parser.parse_sites import parse_sites_csv


@dataclass(frozen=True)
class GenSpec:
    n_large: int
    n_common: int
    bbox: tuple
    beds_range: tuple = (100, 1000)
    # proportions over COMMON_TYPES
    common_mix: tuple = (0.2, 0.3, 0.5)
    seed: int = 0

    def check(self):
        if self.n_large < 0 or self.n_common < 0:
            raise InvalidInputError(f'site counts must be non-negative, got {self.n_large} large, {self.n_common} common')
        if self.n_large + self.n_common == 0:
            raise InvalidInputError('the generated instance would be empty')
        if self.seed < 0:
            raise InvalidInputError(f'seed must be non-negative, got {self.seed}')
        if len(self.bbox) != 4:
            raise InvalidInputError(f'bbox needs lat_min lat_max lon_min lon_max, got {self.bbox}')
        lat_min, lat_max, lon_min, lon_max = self.bbox
        if not (-90.0 <= lat_min < lat_max <= 90.0 and -180.0 <= lon_min < lon_max <= 180.0):
            raise InvalidInputError(f'bbox {self.bbox} is degenerate or out of range')
        low, high = self.beds_range
        if not 1 <= low <= high:
            raise InvalidInputError(f'beds_range {self.beds_range} must satisfy 1 <= min <= max')
        if high * WASTE_PER_BED_KG > DEFAULT_CAPACITY_KG:
            raise InvalidInputError(f'{high} beds would generate more than the {DEFAULT_CAPACITY_KG:g} kg capacity')
        if len(self.common_mix) != len(COMMON_TYPES) or any(p < 0 for p in self.common_mix):
            raise InvalidInputError(f'common_mix needs {len(COMMON_TYPES)} non-negative proportions')
        if not math.isclose(sum(self.common_mix), 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise InvalidInputError(f'common_mix {self.common_mix} does not sum to 1')
        return self


# 21 large and 91 common units spread over two adjacent city districts
DALIAN_LIKE = GenSpec(n_large=21, n_common=91, bbox=(38.900, 38.930, 121.580, 121.660), seed=42)

FROZEN_DALIAN_LIKE = "dalian_like_sites.csv"


def generate_instance(spec: GenSpec) -> Instance:
    spec.check()
    rng = np.random.default_rng(spec.seed)
    lat_min, lat_max, lon_min, lon_max = spec.bbox
    low, high = spec.beds_range

    def place():
        return GeoPoint(round(float(rng.uniform(lat_min, lat_max)), 6),
                        round(float(rng.uniform(lon_min, lon_max)), 6))

    sites = []
    for site_id in range(spec.n_large):
        beds = int(rng.integers(low, high + 1))
        org_type = OrgType.PrimaryHospitalOrAbove
        sites.append(CollectionSite(site_id, f'Hospital {site_id:03d}', place(), org_type,
                                    estimate_daily_waste(org_type, beds), beds=beds))
    kinds = rng.choice(len(COMMON_TYPES), size=spec.n_common, p=list(spec.common_mix))
    for n, kind in enumerate(kinds):
        site_id = spec.n_large + n
        org_type = COMMON_TYPES[int(kind)]
        sites.append(CollectionSite(site_id, f'{org_type.name} {site_id:03d}', place(), org_type,
                                    estimate_daily_waste(org_type)))
    return require_valid(Instance.from_sites(sites))


def load_frozen_instance(name: str = FROZEN_DALIAN_LIKE) -> Instance:
    """A bundled synthetic inventory; no real site data ships with the package."""
    text = resources.files('medsite').joinpath('data').joinpath(name).read_text(encoding='utf-8')
    return parse_sites_csv(text)
