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


from dataclasses import dataclass
from enum import Enum
from typing import Optional

from medsite.utils.easylist import EasyList


class ViolationCode(Enum):
    # instance checks
    EMPTY_INSTANCE = {
        "scope": "instance",
        "description": "The instance holds no collection sites."
    }
    DUPLICATE_ID = {
        "scope": "instance",
        "description": "Two collection sites share one id."
    }
    NEGATIVE_ID = {
        "scope": "instance",
        "description": "A site id is negative."
    }
    NEGATIVE_WASTE = {
        "scope": "instance",
        "description": "Daily waste q_kg_day is negative."
    }
    NON_POSITIVE_CAPACITY = {
        "scope": "instance",
        "description": "capacity_kg must be strictly positive."
    }
    CAPACITY_BELOW_OWN_WASTE = {
        "scope": "instance",
        "description": "A site generates more waste per day than it can hold."
    }
    INVALID_COORDINATE = {
        "scope": "instance",
        "description": "Latitude or longitude out of range."
    }
    BEDS_MISMATCH = {
        "scope": "instance",
        "description": "Beds must be a positive count for Primary-or-above hospitals and absent otherwise."
    }
    TIER_MISMATCH = {
        "scope": "instance",
        "description": "large_ids/common_ids disagree with the sites' organization types."
    }
    UNKNOWN_ID = {
        "scope": "instance",
        "description": "large_ids/common_ids name an id that is not a site."
    }
    # plan checks
    MULTI_ASSIGN = {
        "scope": "plan",
        "description": "A site is attached to more than one center, or is both a center and attached."
    }
    CLOSED_CENTER = {
        "scope": "plan",
        "description": "A site is attached to a site that is not a center."
    }
    DIST_EXCEEDED = {
        "scope": "plan",
        "description": "A layer-1/2 transfer is longer than L, or a layer-3 one is longer than L without the EXCEEDS_L flag."
    }
    CAPACITY_EXCEEDED = {
        "scope": "plan",
        "description": "A layer-2 center receives more than its capacity (own waste included)."
    }
    UNASSIGNED_SITE = {
        "scope": "plan",
        "description": "A site is neither a center nor attached to one."
    }
    UNKNOWN_SITE = {
        "scope": "plan",
        "description": "The plan names a site id the instance does not hold."
    }
    LAYER_MISMATCH = {
        "scope": "plan",
        "description": "Layer-1 centers must be large sites; layer-2/3 centers must be common sites."
    }

    @property
    def description(self):
        return self.value["description"]


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    detail: str
    site_id: Optional[int] = None

    def __str__(self):
        where = f' (site {self.site_id})' if self.site_id is not None else ''
        return f'{self.code.name}{where}: {self.detail}'


class ViolationList(EasyList):

    def add(self, code, detail, site_id=None):
        super().add(Violation(code, detail, site_id))

    def codes(self):
        return [item.code for item in self.items]

    def has(self, code):
        return any(item.code is code for item in self.items)

    # Framed block, one violation per line.
    def get_message(self):
        if self.size() == 0:
            return 'No violations found.'
        mark_fence = '*' * 60
        lines = '\n'.join(str(item) for item in self.items)
        return f'''There are {self.size()} violations.
{mark_fence}
{lines}
{mark_fence}'''
