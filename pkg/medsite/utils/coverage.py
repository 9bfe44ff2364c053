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

import numpy as np

from medsite.utils.domain import Instance
from medsite.utils.errors import InvalidInputError
from medsite.utils.geo import DistanceMatrix


@dataclass(frozen=True)
class CoveragePartition:
    covered: frozenset
    uncovered: frozenset


# A common site is covered when some large site lies within L (d = L counts).
def partition_coverage(inst: Instance, dm: DistanceMatrix, L_m: float) -> CoveragePartition:
    if dm.n != len(inst.sites) or list(dm.ids) != inst.ids:
        raise InvalidInputError(f'distance matrix of size {dm.n} does not match an instance of {len(inst.sites)} sites')
    commons = sorted(inst.common_ids)
    larges = sorted(inst.large_ids)
    if not commons:
        return CoveragePartition(frozenset(), frozenset())
    if not larges:
        return CoveragePartition(frozenset(), frozenset(commons))
    rows = [dm.index(i) for i in commons]
    cols = [dm.index(j) for j in larges]
    within = (dm.d[np.ix_(rows, cols)] <= L_m).any(axis=1)
    covered = frozenset(i for i, hit in zip(commons, within) if hit)
    return CoveragePartition(covered, frozenset(commons) - covered)
