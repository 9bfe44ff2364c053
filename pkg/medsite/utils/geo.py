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

"""Planar projection and L1 (Manhattan) distances.

Sites come in as latitude/longitude. They are projected equirectangularly about
a local origin (the instance centroid by default) and every distance used by
the models is the L1 distance in meters on that plane.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from medsite.utils.errors import InvalidInputError

EARTH_RADIUS_M = 6371000.0


@dataclass(frozen=True)
class GeoPoint:
    lat_deg: float
    lon_deg: float

    def is_valid(self):
        return (math.isfinite(self.lat_deg) and math.isfinite(self.lon_deg)
                and -90.0 <= self.lat_deg <= 90.0 and -180.0 <= self.lon_deg <= 180.0)

    def check(self):
        if not self.is_valid():
            raise InvalidInputError(f'coordinate out of range: lat={self.lat_deg}, lon={self.lon_deg}')
        return self


@dataclass(frozen=True)
class PlanarPoint:
    x_m: float
    y_m: float


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    d: np.ndarray
    ids: tuple = field(default=())

    def __post_init__(self):
        if not self.ids:
            object.__setattr__(self, 'ids', tuple(range(self.d.shape[0])))
        object.__setattr__(self, '_pos', {site_id: k for k, site_id in enumerate(self.ids)})

    @property
    def n(self):
        return self.d.shape[0]

    def index(self, site_id):
        return self._pos[site_id]

    def meters(self, a_id, b_id):
        return float(self.d[self._pos[a_id], self._pos[b_id]])

    def km(self, a_id, b_id):
        return self.meters(a_id, b_id) / 1000.0


def project(p: GeoPoint, origin: GeoPoint) -> PlanarPoint:
    p.check()
    origin.check()
    y = EARTH_RADIUS_M * (p.lat_deg - origin.lat_deg) * math.pi / 180.0
    x = EARTH_RADIUS_M * (p.lon_deg - origin.lon_deg) * math.pi / 180.0 * math.cos(origin.lat_deg * math.pi / 180.0)
    return PlanarPoint(x + 0.0, y + 0.0)


def centroid(points: Sequence[GeoPoint]) -> GeoPoint:
    if not points:
        raise InvalidInputError('cannot take the centroid of no points')
    lat = sum(p.lat_deg for p in points) / len(points)
    lon = sum(p.lon_deg for p in points) / len(points)
    return GeoPoint(lat, lon)


def project_all(points: Sequence[GeoPoint], origin: Optional[GeoPoint] = None):
    origin = origin if origin is not None else centroid(points)
    return [project(p, origin) for p in points]


def l1_distance(a: PlanarPoint, b: PlanarPoint) -> float:
    return abs(a.x_m - b.x_m) + abs(a.y_m - b.y_m)


def build_distance_matrix(points: Sequence[PlanarPoint], ids: Optional[Sequence[int]] = None) -> DistanceMatrix:
    if len(points) == 0:
        raise InvalidInputError('cannot build a distance matrix over no points')
    if ids is not None and len(ids) != len(points):
        raise InvalidInputError(f'{len(ids)} ids for {len(points)} points')
    xs = np.array([p.x_m for p in points], dtype=float)
    ys = np.array([p.y_m for p in points], dtype=float)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise InvalidInputError('planar coordinates must be finite')
    d = np.abs(xs[:, None] - xs[None, :]) + np.abs(ys[:, None] - ys[None, :])
    d.setflags(write=False)
    return DistanceMatrix(d, tuple(ids) if ids is not None else ())
