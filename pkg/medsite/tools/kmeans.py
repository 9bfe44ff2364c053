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

"""K-means over planar site coordinates, elbow choice of K, snapping to sites.

Clustering minimizes squared L2 distance; snapping a centroid to a member
site uses L1 like every transfer distance.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from medsite.utils.errors import ContractViolation, InvalidInputError
from medsite.utils.geo import PlanarPoint, l1_distance

logger = logging.getLogger(__name__)

MAX_ITER = 300
TOL_M = 1e-6
RESTARTS = 5


@dataclass(frozen=True, eq=False)
class Clustering:
    k: int
    labels: np.ndarray
    centroids: List[PlanarPoint]
    wcss: float

    def members(self, c):
        return [int(n) for n in np.flatnonzero(self.labels == c)]


def _as_array(points: Sequence[PlanarPoint]):
    return np.array([[p.x_m, p.y_m] for p in points], dtype=float).reshape(-1, 2)


def _check_seed(seed):
    if seed < 0:
        raise InvalidInputError(f'seed must be non-negative, got {seed}')


def _sub_seed(seed, *parts):
    _check_seed(seed)
    return int(np.random.SeedSequence([seed, *parts]).generate_state(1)[0])


def _relative_tol(xy):
    # KMeans scales tol by the mean per-axis variance and compares it to the
    # summed squared centroid shift
    spread = float(np.var(xy, axis=0).mean())
    return TOL_M ** 2 / spread if spread > 0.0 else 0.0


def _fill_empty(xy, labels, k):
    # an empty cluster takes the point farthest from its own centroid
    for c in range(k):
        if np.any(labels == c):
            continue
        centers = _means(xy, labels, k)
        own = ((xy - centers[labels]) ** 2).sum(axis=1)
        counts = np.bincount(labels, minlength=k)
        own[counts[labels] <= 1] = -1.0
        labels[int(own.argmax())] = c
    return labels


def _means(xy, labels, k):
    centers = np.zeros((k, 2))
    for c in range(k):
        if np.any(labels == c):
            centers[c] = xy[labels == c].mean(axis=0)
    return centers


def kmeans(points: Sequence[PlanarPoint], k: int, seed: int = 0,
           init: Optional[Sequence[PlanarPoint]] = None) -> Clustering:
    n = len(points)
    if n < 1:
        raise InvalidInputError('k-means needs at least one point')
    if not 1 <= k <= n:
        raise InvalidInputError(f'k={k} is out of range for {n} points')
    _check_seed(seed)
    xy = _as_array(points)
    start = 'k-means++'
    if init is not None:
        if len(init) != k:
            raise InvalidInputError(f'{len(init)} initial centroids for k={k}')
        start = _as_array(init)

    model = KMeans(n_clusters=k, init=start, n_init=1, max_iter=MAX_ITER, tol=_relative_tol(xy),
                   random_state=seed, algorithm='lloyd')
    with warnings.catch_warnings():
        # fewer distinct points than k; _fill_empty restores k clusters
        warnings.simplefilter('ignore', ConvergenceWarning)
        model.fit(xy)
    if model.n_iter_ >= MAX_ITER:
        logger.debug('k-means stopped at the iteration limit (k=%d, n=%d)', k, n)

    labels = _fill_empty(xy, model.labels_.astype(int), k)
    centers = _means(xy, labels, k)
    wcss = float(((xy - centers[labels]) ** 2).sum())
    return Clustering(k, labels, [PlanarPoint(float(x), float(y)) for x, y in centers], wcss)


def _farthest_point(xy, centers):
    sq = ((xy[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return xy[int(sq.min(axis=1).argmax())]


def best_kmeans(points: Sequence[PlanarPoint], k: int, seed: int = 0) -> Clustering:
    """Lowest-WCSS run among RESTARTS seeds derived from (seed, k)."""
    best = None
    for restart in range(RESTARTS):
        run = kmeans(points, k, _sub_seed(seed, k, restart))
        if best is None or run.wcss < best.wcss:
            best = run
    return best


def elbow_table(points: Sequence[PlanarPoint], k_max: int, seed: int = 0) -> Dict[int, float]:
    """Best WCSS for k = 1..min(k_max, n).

    Each k keeps the best of RESTARTS seeded runs plus one run started from the
    previous k's centroids and the point farthest from them, so the table never
    rises with k.
    """
    xy = _as_array(points)
    table = {}
    previous = None
    for k in range(1, min(k_max, len(points)) + 1):
        best = best_kmeans(points, k, seed)
        if previous is not None:
            start = _as_array(previous.centroids)
            start = np.vstack([start, _farthest_point(xy, start)])
            warm = kmeans(points, k, seed, init=[PlanarPoint(float(x), float(y)) for x, y in start])
            if warm.wcss < best.wcss:
                best = warm
        table[k] = best.wcss
        previous = best
    return table


def choose_k_elbow(points: Sequence[PlanarPoint], k_max: int, seed: int = 0) -> int:
    if len(points) < 3:
        raise InvalidInputError(f'the elbow method needs at least 3 points, got {len(points)}')
    if k_max < 2:
        raise InvalidInputError(f'k_max must be at least 2, got {k_max}')
    table = elbow_table(points, k_max, seed)
    top = max(table)
    if top < 3:
        return top
    pick, pick_bend = None, None
    for k in range(2, top):
        bend = table[k - 1] - 2.0 * table[k] + table[k + 1]
        if pick_bend is None or bend > pick_bend:
            pick, pick_bend = k, bend
    logger.debug('elbow table %s -> k=%d', table, pick)
    return pick


def snap_to_sites(clustering: Clustering, points: Sequence[PlanarPoint], site_ids: Sequence[int]) -> List[int]:
    """Per cluster, the member site closest (L1) to the centroid; ties to the lower id."""
    if len(points) != len(site_ids) or len(points) != len(clustering.labels):
        raise ContractViolation('points, site ids and labels are not aligned')
    snapped = []
    for c in range(clustering.k):
        members = clustering.members(c)
        if not members:
            raise ContractViolation(f'cluster {c} has no members')
        center = clustering.centroids[c]
        best = min(members, key=lambda m: (l1_distance(points[m], center), site_ids[m]))
        snapped.append(site_ids[best])
    return snapped
