import math

import numpy as np

from medsite.tools.siting_solver import SitingProblem
from medsite.utils.domain import DEFAULT_CAPACITY_KG, CollectionSite, Instance, ModelParams, OrgType
from medsite.utils.geo import EARTH_RADIUS_M, GeoPoint, PlanarPoint, build_distance_matrix

ORIGIN = GeoPoint(38.915, 121.620)


def make_problem(xy, candidates, assignees, q, capacity=DEFAULT_CAPACITY_KG, params=None, **flags):
    """Problem over planar points; site ids are the point indices."""
    ids = list(range(len(xy)))
    dm = build_distance_matrix([PlanarPoint(float(x), float(y)) for x, y in xy], ids)
    if not isinstance(q, dict):
        q = {i: float(q[i]) for i in ids}
    if not isinstance(capacity, dict):
        capacity = {i: float(capacity) for i in ids}
    return SitingProblem(tuple(candidates), tuple(assignees), dm, params or ModelParams(), q, capacity, **flags)


def random_problem(seed, n_candidates, n_assignees, capacitated=False, side_m=1200.0, params=None):
    """Seeded random problem on a square; capacitated ones are layer-2 shaped."""
    rng = np.random.default_rng(seed)
    if capacitated:
        n = n_candidates
        xy = rng.uniform(0.0, side_m, size=(n, 2))
        q = rng.uniform(50.0, 600.0, size=n).round(1)
        ids = list(range(n))
        return make_problem(xy, ids, ids, q, capacity=1500.0, params=params,
                            enforce_capacity=True, allow_self_service=True)
    n = n_candidates + n_assignees
    xy = rng.uniform(0.0, side_m, size=(n, 2))
    q = np.concatenate([rng.uniform(40.0, 400.0, size=n_candidates),
                        rng.choice([1.5, 17.5], size=n_assignees)])
    return make_problem(xy, range(n_candidates), range(n_candidates, n), q, params=params)


def meters_to_geo(east_m, north_m, origin=ORIGIN):
    lat = origin.lat_deg + north_m / EARTH_RADIUS_M * 180.0 / math.pi
    lon = origin.lon_deg + east_m / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat_deg))) * 180.0 / math.pi
    return GeoPoint(lat, lon)


def large_site(site_id, east_m, north_m, beds=250):
    return CollectionSite(site_id, f'large {site_id}', meters_to_geo(east_m, north_m),
                          OrgType.PrimaryHospitalOrAbove, 0.4 * beds, beds=beds)


def common_site(site_id, east_m, north_m, org_type=OrgType.Clinic, q=None, capacity=DEFAULT_CAPACITY_KG):
    q = org_type.value["kg_day"] if q is None else q
    return CollectionSite(site_id, f'common {site_id}', meters_to_geo(east_m, north_m), org_type, q,
                          capacity_kg=capacity)


def instance(*sites):
    return Instance.from_sites(sites)
