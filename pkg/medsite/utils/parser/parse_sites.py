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

import io
import math

import pandas as pd
import simplejson

from medsite.utils.domain import (DEFAULT_CAPACITY_KG, CollectionSite, Instance, ModelParams, OrgType,
                                  estimate_daily_waste, require_valid)
from medsite.utils.errors import InvalidInputError
from medsite.utils.evaluate import OpsCoefficients
from medsite.utils.geo import GeoPoint

SITE_COLUMNS = ['id', 'name', 'lat', 'lon', 'org_type', 'beds', 'q_kg_day', 'capacity_kg']
REQUIRED_COLUMNS = ['id', 'name', 'lat', 'lon', 'org_type']


def _integer(text, column):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{column} must be an integer, got '{text}'") from None


def _number(text, column):
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{column} must be a number, got '{text}'") from None
    if not math.isfinite(value):
        raise ValueError(f"{column} must be finite, got '{text}'")
    return value


def _row_to_site(row):
    cell = {k: str(row.get(k, '')).strip() for k in SITE_COLUMNS}
    org_type = OrgType.parse(cell['org_type'])
    beds = _integer(cell['beds'], 'beds') if cell['beds'] else None
    if cell['q_kg_day']:
        q = _number(cell['q_kg_day'], 'q_kg_day')
    else:
        q = estimate_daily_waste(org_type, beds)
    capacity = _number(cell['capacity_kg'], 'capacity_kg') if cell['capacity_kg'] else DEFAULT_CAPACITY_KG
    return CollectionSite(
        id=_integer(cell['id'], 'id'),
        name=cell['name'],
        location=GeoPoint(_number(cell['lat'], 'lat'), _number(cell['lon'], 'lon')),
        org_type=org_type,
        q_kg_day=q,
        capacity_kg=capacity,
        beds=beds,
    )


def parse_sites_csv(text: str) -> Instance:
    """Site inventory from CSV text; row order becomes the instance order.

    ``beds``, ``q_kg_day`` and ``capacity_kg`` may be absent or empty. An
    empty ``q_kg_day`` is estimated from the organization type.
    """
    try:
        df = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InvalidInputError(f'cannot read the site table: {e}') from None
    df.columns = [str(c).strip() for c in df.columns]
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise InvalidInputError(f'site table lacks columns {missing}; header must be {",".join(SITE_COLUMNS)}')

    sites = []
    for n, row in enumerate(df.to_dict('records')):
        # header is line 1
        line = n + 2
        try:
            sites.append(_row_to_site(row))
        except (ValueError, InvalidInputError) as e:
            raise InvalidInputError(f'line {line}: {e}') from None
    return require_valid(Instance.from_sites(sites))


def sites_to_csv(inst: Instance) -> str:
    rows = []
    for s in inst.sites:
        rows.append({
            'id': str(s.id),
            'name': s.name,
            'lat': repr(float(s.location.lat_deg)),
            'lon': repr(float(s.location.lon_deg)),
            'org_type': s.org_type.name,
            'beds': '' if s.beds is None else str(s.beds),
            'q_kg_day': repr(float(s.q_kg_day)),
            'capacity_kg': repr(float(s.capacity_kg)),
        })
    return pd.DataFrame(rows, columns=SITE_COLUMNS).to_csv(index=False, lineterminator='\n')


def _load_numbers(text, cls, label):
    try:
        raw = simplejson.loads(text) if text.strip() else {}
    except simplejson.JSONDecodeError as e:
        raise InvalidInputError(f'{label}: {e}') from None
    if not isinstance(raw, dict):
        raise InvalidInputError(f'{label}: expected a JSON object')
    known = {f for f in cls.__dataclass_fields__}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise InvalidInputError(f'{label}: unknown keys {unknown}, expected some of {sorted(known)}')
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidInputError(f'{label}: {key} must be a number, got {value!r}')
    return cls(**{k: float(v) for k, v in raw.items()}).check()


def load_params_json(text: str) -> ModelParams:
    """ModelParams from JSON; omitted keys keep their defaults."""
    return _load_numbers(text, ModelParams, 'params')


def load_coeffs_json(text: str) -> OpsCoefficients:
    return _load_numbers(text, OpsCoefficients, 'coeffs')
