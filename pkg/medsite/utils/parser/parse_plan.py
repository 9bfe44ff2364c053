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

"""Canonical plan JSON.

Keys are sorted, numbers carry six decimals, centers and assignments are
ordered by site id, so equal plans serialize to equal bytes.
"""

from dataclasses import fields
from decimal import Decimal
from typing import Optional

import simplejson

from medsite.layers.plan import LayerSummary, SitingPlan
from medsite.utils.errors import PlanParseError
from medsite.utils.evaluate import CostBreakdown, OpsReport

PLAN_FORMAT = 'medsite-plan/1'


def _fixed(x):
    value = Decimal(f'{float(x):.6f}')
    # no "-0.000000"
    return value if value != 0 else Decimal('0.000000')


def _audit_doc(audit):
    doc = {f.name: _fixed(getattr(audit, f.name)) for f in fields(audit)}
    doc['total_cny'] = _fixed(audit.total_cny)
    return doc


def _ops_doc(ops):
    doc = {}
    for f in fields(ops):
        value = getattr(ops, f.name)
        if isinstance(value, float):
            value = _fixed(value)
        doc[f.name] = value
    return doc


def write_plan_json(plan: SitingPlan, audit: Optional[CostBreakdown] = None,
                    ops_report: Optional[OpsReport] = None) -> str:
    doc = {
        'format': PLAN_FORMAT,
        'centers': [{'site_id': c.site_id, 'layer': c.layer}
                    for c in sorted(plan.centers, key=lambda c: (c.site_id, c.layer))],
        'assignments': [{'site_id': a.site_id, 'center_id': a.center_id, 'layer': a.layer, 'flags': list(a.flags)}
                        for a in (plan.assignments[s] for s in sorted(plan.assignments))],
        'layers': [{
            'layer': s.layer,
            'solver': s.solver,
            'objective_cny': _fixed(s.objective_cny),
            'optimal': s.optimal,
            'centers': s.centers,
            'assigned': s.assigned,
            'k': s.k,
            'messages': list(s.messages),
        } for s in plan.layers],
        'audit': _audit_doc(audit) if audit is not None else None,
        'ops': _ops_doc(ops_report) if ops_report is not None else None,
    }
    return simplejson.dumps(doc, sort_keys=True, use_decimal=True, indent=2) + '\n'


def _need(obj, key, path, kind):
    if not isinstance(obj, dict):
        raise PlanParseError(path, 'expected an object')
    if key not in obj:
        raise PlanParseError(f'{path}.{key}', 'missing')
    value = obj[key]
    ok = isinstance(value, kind) and not (kind is int and isinstance(value, bool))
    if not ok:
        name = kind.__name__ if isinstance(kind, type) else 'number'
        raise PlanParseError(f'{path}.{key}', f'expected {name}, got {value!r}')
    return value


def _layer(obj, path):
    layer = _need(obj, 'layer', path, int)
    if layer not in (1, 2, 3):
        raise PlanParseError(f'{path}.layer', f'expected 1, 2 or 3, got {layer}')
    return layer


def read_plan_json(text: str) -> SitingPlan:
    try:
        doc = simplejson.loads(text)
    except simplejson.JSONDecodeError as e:
        raise PlanParseError('$', f'not JSON: {e}') from None
    if not isinstance(doc, dict):
        raise PlanParseError('$', 'expected an object')

    plan = SitingPlan()
    for n, item in enumerate(_need(doc, 'centers', '$', list)):
        path = f'$.centers[{n}]'
        plan.add_center(_need(item, 'site_id', path, int), _layer(item, path))

    for n, item in enumerate(_need(doc, 'assignments', '$', list)):
        path = f'$.assignments[{n}]'
        site_id = _need(item, 'site_id', path, int)
        if site_id in plan.assignments:
            raise PlanParseError(f'{path}.site_id', f'site {site_id} is assigned twice')
        center_id = _need(item, 'center_id', path, int)
        flags = item.get('flags', [])
        if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
            raise PlanParseError(f'{path}.flags', 'expected a list of strings')
        plan.attach(site_id, center_id, _layer(item, path), flags)

    for n, item in enumerate(doc.get('layers') or []):
        path = f'$.layers[{n}]'
        k = item.get('k') if isinstance(item, dict) else None
        if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
            raise PlanParseError(f'{path}.k', f'expected an integer or null, got {k!r}')
        messages = item.get('messages', []) if isinstance(item, dict) else []
        if not isinstance(messages, list) or not all(isinstance(m, str) for m in messages):
            raise PlanParseError(f'{path}.messages', 'expected a list of strings')
        plan.layers.append(LayerSummary(
            layer=_layer(item, path),
            solver=_need(item, 'solver', path, str),
            objective_cny=float(_need(item, 'objective_cny', path, (int, float))),
            optimal=bool(item.get('optimal', False)),
            centers=_need(item, 'centers', path, int),
            assigned=_need(item, 'assigned', path, int),
            k=k,
            messages=tuple(messages),
        ))
    return plan
