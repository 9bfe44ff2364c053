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

from typing import Optional

import pandas as pd

from medsite.utils.evaluate import CostBreakdown, OpsReport

FENCE = '*' * 60

OPS_ROWS = [
    ('operating_sites', 'Operating disposal sites'),
    ('total_waste_kg', 'Total daily waste (kg)'),
    ('transferred_kg', 'Transferred waste (kg)'),
    ('transfer_kg_km', 'Transfer volume (kg*km)'),
    ('working_time_min', 'Daily working time (min)'),
    ('maintenance_cny', 'Daily maintenance cost (CNY)'),
]

COST_ROWS = [
    ('fixed_cny', 'Fixed construction'),
    ('disposal_cny', 'Disposal'),
    ('disposal_subsidy_cny', 'Disposal subsidy'),
    ('transfer_cny', 'Transfer'),
    ('transfer_subsidy_cny', 'Transfer subsidy'),
    ('total_cny', 'Total (Z1 + Z2)'),
]


def ops_frame(ops: OpsReport, baseline: OpsReport) -> pd.DataFrame:
    rows = [{'metric': label, 'plan': getattr(ops, key), 'baseline': getattr(baseline, key)}
            for key, label in OPS_ROWS]
    return pd.DataFrame(rows, columns=['metric', 'plan', 'baseline'])


def cost_frame(audit: CostBreakdown) -> pd.DataFrame:
    rows = [{'component': label, 'cny': getattr(audit, key)} for key, label in COST_ROWS]
    return pd.DataFrame(rows, columns=['component', 'cny'])


def format_report(ops: OpsReport, baseline: OpsReport, audit: Optional[CostBreakdown] = None) -> str:
    lines = [FENCE, 'Operations against the no-center baseline', FENCE]
    lines.append(ops_frame(ops, baseline).to_string(index=False, float_format=lambda x: f'{x:.2f}'))
    lines.append('')
    lines.append(f'Working time reduction: {ops.reduction_time_pct:.1f}%')
    lines.append(f'Maintenance cost reduction: {ops.reduction_cost_pct:.1f}%')
    lines.append(f'Note: {ops.note}.')
    if audit is not None:
        lines += [FENCE, 'Siting cost audit', FENCE]
        lines.append(cost_frame(audit).to_string(index=False, float_format=lambda x: f'{x:.2f}'))
    lines.append(FENCE)
    return '\n'.join(lines) + '\n'


def write_report_xlsx(ops: OpsReport, baseline: OpsReport, audit: Optional[CostBreakdown], path) -> None:
    with pd.ExcelWriter(path, engine='openpyxl') as writer:
        ops_frame(ops, baseline).to_excel(writer, sheet_name='operations', index=False)
        summary = pd.DataFrame([
            {'item': 'working_time_reduction_pct', 'value': ops.reduction_time_pct},
            {'item': 'maintenance_reduction_pct', 'value': ops.reduction_cost_pct},
        ])
        summary.to_excel(writer, sheet_name='reductions', index=False)
        if audit is not None:
            cost_frame(audit).to_excel(writer, sheet_name='cost', index=False)
        pd.DataFrame([{'note': ops.note}]).to_excel(writer, sheet_name='notes', index=False)
