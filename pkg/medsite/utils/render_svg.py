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

"""SVG map of a siting plan on the projected plane.

Every site marker is an artist with gid ``site-<id>`` and every assignment a
line with gid ``link-<site>-<center>``; matplotlib writes gids as element ids.
"""

import io

import matplotlib
from matplotlib.figure import Figure
from matplotlib.lines import Line2D

from medsite.layers.plan import EXCEEDS_L, SitingPlan
from medsite.utils.domain import Instance

SVG_SALT = 'medsite'
PALETTE = 'tab20'

MARKER = {'large': 's', 'common': 'o'}
CENTER_SIZE = 90
SITE_SIZE = 22


def _legend_handles():
    return [
        Line2D([], [], linestyle='none', marker=MARKER['large'], color='0.4', label='Large site'),
        Line2D([], [], linestyle='none', marker=MARKER['common'], color='0.4', label='Common site'),
        Line2D([], [], linestyle='none', marker='o', markersize=10, markerfacecolor='none',
               markeredgecolor='black', label='Center'),
        Line2D([], [], color='0.4', label='Assignment'),
        Line2D([], [], color='0.4', linestyle='--', label='Assignment beyond L'),
    ]


def render_plan_svg(inst: Instance, plan: SitingPlan, title: str = 'Temporary storage & disposal centers') -> str:
    fig = Figure(figsize=(8, 6))
    ax = fig.add_subplot()
    ax.set_title(title)
    ax.set_xlabel('x (m)')
    ax.set_ylabel('y (m)')

    if len(inst.sites):
        position = {s.id: p for s, p in zip(inst.sites, inst.planar_points)}
        cmap = matplotlib.colormaps[PALETTE]
        color = {c: cmap(n % cmap.N) for n, c in enumerate(sorted(plan.center_ids()))}
        for site_id in sorted(plan.assignments):
            a = plan.assignments[site_id]
            if site_id not in position or a.center_id not in position:
                continue
            p, q = position[site_id], position[a.center_id]
            ax.plot([p.x_m, q.x_m], [p.y_m, q.y_m], color=color.get(a.center_id, '0.4'), linewidth=0.8,
                    linestyle='--' if EXCEEDS_L in a.flags else '-', gid=f'link-{site_id}-{a.center_id}', zorder=1)
        for site in sorted(inst.sites, key=lambda s: s.id):
            p = position[site.id]
            is_center = site.id in color
            if is_center:
                fill = color[site.id]
            elif site.id in plan.assignments:
                fill = color.get(plan.assignments[site.id].center_id, '0.6')
            else:
                fill = '0.6'
            ax.scatter([p.x_m], [p.y_m], marker=MARKER['large' if site.is_large else 'common'],
                       s=CENTER_SIZE if is_center else SITE_SIZE, color=[fill],
                       edgecolors='black' if is_center else 'none', linewidths=1.0,
                       gid=f'site-{site.id}', zorder=3 if is_center else 2)
        ax.set_aspect('equal', adjustable='datalim')

    ax.legend(handles=_legend_handles(), loc='upper right', fontsize='small')
    buf = io.StringIO()
    with matplotlib.rc_context({'svg.hashsalt': SVG_SALT, 'svg.fonttype': 'none'}):
        fig.savefig(buf, format='svg', metadata={'Date': None})
    return buf.getvalue()
