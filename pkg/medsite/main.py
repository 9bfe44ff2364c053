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

import argparse
import logging
import sys

from medsite import __version__
from medsite.layers.pipeline import Layer2Mode, PipelineConfig, run_pipeline
from medsite.tools.siting_solver import EXACT_SIZE_LIMIT
from medsite.utils.domain import ModelParams
from medsite.utils.errors import EXIT_OK, EXIT_VIOLATIONS, InvalidInputError, MedsiteError
from medsite.utils.evaluate import (OpsCoefficients, baseline_metrics, cost_audit, operational_metrics,
                                    validate_plan)
from medsite.utils.generate import DALIAN_LIKE, GenSpec, generate_instance
from medsite.utils.parser.parse_plan import read_plan_json, write_plan_json
from medsite.utils.parser.parse_sites import load_coeffs_json, load_params_json, parse_sites_csv, sites_to_csv
from medsite.utils.render_svg import render_plan_svg
from medsite.utils.report import format_report, write_report_xlsx

logger = logging.getLogger('medsite')

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
PRESETS = {'dalian': DALIAN_LIKE}


def read_text(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise InvalidInputError(f'cannot read {path}: {e.strerror}') from None
    except UnicodeDecodeError as e:
        raise InvalidInputError(f'cannot decode {path} as UTF-8: {e.reason} at byte {e.start}') from None


def write_text(path, text):
    if path is None or path == '-':
        sys.stdout.write(text)
        return
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise InvalidInputError(f'cannot write {path}: {e.strerror}') from None
    logger.info('wrote %s', path)


def load_params(path):
    return load_params_json(read_text(path)) if path else ModelParams().check()


def load_coeffs(path):
    return load_coeffs_json(read_text(path)) if path else OpsCoefficients()


def cmd_gen(args):
    base = PRESETS[args.preset] if args.preset else GenSpec(0, 0, DALIAN_LIKE.bbox)
    spec = GenSpec(
        n_large=args.large if args.large is not None else base.n_large,
        n_common=args.common if args.common is not None else base.n_common,
        bbox=tuple(args.bbox) if args.bbox else base.bbox,
        beds_range=tuple(args.beds) if args.beds else base.beds_range,
        common_mix=base.common_mix,
        seed=args.seed if args.seed is not None else base.seed,
    )
    inst = generate_instance(spec)
    write_text(args.output, sites_to_csv(inst))
    return EXIT_OK


def cmd_solve(args):
    inst = parse_sites_csv(read_text(args.sites))
    params = load_params(args.params)
    coeffs = load_coeffs(args.coeffs)
    cfg = PipelineConfig(
        layer2_mode=Layer2Mode.parse(args.layer2),
        exact_size_limit=args.exact_limit,
        layer2_full_assignment=args.layer2_full,
        kmeans_k=args.k,
        k_max=args.k_max,
        seed=args.seed,
    )
    plan = run_pipeline(inst, params, cfg)
    if args.verbose:
        for summary in plan.layers:
            for msg in summary.messages:
                sys.stderr.write(f'layer {summary.layer}: {msg}\n')
    audit = cost_audit(inst, params, plan)
    ops = operational_metrics(inst, plan, coeffs, params)
    write_text(args.output, write_plan_json(plan, audit, ops))
    if args.svg:
        write_text(args.svg, render_plan_svg(inst, plan))
    return EXIT_OK


def cmd_validate(args):
    inst = parse_sites_csv(read_text(args.sites))
    plan = read_plan_json(read_text(args.plan))
    violations = validate_plan(inst, load_params(args.params), plan)
    if violations:
        sys.stderr.write(violations.get_message() + '\n')
        return EXIT_VIOLATIONS
    sys.stdout.write(violations.get_message() + '\n')
    return EXIT_OK


def cmd_eval(args):
    inst = parse_sites_csv(read_text(args.sites))
    plan = read_plan_json(read_text(args.plan))
    params = load_params(args.params)
    coeffs = load_coeffs(args.coeffs)
    audit = cost_audit(inst, params, plan)
    ops = operational_metrics(inst, plan, coeffs, params)
    baseline = baseline_metrics(inst, coeffs, params)
    sys.stdout.write(format_report(ops, baseline, audit))
    if args.xlsx:
        write_report_xlsx(ops, baseline, audit, args.xlsx)
    return EXIT_OK


def cmd_plot(args):
    inst = parse_sites_csv(read_text(args.sites))
    plan = read_plan_json(read_text(args.plan))
    write_text(args.output, render_plan_svg(inst, plan))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='medsite', description='Site temporary storage & disposal centers for medical waste.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log progress at DEBUG level.')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help='Generate a synthetic site inventory.')
    gen.add_argument('--preset', choices=sorted(PRESETS), help='Start from a named template.')
    gen.add_argument('--large', type=int, help='Number of Primary-or-above hospitals.')
    gen.add_argument('--common', type=int, help='Number of common collection sites.')
    gen.add_argument('--bbox', type=float, nargs=4, metavar=('LAT_MIN', 'LAT_MAX', 'LON_MIN', 'LON_MAX'))
    gen.add_argument('--beds', type=int, nargs=2, metavar=('MIN', 'MAX'), help='Bed range of large sites.')
    gen.add_argument('--seed', type=int)
    gen.add_argument('-o', '--output', help='CSV path, stdout if omitted.')
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser('solve', help='Run the three-layer siting pipeline.')
    solve.add_argument('--sites', required=True)
    solve.add_argument('--params', help='JSON with ModelParams keys.')
    solve.add_argument('--coeffs', help='JSON with OpsCoefficients keys.')
    solve.add_argument('--layer2', default=Layer2Mode.hybrid.name, choices=[m.name for m in Layer2Mode])
    solve.add_argument('--seed', type=int, default=0)
    solve.add_argument('--k', type=int, help='Fixed K for the clustering layer instead of the elbow.')
    solve.add_argument('--k-max', type=int, default=12)
    solve.add_argument('--exact-limit', type=int, default=EXACT_SIZE_LIMIT)
    solve.add_argument('--layer2-full', action='store_true', help='Require every uncovered site to attach in layer 2.')
    solve.add_argument('-o', '--output', help='Plan JSON path, stdout if omitted.')
    solve.add_argument('--svg', help='Also render the plan to this SVG path.')
    solve.set_defaults(func=cmd_solve)

    validate = sub.add_parser('validate', help='Check a plan against the model constraints.')
    validate.add_argument('--sites', required=True)
    validate.add_argument('--plan', required=True)
    validate.add_argument('--params')
    validate.set_defaults(func=cmd_validate)

    evaluate = sub.add_parser('eval', help='Report operating metrics against the baseline.')
    evaluate.add_argument('--sites', required=True)
    evaluate.add_argument('--plan', required=True)
    evaluate.add_argument('--params')
    evaluate.add_argument('--coeffs')
    evaluate.add_argument('--xlsx', help='Also write the report as a spreadsheet.')
    evaluate.set_defaults(func=cmd_eval)

    plot = sub.add_parser('plot', help='Render a plan to SVG.')
    plot.add_argument('--sites', required=True)
    plot.add_argument('--plan', required=True)
    plot.add_argument('-o', '--output', help='SVG path, stdout if omitted.')
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format=LOG_FORMAT, stream=sys.stderr)
    try:
        return args.func(args)
    except MedsiteError as e:
        logger.debug('command %s failed', args.command, exc_info=True)
        sys.stderr.write(f'Error: {e}\n')
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
