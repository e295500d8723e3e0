"""
torus-queens command line: construct, verify, solve, certify, render, sweep.

Exit codes: 0 success, 1 semantic negative (conflicts, refuted target, failed
sweep row), 2 invalid input, 3 budget exhausted.
"""
import argparse
import json
import logging
import os
import re
import sys
import time
from argparse import ArgumentParser
from copy import deepcopy
from multiprocessing import Pool

from . import certificates, constructions, solver
from .core import ConstructionError, PreconditionError
from .lines import verify_by_maps, verify_pairwise
from .log import SweepExperiment, atomic_write
from .placement_file import PlacementFormatError, read_placement, write_placement
from .render import render
from .sweep_utils import strategies

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3

THREADS_ENV = 'TORUS_QUEENS_THREADS'
METHOD_CHOICES = ['auto'] + [str(m) for m in constructions.CONSTRUCTIONS]


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, '1')))
    except ValueError:
        return 1


def int_range(text):
    """
    '7' -> [7], '5,7,11' -> [5, 7, 11], '2:100' -> 2..100, '3:99:6' -> 3, 9, ..., 99
    """
    values = []
    try:
        for part in text.split(','):
            if ':' in part:
                bounds = [int(x) for x in part.split(':')]
                low, high = bounds[0], bounds[1]
                step = bounds[2] if len(bounds) > 2 else 1
                if step < 1:
                    raise ValueError('step must be positive')
                values.extend(range(low, high + 1, step))
            else:
                values.append(int(part))
    except (ValueError, IndexError) as e:
        raise argparse.ArgumentTypeError('invalid range {!r}: {}'.format(text, e))
    return values


def str_list(text):
    return [x for x in text.split(',') if x]


# -----------------------------
# ARGUMENT PARSER
# -----------------------------

class QueensArgumentParser(ArgumentParser):
    """
    ArgumentParser with swept list arguments and an optional JSON config file
    whose keys override the parsed flags. Subcommand parsers are registered in
    `commands` so their swept arguments and config flag are seen from the top.
    """

    def __init__(self, strategy='grid_search', **kwargs):
        ArgumentParser.__init__(self, **kwargs)
        self.strategy = strategy
        self.opt_args = {}
        self.commands = {}
        self.json_config_arg_name = None
        self.parsed_args = None
        self.active = self

    def opt_list(self, *args, **kwargs):
        """
        A swept argument: its parsed value is a list of options
        """
        tunable = kwargs.pop('tunable', True)
        action = self.add_argument(*args, **kwargs)
        self.opt_args[action.dest] = (tunable, action.type)

    def json_config(self, *args, **kwargs):
        self.add_argument(*args, **kwargs)
        self.json_config_arg_name = re.sub('-', '_', args[-1].lstrip('-'))

    def parse_args(self, args=None, namespace=None):
        results = super(QueensArgumentParser, self).parse_args(args, namespace)
        old_args = vars(results)
        self.active = self.commands.get(old_args.get('command'), self)

        # override with json args if given
        for parser in {id(p): p for p in (self, self.active)}.values():
            config = old_args.get(parser.json_config_arg_name) if parser.json_config_arg_name else None
            if config:
                for arg, v in self.__read_json_config(config).items():
                    arg = re.sub('-', '_', arg)
                    if arg in parser.opt_args and isinstance(v, str):
                        v = parser.opt_args[arg][1](v)
                    old_args[arg] = v

        # track args
        self.parsed_args = deepcopy({k: v for k, v in old_args.items() if not callable(v)})
        # attach trial generation
        old_args['generate_trials'] = self.generate_trials
        return QueensNamespace(**old_args)

    def __read_json_config(self, file_path):
        try:
            with open(file_path) as json_data:
                return json.load(json_data)
        except (OSError, ValueError) as e:
            self.error('cannot read config {}: {}'.format(file_path, e))

    def flat_params(self):
        """
        One list of options per tunable swept argument of the parsed command
        """
        return [
            list(self.parsed_args[name])
            for name, (tunable, _) in self.active.opt_args.items() if tunable
        ]

    def generate_trials(self, nb_trials=None, seed=None, strategy=None):
        return strategies.generate_trials(
            strategy=strategy or self.strategy,
            flat_params=self.flat_params(),
            nb_trials=nb_trials,
            seed=seed,
        )


class QueensNamespace(argparse.Namespace):

    def __str__(self):
        result = '-' * 60 + '\nArguments:\n'
        for k, v in self.__dict__.items():
            if not callable(v):
                result += '{0:20}: {1}\n'.format(k, v)
        return result


def build_parser():
    parser = QueensArgumentParser(prog='torus-queens', description='Independent queens on the torus Z_n^d')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    commands = parser.add_subparsers(dest='command', parser_class=QueensArgumentParser)
    commands.required = True

    p = commands.add_parser('construct', help='build a placement')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--d', type=int, default=2)
    p.add_argument('--method', default='auto', choices=METHOD_CHOICES)
    p.add_argument('--out', help='placement file (.json or .txt)')
    p.set_defaults(func=cmd_construct)

    p = commands.add_parser('verify', help='check a placement file')
    p.add_argument('path')
    p.add_argument('--list-conflicts', action='store_true')
    p.add_argument('--pairwise', action='store_true', help='use the quadratic pairwise verifier')
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser('solve', help='exact search')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--d', type=int, default=2)
    p.add_argument('--target', type=int, default=None, help='decide whether this many queens fit')
    p.add_argument('--node-budget', type=int, default=None)
    p.add_argument('--budget', dest='time_budget', type=float, default=None, help='seconds')
    p.add_argument('--fix-origin', dest='fix_origin', action='store_true', default=True)
    p.add_argument('--no-fix-origin', dest='fix_origin', action='store_false')
    p.add_argument('--perfect', action='store_true', help='target n^(d-1), never skip an axis line')
    p.add_argument('--threads', type=int, default=default_threads())
    p.add_argument('--progress', action='store_true', help='JSON progress lines on stderr')
    p.add_argument('--out', help='write the best placement here')
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser('certify', help='impossibility certificates and bounds')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--d', type=int, default=2)
    p.set_defaults(func=cmd_certify)

    p = commands.add_parser('render', help='draw a placement file')
    p.add_argument('path')
    p.add_argument('--format', default='text', choices=['text', 'svg'])
    p.add_argument('--slice', dest='slice_at', type=int_range, default=None, help='x_3[,x_4,...] to draw')
    p.add_argument('--out')
    p.set_defaults(func=cmd_render)

    p = commands.add_parser('sweep', help='batch constructions into a versioned report')
    p.opt_list('--n', type=int_range, required=True, help='e.g. 2:100 or 5,7,11')
    p.opt_list('--d', type=int_range, default=[2])
    p.opt_list('--method', type=str_list, default=['auto'])
    p.add_argument('--strategy', default='grid_search', choices=['grid_search', 'random_search'])
    p.add_argument('--nb-trials', type=int, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--save-dir', default='sweeps')
    p.add_argument('--name', default='sweep')
    p.add_argument('--threads', type=int, default=default_threads())
    p.add_argument('--solve-max-n', type=int, default=0, help='run the 2D solver for n up to this')
    p.add_argument('--node-budget', type=int, default=None)
    p.add_argument('--baseline', default=None, help='deficit constant lock file')
    p.json_config('--config', default=None)
    p.set_defaults(func=cmd_sweep)

    parser.commands = dict(commands.choices)
    return parser


# -----------------------------
# COMMANDS
# -----------------------------

def _err(message):
    print(message, file=sys.stderr)


def _write_out(text, path):
    if path:
        with atomic_write(path) as tmp_path:
            with open(tmp_path, 'w') as file:
                file.write(text)
    else:
        sys.stdout.write(text)


def cmd_construct(args):
    result = constructions.construct(args.n, args.d, args.method)
    if args.out:
        write_placement(result.placement, args.out)
    print('method={} n={} d={} count={} verified={}'.format(
        result.method, args.n, args.d, result.count, 'independent' if result.verified else 'FAILED'))
    return EXIT_OK


def cmd_verify(args):
    pl = read_placement(args.path)
    report = verify_pairwise(pl) if args.pairwise else verify_by_maps(pl)
    print('n={} d={} count={}: {}'.format(pl.n, pl.d, pl.count, report.summary()))
    if args.list_conflicts:
        for i, j, direction in report.conflicts:
            print('{} {} {}'.format(list(pl.queens[i]), list(pl.queens[j]), direction))
    return EXIT_OK if report.independent else EXIT_NEGATIVE


def cmd_solve(args):
    progress = sys.stderr if args.progress else None
    if args.target is not None or args.perfect:
        target = args.n ** (args.d - 1) if args.target is None else args.target
        decision = solver.exists_independent(
            args.n, args.d, target, node_budget=args.node_budget, time_budget=args.time_budget,
            fix_origin=args.fix_origin, perfect=args.perfect, progress=progress)
        print(json.dumps(decision.to_dict()))
        if args.out and decision.witness is not None:
            write_placement(decision.witness, args.out)
        return {
            solver.Decision.YES: EXIT_OK,
            solver.Decision.NO: EXIT_NEGATIVE,
            solver.Decision.UNKNOWN: EXIT_BUDGET,
        }[decision.status]

    result = solver.max_independent(
        args.n, args.d, node_budget=args.node_budget, time_budget=args.time_budget,
        fix_origin=args.fix_origin, workers=args.threads, progress=progress)
    print(json.dumps(result.to_dict()))
    if args.out:
        write_placement(result.best, args.out)
    return EXIT_OK if result.status is solver.Status.OPTIMAL else EXIT_BUDGET


def certify_document(n, d):
    doc = {'n': n, 'd': d, 'upper_bound': certificates.upper_bound(n, d), 'certificates': []}
    if d == 2:
        certs = certificates.impossibility_2d(n)
        doc['certificates'] = [certificates.certificate_to_dict(c) for c in certs]
        doc['known_max'] = certificates.known_max_2d(n)
        doc['exact_value'] = certificates.certificate_to_dict(certificates.exact_value_certificate(n))
        if not certs:
            doc['summary'] = 'no impossibility certificate; exact value {}'.format(doc['known_max'])
    elif d == 3:
        cert = certificates.impossibility_3d(n)
        if cert is not None:
            doc['certificates'] = [certificates.certificate_to_dict(cert)]
        else:
            doc['summary'] = 'no impossibility certificate; bound {}'.format(doc['upper_bound'])
    return doc


def cmd_certify(args):
    print(json.dumps(certify_document(args.n, args.d), indent=2))
    return EXIT_OK


def cmd_render(args):
    pl = read_placement(args.path)
    _write_out(render(pl, args.format, args.slice_at), args.out)
    return EXIT_OK


def _sweep_row(trial):
    """
    One report row; None when the method does not apply to (n, d)
    """
    n, d, method, solve_max_n, node_budget = trial
    started = time.monotonic()
    try:
        result = constructions.construct(n, d, method)
    except PreconditionError as e:
        logger.info('skipping n=%d d=%d %s: %s', n, d, method, e)
        return None
    except ConstructionError as e:
        logger.error('n=%d d=%d %s: %s', n, d, method, e)
        return {
            'n': n,
            'd': d,
            'method': str(method),
            'count': 0,
            'deficit': n ** (d - 1),
            'verified': False,
            'upper_bound': certificates.upper_bound(n, d),
            'status': 'failed',
            'error': str(e),
            'elapsed_ms': int((time.monotonic() - started) * 1000),
        }

    verified = verify_by_maps(result.placement).independent
    row = {
        'n': n,
        'd': d,
        'method': str(result.method),
        'count': result.count,
        'deficit': result.deficit,
        'verified': verified,
        'upper_bound': certificates.upper_bound(n, d),
        'status': 'constructed',
    }
    if d == 2:
        row['known_max'] = certificates.known_max_2d(n)
        row['below_known_max'] = result.count < row['known_max']
        if n <= solve_max_n:
            solved = solver.max_independent(n, 2, node_budget=node_budget)
            row['status'] = str(solved.status)
            row['solver_count'] = solved.best_count
    row['elapsed_ms'] = int((time.monotonic() - started) * 1000)
    return row


def row_failures(row):
    if row['status'] == 'failed':
        return ['construction failed: {}'.format(row['error'])]
    failures = []
    if not row['verified']:
        failures.append('placement is not independent')
    if row['count'] > row['upper_bound']:
        failures.append('count {} exceeds upper bound {}'.format(row['count'], row['upper_bound']))
    if 'solver_count' in row:
        if row['solver_count'] > row['upper_bound']:
            failures.append('solver found {} above upper bound {}'.format(row['solver_count'], row['upper_bound']))
        if row['status'] == str(solver.Status.OPTIMAL) and row['solver_count'] != row['known_max']:
            failures.append('solver optimum {} differs from {}'.format(row['solver_count'], row['known_max']))
    return failures


def deficit_constant(rows):
    """
    Smallest integer C with deficit <= C n on every step-function row, or None
    """
    deficits = [(r['deficit'], r['n']) for r in rows
                if r['method'] == str(constructions.Method.THEOREM5) and r['status'] != 'failed']
    if not deficits:
        return None
    return max(-(-deficit // n) for deficit, n in deficits)


def check_baseline(path, constant):
    """
    Locks the first measured constant; later runs may not exceed it
    :return: (ok, locked value)
    """
    if os.path.exists(path):
        with open(path) as file:
            locked = json.load(file)['deficit_constant']
        return constant <= locked, locked

    with atomic_write(path) as tmp_path:
        with open(tmp_path, 'w') as file:
            json.dump({'deficit_constant': constant}, file)
    return True, constant


def cmd_sweep(args):
    trials = args.generate_trials(nb_trials=args.nb_trials, seed=args.seed, strategy=args.strategy)
    tasks = [(n, d, method, args.solve_max_n, args.node_budget) for n, d, method in trials]

    if args.threads > 1:
        with Pool(processes=args.threads) as pool:
            rows = pool.map(_sweep_row, tasks)
    else:
        rows = [_sweep_row(t) for t in tasks]
    rows = [r for r in rows if r is not None]

    exp = SweepExperiment(save_dir=args.save_dir, name=args.name)
    exp.argparse(args)

    failed = 0
    for row in rows:
        failures = row_failures(row)
        if failures:
            failed += 1
            row['failures'] = failures
            _err('n={} d={} {}: {}'.format(row['n'], row['d'], row['method'], '; '.join(failures)))
        exp.log(row)

    constant = deficit_constant(rows)
    summary = {'rows': len(rows), 'failed_rows': failed, 'deficit_constant': constant}
    baseline_ok = True
    if args.baseline and constant is not None:
        baseline_ok, locked = check_baseline(args.baseline, constant)
        summary['locked_deficit_constant'] = locked
        if not baseline_ok:
            _err('deficit constant {} exceeds the locked value {}'.format(constant, locked))
    exp.set_summary(summary)
    exp.save()

    print('{}: {} row(s), {} failed, deficit constant {} -> {}'.format(
        exp, len(rows), failed, constant, exp.get_data_path()))
    return EXIT_OK if failed == 0 and baseline_ok else EXIT_NEGATIVE


def _configure_logging(verbose):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID
    _configure_logging(args.verbose)

    try:
        return args.func(args)
    except PlacementFormatError as e:
        _err('invalid placement file: {}'.format(e))
        return EXIT_INVALID
    except PreconditionError as e:
        _err('error: {}'.format(e))
        return EXIT_INVALID
    except ConstructionError as e:
        _err('construction failed: {}'.format(e))
        return EXIT_NEGATIVE


if __name__ == '__main__':
    sys.exit(main())
