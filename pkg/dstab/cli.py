#!/usr/bin/env python

import sys
import time
import argparse

from dstab.documents import MatrixFormatError, ReportDocument, load_report, matrix_digest, parse_matrix
from dstab.dstability import (COUNTEREXAMPLE, DSTABLE, INCONCLUSIVE, NECESSARY_FAILED, NOT_STABLE,
                              Certificate, PreconditionError, ReplayError, certify, replay)
from dstab.linalg import DimensionError, to_rational
from dstab.loggers import context_logger, getLogger
from dstab.oracle import OracleError, search_counterexample
from dstab.stability import hurwitz_stable
from dstab.sweep import SweepError, SweepGrid, region_csv, run_sweep
from dstab.helpers import write_text
from dstab.version import __version__

logger = getLogger(__name__)

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_NOT_DSTABLE = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_SOFTWARE = 70

EXIT_CODES = {
    DSTABLE: EXIT_OK,
    INCONCLUSIVE: EXIT_INCONCLUSIVE,
    NOT_STABLE: EXIT_NOT_DSTABLE,
    NECESSARY_FAILED: EXIT_NOT_DSTABLE,
    COUNTEREXAMPLE: EXIT_COUNTEREXAMPLE,
}


class UsageError(Exception):
    """ Flags are inconsistent """


class ArgumentParser(argparse.ArgumentParser):
    """ argparse exits 2 on bad usage; 2 is a verdict here """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def pivot_chain(text):
    try:
        return tuple(int(k) for k in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError('pivot chain must be comma separated indices, got %r' % text)


def count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got %r' % text)
    if value < 0:
        raise argparse.ArgumentTypeError('expected a nonnegative integer, got %d' % value)
    return value


def binding(text):
    name, sep, value = text.partition('=')
    if not sep or not name.strip().isidentifier():
        raise argparse.ArgumentTypeError('expected NAME=VALUE, got %r' % text)
    try:
        return name.strip(), to_rational(value)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError('cannot read value of %s' % name)


def parse_args(args):
    """ Parse arguments for the dstab commands """
    desc = 'D-stability checks over exact rational arithmetic'
    dhf = argparse.ArgumentDefaultsHelpFormatter
    parser0 = ArgumentParser(description=desc)
    parser0.add_argument('--version', help='Print version and exit', action='version', version=__version__)

    pparser = ArgumentParser(add_help=False)
    pparser.add_argument('--version', help='Print version and exit', action='version', version=__version__)
    pparser.add_argument('--loglevel', default=3, type=int,
                         help='0:all, 1:debug, 2:info, 3:warning, 4:error, 5:critical')
    pparser.add_argument('--format', choices=['text', 'json'], default='text', help='Output format')
    pparser.add_argument('--seed', default=0, type=count, help='Seed for the oracle sampler')

    mparser = ArgumentParser(add_help=False)
    mparser.add_argument('--input-format', choices=['json', 'csv'], default=None,
                         help='Matrix document format (default: from extension or content)')
    mparser.add_argument('--set', dest='bindings', action='append', type=binding, default=[],
                         help='Bind a template parameter, NAME=VALUE (repeatable)')
    mparser.add_argument('--out', default=None, help='Write the report here instead of stdout')
    mparser.add_argument('--timing', action='store_true', default=False, help='Include timing in the report')
    mparser.add_argument('--threads', type=int, default=None, help='Worker threads (default: DSTAB_THREADS)')

    subparsers = parser0.add_subparsers(dest='command')

    h = 'Certify D-stability of a matrix'
    parser = subparsers.add_parser('check', parents=[pparser, mparser], help=h, formatter_class=dhf)
    parser.add_argument('input', nargs='?', default=None, help='Matrix document (JSON or CSV)')
    parser.add_argument('--pivot-chain', type=pivot_chain, default=None, help='Pivots per level, e.g. 4,3')
    parser.add_argument('--all-chains', action='store_true', default=False, help='Collect every passing chain')
    parser.add_argument('--assume-submatrix-dstable', dest='assume_level', type=int, default=None,
                        metavar='LEVEL', help='Treat principal submatrices of this dimension as D-stable')
    parser.add_argument('--oracle-trials', type=count, default=0,
                        help='Search for a counterexample when the test is inconclusive')
    parser.add_argument('--replay', default=None, metavar='REPORT', help='Re-validate a stored report')

    h = 'Search for a positive diagonal D making DA unstable'
    parser = subparsers.add_parser('oracle', parents=[pparser, mparser], help=h, formatter_class=dhf)
    parser.add_argument('input', help='Matrix document (JSON or CSV)')
    parser.add_argument('--trials', type=count, default=10000, help='Random trials after the corner probes')
    parser.add_argument('--exact', action='store_true', default=False,
                        help='Decide each sample with exact Hurwitz determinants')

    h = 'Evaluate a matrix template over a parameter grid'
    parser = subparsers.add_parser('sweep', parents=[pparser], help=h, formatter_class=dhf)
    parser.add_argument('template', help='Matrix template document (JSON or CSV)')
    parser.add_argument('--input-format', choices=['json', 'csv'], default=None, help='Template format')
    parser.add_argument('--param', dest='params', action='append', default=[], required=True,
                        help='NAME=MIN:MAX:STEP axis or NAME=EXPR derived parameter (repeatable)')
    parser.add_argument('--out', default=None, help='Region CSV (default: stdout)')
    parser.add_argument('--oracle-trials', type=count, default=0, help='Oracle trials per grid point')
    parser.add_argument('--threads', type=int, default=None, help='Worker threads (default: DSTAB_THREADS)')

    parsed_args = vars(parser0.parse_args(args))
    if parsed_args.get('command') is None:
        parser0.error('choose a command: check, oracle, sweep')
    return parsed_args


def load_matrix(args):
    doc = parse_matrix(args['input'], args.get('input_format'))
    return doc.bind(dict(args.get('bindings') or []))


def render_text(report):
    """ Human readable summary of a report """
    lines = ['input: n=%d %s' % (report.matrix.n, report.digest)]
    cert = report.certificate
    if cert is not None:
        lines.append('verdict: %s' % cert.kind)
        if cert.stability_evidence:
            lines.append('hurwitz determinants: %s' % ', '.join(str(v) for v in cert.stability_evidence))
        if cert.witness:
            lines.append('witness: %s' % cert.witness)
        if cert.kind == DSTABLE:
            lines.append('pivot chain: %s' % (','.join(str(k) for k in cert.pivot_chain) or '-'))
            lines.append('base rule: %s' % cert.base_rule)
            lines.append('inequalities: %d satisfied' % len(cert.instances))
            for chain in cert.alternatives:
                lines.append('also passes: %s' % ','.join(str(k) for k in chain))
        elif cert.kind == INCONCLUSIVE:
            for instance in cert.instances:
                lines.append('violated: n=%d %s' % (instance.n, instance))
        elif cert.kind == COUNTEREXAMPLE:
            lines.append('D: %s' % ' '.join(str(d) for d in cert.counterexample_D))
            lines.append('abscissa: %g' % cert.abscissa)
    if report.oracle is not None:
        summary = report.oracle
        lines.append('oracle: %d probes, %d trials, %d eigenvalue failures' %
                     (summary['probes'], summary['trials'], summary['eigen_failures']))
        if summary['counterexample'] is None:
            lines.append('oracle: no counterexample found')
    if report.timing is not None:
        lines.append('seconds: %s' % report.timing['seconds'])
    return '\n'.join(lines) + '\n'


def emit(report, args):
    text = report.dumps() if args.get('format') == 'json' else render_text(report)
    write_text(text, args.get('out') or sys.stdout)


def _counterexample_certificate(m, found):
    return Certificate(COUNTEREXAMPLE, m.n, counterexample_D=found.D.as_rational(),
                       abscissa=found.abscissa, stability_evidence=hurwitz_stable(m).determinants)


def cmd_check(args):
    if args.get('replay'):
        return cmd_replay(args)
    if args.get('input') is None:
        raise UsageError('check needs a matrix document or --replay REPORT')
    started = time.perf_counter()
    m = load_matrix(args)
    log = context_logger(logger, matrix=matrix_digest(m), command='check')
    policy = 'all-chains' if args.get('all_chains') else 'default'
    cert = certify(m, chain=args.get('pivot_chain'), policy=policy, assume_level=args.get('assume_level'))
    log.info('verdict %s' % cert.kind)
    oracle = None
    trials = args.get('oracle_trials') or 0
    if cert.kind == INCONCLUSIVE and trials > 0:
        result = search_counterexample(m, trials, args.get('seed', 0), threads=args.get('threads'))
        oracle = result.to_dict()
        if result.counterexample is not None:
            cert = _counterexample_certificate(m, result.counterexample)
            log.info('oracle found a counterexample')
    timing = {'seconds': round(time.perf_counter() - started, 6)} if args.get('timing') else None
    emit(ReportDocument('check', m, cert, oracle, timing), args)
    return EXIT_CODES[cert.kind]


def cmd_replay(args):
    report = load_report(args['replay'])
    if report.certificate is None:
        raise MatrixFormatError('report carries no certificate')
    replay(report.matrix, report.certificate)
    logger.info('report replays: %s' % report.certificate.kind)
    write_text('replay ok: %s\n' % report.certificate.kind, args.get('out') or sys.stdout)
    return EXIT_OK


def cmd_oracle(args):
    started = time.perf_counter()
    m = load_matrix(args)
    log = context_logger(logger, matrix=matrix_digest(m), command='oracle')
    result = search_counterexample(m, args['trials'], args.get('seed', 0),
                                   threads=args.get('threads'), exact=args.get('exact', False))
    log.info('%d probes and %d trials, counterexample: %s' %
             (result.probes, result.trials, result.counterexample is not None))
    cert = None
    if result.counterexample is not None:
        cert = _counterexample_certificate(m, result.counterexample)
    timing = {'seconds': round(time.perf_counter() - started, 6)} if args.get('timing') else None
    emit(ReportDocument('oracle', m, cert, result.to_dict(), timing), args)
    return EXIT_COUNTEREXAMPLE if cert is not None else EXIT_OK


def cmd_sweep(args):
    doc = parse_matrix(args['template'], args.get('input_format'))
    grid = SweepGrid.from_params(args['params'])
    verdicts = run_sweep(doc, grid, oracle_trials=args.get('oracle_trials') or 0,
                         seed=args.get('seed', 0), threads=args.get('threads'))
    write_text(region_csv(verdicts, grid.names), args.get('out') or sys.stdout)
    return EXIT_OK


COMMANDS = {'check': cmd_check, 'oracle': cmd_oracle, 'sweep': cmd_sweep}


def main(argv):
    """ Run a command and return its exit code """
    args = parse_args(argv)
    getLogger('dstab', stdout={'level': args.pop('loglevel') * 10})
    cmd = args.pop('command')
    try:
        return COMMANDS[cmd](args)
    except (UsageError, PreconditionError) as e:
        logger.error('Usage error: %s' % e)
        return EXIT_USAGE
    except (MatrixFormatError, DimensionError, ReplayError, SweepError, OSError) as e:
        logger.error('Input error: %s' % e)
        return EXIT_DATA
    except OracleError as e:
        logger.error('Oracle failed: %s' % e)
        return EXIT_SOFTWARE
    except Exception as e:
        logger.exception('Unexpected error in %s: %s' % (cmd, e))
        return EXIT_SOFTWARE


def cli():
    """ Command Line Interface """
    sys.exit(main(sys.argv[1:]))


if __name__ == '__main__':
    cli()
