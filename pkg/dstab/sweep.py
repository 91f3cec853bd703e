"""
Parameter sweeps over matrix templates: exact rational grids, derived
parameters and the region CSV.
"""

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from dstab.documents import Expression, MatrixFormatError
from dstab.dstability import DSTABLE, certify
from dstab.linalg import format_rational, minor_table, to_rational
from dstab.loggers import getLogger
from dstab.oracle import search_counterexample
from dstab.stability import hurwitz_stable, necessary_dstability
from dstab.workers import ordered_map

logger = getLogger(__name__)

COLUMNS = ('hurwitz_stable', 'necessary_ok', 'theorem1_certified', 'oracle_counterexample')


class SweepError(ValueError):
    """ Sweep definition is unusable (unbound parameter, empty grid, bad axis) """


def _rational(text, what):
    try:
        return to_rational(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise SweepError('cannot read %s %r' % (what, text))


@dataclass(frozen=True)
class Axis:
    name: str
    start: Fraction
    stop: Fraction
    step: Fraction

    def __post_init__(self):
        if self.step <= 0:
            raise SweepError('step of %s must be positive' % self.name)
        if self.start > self.stop:
            raise SweepError('empty grid: %s starts above its end' % self.name)

    def points(self):
        count = math.floor((self.stop - self.start) / self.step) + 1
        return [self.start + i * self.step for i in range(count)]

    def __str__(self):
        return '%s=%s:%s:%s' % (self.name, self.start, self.stop, self.step)


@dataclass(frozen=True)
class Derived:
    """ Parameter computed from earlier ones, e.g. p=2*q """
    name: str
    expression: Expression

    def __str__(self):
        return '%s=%s' % (self.name, self.expression)


def parse_param(text):
    """ 'NAME=MIN:MAX:STEP' gives an Axis, 'NAME=EXPR' a Derived parameter """
    name, sep, rhs = text.partition('=')
    name = name.strip()
    if not sep or not name.isidentifier():
        raise SweepError('expected NAME=MIN:MAX:STEP or NAME=EXPR, got %r' % text)
    if ':' in rhs:
        parts = rhs.split(':')
        if len(parts) != 3:
            raise SweepError('axis %s needs MIN:MAX:STEP' % name)
        start, stop, step = (_rational(p, 'bound') for p in parts)
        return Axis(name, start, stop, step)
    try:
        return Derived(name, Expression(rhs))
    except MatrixFormatError as e:
        raise SweepError('derived parameter %s: %s' % (name, e))


@dataclass(frozen=True)
class SweepGrid:
    """ Row-major grid: the first declared axis varies slowest """
    axes: tuple
    derived: tuple = ()

    def __post_init__(self):
        seen = set()
        for axis in self.axes:
            if axis.name in seen:
                raise SweepError('parameter %s declared twice' % axis.name)
            seen.add(axis.name)
        for item in self.derived:
            unknown = item.expression.names - seen
            if unknown:
                raise SweepError('unbound parameter(s) in %s: %s' % (item, ', '.join(sorted(unknown))))
            if item.name in seen:
                raise SweepError('parameter %s declared twice' % item.name)
            seen.add(item.name)

    @classmethod
    def from_params(cls, params):
        parsed = [parse_param(p) for p in params]
        return cls(tuple(p for p in parsed if isinstance(p, Axis)),
                   tuple(p for p in parsed if isinstance(p, Derived)))

    @property
    def names(self):
        return tuple(a.name for a in self.axes) + tuple(d.name for d in self.derived)

    def __len__(self):
        return math.prod(len(a.points()) for a in self.axes)

    def points(self):
        for values in product(*(axis.points() for axis in self.axes)):
            bindings = dict(zip((a.name for a in self.axes), values))
            for item in self.derived:
                bindings[item.name] = item.expression.evaluate(bindings)
            yield bindings


@dataclass(frozen=True)
class PointVerdict:
    bindings: dict
    hurwitz_stable: bool
    necessary_ok: bool
    theorem1_certified: bool
    oracle_counterexample: object = None

    def row(self, names):
        flags = (self.hurwitz_stable, self.necessary_ok, self.theorem1_certified, self.oracle_counterexample)
        return ([format_rational(self.bindings[n]) for n in names]
                + ['' if f is None else str(int(f)) for f in flags])


def evaluate_point(doc, bindings, oracle_trials=0, seed=0):
    """ Verdicts for the template at one grid point, all exact except the oracle """
    m = doc.bind(bindings)
    table = minor_table(m)
    stable = bool(hurwitz_stable(m))
    necessary = bool(necessary_dstability(m, table))
    certified = stable and necessary and certify(m, table=table).kind == DSTABLE
    found = None
    if oracle_trials > 0:
        found = search_counterexample(m, oracle_trials, seed, threads=1).counterexample is not None
    return PointVerdict(bindings, stable, necessary, certified, found)


def run_sweep(doc, grid, oracle_trials=0, seed=0, threads=None):
    """ Evaluate every grid point; verdicts come back in grid order """
    bound = set(grid.names) | set(doc.defaults)
    missing = [name for name in doc.names if name not in bound]
    if missing:
        raise SweepError('unbound parameter(s): %s' % ', '.join(missing))
    unused = [name for name in grid.names if name not in doc.parameters]
    if unused:
        logger.warning('parameters not used by the template: %s' % ', '.join(unused))
    points = list(grid.points())
    if not points:
        raise SweepError('empty grid')
    logger.info('sweeping %d grid points' % len(points))
    outcomes = ordered_map(lambda b: evaluate_point(doc, b, oracle_trials, seed), points,
                           threads=threads, catch=())
    return [o.value for o in outcomes]


def region_csv(verdicts, names):
    """ CSV text: parameter columns, then the 0/1 verdict columns """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(list(names) + list(COLUMNS))
    for verdict in verdicts:
        writer.writerow(verdict.row(names))
    return buf.getvalue()
