"""
Independent validation of the determinantal test.

The minor-sum expansions of det(A + iD), the last-row expansion identity for
det(A +- iD), the polynomial F whose coefficients are the crit1 values, and a
randomized search for a positive diagonal D with DA unstable.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np
import sympy

from dstab.linalg import (ComplexRational, DimensionError, IndexSet, ZeroPivotError,
                          complex_det, minor_table, schur_complement, to_rational)
from dstab.loggers import getLogger
from dstab.stability import EigenvalueError, hurwitz_stable, spectral_abscissa, spectral_abscissa_mp
from dstab.workers import ordered_map, thread_count

logger = getLogger(__name__)

MARGIN = 1e-6
LOG_RANGE = (-3.0, 3.0)
PROBE_LARGE = 1e3
PROBE_SMALL = 1e-3
BATCH_SIZE = 256
EXPAND_MAX_DIMENSION = 7


class OracleError(RuntimeError):
    """ No trial of a counterexample search could be evaluated """


def _diagonal(d, n):
    d = [to_rational(x) for x in d]
    if len(d) != n:
        raise DimensionError('diagonal has %d entries, expected %d' % (len(d), n))
    return d


def _shift_expansion(table, d, parity):
    """ Terms of det(A + iD) = sum_S i^|S| d_S A(S^c) with |S| of the given parity """
    n = table.n
    full = IndexSet.full(n)
    total = Fraction(0)
    for size in range(parity, n + 1, 2):
        sign = -1 if (size // 2) % 2 else 1
        for s in full.subsets(size):
            total += sign * table[full - s] * prod((d[i - 1] for i in s), start=Fraction(1))
    return total


def re_det_expansion(m, d, table=None):
    """ Re det(A + iD) from principal minors """
    table = minor_table(m) if table is None else table
    return _shift_expansion(table, _diagonal(d, m.n), 0)


def im_det_expansion(m, d, table=None):
    """ Im det(A + iD) from principal minors """
    table = minor_table(m) if table is None else table
    return _shift_expansion(table, _diagonal(d, m.n), 1)


def expan_identity_check(m, d):
    """ det(A +- iD) = +-i d_n det(A|n +- iD|n) + a_nn det(A|a_nn +- iD|n), both signs, exactly """
    n = m.n
    if n < 2:
        raise DimensionError('expansion identity needs n >= 2')
    d = _diagonal(d, n)
    if m.pivot(n) == 0:
        raise ZeroPivotError('a_%d%d is zero' % (n, n))
    leading = m.principal(IndexSet.full(n).without(n))
    if not complex_det(leading, d[:-1], 1):
        raise ZeroPivotError('det(A|n + iD|n) is zero')
    schur = schur_complement(m, n)
    for sign in (1, -1):
        left = complex_det(m, d, sign)
        right = (ComplexRational(0, sign * d[-1]) * complex_det(leading, d[:-1], sign)
                 + m.pivot(n) * complex_det(schur, d[:-1], sign))
        if left != right:
            return False
    return True


def _f_factors(m, k, table):
    """ Coefficients of Re/Im det(A|k + iD) and of Re/Im det(A|a_kk + iD), keyed by S """
    pivot = m.pivot(k)
    if pivot == 0:
        raise ZeroPivotError('a_%d%d is zero' % (k, k))
    if m.n < 2:
        raise DimensionError('F needs n >= 2')
    rest = IndexSet.full(m.n).without(k)
    factors = {'re_a': {}, 'im_a': {}, 're_b': {}, 'im_b': {}}
    for size in range(len(rest) + 1):
        # i^|S| split into real and imaginary parts
        sign = -1 if (size // 2) % 2 else 1
        part = 're' if size % 2 == 0 else 'im'
        for s in rest.subsets(size):
            complement = rest - s
            factors[part + '_a'][s] = sign * table[complement]
            # Sylvester: minors of the Schur complement are A(X + k) / a_kk
            factors[part + '_b'][s] = sign * table[complement.with_index(k)] / pivot
    return rest, factors


def eval_F(m, k, d, table=None):
    """ F(d) = Re det(A|k + iD) Re det(A|a_kk + iD) + Im(..) Im(..), exactly """
    table = minor_table(m) if table is None else table
    rest, factors = _f_factors(m, k, table)
    d = _diagonal(d, m.n - 1)
    weight = dict(zip(rest, d))

    def evaluate(terms):
        return sum((c * prod((weight[i] for i in s), start=Fraction(1)) for s, c in terms.items()),
                   Fraction(0))

    return (evaluate(factors['re_a']) * evaluate(factors['re_b'])
            + evaluate(factors['im_a']) * evaluate(factors['im_b']))


def monomial_for(alpha, beta, k, n):
    """ Exponents (over the indices other than k) of the monomial carrying the (alpha, beta) value """
    exponents = []
    for i in IndexSet.full(n).without(k):
        if i in beta:
            exponents.append(0)
        elif i in alpha:
            exponents.append(1)
        else:
            exponents.append(2)
    return tuple(exponents)


@dataclass(frozen=True)
class MultiPoly:
    """ Polynomial in d_i (i != k) with exact coefficients keyed by exponent vector """
    variables: tuple
    terms: dict

    def coefficient(self, exponents):
        return self.terms.get(tuple(exponents), Fraction(0))

    def __call__(self, d):
        d = [to_rational(x) for x in d]
        return sum((c * prod((x ** e for x, e in zip(d, exps)), start=Fraction(1))
                    for exps, c in self.terms.items()), Fraction(0))

    def as_expr(self):
        symbols = sympy.symbols(['d%d' % i for i in self.variables])
        return sum((sympy.Rational(c.numerator, c.denominator)
                    * sympy.Mul(*(s ** e for s, e in zip(symbols, exps)))
                    for exps, c in self.terms.items()), sympy.Integer(0))


def expand_F(m, k, table=None):
    """ Expand F into monomials with sympy polynomial arithmetic over QQ """
    if m.n > EXPAND_MAX_DIMENSION:
        raise DimensionError('expansion of F is limited to n <= %d' % EXPAND_MAX_DIMENSION)
    table = minor_table(m) if table is None else table
    rest, factors = _f_factors(m, k, table)
    variables = rest.indices
    gens = sympy.symbols(['d%d' % i for i in variables])

    def poly(terms):
        rep = {}
        for s, c in terms.items():
            if c:
                exps = tuple(1 if i in s else 0 for i in variables)
                rep[exps] = sympy.Rational(c.numerator, c.denominator)
        return sympy.Poly.from_dict(rep, *gens, domain=sympy.QQ)

    f = poly(factors['re_a']) * poly(factors['re_b']) + poly(factors['im_a']) * poly(factors['im_b'])
    terms = {}
    for exps, c in f.terms():
        if c != 0:
            terms[tuple(int(e) for e in exps)] = Fraction(int(c.p), int(c.q))
    return MultiPoly(variables, terms)


@dataclass(frozen=True)
class DiagonalSample:
    entries: tuple
    seed: int
    trial_index: object = None
    probe: object = None

    def as_rational(self):
        return tuple(to_rational(float(x)) for x in self.entries)


@dataclass(frozen=True)
class Counterexample:
    D: DiagonalSample
    abscissa: float
    margin: float


@dataclass(frozen=True)
class SearchResult:
    counterexample: object
    trials: int
    probes: int
    eigen_failures: int
    near_boundary: int

    def to_dict(self):
        found = self.counterexample
        return {
            'trials': self.trials,
            'probes': self.probes,
            'eigen_failures': self.eigen_failures,
            'near_boundary_discards': self.near_boundary,
            'counterexample': None if found is None else {
                'D': [repr(float(x)) for x in found.D.entries],
                'probe': found.D.probe,
                'trial_index': found.D.trial_index,
                'abscissa': found.abscissa,
                'margin': found.margin,
            },
        }


def probe_samples(n, seed):
    """ Deterministic corner probes: all ones, then one large and one small entry per index """
    yield DiagonalSample(tuple([1.0] * n), seed, probe='ones')
    for i in range(n):
        for name, value in (('large', PROBE_LARGE), ('small', PROBE_SMALL)):
            entries = [1.0] * n
            entries[i] = value
            yield DiagonalSample(tuple(entries), seed, probe='%s-%d' % (name, i + 1))


def random_sample(n, seed, trial_index):
    """ Log-uniform diagonal drawn from a stream keyed by (seed, trial_index) """
    rng = np.random.default_rng([seed, trial_index])
    exponents = rng.uniform(LOG_RANGE[0], LOG_RANGE[1], n)
    return DiagonalSample(tuple(float(x) for x in 10.0 ** exponents), seed, trial_index=trial_index)


def _evaluate(m, a, sample, exact):
    """ (abscissa, hit, near_boundary) for diag(D) A """
    scaled = np.asarray(sample.entries)[:, None] * a
    abscissa = spectral_abscissa(scaled)
    if exact:
        hit = not hurwitz_stable(m.scaled(sample.as_rational()))
        return abscissa, hit, False
    if abscissa >= MARGIN:
        return abscissa, True, False
    if abscissa > 0:
        refined = float(spectral_abscissa_mp(m.scaled(sample.as_rational())))
        return refined, refined >= MARGIN, refined < MARGIN
    return abscissa, False, False


def search_counterexample(m, trials, seed, threads=None, exact=False):
    """ Look for a positive diagonal D with DA not Hurwitz stable

    Probes run first, then random trials in order. The reported hit is the one
    with the lowest sample index, so the result does not depend on `threads`.
    Finding nothing is not a proof of D-stability.
    """
    if trials < 0:
        raise ValueError('trials must be nonnegative')
    if seed < 0:
        raise ValueError('seed must be nonnegative')
    threads = thread_count() if threads is None else threads
    n = m.n
    a = m.as_float()
    probes = list(probe_samples(n, seed))
    total = len(probes) + trials

    def sample_at(index):
        return probes[index] if index < len(probes) else random_sample(n, seed, index - len(probes))

    failures = near = 0
    for start in range(0, total, BATCH_SIZE):
        samples = [sample_at(i) for i in range(start, min(start + BATCH_SIZE, total))]
        outcomes = ordered_map(lambda s: _evaluate(m, a, s, exact), samples, threads=threads,
                               catch=(EigenvalueError,), start=start)
        for outcome, sample in zip(outcomes, samples):
            if not outcome.ok:
                failures += 1
                continue
            abscissa, hit, discarded = outcome.value
            near += discarded
            if hit:
                done = outcome.index + 1
                logger.info('counterexample at sample %d, abscissa %g' % (outcome.index, abscissa))
                return SearchResult(Counterexample(sample, abscissa, abscissa - MARGIN),
                                    trials=max(0, done - len(probes)), probes=min(done, len(probes)),
                                    eigen_failures=failures, near_boundary=near)
    if total and failures == total:
        raise OracleError('all %d samples failed to evaluate' % total)
    if failures:
        logger.warning('%d of %d samples failed to evaluate' % (failures, total))
    return SearchResult(None, trials=trials, probes=len(probes),
                        eigen_failures=failures, near_boundary=near)
