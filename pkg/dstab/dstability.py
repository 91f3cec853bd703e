"""
Determinantal sufficient test for D-stability and the recursive certification
pipeline built on it.

Every quantity is taken from a single table of principal minors of the input
matrix: a principal submatrix on the index set U has the minors table[alpha]
for alpha inside U, so descending from A to A|k never recomputes anything.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from dstab.linalg import (DimensionError, IndexSet, Matrix, ZeroPivotError, det,
                          format_rational, minor_table, to_rational)
from dstab.loggers import getLogger
from dstab.stability import (classify_p, hurwitz_stable, hurwitz_stable_from_minors,
                             necessary_dstability)

logger = getLogger(__name__)

DSTABLE = 'DStable'
NOT_STABLE = 'NotStable'
NECESSARY_FAILED = 'NecessaryFailed'
COUNTEREXAMPLE = 'Counterexample'
INCONCLUSIVE = 'Inconclusive'
KINDS = (DSTABLE, NOT_STABLE, NECESSARY_FAILED, COUNTEREXAMPLE, INCONCLUSIVE)

# how the bottom of a pivot chain was admitted
BASE_RULE = 'base'
SHIFT_RULE = 'imaginary-shift'
ASSUMED_RULE = 'assumed'

POLICIES = ('default', 'all-chains')
ALL_CHAINS_MAX_DIMENSION = 6


class ParityError(ValueError):
    """ N(alpha) and N(beta) do not satisfy the parity and range conditions """


class PreconditionError(ValueError):
    """ An operation's stated hypotheses are not met """


class ReplayError(ValueError):
    """ A certificate does not survive re-evaluation """


def chi_exponent(n, n_alpha, n_beta):
    """ Exponent of -1 in front of the leading term of a crit1 inequality """
    if not 0 <= n_beta <= n_alpha <= n - 1:
        raise ParityError('need 0 <= N(beta)=%d <= N(alpha)=%d <= %d' % (n_beta, n_alpha, n - 1))
    if (n_alpha - n_beta) % 2:
        raise ParityError('N(alpha)=%d and N(beta)=%d differ in parity' % (n_alpha, n_beta))
    m = n - 1
    if (m - n_alpha) % 2 == 0:
        return m - (n_alpha + n_beta) // 2
    return (m - n_beta) // 2 + (m - n_alpha) // 2


def enumerate_alpha_beta(n, k, within=None):
    """ All (alpha, beta) pairs for pivot k, ordered by (N(alpha), alpha, N(beta), beta) """
    within = IndexSet.full(n) if within is None else within
    if k not in within:
        raise PreconditionError('pivot %d is not in %s' % (k, within))
    rest = within.without(k)
    pairs = []
    for size in range(1, len(rest) + 1):
        for alpha in rest.subsets(size):
            for beta_size in range(size % 2, size + 1, 2):
                for beta in alpha.subsets(beta_size):
                    pairs.append((alpha, beta))
    return pairs


@dataclass(frozen=True)
class Crit1Instance:
    """ One evaluated inequality on the principal submatrix `within` """
    k: int
    alpha: IndexSet
    beta: IndexSet
    chi: int
    value: Fraction
    satisfied: bool
    within: IndexSet

    @property
    def n(self):
        return len(self.within)

    def to_dict(self):
        return {
            'k': self.k,
            'alpha': list(self.alpha.indices),
            'beta': list(self.beta.indices),
            'chi': self.chi,
            'value': format_rational(self.value),
            'satisfied': self.satisfied,
            'within': list(self.within.indices),
            'n': self.n,
        }

    @classmethod
    def from_dict(cls, data, dimension):
        return cls(k=int(data['k']),
                   alpha=IndexSet.of(dimension, data['alpha']),
                   beta=IndexSet.of(dimension, data['beta']),
                   chi=int(data['chi']), value=to_rational(data['value']),
                   satisfied=bool(data['satisfied']),
                   within=IndexSet.of(dimension, data['within']))

    def __str__(self):
        return 'k=%d alpha=%s beta=%s value=%s' % (self.k, self.alpha, self.beta, self.value)


def crit1_value(m, k, alpha, beta, table=None, within=None):
    """ Left-hand side of the crit1 inequality for (alpha, beta) at pivot k

    sum_r (-1)^(chi+r) sum_{gamma in alpha\\beta, N(gamma)=r} A(alpha\\gamma) A(beta+gamma+k) / a_kk
    """
    table = minor_table(m) if table is None else table
    within = IndexSet.full(m.n) if within is None else within
    pivot = m.pivot(k)
    if pivot == 0:
        raise ZeroPivotError('a_%d%d is zero' % (k, k))
    if not (beta <= alpha and alpha <= within.without(k)):
        raise PreconditionError('need beta <= alpha <= %s without %d' % (within, k))
    chi = chi_exponent(len(within), len(alpha), len(beta))
    free = alpha - beta
    value = Fraction(0)
    for r in range(len(free) + 1):
        term = Fraction(0)
        for gamma in free.subsets(r):
            term += table[alpha - gamma] * table[(beta | gamma).with_index(k)]
        value += term if (chi + r) % 2 == 0 else -term
    value /= pivot
    return Crit1Instance(k=k, alpha=alpha, beta=beta, chi=chi, value=value,
                         satisfied=value >= 0, within=within)


@dataclass(frozen=True)
class PivotTestResult:
    k: int
    applicable: bool
    passed: bool
    instances: tuple = ()
    first_violation: object = None

    def __bool__(self):
        return self.passed


def theorem1_test(m, k, table=None, within=None):
    """ Evaluate every crit1 inequality at pivot k; a zero pivot makes the test inapplicable """
    table = minor_table(m) if table is None else table
    if m.pivot(k) == 0:
        return PivotTestResult(k=k, applicable=False, passed=False)
    instances = tuple(crit1_value(m, k, alpha, beta, table, within)
                      for alpha, beta in enumerate_alpha_beta(m.n, k, within))
    violation = next((i for i in instances if not i.satisfied), None)
    return PivotTestResult(k=k, applicable=True, passed=violation is None,
                          instances=instances, first_violation=violation)


def base_dstable(m):
    """ Exact D-stability of a 1x1 or 2x2 matrix """
    if m.n == 1:
        return m[0, 0] < 0
    if m.n != 2:
        raise DimensionError('base case needs n <= 2, got %d' % m.n)
    return bool(hurwitz_stable(m)) and m[0, 0] <= 0 and m[1, 1] <= 0 and det(m) > 0


def shift_nonsingular(m):
    """ det(B + iD) and det(B - iD) vanish for no positive diagonal D (2x2 only)

    det(B + iD) = det B - d1 d2 + i (b11 d2 + b22 d1), so a positive root needs
    det B > 0 together with b11 b22 < 0 or b11 = b22 = 0.
    """
    if m.n != 2:
        raise DimensionError('imaginary shift rule needs n = 2, got %d' % m.n)
    b11, b22 = m[0, 0], m[1, 1]
    if det(m) <= 0 or b11 * b22 > 0:
        return True
    return (b11 == 0) != (b22 == 0)


def _admit_base(m):
    if base_dstable(m):
        return BASE_RULE
    if shift_nonsingular(m):
        return SHIFT_RULE
    return None


@dataclass(frozen=True)
class Certificate:
    """ Verdict with the evidence needed to re-check it from the matrix alone """
    kind: str
    dimension: int
    pivot_chain: tuple = ()
    instances: tuple = ()
    counterexample_D: object = None
    abscissa: object = None
    stability_evidence: tuple = ()
    base_rule: object = None
    assumed_level: object = None
    witness: object = None
    alternatives: tuple = ()

    @property
    def dstable(self):
        return self.kind == DSTABLE

    def to_dict(self):
        return {
            'kind': self.kind,
            'dimension': self.dimension,
            'pivot_chain': list(self.pivot_chain),
            'instances': [i.to_dict() for i in self.instances],
            'counterexample_D': None if self.counterexample_D is None
            else [format_rational(d) for d in self.counterexample_D],
            'abscissa': self.abscissa,
            'stability_evidence': [format_rational(v) for v in self.stability_evidence],
            'base_rule': self.base_rule,
            'assumed_level': self.assumed_level,
            'witness': self.witness,
            'alternatives': [list(chain) for chain in self.alternatives],
        }

    @classmethod
    def from_dict(cls, data):
        kind = data.get('kind')
        if kind not in KINDS:
            raise ReplayError('unknown certificate kind %r' % (kind,))
        n = int(data['dimension'])
        d = data.get('counterexample_D')
        return cls(kind=kind, dimension=n,
                   pivot_chain=tuple(int(k) for k in data.get('pivot_chain', [])),
                   instances=tuple(Crit1Instance.from_dict(i, n) for i in data.get('instances', [])),
                   counterexample_D=None if d is None else tuple(to_rational(x) for x in d),
                   abscissa=data.get('abscissa'),
                   stability_evidence=tuple(to_rational(v) for v in data.get('stability_evidence', [])),
                   base_rule=data.get('base_rule'),
                   assumed_level=data.get('assumed_level'),
                   witness=data.get('witness'),
                   alternatives=tuple(tuple(int(k) for k in c) for c in data.get('alternatives', [])))


@dataclass(frozen=True)
class _Branch:
    chain: tuple
    instances: tuple
    base_rule: str


@dataclass
class _ChainSearch:
    """ Depth-first search over pivot chains, memoized on the remaining index set """
    m: Matrix
    table: object
    assume_level: object
    exhaustive: bool
    memo: dict = field(default_factory=dict)

    def descend(self, within):
        if within.bits not in self.memo:
            self.memo[within.bits] = self._descend(within)
        return self.memo[within.bits]

    def _descend(self, within):
        size = len(within)
        if self.assume_level is not None and size == self.assume_level:
            return [_Branch((), (), ASSUMED_RULE)], ()
        if size == 2:
            rule = _admit_base(self.m.principal(within))
            return ([_Branch((), (), rule)] if rule else []), ()
        if size < self.m.n and not hurwitz_stable_from_minors(self.table, within):
            logger.debug('submatrix on %s is not stable' % within)
            return [], ()
        branches, violations = [], []
        for k in sorted(within, reverse=True):
            result = theorem1_test(self.m, k, self.table, within)
            if not result.applicable:
                continue
            if not result.passed:
                violations.append(result.first_violation)
                continue
            below, deeper = self.descend(within.without(k))
            if not below:
                violations.extend(deeper[:1])
                continue
            branches.extend(_Branch((k,) + b.chain, result.instances + b.instances, b.base_rule)
                            for b in below)
            if not self.exhaustive:
                break
        return branches, tuple(violations)


def _follow_chain(m, table, chain, assume_level):
    """ Walk an explicit pivot chain; returns (branch, violations) """
    within = IndexSet.full(m.n)
    instances = ()
    for k in chain:
        if k not in within:
            raise PreconditionError('pivot %d is not available in %s' % (k, within))
        if len(within) < m.n and not hurwitz_stable_from_minors(table, within):
            return None, ()
        result = theorem1_test(m, k, table, within)
        if not result.applicable:
            logger.info('pivot %d has a zero diagonal entry' % k)
            return None, ()
        if not result.passed:
            return None, (result.first_violation,)
        instances += result.instances
        within = within.without(k)
    rule = ASSUMED_RULE if assume_level is not None else _admit_base(m.principal(within))
    if rule is None:
        return None, ()
    return _Branch(tuple(chain), instances, rule), ()


def certify(m, chain=None, policy='default', assume_level=None, table=None):
    """ Run the D-stability pipeline and return a Certificate

    chain fixes the pivots level by level; otherwise pivots are tried from the
    highest index down and the first chain that passes is reported. With
    policy 'all-chains' every passing chain is collected in `alternatives`.
    assume_level L treats principal submatrices of dimension L as D-stable.
    """
    if policy not in POLICIES:
        raise ValueError('unknown policy %r' % policy)
    if chain is not None and policy == 'all-chains':
        raise PreconditionError('an explicit pivot chain cannot be combined with the all-chains policy')
    table = minor_table(m) if table is None else table
    n = m.n
    if assume_level is not None and not 2 <= assume_level < n:
        raise PreconditionError('assumed level must lie in 2..%d, got %d' % (n - 1, assume_level))
    stability = hurwitz_stable(m)
    evidence = stability.determinants
    if not stability:
        return Certificate(NOT_STABLE, n, stability_evidence=evidence,
                           witness='boundary' if stability.boundary else None)
    necessary = necessary_dstability(m, table)
    if not necessary:
        report = necessary.report
        witness = (str(report.p0_witness) if report.p0_witness is not None
                   else 'order %d' % report.failing_order)
        return Certificate(NECESSARY_FAILED, n, stability_evidence=evidence, witness=witness)
    if n <= 2:
        if chain:
            raise PreconditionError('no pivot chain applies to a %dx%d matrix' % (n, n))
        if base_dstable(m):
            return Certificate(DSTABLE, n, stability_evidence=evidence, base_rule=BASE_RULE)
        return Certificate(INCONCLUSIVE, n, stability_evidence=evidence)

    stop = 2 if assume_level is None else assume_level

    if chain is not None:
        chain = tuple(chain)
        if len(chain) != n - stop or len(set(chain)) != len(chain):
            raise PreconditionError('pivot chain must list %d distinct indices, got %s' % (n - stop, chain))
        branch, violations = _follow_chain(m, table, chain, assume_level)
        branches = [branch] if branch else []
    else:
        if policy == 'all-chains' and n > ALL_CHAINS_MAX_DIMENSION:
            raise DimensionError('all-chains search is limited to n <= %d' % ALL_CHAINS_MAX_DIMENSION)
        search = _ChainSearch(m, table, assume_level, exhaustive=policy == 'all-chains')
        branches, violations = search.descend(IndexSet.full(n))

    if not branches:
        logger.info('no pivot chain certifies the matrix')
        return Certificate(INCONCLUSIVE, n, instances=tuple(v for v in violations if v),
                           stability_evidence=evidence, assumed_level=assume_level)
    first = branches[0]
    logger.info('certified with pivot chain %s' % (first.chain,))
    return Certificate(DSTABLE, n, pivot_chain=first.chain, instances=first.instances,
                       stability_evidence=evidence, base_rule=first.base_rule,
                       assumed_level=assume_level,
                       alternatives=tuple(b.chain for b in branches[1:]))


def replay(m, certificate, table=None):
    """ Re-derive a certificate from the raw matrix; True or ReplayError """
    table = minor_table(m) if table is None else table
    cert = certificate
    if cert.dimension != m.n:
        raise ReplayError('certificate is for n=%d, matrix has n=%d' % (cert.dimension, m.n))
    stability = hurwitz_stable(m)
    if cert.stability_evidence and tuple(cert.stability_evidence) != stability.determinants:
        raise ReplayError('Hurwitz determinants differ')

    if cert.kind == NOT_STABLE:
        if stability:
            raise ReplayError('matrix is Hurwitz stable')
        return True
    if cert.kind == NECESSARY_FAILED:
        if necessary_dstability(m, table):
            raise ReplayError('-A is a P0+ matrix')
        return True
    if cert.kind == COUNTEREXAMPLE:
        if cert.counterexample_D is None or any(d <= 0 for d in cert.counterexample_D):
            raise ReplayError('counterexample needs a positive diagonal')
        if hurwitz_stable(m.scaled(cert.counterexample_D)):
            raise ReplayError('DA is Hurwitz stable for the stored D')
        return True

    for stored in cert.instances:
        try:
            fresh = crit1_value(m, stored.k, stored.alpha, stored.beta, table, stored.within)
        except (ValueError, ArithmeticError) as e:
            raise ReplayError('instance %s cannot be evaluated: %s' % (stored, e))
        if fresh.value != stored.value or fresh.chi != stored.chi or fresh.satisfied != stored.satisfied:
            raise ReplayError('instance %s recomputes to %s' % (stored, fresh.value))
    if cert.kind == INCONCLUSIVE:
        if any(i.satisfied for i in cert.instances):
            raise ReplayError('inconclusive certificate lists a satisfied instance')
        return True

    if not stability or not necessary_dstability(m, table):
        raise ReplayError('matrix fails a necessary condition')
    within = IndexSet.full(m.n)
    stored = {(i.within, i.k, i.alpha, i.beta): i for i in cert.instances}
    for k in cert.pivot_chain:
        if k not in within:
            raise ReplayError('pivot %d is not available in %s' % (k, within))
        if len(within) < m.n and not hurwitz_stable_from_minors(table, within):
            raise ReplayError('submatrix on %s is not stable' % within)
        for alpha, beta in enumerate_alpha_beta(m.n, k, within):
            instance = stored.get((within, k, alpha, beta))
            if instance is None or not instance.satisfied:
                raise ReplayError('missing or violated instance k=%d alpha=%s beta=%s' % (k, alpha, beta))
        within = within.without(k)
    bottom = m.principal(within)
    if cert.base_rule == ASSUMED_RULE:
        if len(within) != cert.assumed_level:
            raise ReplayError('chain stops at %d, assumed level is %s' % (len(within), cert.assumed_level))
    elif cert.base_rule == BASE_RULE:
        if len(within) > 2 or not base_dstable(bottom):
            raise ReplayError('base case on %s fails' % within)
    elif cert.base_rule == SHIFT_RULE:
        if len(within) != 2 or not shift_nonsingular(bottom):
            raise ReplayError('imaginary shift rule on %s fails' % within)
    else:
        raise ReplayError('unknown base rule %r' % (cert.base_rule,))
    return True


@dataclass(frozen=True)
class ThreeByThreeResult:
    values: tuple
    holds: bool

    def __bool__(self):
        return self.holds


def proposition1_n3(m, table=None):
    """ The three 3x3 inequalities; at least one nonnegative certifies D-stability """
    if m.n != 3:
        raise DimensionError('needs a 3x3 matrix, got %dx%d' % (m.n, m.n))
    table = minor_table(m) if table is None else table
    if not classify_p(m.negated(), table.negated()).is_P or not hurwitz_stable(m):
        raise PreconditionError('needs a stable matrix whose negation is a P-matrix')

    def minor(*indices):
        return table[IndexSet.of(3, indices)]

    a11, a22, a33 = m[0, 0], m[1, 1], m[2, 2]
    d = table.determinant
    values = (
        -minor(1, 2) + a11 / a33 * minor(2, 3) + a22 / a33 * minor(1, 3) - d / a33,
        -minor(1, 3) + a11 / a22 * minor(2, 3) + a33 / a22 * minor(1, 2) - d / a22,
        -minor(2, 3) + a22 / a11 * minor(1, 3) + a33 / a11 * minor(1, 2) - d / a11,
    )
    return ThreeByThreeResult(values, any(v >= 0 for v in values))


@dataclass(frozen=True)
class ReducedForms:
    """ k = 4 specialization for 4x4 matrices

    two[(i, j)] >= 0 is the pair inequality and equals the crit1 value of
    ({i, j}, {}). one[i] is the triple inequality, equal to a44 times the
    crit1 value of ({1, 2, 3}, {i}); for a44 < 0 it must be <= 0.
    """
    two: dict
    one: dict
    a44: Fraction

    @property
    def satisfied(self):
        return (all(v >= 0 for v in self.two.values())
                and all(v / self.a44 >= 0 for v in self.one.values()))


def reduced_n4_forms(m, table=None):
    if m.n != 4:
        raise DimensionError('needs a 4x4 matrix, got %dx%d' % (m.n, m.n))
    table = minor_table(m) if table is None else table
    a44 = m.pivot(4)
    if a44 == 0:
        raise ZeroPivotError('a_44 is zero')

    def minor(*indices):
        return table[IndexSet.of(4, indices)]

    two = {}
    for i, j in ((1, 2), (1, 3), (2, 3)):
        two[(i, j)] = (m.pivot(i) / a44 * minor(j, 4) + m.pivot(j) / a44 * minor(i, 4)
                       - minor(i, j) - minor(i, j, 4) / a44)
    one = {}
    for i in (1, 2, 3):
        j, k = (x for x in (1, 2, 3) if x != i)
        one[i] = (-minor(1, 2, 3) * minor(i, 4) + minor(j, i) * minor(k, i, 4)
                  + minor(k, i) * minor(j, i, 4) - m.pivot(i) * table.determinant)
    return ReducedForms(two, one, a44)
