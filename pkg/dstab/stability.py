"""
Hurwitz stability decided exactly from Hurwitz determinants, P-matrix class
membership of -A (the classical necessary condition for D-stability) and the
floating-point spectral abscissa used by the oracle.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from dstab.linalg import IndexSet, Matrix, det, minor_table
from dstab.loggers import getLogger

logger = getLogger(__name__)


class EigenvalueError(RuntimeError):
    """ Eigenvalue iteration failed to converge """


@dataclass(frozen=True)
class CharPoly:
    """ Coefficients c_0..c_n of det(A - lambda I); c_k multiplies lambda^k """
    coefficients: tuple

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, x):
        value = Fraction(0)
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def monic(self):
        """ a_0..a_n of det(lambda I - A) = a_0 lambda^n + ... + a_n, a_0 = 1 """
        sign = -1 if self.degree % 2 else 1
        return tuple(sign * c for c in reversed(self.coefficients))


def char_poly(m):
    """ Characteristic polynomial by the Faddeev-LeVerrier recursion """
    n = m.n
    a = [list(row) for row in m.entries]
    monic = [Fraction(1)]
    current = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + b_{k-1} I ; b_k = -tr(A M_k) / k
        product = [[sum((a[i][l] * current[l][j] for l in range(n)), Fraction(0)) for j in range(n)]
                   for i in range(n)]
        for i in range(n):
            product[i][i] += monic[-1]
        current = product
        trace = sum((sum((a[i][l] * current[l][i] for l in range(n)), Fraction(0)) for i in range(n)),
                    Fraction(0))
        monic.append(-trace / k)
    sign = -1 if n % 2 else 1
    return CharPoly(tuple(sign * b for b in reversed(monic)))


def char_poly_from_minors(table, within=None):
    """ Characteristic polynomial of the principal submatrix on `within` from signed minor sums """
    within = IndexSet.full(table.n) if within is None else within
    size = len(within)
    coefficients = [Fraction(0)] * (size + 1)
    for k in range(size + 1):
        total = Fraction(1) if k == 0 else table.order_sum(k, within)
        coefficients[size - k] = total if (size - k) % 2 == 0 else -total
    return CharPoly(tuple(coefficients))


@dataclass(frozen=True)
class HurwitzReport:
    stable: bool
    boundary: bool
    determinants: tuple

    def __bool__(self):
        return self.stable


def hurwitz_determinants(poly):
    """ Leading principal minors of the Hurwitz matrix of the monic polynomial """
    a = poly.monic()
    n = poly.degree

    def coefficient(idx):
        return a[idx] if 0 <= idx <= n else Fraction(0)

    # 1-based h_ij = a_(2j - i)
    h = [[coefficient(2 * j - i + 1) for j in range(n)] for i in range(n)]
    return tuple(det(Matrix(tuple(tuple(row[:k]) for row in h[:k]))) for k in range(1, n + 1))


def decide_hurwitz(poly):
    dets = hurwitz_determinants(poly)
    return HurwitzReport(stable=all(d > 0 for d in dets),
                         boundary=any(d == 0 for d in dets),
                         determinants=dets)


def hurwitz_stable(m):
    """ True iff every eigenvalue of m has negative real part (exact) """
    return decide_hurwitz(char_poly(m))


def hurwitz_stable_from_minors(table, within=None):
    return decide_hurwitz(char_poly_from_minors(table, within))


@dataclass(frozen=True)
class PClassReport:
    """ P / P0 / P0+ membership with witnesses

    witness: first index set whose minor is not positive (present iff not P)
    p0_witness: first index set whose minor is negative (present iff not P0)
    failing_order: first order whose minor sum is not positive
    order_sums[k]: sum of the order-k principal minors, order_sums[0] = 1
    """
    is_P: bool
    is_P0: bool
    is_P0_plus: bool
    witness: object
    p0_witness: object
    failing_order: object
    order_sums: tuple


def classify_p(m, table=None, within=None):
    """ Classify m (or its principal submatrix on `within`) into the P-classes """
    table = minor_table(m) if table is None else table
    within = IndexSet.full(table.n) if within is None else within
    witness = p0_witness = None
    sums = [Fraction(1)]
    for k in range(1, len(within) + 1):
        total = Fraction(0)
        for alpha in within.subsets(k):
            value = table[alpha]
            total += value
            if value <= 0 and witness is None:
                witness = alpha
            if value < 0 and p0_witness is None:
                p0_witness = alpha
        sums.append(total)
    failing_order = next((k for k in range(1, len(sums)) if sums[k] <= 0), None)
    is_p0 = p0_witness is None
    return PClassReport(is_P=witness is None, is_P0=is_p0,
                        is_P0_plus=is_p0 and failing_order is None,
                        witness=witness, p0_witness=p0_witness,
                        failing_order=failing_order, order_sums=tuple(sums))


@dataclass(frozen=True)
class NecessaryReport:
    ok: bool
    report: PClassReport

    def __bool__(self):
        return self.ok


def necessary_dstability(m, table=None, within=None):
    """ -m must be a P0+ matrix for m to be D-stable; False is a definitive verdict """
    negated = m.negated()
    negated_table = minor_table(negated) if table is None else table.negated()
    report = classify_p(negated, negated_table, within)
    if not report.is_P0_plus:
        logger.debug({'message': 'necessary condition failed',
                      'witness': str(report.p0_witness), 'order': report.failing_order})
    return NecessaryReport(report.is_P0_plus, report)


def spectral_abscissa(m):
    """ Largest real part of the spectrum, in floating point """
    a = m.as_float() if isinstance(m, Matrix) else np.asarray(m, dtype=float)
    try:
        eigenvalues = np.linalg.eigvals(a)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenvalueError('eigenvalue iteration failed: %s' % e)
    return float(np.max(eigenvalues.real))


def spectral_abscissa_mp(m, dps=34):
    """ Spectral abscissa at `dps` decimal digits (quadruple precision by default) """
    with mpmath.workdps(dps):
        if isinstance(m, Matrix):
            rows = [[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in m.entries]
        else:
            rows = [[mpmath.mpf(float(x)) for x in row] for row in np.asarray(m, dtype=float)]
        try:
            eigenvalues = mpmath.eig(mpmath.matrix(rows), left=False, right=False)
        except (RuntimeError, ZeroDivisionError) as e:
            raise EigenvalueError('extended precision eigenvalues failed: %s' % e)
        return max(mpmath.re(e) for e in eigenvalues)
