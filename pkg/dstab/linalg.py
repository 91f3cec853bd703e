"""
Exact rational linear algebra: determinants, principal minors, Schur
complements and complex determinants with rational real and imaginary parts.

Indices exposed by this module (IndexSet members, pivots) are 1-based to
match the usual minor notation A(i1 ... ik; i1 ... ik). Matrix item access
``m[i, j]`` is 0-based like numpy.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

MAX_DIMENSION = 16

_MINUS_SIGNS = ('−', '–')


class DimensionError(ValueError):
    """ Matrix dimension is outside what an operation supports """


class ZeroPivotError(ArithmeticError):
    """ A required pivot entry (or leading block) is zero """


class IndexSetError(IndexError):
    """ Index outside of [n] """


def to_rational(value):
    """ Convert an int, Fraction, float, decimal string or 'p/q' string to a Fraction """
    if isinstance(value, bool):
        raise TypeError('booleans are not matrix entries')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError('non-finite entry %r' % value)
        # decimal text of the float, not its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        for minus in _MINUS_SIGNS:
            text = text.replace(minus, '-')
        return Fraction(text)
    raise TypeError('cannot convert %r to a rational' % (value,))


def format_rational(value):
    """ Canonical text form: '7', '-1/4' """
    return str(to_rational(value))


@dataclass(frozen=True)
class IndexSet:
    """ Sorted subset of [n] stored as a bitmask (bit i-1 holds index i) """
    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0 or self.bits < 0 or self.bits >> self.n:
            raise IndexSetError('index set %s is not contained in [%d]' % (bin(self.bits), self.n))

    @classmethod
    def of(cls, n, indices=()):
        bits = 0
        for i in indices:
            if not 1 <= i <= n:
                raise IndexSetError('index %d out of range 1..%d' % (i, n))
            bits |= 1 << (i - 1)
        return cls(bits, n)

    @classmethod
    def full(cls, n):
        return cls((1 << n) - 1, n)

    @classmethod
    def empty(cls, n):
        return cls(0, n)

    def __iter__(self):
        bits, i = self.bits, 1
        while bits:
            if bits & 1:
                yield i
            bits >>= 1
            i += 1

    def __len__(self):
        return bin(self.bits).count('1')

    def __contains__(self, i):
        return 1 <= i <= self.n and bool(self.bits >> (i - 1) & 1)

    def _same_ambient(self, other):
        if not isinstance(other, IndexSet):
            raise TypeError('expected an IndexSet, got %r' % (other,))
        if other.n != self.n:
            raise IndexSetError('index sets over [%d] and [%d] do not combine' % (self.n, other.n))
        return other

    def __or__(self, other):
        other = self._same_ambient(other)
        return IndexSet(self.bits | other.bits, self.n)

    def __and__(self, other):
        other = self._same_ambient(other)
        return IndexSet(self.bits & other.bits, self.n)

    def __sub__(self, other):
        other = self._same_ambient(other)
        return IndexSet(self.bits & ~other.bits, self.n)

    def __le__(self, other):
        other = self._same_ambient(other)
        return self.bits & ~other.bits == 0

    def with_index(self, k):
        return self | IndexSet.of(self.n, (k,))

    def without(self, k):
        return self - IndexSet.of(self.n, (k,))

    @property
    def indices(self):
        return tuple(self)

    def subsets(self, size):
        """ Subsets of the given size in lexicographic order """
        for chosen in combinations(self.indices, size):
            yield IndexSet.of(self.n, chosen)

    def sort_key(self):
        return (len(self), self.indices)

    def __str__(self):
        return '{%s}' % ','.join(str(i) for i in self)


@dataclass(frozen=True)
class Matrix:
    """ Dense square matrix with exact rational entries """
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.entries)
        n = len(rows)
        if n < 1:
            raise DimensionError('matrix must have at least one row')
        if n > MAX_DIMENSION:
            raise DimensionError('dimension %d exceeds the cap of %d' % (n, MAX_DIMENSION))
        if any(len(row) != n for row in rows):
            raise DimensionError('matrix must be square')
        object.__setattr__(self, 'entries', rows)

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, n):
        return cls(tuple((0,) * n for _ in range(n)))

    @classmethod
    def diagonal(cls, values):
        values = list(values)
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n(self):
        return len(self.entries)

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def pivot(self, k):
        """ Diagonal entry a_kk (1-based) """
        if not 1 <= k <= self.n:
            raise IndexSetError('pivot %d out of range 1..%d' % (k, self.n))
        return self.entries[k - 1][k - 1]

    def principal(self, index_set):
        """ Principal submatrix on the rows and columns of index_set """
        if index_set.n != self.n:
            raise IndexSetError('index set over [%d] used with a %dx%d matrix' % (index_set.n, self.n, self.n))
        idx = [i - 1 for i in index_set]
        return Matrix(tuple(tuple(self.entries[i][j] for j in idx) for i in idx))

    def swapped(self, k, l):
        """ P^T M P for the permutation exchanging indices k and l """
        order = list(range(self.n))
        order[k - 1], order[l - 1] = order[l - 1], order[k - 1]
        return Matrix(tuple(tuple(self.entries[i][j] for j in order) for i in order))

    def scaled(self, d):
        """ diag(d) * M """
        d = [to_rational(x) for x in d]
        if len(d) != self.n:
            raise DimensionError('diagonal has %d entries, matrix is %dx%d' % (len(d), self.n, self.n))
        return Matrix(tuple(tuple(d[i] * x for x in row) for i, row in enumerate(self.entries)))

    def negated(self):
        return Matrix(tuple(tuple(-x for x in row) for row in self.entries))

    def transpose(self):
        return Matrix(tuple(zip(*self.entries)))

    def as_float(self):
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def __str__(self):
        return '\n'.join(' '.join(str(x) for x in row) for row in self.entries)


def _integer_rows(rows):
    """ Scale each row by the lcm of its denominators; return integer rows and the scales """
    scales = [math.lcm(*(x.denominator for x in row)) for row in rows]
    ints = [[x.numerator * (s // x.denominator) for x in row] for row, s in zip(rows, scales)]
    return ints, scales


def _bareiss(a):
    """ Fraction-free elimination of an integer matrix, in place; returns its determinant """
    n = len(a)
    if n == 0:
        return 1
    sign, previous = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot, row_k = a[k][k], a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            factor = row_i[k]
            for j in range(k + 1, n):
                # exact: every intermediate is a minor of the input
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // previous
        previous = pivot
    return sign * a[n - 1][n - 1]


def _rational_det(rows):
    ints, scales = _integer_rows(rows)
    return Fraction(_bareiss(ints), math.prod(scales))


def det(m):
    """ Exact determinant """
    return _rational_det(m.entries)


def principal_minor(m, alpha):
    """ A(alpha; alpha); the empty minor is 1 """
    if alpha.n != m.n:
        raise IndexSetError('index set over [%d] used with a %dx%d matrix' % (alpha.n, m.n, m.n))
    idx = [i - 1 for i in alpha]
    return _rational_det([[m.entries[i][j] for j in idx] for i in idx])


@dataclass(frozen=True)
class MinorTable:
    """ All 2^n principal minors of a matrix, indexed by IndexSet bitmask """
    n: int
    values: tuple

    def __getitem__(self, key):
        if isinstance(key, IndexSet):
            if key.n != self.n:
                raise IndexSetError('index set over [%d] used with a table over [%d]' % (key.n, self.n))
            key = key.bits
        return self.values[key]

    def __len__(self):
        return len(self.values)

    @property
    def determinant(self):
        return self.values[-1]

    def items(self):
        for bits, value in enumerate(self.values):
            yield IndexSet(bits, self.n), value

    def order_sum(self, k, within=None):
        """ Sum of all order-k principal minors with indices inside `within` """
        within = IndexSet.full(self.n) if within is None else within
        return sum((self[alpha] for alpha in within.subsets(k)), Fraction(0))

    def negated(self):
        """ Minors of -A: A(alpha) times (-1)^N(alpha) """
        return MinorTable(self.n, tuple(
            -v if bin(bits).count('1') % 2 else v for bits, v in enumerate(self.values)))


def minor_table(m):
    """ Compute every principal minor of m """
    n = m.n
    if n > MAX_DIMENSION:
        raise DimensionError('minor table for n=%d exceeds the cap of %d' % (n, MAX_DIMENSION))
    ints, scales = _integer_rows(m.entries)
    values = [Fraction(1)] * (1 << n)
    for bits in range(1, 1 << n):
        idx = [i for i in range(n) if bits >> i & 1]
        sub = [[ints[i][j] for j in idx] for i in idx]
        values[bits] = Fraction(_bareiss(sub), math.prod(scales[i] for i in idx))
    return MinorTable(n, tuple(values))


def schur_complement(m, k):
    """ Schur complement of the pivot a_kk: b_ij = a_ij - a_ik a_kj / a_kk

    Rows and columns keep their original order with k removed, which is the
    result of moving k to the last position, taking the trailing Schur
    complement and moving the remaining indices back.
    """
    n = m.n
    pivot = m.pivot(k)
    if n == 1:
        raise DimensionError('the Schur complement of a 1x1 matrix is empty')
    if pivot == 0:
        raise ZeroPivotError('a_%d%d is zero' % (k, k))
    keep = [i for i in range(n) if i != k - 1]
    column = [m[i, k - 1] for i in keep]
    row = [m[k - 1, j] for j in keep]
    return Matrix(tuple(
        tuple(m[i, j] - column[a] * row[b] / pivot for b, j in enumerate(keep))
        for a, i in enumerate(keep)))


def solve(m, b):
    """ Solve m x = b exactly by Gauss-Jordan elimination """
    n = m.n
    b = [to_rational(x) for x in b]
    if len(b) != n:
        raise DimensionError('right-hand side has %d entries, expected %d' % (len(b), n))
    a = [list(row) + [b[i]] for i, row in enumerate(m.entries)]
    for k in range(n):
        swap = next((i for i in range(k, n) if a[i][k] != 0), None)
        if swap is None:
            raise ZeroPivotError('matrix is singular')
        a[k], a[swap] = a[swap], a[k]
        pivot = a[k][k]
        a[k] = [x / pivot for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                factor = a[i][k]
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return [row[n] for row in a]


def bordered_det(m, branch):
    """ Determinant through the bordered-matrix expansion

    leading: det(A|n) (a_nn - a_n1 (A|n)^-1 a_1n), needs det(A|n) != 0
    corner:  a_nn det(A|n - a_1n a_n1 / a_nn), needs a_nn != 0
    """
    n = m.n
    corner = m[n - 1, n - 1]
    if n == 1:
        return corner
    if branch == 'corner':
        return corner * det(schur_complement(m, n))
    if branch != 'leading':
        raise ValueError('unknown branch %r' % branch)
    leading = m.principal(IndexSet.full(n).without(n))
    leading_det = det(leading)
    if leading_det == 0:
        raise ZeroPivotError('leading block is singular')
    x = solve(leading, [m[i, n - 1] for i in range(n - 1)])
    return leading_det * (corner - sum(m[n - 1, j] * x[j] for j in range(n - 1)))


@dataclass(frozen=True)
class ComplexRational:
    """ Element of Q[i] """
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 're', to_rational(self.re))
        object.__setattr__(self, 'im', to_rational(self.im))

    @staticmethod
    def _coerce(other):
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ComplexRational(other, 0)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ComplexRational(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError('division by zero in Q[i]')
        return ComplexRational((self.re * other.re + self.im * other.im) / norm,
                               (self.im * other.re - self.re * other.im) / norm)

    def conjugate(self):
        return ComplexRational(self.re, -self.im)

    def times_i(self):
        return ComplexRational(-self.im, self.re)

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im < 0:
            return '%s-%si' % (self.re, -self.im)
        return '%s+%si' % (self.re, self.im)


def complex_det(m, d, sign=1):
    """ Exact det(M + sign * i * diag(d)) """
    if sign not in (1, -1):
        raise ValueError('sign must be +1 or -1')
    d = [to_rational(x) for x in d]
    n = m.n
    if len(d) != n:
        raise DimensionError('diagonal has %d entries, matrix is %dx%d' % (len(d), n, n))
    a = [[ComplexRational(m[i, j], sign * d[i] if i == j else 0) for j in range(n)] for i in range(n)]
    result = ComplexRational(1, 0)
    for k in range(n):
        swap = next((i for i in range(k, n) if a[i][k]), None)
        if swap is None:
            return ComplexRational(0, 0)
        if swap != k:
            a[k], a[swap] = a[swap], a[k]
            result = -result
        pivot = a[k][k]
        result = result * pivot
        for i in range(k + 1, n):
            if a[i][k]:
                factor = a[i][k] / pivot
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return result
