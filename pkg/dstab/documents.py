"""
Matrix documents (JSON and CSV), the restricted parameter expressions used by
matrix templates and sweeps, and the versioned report document.
"""

import ast
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from dstab.dstability import Certificate
from dstab.helpers import dumps, extension, read_source, sha256_digest
from dstab.linalg import MAX_DIMENSION, DimensionError, Matrix, format_rational, to_rational
from dstab.version import __version__

REPORT_SCHEMA = 'dstab-report/1'
FORMATS = ('json', 'csv')

_MINUS_SIGNS = ('−', '–')

# entries must stay finite when the oracle converts them to floats
FLOAT_LIMIT = Fraction(sys.float_info.max)


class MatrixFormatError(ValueError):
    """ Matrix or report document is malformed """


class UnboundParameterError(MatrixFormatError):
    """ A placeholder has no value """


def _normalize(text):
    text = text.strip()
    for minus in _MINUS_SIGNS:
        text = text.replace(minus, '-')
    return text


def _has_names(node):
    return any(isinstance(child, ast.Name) for child in ast.walk(node))


def _exact_constants(tree, text):
    """ Replace numeric literals by the Fraction of their source text """
    for node in ast.walk(tree):
        if not isinstance(node, ast.Constant) or isinstance(node.value, bool):
            continue
        if not isinstance(node.value, (int, float)):
            continue
        segment = ast.get_source_segment(text, node)
        try:
            node.value = Fraction(segment.replace('_', ''))
        except (TypeError, ValueError):
            # hexadecimal and friends: the parsed int is exact already
            if isinstance(node.value, float):
                raise MatrixFormatError('cannot read constant %r' % segment)
            node.value = Fraction(node.value)


def _finite(value, where):
    if abs(value) > FLOAT_LIMIT:
        raise MatrixFormatError('%s is outside the floating point range' % where)
    return value


def _check(node, names):
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, Fraction):
            raise MatrixFormatError('unsupported constant %r' % (node.value,))
    elif isinstance(node, ast.Name):
        names.add(node.id)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check(node.operand, names)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
        _check(node.left, names)
        _check(node.right, names)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        # only constant / constant, i.e. rational literals
        if _has_names(node):
            raise MatrixFormatError('division is only allowed between constants')
        _check(node.left, names)
        _check(node.right, names)
    else:
        raise MatrixFormatError('unsupported syntax %s' % type(node).__name__)


def _evaluate(node, bindings):
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        if node.id not in bindings:
            raise UnboundParameterError('parameter %s is not bound' % node.id)
        try:
            return to_rational(bindings[node.id])
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise MatrixFormatError('cannot read value of %s: %s' % (node.id, e))
    if isinstance(node, ast.UnaryOp):
        value = _evaluate(node.operand, bindings)
        return -value if isinstance(node.op, ast.USub) else value
    left, right = _evaluate(node.left, bindings), _evaluate(node.right, bindings)
    if isinstance(node.op, ast.Add):
        return left + right
    if isinstance(node.op, ast.Sub):
        return left - right
    if isinstance(node.op, ast.Mult):
        return left * right
    if right == 0:
        raise MatrixFormatError('division by zero')
    return left / right


@dataclass(frozen=True)
class Expression:
    """ +, -, * over parameters and rational constants ('2*q', '-q-1', '1/3') """
    text: str
    names: frozenset = field(init=False, compare=False)
    tree: object = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        text = _normalize(str(self.text))
        try:
            tree = ast.parse(text, mode='eval').body
        except SyntaxError:
            raise MatrixFormatError('cannot parse %r' % text)
        _exact_constants(tree, text)
        names = set()
        _check(tree, names)
        object.__setattr__(self, 'text', text)
        object.__setattr__(self, 'names', frozenset(names))
        object.__setattr__(self, 'tree', tree)

    @property
    def is_constant(self):
        return not self.names

    def evaluate(self, bindings=None):
        return _evaluate(self.tree, bindings or {})

    def __str__(self):
        return self.text


def _canonical_entry(value):
    """ Canonical text of a matrix cell: 'p/q' for constants, normalized text otherwise """
    if isinstance(value, bool) or value is None:
        raise MatrixFormatError('unparseable scalar %r' % (value,))
    if isinstance(value, (int, float, Fraction)):
        try:
            value = to_rational(value)
        except (ValueError, TypeError) as e:
            raise MatrixFormatError('unparseable scalar %r: %s' % (value, e))
        return format_rational(_finite(value, 'entry %s' % value))
    if not isinstance(value, str):
        raise MatrixFormatError('unparseable scalar %r' % (value,))
    expr = Expression(value)
    if not expr.is_constant:
        return expr.text
    return format_rational(_finite(expr.evaluate(), 'entry %r' % value))


@dataclass(frozen=True)
class MatrixDocument:
    """ Square matrix of rational constants and parameter placeholders

    parameters maps each placeholder to its (row, col) occurrences, 1-based;
    defaults holds optional values used when a placeholder is not bound.
    """
    entries: tuple
    parameters: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.entries)

    @property
    def names(self):
        return tuple(sorted(self.parameters))

    @property
    def is_concrete(self):
        return not self.parameters

    @classmethod
    def from_rows(cls, rows, declared=None, defaults=None):
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise MatrixFormatError('entries must be a non-empty list of rows')
        if len({len(r) for r in rows}) != 1:
            raise MatrixFormatError('ragged rows: lengths %s' % [len(r) for r in rows])
        if len(rows[0]) != len(rows):
            raise MatrixFormatError('matrix is not square: %d rows of %d' % (len(rows), len(rows[0])))
        if len(rows) > MAX_DIMENSION:
            raise DimensionError('dimension %d exceeds the cap of %d' % (len(rows), MAX_DIMENSION))
        entries = tuple(tuple(_canonical_entry(x) for x in row) for row in rows)
        occurrences = {}
        for i, row in enumerate(entries, 1):
            for j, text in enumerate(row, 1):
                for name in sorted(Expression(text).names):
                    occurrences.setdefault(name, []).append((i, j))
        parameters = {name: tuple(pos) for name, pos in sorted(occurrences.items())}

        defaults = dict(defaults or {})
        if declared is not None:
            if not isinstance(declared, dict):
                raise MatrixFormatError('parameters must be an object')
            for name in parameters:
                if name not in declared:
                    raise MatrixFormatError('unknown placeholder %s' % name)
            for name, value in declared.items():
                if name not in parameters:
                    raise MatrixFormatError('parameter %s does not appear in the entries' % name)
                if isinstance(value, list):
                    if tuple(tuple(p) for p in value) != parameters[name]:
                        raise MatrixFormatError('occurrences of %s do not match the entries' % name)
                elif value is not None:
                    # a scalar declaration doubles as the default value
                    defaults.setdefault(name, value)
        values = {}
        for name, value in defaults.items():
            if name not in parameters:
                raise MatrixFormatError('default for unknown placeholder %s' % name)
            try:
                values[name] = to_rational(value)
            except (ValueError, TypeError, ZeroDivisionError):
                raise MatrixFormatError('unparseable default %r for %s' % (value, name))
        return cls(entries, parameters, dict(sorted(values.items())))

    def expressions(self):
        return tuple(tuple(Expression(text) for text in row) for row in self.entries)

    def bind(self, bindings=None):
        """ Concrete Matrix with placeholders replaced by `bindings` (falling back to defaults) """
        values = dict(self.defaults)
        values.update(bindings or {})
        missing = [name for name in self.names if name not in values]
        if missing:
            raise UnboundParameterError('unbound parameter(s): %s' % ', '.join(missing))
        rows = tuple(tuple(_finite(e.evaluate(values), 'entry %s' % e) for e in row)
                     for row in self.expressions())
        return Matrix(rows)

    def to_dict(self):
        data = {'n': self.n, 'entries': [list(row) for row in self.entries]}
        if self.parameters:
            data['parameters'] = {name: [list(p) for p in pos] for name, pos in self.parameters.items()}
        if self.defaults:
            data['defaults'] = {name: format_rational(v) for name, v in self.defaults.items()}
        return data


def _from_json(text):
    try:
        data = json.loads(text, parse_float=Fraction)
    except ValueError as e:
        raise MatrixFormatError('invalid JSON: %s' % e)
    if isinstance(data, list):
        data = {'entries': data}
    if not isinstance(data, dict) or 'entries' not in data:
        raise MatrixFormatError('JSON matrix needs an "entries" array')
    doc = MatrixDocument.from_rows(data['entries'], data.get('parameters'), data.get('defaults'))
    if 'n' in data and data['n'] != doc.n:
        raise MatrixFormatError('"n" is %s but there are %d rows' % (data['n'], doc.n))
    return doc


def _from_csv(text):
    rows = []
    for row in csv.reader(io.StringIO(text)):
        cells = [cell.strip() for cell in row]
        if not any(cells) or cells[0].startswith('#'):
            continue
        rows.append(cells)
    return MatrixDocument.from_rows(rows)


def parse_matrix(source, fmt=None):
    """ Read a matrix document from a path or a stream (json or csv) """
    text = read_source(source)
    if fmt is None:
        ext = extension(source if isinstance(source, str) else getattr(source, 'name', ''))
        fmt = ext if ext in FORMATS else ('json' if text.lstrip().startswith(('{', '[')) else 'csv')
    if fmt not in FORMATS:
        raise MatrixFormatError('unknown format %r' % fmt)
    return _from_json(text) if fmt == 'json' else _from_csv(text)


def serialize(doc, fmt='json'):
    """ Text of a matrix document; parse_matrix(serialize(doc)) == doc """
    if fmt == 'json':
        return dumps(doc.to_dict())
    if fmt == 'csv':
        if doc.defaults:
            raise MatrixFormatError('CSV cannot carry parameter defaults')
        return ''.join(','.join(row) + '\n' for row in doc.entries)
    raise MatrixFormatError('unknown format %r' % fmt)


def matrix_entries(m):
    return [[format_rational(x) for x in row] for row in m.entries]


def matrix_digest(m):
    """ Digest of the canonical JSON of a concrete matrix """
    return sha256_digest(dumps({'n': m.n, 'entries': matrix_entries(m)}))


@dataclass
class ReportDocument:
    """ What a check or oracle run emits; replayable from its own input section """
    command: str
    matrix: Matrix
    certificate: object = None
    oracle: object = None
    timing: object = None
    version: str = __version__

    @property
    def digest(self):
        return matrix_digest(self.matrix)

    def to_dict(self):
        data = {
            'schema': REPORT_SCHEMA,
            'tool': 'dstab',
            'version': self.version,
            'command': self.command,
            'input': {'n': self.matrix.n, 'entries': matrix_entries(self.matrix), 'digest': self.digest},
            'certificate': None if self.certificate is None else self.certificate.to_dict(),
            'oracle': self.oracle,
        }
        if self.timing is not None:
            data['timing'] = self.timing
        return data

    def dumps(self):
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or data.get('schema') != REPORT_SCHEMA:
            raise MatrixFormatError('not a %s document' % REPORT_SCHEMA)
        try:
            section = data['input']
            matrix = Matrix(tuple(tuple(row) for row in section['entries']))
        except (KeyError, TypeError, ValueError) as e:
            raise MatrixFormatError('report input section is invalid: %s' % e)
        if section.get('digest') != matrix_digest(matrix):
            raise MatrixFormatError('report input digest does not match its entries')
        certificate = data.get('certificate')
        try:
            certificate = None if certificate is None else Certificate.from_dict(certificate)
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise MatrixFormatError('report certificate is invalid: %s' % e)
        return cls(command=data.get('command', 'check'), matrix=matrix, certificate=certificate,
                   oracle=data.get('oracle'), timing=data.get('timing'),
                   version=data.get('version', __version__))


def load_report(source):
    """ Report document from a path or a stream """
    try:
        data = json.loads(read_source(source))
    except ValueError as e:
        raise MatrixFormatError('invalid report JSON: %s' % e)
    return ReportDocument.from_dict(data)
