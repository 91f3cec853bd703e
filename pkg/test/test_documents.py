import io
import json
import os
import unittest
from fractions import Fraction

from testfixtures import compare, TempDirectory

from dstab.documents import (REPORT_SCHEMA, Expression, MatrixDocument, MatrixFormatError, ReportDocument,
                             UnboundParameterError, load_report, matrix_digest, parse_matrix, serialize)
from dstab.dstability import certify
from dstab.helpers import dumps, extension, sha256_digest, write_text
from dstab.linalg import DimensionError, Matrix

testdir = os.path.dirname(__file__)

EXAMPLE1 = Matrix(((-6, -5, 1), (-1, -2, -5), (-5, 3, -1)))


class TestExpression(unittest.TestCase):
    """ Restricted parameter expressions """

    def test_evaluate(self):
        self.assertEqual(Expression('2*q').evaluate({'q': 3}), 6)
        self.assertEqual(Expression('−q-1').evaluate({'q': Fraction(1, 2)}), Fraction(-3, 2))
        self.assertEqual(Expression('1/3').evaluate(), Fraction(1, 3))
        self.assertEqual(Expression('p*q + 0.5').evaluate({'p': 2, 'q': 3}), Fraction(13, 2))
        compare(Expression('p*q - r').names, frozenset(['p', 'q', 'r']))
        self.assertTrue(Expression('-1/4').is_constant)

    def test_exact_decimals(self):
        """ Literals keep every digit, beyond what a float holds """
        self.assertEqual(Expression('0.30000000000000000001').evaluate(),
                         Fraction(30000000000000000001, 10 ** 20))
        self.assertEqual(Expression('-1.00000000000000000001').evaluate(), Fraction(-(10 ** 20 + 1), 10 ** 20))
        self.assertEqual(Expression('1e400').evaluate(), 10 ** 400)
        self.assertEqual(Expression('2.5e-30 * q').evaluate({'q': 4}), Fraction(1, 10 ** 29))
        self.assertEqual(Expression('1_000 + 0x10').evaluate(), 1016)

    def test_rejects(self):
        for text in ('q/2', 'q**2', 'abs(q)', 'abc(', '[1]', '"x"', 'True'):
            with self.assertRaises(MatrixFormatError, msg=text):
                Expression(text)
        with self.assertRaises(MatrixFormatError):
            Expression('1/0').evaluate()
        with self.assertRaises(UnboundParameterError):
            Expression('q + 1').evaluate({})


class TestMatrixDocument(unittest.TestCase):
    """ JSON and CSV matrix documents """

    def test_csv(self):
        doc = parse_matrix(os.path.join(testdir, 'example1.csv'))
        self.assertTrue(doc.is_concrete)
        self.assertEqual(doc.bind(), EXAMPLE1)

    def test_json_template(self):
        doc = parse_matrix(os.path.join(testdir, 'example2.json'))
        compare(doc.names, ('q',))
        compare(doc.parameters, {'q': ((1, 3),)})
        m = doc.bind({'q': Fraction(1, 2)})
        self.assertEqual(m[0, 2], Fraction(1, 2))
        self.assertEqual(m[2, 2], -1)
        with self.assertRaises(UnboundParameterError):
            doc.bind()

    def test_json_two_parameters(self):
        doc = parse_matrix(os.path.join(testdir, 'example3.json'))
        compare(doc.names, ('p', 'q'))
        self.assertEqual(doc.n, 4)
        self.assertEqual(doc.bind({'p': 2, 'q': 1})[0, 3], 2)

    def test_defaults(self):
        text = json.dumps({'entries': [['-1', 'q'], [0, -1]], 'parameters': {'q': '1/2'}})
        doc = parse_matrix(io.StringIO(text), 'json')
        compare(doc.defaults, {'q': Fraction(1, 2)})
        self.assertEqual(doc.bind()[0, 1], Fraction(1, 2))
        self.assertEqual(doc.bind({'q': 3})[0, 1], 3)

    def test_cells(self):
        doc = parse_matrix(io.StringIO('1/3,0.25\n−2,2*q\n'), 'csv')
        compare(doc.entries, (('1/3', '1/4'), ('-2', '2*q')))
        doc = parse_matrix(io.StringIO('[[0.5, 1], [2, 3]]'))
        self.assertEqual(doc.bind()[0, 0], Fraction(1, 2))

    def test_long_decimals(self):
        doc = parse_matrix(io.StringIO('-0.12345678901234567891,1\n0,-1\n'), 'csv')
        self.assertEqual(doc.bind()[0, 0], Fraction('-0.12345678901234567891'))
        compare(doc.entries[0][0], '-12345678901234567891/100000000000000000000')
        doc = parse_matrix(io.StringIO('{"entries": [["0.30000000000000000001", "q"], [0, -1]]}'), 'json')
        self.assertNotEqual(doc.bind({'q': 0})[0, 0], Fraction(3, 10))
        doc = parse_matrix(io.StringIO('[[0.30000000000000000001, 1], [0, -1]]'), 'json')
        self.assertEqual(doc.bind()[0, 0], Fraction('0.30000000000000000001'))

    def test_out_of_float_range(self):
        for text, fmt in (('-1e400,0\n0,-1\n', 'csv'), ('[[Infinity, 0], [0, -1]]', 'json'),
                          ('[[1e400, 0], [0, -1]]', 'json')):
            with self.assertRaises(MatrixFormatError, msg=text):
                parse_matrix(io.StringIO(text), fmt)
        doc = parse_matrix(io.StringIO('q,0\n0,-1\n'), 'csv')
        with self.assertRaises(MatrixFormatError):
            doc.bind({'q': 10 ** 400})
        with self.assertRaises(MatrixFormatError):
            doc.bind({'q': float('nan')})

    def test_csv_comments(self):
        doc = parse_matrix(io.StringIO('# comment\n-1,0\n\n0,-1\n'), 'csv')
        self.assertEqual(doc.bind(), Matrix.diagonal([-1, -1]))

    def test_errors(self):
        bad = {
            'ragged': ('1,2\n3\n', 'csv'),
            'not square': ('1,2\n3,4\n5,6\n', 'csv'),
            'unparseable': ('1,q**2\n3,4\n', 'csv'),
            'json': ('{"entries": [[1, 2], [3', 'json'),
            'no entries': ('{"rows": []}', 'json'),
            'unknown placeholder': ('{"entries": [[1, "q"], [3, 4]], "parameters": {}}', 'json'),
            'undeclared parameter': ('{"entries": [[1, 2], [3, 4]], "parameters": {"q": 1}}', 'json'),
            'wrong occurrences': ('{"entries": [[1, "q"], [3, 4]], "parameters": {"q": [[2, 1]]}}', 'json'),
            'wrong n': ('{"n": 3, "entries": [[1, 2], [3, 4]]}', 'json'),
            'null cell': ('{"entries": [[1, null], [3, 4]]}', 'json'),
        }
        for name, (text, fmt) in bad.items():
            with self.assertRaises(MatrixFormatError, msg=name):
                parse_matrix(io.StringIO(text), fmt)
        with self.assertRaises(MatrixFormatError):
            parse_matrix(io.StringIO('1'), 'xml')
        with self.assertRaises(OSError):
            parse_matrix(os.path.join(testdir, 'missing.csv'))

    def test_dimension_cap(self):
        text = '\n'.join(','.join(['1'] * 17) for _ in range(17))
        with self.assertRaises(DimensionError):
            parse_matrix(io.StringIO(text), 'csv')

    def test_roundtrip(self):
        for name in ('example1.csv', 'example2.json', 'example3.json'):
            doc = parse_matrix(os.path.join(testdir, name))
            for fmt in ('json', 'csv'):
                self.assertEqual(parse_matrix(io.StringIO(serialize(doc, fmt)), fmt), doc)

    def test_serialize_defaults(self):
        doc = MatrixDocument.from_rows([['q']], defaults={'q': 1})
        self.assertEqual(parse_matrix(io.StringIO(serialize(doc)), 'json'), doc)
        with self.assertRaises(MatrixFormatError):
            serialize(doc, 'csv')


class TestReport(unittest.TestCase):
    """ Versioned report documents """

    def test_digest(self):
        digest = matrix_digest(EXAMPLE1)
        self.assertTrue(digest.startswith('sha256:'))
        self.assertEqual(digest, matrix_digest(Matrix(tuple(tuple(Fraction(x) for x in row)
                                                            for row in EXAMPLE1.entries))))
        self.assertNotEqual(digest, matrix_digest(EXAMPLE1.negated()))

    def test_roundtrip(self):
        report = ReportDocument('check', EXAMPLE1, certify(EXAMPLE1))
        data = json.loads(report.dumps())
        self.assertEqual(data['schema'], REPORT_SCHEMA)
        self.assertEqual(data['input']['entries'][0], ['-6', '-5', '1'])
        self.assertNotIn('timing', data)
        again = load_report(io.StringIO(report.dumps()))
        self.assertEqual(again.certificate, report.certificate)
        self.assertEqual(again.matrix, EXAMPLE1)
        self.assertEqual(again.dumps(), report.dumps())

    def test_timing(self):
        report = ReportDocument('check', EXAMPLE1, timing={'seconds': 0.5})
        self.assertEqual(json.loads(report.dumps())['timing'], {'seconds': 0.5})

    def test_invalid(self):
        data = ReportDocument('check', EXAMPLE1, certify(EXAMPLE1)).to_dict()
        data['input']['entries'][0][0] = '7'
        with self.assertRaises(MatrixFormatError):
            ReportDocument.from_dict(data)
        with self.assertRaises(MatrixFormatError):
            ReportDocument.from_dict({'schema': 'other/1'})
        with self.assertRaises(MatrixFormatError):
            load_report(io.StringIO('not json'))
        data = ReportDocument('check', EXAMPLE1, certify(EXAMPLE1)).to_dict()
        data['certificate']['kind'] = 'Maybe'
        with self.assertRaises(MatrixFormatError):
            ReportDocument.from_dict(data)


class TestHelpers(unittest.TestCase):
    """ Text helpers """

    def test_extension(self):
        self.assertEqual(extension('/tmp/dir/Example1.JSON'), 'json')
        self.assertEqual(extension('matrix'), '')

    def test_dumps(self):
        self.assertEqual(dumps({'b': 1, 'a': [1, 2]}), '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n')
        self.assertEqual(sha256_digest(''), 'sha256:' + 'e3b0c44298fc1c149afbf4c8996fb924'
                                                        '27ae41e4649b934ca495991b7852b855')

    def test_write_text(self):
        with TempDirectory() as d:
            path = os.path.join(d.path, 'out.txt')
            write_text('hello\n', path)
            d.compare(['out.txt'])
            with open(path) as f:
                self.assertEqual(f.read(), 'hello\n')
        buf = io.StringIO()
        write_text('hi', buf)
        self.assertEqual(buf.getvalue(), 'hi')
