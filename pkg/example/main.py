import os
import sys
from fractions import Fraction

from dstab import certify, search_counterexample
from dstab.documents import parse_matrix
from dstab.dstability import proposition1_n3, reduced_n4_forms
from dstab.sweep import SweepGrid, region_csv, run_sweep

here = os.path.dirname(__file__)


def example1():
    """ D-stable, yet every pivot has a negative inequality """
    m = parse_matrix(os.path.join(here, 'example1.csv')).bind()
    cert = certify(m)
    print('example 1: %s, first violation %s' % (cert.kind, cert.instances[0]))
    print('example 1: three 3x3 inequalities %s' % [str(v) for v in proposition1_n3(m).values])
    found = search_counterexample(m, trials=1000, seed=0).counterexample
    print('example 1: oracle %s' % ('found D=%s' % (found.D.entries,) if found else 'found nothing'))


def example2():
    """ Certified region of the 3x3 template is q >= -1 """
    doc = parse_matrix(os.path.join(here, 'example2.json'))
    grid = SweepGrid.from_params(['q=-2:4:1/4'])
    sys.stdout.write(region_csv(run_sweep(doc, grid), grid.names))


def example3():
    """ The 4x4 template along p = 2q """
    doc = parse_matrix(os.path.join(here, 'example3.json'))
    for q in (Fraction(1, 2), 1, 2, 5):
        m = doc.bind({'q': q, 'p': 2 * q})
        cert = certify(m)
        forms = reduced_n4_forms(m)
        print('example 3: q=%s %s chain=%s pair forms=%s triple forms=%s' % (
            q, cert.kind, cert.pivot_chain,
            [str(v) for v in forms.two.values()], [str(v) for v in forms.one.values()]))


if __name__ == "__main__":
    example1()
    example2()
    example3()
