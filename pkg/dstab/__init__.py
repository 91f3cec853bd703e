import logging

# quiet these loggers
logging.getLogger('sympy').setLevel(logging.CRITICAL)
logging.getLogger('matplotlib').setLevel(logging.CRITICAL)
logging.getLogger('numba').setLevel(logging.CRITICAL)
logging.getLogger('nose2').setLevel(logging.CRITICAL)


from dstab.linalg import Matrix, IndexSet, MinorTable, minor_table
from dstab.dstability import Certificate, certify, replay
from dstab.oracle import search_counterexample
from dstab.version import __version__
