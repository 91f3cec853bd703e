import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from dstab.loggers import getLogger

logger = getLogger(__name__)


def thread_count():
    """ Worker threads from DSTAB_THREADS, default the CPU count """
    value = os.getenv('DSTAB_THREADS')
    if value is None or value.strip() == '':
        return os.cpu_count() or 1
    try:
        count = int(value)
        if count < 1:
            raise ValueError(value)
    except ValueError:
        logger.warning('Invalid DSTAB_THREADS=%r, using a single thread' % value)
        return 1
    return count


@dataclass(frozen=True)
class Outcome:
    index: int
    value: object = None
    error: object = None

    @property
    def ok(self):
        return self.error is None


def ordered_map(func, items, threads=None, catch=(Exception,), start=0):
    """ Apply func to every item on a thread pool; outcomes keep input order

    Exceptions listed in `catch` are logged and stored on the outcome, anything
    else propagates.
    """
    threads = thread_count() if threads is None else threads

    def run(pair):
        index, item = pair
        try:
            return Outcome(index, value=func(item))
        except catch as e:
            logger.warning('Item %d failed: %s' % (index, e))
            return Outcome(index, error=e)

    pairs = list(enumerate(items, start))
    if threads <= 1 or len(pairs) <= 1:
        return [run(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, pairs))
