import logging
import datetime
from pythonjsonlogger import jsonlogger

# record attributes copied into every JSON line when present
CONTEXT_FIELDS = ('matrix', 'command')


class DstabFormatter(jsonlogger.JsonFormatter):
    """ Formatting for dstab logs """

    def format(self, record):
        # if just a string, convert to JSON
        if not isinstance(record.msg, dict):
            record.msg = {'message': record.getMessage()}
            record.args = ()
        record.msg.setdefault('message', '')
        record.msg['timestamp'] = datetime.datetime.now().isoformat()
        for name in CONTEXT_FIELDS:
            if hasattr(record, name):
                record.msg[name] = getattr(record, name)
        record.msg['level'] = record.levelname
        return super(DstabFormatter, self).format(record)


def getLogger(name, stdout=None):
    """ Return logger suitable for dstab

    stdout={'level': N} attaches a JSON stream handler on stderr; otherwise the
    logger only has a NullHandler and records propagate to the 'dstab' logger.
    """
    logger = logging.getLogger(name)
    logger.handlers = []
    if stdout is None:
        logger.addHandler(logging.NullHandler())
    else:
        handler = logging.StreamHandler()
        handler.setLevel(stdout['level'])
        handler.setFormatter(DstabFormatter())
        logger.addHandler(handler)
    logger.setLevel(1)
    return logger


def context_logger(logger, matrix=None, command=None):
    """ Adapter stamping the input digest and the running command on each record """
    extra = {k: v for k, v in (('matrix', matrix), ('command', command)) if v is not None}
    return logging.LoggerAdapter(logger, extra)
