import contextlib
import logging

from logstash_formatter import LogstashFormatterV1

RECORDS_LOGGER_NAME = 'crossprompt.training.records'

log = logging.getLogger(__name__)

_RESERVED = vars(logging.LogRecord('', logging.INFO, '', 0, '', (), None)).keys()


class TrainingLog:
    """Newline-delimited JSON training records.

    Every record carries ``step, epoch, phase, lr, loss, val_acc, seed`` as
    top-level fields. A ``TrainingLog`` without a path keeps records in memory
    only, which is what the unit tests and the in-process drivers read back.
    """

    def __init__(self, path=None, seed=None):
        self.path = path
        self.seed = seed
        self.entries = []
        self._logger = logging.getLogger(RECORDS_LOGGER_NAME)
        self._handler = None

    def open(self):
        if self.path is not None and self._handler is None:
            handler = logging.FileHandler(self.path, mode='a', encoding='utf-8')
            handler.setFormatter(LogstashFormatterV1())
            self._logger.addHandler(handler)
            self._handler = handler
        return self

    def close(self):
        if self._handler is not None:
            self._logger.removeHandler(self._handler)
            self._handler.close()
            self._handler = None

    def header(self, **fields):
        fields.setdefault('seed', self.seed)
        self._emit('header', fields)

    def record(self, *, step, epoch, phase, lr, loss, val_acc=None):
        fields = {
            'step': int(step),
            'epoch': int(epoch),
            'phase': phase,
            'lr': float(lr),
            'loss': float(loss),
            'val_acc': None if val_acc is None else float(val_acc),
            'seed': self.seed,
        }
        self._emit('train', fields)

    def validations(self, phase=None):
        return [
            entry for entry in self.entries
            if entry['kind'] == 'train' and entry['val_acc'] is not None
            and (phase is None or entry['phase'] == phase)
        ]

    def _emit(self, kind, fields):
        entry = dict(fields, kind=kind)
        self.entries.append(entry)
        if self._handler is not None:
            self._logger.info(kind, extra=_flat(entry))

    def __enter__(self):
        return self.open()

    def __exit__(self, *exc_info):
        self.close()


def _flat(entry):
    # LogRecord refuses extras that shadow its own attributes
    reserved = set(_RESERVED) | {'message', 'asctime'}
    return {(f'x_{key}' if key in reserved else key): value for key, value in entry.items()}


@contextlib.contextmanager
def training_log(path=None, seed=None):
    with TrainingLog(path, seed=seed) as records:
        yield records
