from .aggregate import (
    GroupAggregate,
    aggregate,
)
from .evaluate import (
    evaluate,
    score_examples,
)
from .reports import (
    emit_language_report,
    emit_report,
)

__all__ = (
    'GroupAggregate',
    'aggregate',
    'evaluate',
    'score_examples',
    'emit_language_report',
    'emit_report',
)
