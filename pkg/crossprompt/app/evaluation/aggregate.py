import collections
import dataclasses
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from crossprompt.app.data.grouping import resolve_groups
from crossprompt.app.exceptions import AggregationError

log = logging.getLogger(__name__)

__all__ = (
    'GroupAggregate',
    'aggregate',
    'language_means',
    'cell_key',
)


def cell_key(result):
    """Report column of a result: method and source set, plus supervision."""
    return (result.supervision, result.method, result.source_set)


@dataclasses.dataclass(frozen=True)
class GroupAggregate:
    """
    Fields:
        group: Target group name.
        supervision: ``zero-shot`` or ``sequential``.
        method: Method label.
        source_set: Source set id.
        members: Group languages that have results, in grouping order.
        per_seed: Seed to unweighted mean over member languages.
        mean: Mean of the per-seed means, ``None`` for an empty group.
        std: Sample standard deviation of the per-seed means.
    """

    group: str
    supervision: str
    method: str
    source_set: str
    members: Tuple[str, ...]
    per_seed: Dict[int, float]
    mean: Optional[float]
    std: Optional[float]

    @property
    def column(self):
        return f'{self.method} / {self.source_set}'

    @property
    def is_empty(self):
        return self.mean is None

    def as_dict(self):
        values = dataclasses.asdict(self)
        values['members'] = list(self.members)
        values['per_seed'] = {int(seed): value for seed, value in self.per_seed.items()}
        return values


def _mean(values):
    return math.fsum(values) / len(values)


def _std(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(sorted(values), ddof=1))


def _source_set_members(grouping, source_set):
    if source_set in grouping.source_sets:
        return source_set
    return [language for language in source_set.split('+') if language]


def aggregate(results, grouping):
    """
    Group means per (supervision, method, source set) cell.

    Each seed's group mean is the unweighted mean over the member languages
    with a result for that seed; the cell value is the mean and sample
    standard deviation of those per-seed means. Result order never matters.
    Raises AggregationError for a target outside the grouping.
    """
    cells = collections.defaultdict(lambda: collections.defaultdict(dict))
    for result in results:
        if result.target not in grouping.languages:
            raise AggregationError(f'result target {result.target!r} is not in the grouping')
        cells[cell_key(result)][result.seed][result.target] = result.accuracy

    aggregates = []
    for key in sorted(cells):
        supervision, method, source_set = key
        by_seed = cells[key]
        groups = resolve_groups(grouping, _source_set_members(grouping, source_set))
        evaluated = set().union(*(accuracies.keys() for accuracies in by_seed.values()))
        for group, languages in groups.items():
            members = tuple(grouping.ordered(languages & evaluated))
            per_seed = collections.OrderedDict()
            for seed in sorted(by_seed):
                values = [by_seed[seed][lang] for lang in members if lang in by_seed[seed]]
                if values:
                    per_seed[seed] = _mean(sorted(values))
            seed_means = list(per_seed.values())
            aggregates.append(GroupAggregate(
                group=group,
                supervision=supervision,
                method=method,
                source_set=source_set,
                members=members,
                per_seed=per_seed,
                mean=_mean(sorted(seed_means)) if seed_means else None,
                std=_std(seed_means) if seed_means else None,
            ))
            log.debug('%s %s %s: %d members, %d seeds', group, method, source_set,
                      len(members), len(per_seed))
    return aggregates


def language_means(results):
    """Cross-seed mean accuracy per (cell, target language)."""
    collected = collections.defaultdict(list)
    for result in results:
        collected[(cell_key(result), result.target)].append(result.accuracy)
    return {key: _mean(sorted(values)) for key, values in collected.items()}
