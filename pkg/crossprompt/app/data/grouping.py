"""Language grouping: seen/unseen tags, reference accuracies and source sets.

The grouping sidecar is a YAML file::

    threshold: 0.6
    languages:
      eng_Latn: {seen: true, reference_accuracy: 0.87}
      ...
    source_sets:
      compact-3: [eng_Latn, arb_Arab, zho_Hans]
"""
import collections
import dataclasses
import logging
import os
from typing import Dict, List, Optional

import yaml
from django.conf import settings

from crossprompt.app.constants import (
    GROUP_ALL_WO_SOURCES,
    GROUP_LOW_PERFORMING,
    GROUP_SEEN_WO_SOURCES,
    GROUP_UNSEEN,
)
from crossprompt.app.exceptions import CacheIOError, ConfigurationError, FormatError

log = logging.getLogger(__name__)

__all__ = (
    'LanguageInfo',
    'LanguageGrouping',
    'load_grouping',
    'save_grouping',
    'classify_low_performing',
    'resolve_groups',
    'resolve_source_set',
    'select_supervised_targets',
    'default_source_sets',
)


@dataclasses.dataclass(frozen=True)
class LanguageInfo:
    seen: bool
    reference_accuracy: Optional[float] = None


@dataclasses.dataclass
class LanguageGrouping:
    """
    Fields:
        languages: Language id to ``LanguageInfo``, in file order.
        source_sets: Named source language lists.
        threshold: Reference accuracy below which a language is low-performing.
    """

    languages: Dict[str, LanguageInfo]
    source_sets: Dict[str, List[str]] = dataclasses.field(default_factory=dict)
    threshold: float = 0.60

    @property
    def all_languages(self):
        return frozenset(self.languages)

    @property
    def seen(self):
        return frozenset(lang for lang, info in self.languages.items() if info.seen)

    @property
    def unseen(self):
        return frozenset(lang for lang, info in self.languages.items() if not info.seen)

    def reference_accuracies(self):
        return {
            lang: info.reference_accuracy
            for lang, info in self.languages.items() if info.reference_accuracy is not None
        }

    def ordered(self, languages):
        """``languages`` in grouping file order."""
        return [lang for lang in self.languages if lang in languages]

    def as_dict(self):
        return {
            'threshold': self.threshold,
            'languages': {
                lang: {'seen': info.seen, 'reference_accuracy': info.reference_accuracy}
                for lang, info in self.languages.items()
            },
            'source_sets': {name: list(members) for name, members in self.source_sets.items()},
        }


def load_grouping(path):
    try:
        with open(path, encoding='utf-8') as handle:
            document = yaml.safe_load(handle)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    except yaml.YAMLError as exc:
        raise FormatError(f'{path}: invalid YAML ({exc})')
    if not isinstance(document, dict) or not isinstance(document.get('languages'), dict):
        raise FormatError(f'{path}: grouping needs a "languages" mapping')

    languages = collections.OrderedDict()
    for lang, entry in document['languages'].items():
        entry = entry or {}
        if 'seen' not in entry:
            raise FormatError(f'{path}: language {lang} lacks the "seen" flag')
        accuracy = entry.get('reference_accuracy')
        if accuracy is not None and not 0.0 <= float(accuracy) <= 1.0:
            raise FormatError(f'{path}: reference accuracy of {lang} outside [0, 1]')
        languages[str(lang)] = LanguageInfo(
            seen=bool(entry['seen']),
            reference_accuracy=None if accuracy is None else float(accuracy),
        )
    source_sets = {
        str(name): [str(lang) for lang in members]
        for name, members in (document.get('source_sets') or {}).items()
    }
    threshold = float(document.get('threshold', settings.LOW_PERFORMANCE_THRESHOLD))
    return LanguageGrouping(languages, source_sets, threshold)


def save_grouping(grouping, path):
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(grouping.as_dict(), handle, sort_keys=False)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    return path


def classify_low_performing(reference_acc, threshold=None):
    threshold = settings.LOW_PERFORMANCE_THRESHOLD if threshold is None else threshold
    return frozenset(lang for lang, accuracy in reference_acc.items() if accuracy < threshold)


def resolve_source_set(grouping, source_set):
    """A source set name from the grouping, or an explicit list of language ids."""
    if isinstance(source_set, str):
        if source_set not in grouping.source_sets:
            raise ConfigurationError(
                f'unknown source set {source_set!r}; known: {sorted(grouping.source_sets)}'
            )
        members = grouping.source_sets[source_set]
    else:
        members = list(source_set or ())
    unknown = [lang for lang in members if lang not in grouping.languages]
    if unknown:
        raise ConfigurationError(f'unknown source languages: {unknown}')
    return frozenset(members)


def resolve_groups(grouping, source_set):
    """Return the four target groups, in report order, as language id sets."""
    sources = resolve_source_set(grouping, source_set)
    low = classify_low_performing(grouping.reference_accuracies(), grouping.threshold)
    if not low <= grouping.unseen:
        log.warning('Low-performing languages outside the unseen group: %s',
                    sorted(low - grouping.unseen))
    return collections.OrderedDict([
        (GROUP_ALL_WO_SOURCES, grouping.all_languages - sources),
        (GROUP_SEEN_WO_SOURCES, grouping.seen - sources),
        (GROUP_UNSEEN, grouping.unseen),
        (GROUP_LOW_PERFORMING, low),
    ])


def select_supervised_targets(grouping, n_per_group=None, rng=None, exclude=()):
    """
    Balanced target subset for sequential adaptation.

    Draws up to ``n_per_group`` languages from the seen and from the unseen
    group (sources excluded), returned in grouping file order.
    """
    n_per_group = settings.SUPERVISED_TARGETS_PER_GROUP if n_per_group is None else n_per_group
    chosen = set()
    for pool in (grouping.seen, grouping.unseen):
        candidates = grouping.ordered(pool - frozenset(exclude))
        if len(candidates) <= n_per_group or rng is None:
            chosen.update(candidates[:n_per_group])
        else:
            picks = rng.choice(len(candidates), size=n_per_group, replace=False)
            chosen.update(candidates[int(index)] for index in picks)
    return grouping.ordered(chosen)


def default_source_sets(seen_languages):
    """Nested source sets over the seen languages: 3, up to 7, and all."""
    seen_languages = list(seen_languages)
    return collections.OrderedDict([
        ('compact-3', seen_languages[:3]),
        ('mid-7', seen_languages[:7]),
        ('seen-all', seen_languages),
    ])
