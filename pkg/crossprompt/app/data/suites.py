"""Benchmark suites: every language's dataset plus the grouping.

A suite is either generated from a ``SyntheticSuiteConfig`` or read from a
directory of TSV files with a grouping sidecar. ``gen-data`` writes the
second form from the first; a ``suite.yaml`` manifest in the directory
records how the token column is to be read back.
"""
import collections
import dataclasses
import glob
import logging
import os
from typing import Dict, Tuple

import yaml
from django.conf import settings

from crossprompt.app.exceptions import CacheIOError, ConfigurationError, FormatError
from crossprompt.app.tensor import SeededRng

from .datasets import Dataset
from .grouping import (
    LanguageGrouping,
    LanguageInfo,
    default_source_sets,
    load_grouping,
    save_grouping,
)
from .languages import AlignmentProfile, generate_language_family
from .oracles import reference_accuracy
from .topics import TopicTask, generate_dataset
from .tsv import HashVocabulary, IdVocabulary, load_tsv_dataset, write_tsv_dataset

log = logging.getLogger(__name__)

__all__ = (
    'SyntheticSuiteConfig',
    'Suite',
    'build_synthetic_suite',
    'load_tsv_suite',
    'write_suite',
    'load_suite',
)

GROUPING_FILE = 'grouping.yaml'
MANIFEST_FILE = 'suite.yaml'


@dataclasses.dataclass(frozen=True)
class SyntheticSuiteConfig:
    seed: int = 0
    n_seen: int = 5
    n_unseen: int = 5
    n_classes: int = 7
    n_per_class: int = 200
    concept_vocab: int = 64
    keywords_per_class: int = 6
    signal: float = 0.5
    length_range: Tuple[int, int] = (8, 16)
    n_families: int = 2
    divergence: float = 0.25
    unseen_alignment: Tuple[Tuple[float, float, float], ...] = AlignmentProfile().unseen

    @classmethod
    def from_dict(cls, values):
        values = dict(values or {})
        unknown = set(values) - {field.name for field in dataclasses.fields(cls)}
        if unknown:
            raise ConfigurationError(f'unknown synthetic suite keys: {sorted(unknown)}')
        if 'length_range' in values:
            values['length_range'] = tuple(values['length_range'])
        if 'unseen_alignment' in values:
            values['unseen_alignment'] = tuple(tuple(bin_) for bin_ in values['unseen_alignment'])
        return cls(**values)

    def as_dict(self):
        values = dataclasses.asdict(self)
        values['length_range'] = list(self.length_range)
        values['unseen_alignment'] = [list(bin_) for bin_ in self.unseen_alignment]
        return values


@dataclasses.dataclass
class Suite:
    """
    Fields:
        datasets: Language id to ``Dataset``.
        grouping: Seen/unseen tags, reference accuracies and source sets.
        vocab_size: Token id bound shared by every dataset.
        n_classes: K shared by every dataset.
        languages: The generating ``SyntheticLanguage`` objects, synthetic suites only.
        pretraining: Seen-language corpora reserved for backbone pretraining,
            synthetic suites only.
    """

    datasets: Dict[str, Dataset]
    grouping: LanguageGrouping
    vocab_size: int
    n_classes: int
    languages: Dict = dataclasses.field(default_factory=dict)
    pretraining: Dict[str, Dataset] = dataclasses.field(default_factory=dict)

    def dataset(self, language):
        try:
            return self.datasets[language]
        except KeyError:
            raise ConfigurationError(f'no dataset for language {language!r}')

    def seen_datasets(self):
        return [self.datasets[lang] for lang in self.grouping.ordered(self.grouping.seen)
                if lang in self.datasets]

    def pretraining_datasets(self, languages=None):
        """
        Separate pretraining corpora when the suite has them.

        Otherwise the seen datasets, restricted to ``languages`` when given so
        that no other language's splits are read.
        """
        if self.pretraining:
            return list(self.pretraining.values())
        seen = self.seen_datasets()
        if languages is None:
            return seen
        return [dataset for dataset in seen if dataset.language in languages]

    def reset_reads(self):
        for dataset in self.datasets.values():
            dataset.reads.clear()


def build_synthetic_suite(config):
    """
    Generate every language of the suite from ``config``.

    All languages realize one parallel latent corpus; reference accuracies
    come from a frequency classifier restricted to the seen vocabulary region.
    """
    profile = AlignmentProfile(unseen=config.unseen_alignment)
    languages = generate_language_family(
        config.seed, config.n_seen, config.n_unseen, profile,
        concept_vocab=config.concept_vocab,
        n_families=config.n_families,
        divergence=config.divergence,
    )
    task = TopicTask.generate(
        config.seed,
        n_classes=config.n_classes,
        concept_vocab=config.concept_vocab,
        keywords_per_class=config.keywords_per_class,
        signal=config.signal,
        length_range=config.length_range,
    )
    layout = languages[0].layout
    seen_mask = layout.seen_mask()
    datasets = collections.OrderedDict()
    pretraining = collections.OrderedDict()
    infos = collections.OrderedDict()
    for language in languages:
        corpus_rng = SeededRng(config.seed).child('corpus')
        dataset = generate_dataset(language, task, config.n_per_class, corpus_rng)
        accuracy = reference_accuracy(dataset, seen_mask)
        dataset.reads.clear()
        datasets[language.language_id] = dataset
        infos[language.language_id] = LanguageInfo(seen=language.seen, reference_accuracy=accuracy)
        log.debug('%s: alpha=%.2f reference=%.3f', language.language_id, language.alpha, accuracy)
        if language.seen:
            pretraining[language.language_id] = generate_dataset(
                language, task, config.n_per_class,
                SeededRng(config.seed).child('pretraining-corpus', language.language_id),
            )
    seen_ids = [language.language_id for language in languages if language.seen]
    grouping = LanguageGrouping(
        infos, default_source_sets(seen_ids), settings.LOW_PERFORMANCE_THRESHOLD
    )
    return Suite(
        datasets=datasets,
        grouping=grouping,
        vocab_size=layout.vocab_size,
        n_classes=task.n_classes,
        languages=collections.OrderedDict(
            (language.language_id, language) for language in languages
        ),
        pretraining=pretraining,
    )


def write_suite(suite, directory, config=None):
    """Write ``<language>.tsv`` files, the grouping sidecar and the manifest."""
    vocabulary = IdVocabulary(suite.vocab_size)
    for language, dataset in suite.datasets.items():
        write_tsv_dataset(dataset, os.path.join(directory, f'{language}.tsv'), vocabulary)
    save_grouping(suite.grouping, os.path.join(directory, GROUPING_FILE))
    manifest = {
        'vocabulary': 'ids',
        'vocab_size': suite.vocab_size,
        'label_names': suite.datasets[next(iter(suite.datasets))].label_names,
        'synthetic': config.as_dict() if config is not None else None,
    }
    path = os.path.join(directory, MANIFEST_FILE)
    try:
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(manifest, handle, sort_keys=False)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    log.info('Wrote %d languages to %s', len(suite.datasets), directory)
    return directory


def _read_manifest(directory):
    path = os.path.join(directory, MANIFEST_FILE)
    if not os.path.exists(path):
        return {}
    with open(path, encoding='utf-8') as handle:
        try:
            return yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise FormatError(f'{path}: invalid YAML ({exc})')


def load_tsv_suite(directory, grouping_path=None, vocabulary=None, n_bins=None, seed=0):
    """
    Read one ``<language>.tsv`` per language from ``directory``.

    ``vocabulary`` is ``hash`` (default for foreign files) or ``ids``; the
    manifest written by ``write_suite`` supplies it when present. Every
    language shares the label inventory of the first file.
    """
    manifest = _read_manifest(directory)
    kind = vocabulary or manifest.get('vocabulary', 'hash')
    if kind == 'ids':
        if 'vocab_size' not in manifest:
            raise ConfigurationError(
                f'{directory}: id vocabulary needs a vocab_size in {MANIFEST_FILE}'
            )
        tokenizer = IdVocabulary(manifest['vocab_size'])
    elif kind == 'hash':
        tokenizer = HashVocabulary(n_bins)
    else:
        raise ConfigurationError(f'unknown vocabulary {kind!r}; expected hash or ids')

    grouping = load_grouping(grouping_path or os.path.join(directory, GROUPING_FILE))
    paths = sorted(glob.glob(os.path.join(directory, '*.tsv')))
    if not paths:
        raise ConfigurationError(f'{directory}: no TSV files')
    label_names = manifest.get('label_names')
    datasets = collections.OrderedDict()
    for path in paths:
        dataset = load_tsv_dataset(path, tokenizer, label_names=label_names, seed=seed)
        label_names = dataset.label_names
        if dataset.language not in grouping.languages:
            log.warning('Skipping %s: language %s is not in the grouping', path, dataset.language)
            continue
        dataset.tag = 'seen' if grouping.languages[dataset.language].seen else 'unseen'
        datasets[dataset.language] = dataset
    ordered = collections.OrderedDict(
        (lang, datasets[lang]) for lang in grouping.ordered(datasets)
    )
    return Suite(ordered, grouping, tokenizer.vocab_size, len(label_names))


def load_suite(data_config):
    """
    Build or read the suite named by an experiment's ``data`` section.

    ``{'synthetic': {...}}`` generates one; ``{'tsv_dir': ..., 'grouping': ...,
    'vocabulary': ...}`` reads one.
    """
    data_config = dict(data_config or {})
    if data_config.get('tsv_dir'):
        return load_tsv_suite(
            data_config['tsv_dir'],
            grouping_path=data_config.get('grouping'),
            vocabulary=data_config.get('vocabulary'),
            n_bins=data_config.get('hash_bins'),
            seed=data_config.get('split_seed', 0),
        )
    return build_synthetic_suite(SyntheticSuiteConfig.from_dict(data_config.get('synthetic')))
