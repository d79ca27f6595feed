"""Topic-classification TSV files (SIB-200 layout).

A file has a header row and one example per line. The text and category
columns are found by name; an optional ``split`` column assigns examples to
train/dev/test. A file named ``train.tsv``, ``dev.tsv`` or ``test.tsv``
takes its split from the file name and its language id from the parent
directory, otherwise the language id is the file stem.
"""
import csv
import hashlib
import logging
import os
import re

import tablib
from django.conf import settings
from tablib.exceptions import InvalidDimensions

from crossprompt.app.constants import N_SPECIAL_TOKENS, Split
from crossprompt.app.exceptions import CacheIOError, FormatError
from crossprompt.app.tensor import SeededRng

from .datasets import Dataset, LabeledExample, stratified_split_tags

log = logging.getLogger(__name__)

__all__ = (
    'HashVocabulary',
    'IdVocabulary',
    'load_tsv_dataset',
    'load_tsv_directory',
    'write_tsv_dataset',
)

SPLIT_COLUMN = 'split'
ID_TOKEN_REGEXP = re.compile(r'^t(?P<id>\d+)$')
LINE_BREAK_REGEXP = re.compile(r'\r\n|\r|\n')


class HashVocabulary:
    """
    Whitespace tokens hashed into a fixed number of bins.

    Collisions are accepted. Ids 0 and 1 stay reserved for PAD and CLS.
    """

    def __init__(self, n_bins=None):
        self.n_bins = settings.HASH_VOCABULARY_BINS if n_bins is None else int(n_bins)

    @property
    def vocab_size(self):
        return N_SPECIAL_TOKENS + self.n_bins

    def token_id(self, word):
        digest = hashlib.blake2b(word.encode('utf-8'), digest_size=8).digest()
        return N_SPECIAL_TOKENS + int.from_bytes(digest, 'little') % self.n_bins

    def encode(self, text):
        return tuple(self.token_id(word) for word in text.split())

    def render(self, tokens):
        raise FormatError('hash vocabulary cannot render token ids back to text')


class IdVocabulary:
    """Literal token ids written as ``t<id>``; used for generated suites."""

    def __init__(self, vocab_size):
        self.vocab_size = int(vocab_size)

    def encode(self, text):
        ids = []
        for word in text.split():
            match = ID_TOKEN_REGEXP.match(word)
            if not match or int(match.group('id')) >= self.vocab_size:
                raise FormatError(f'{word!r} is not a token id below {self.vocab_size}')
            ids.append(int(match.group('id')))
        return tuple(ids)

    def render(self, tokens):
        return ' '.join(f't{token}' for token in tokens)


def _find_column(headers, candidates, role):
    lowered = {header.strip().lower(): header for header in headers if header}
    for candidate in candidates:
        if candidate.lower() in lowered:
            return lowered[candidate.lower()]
    raise FormatError(f'missing {role} column (expected one of {", ".join(candidates)})')


def _language_and_split(path):
    stem = os.path.splitext(os.path.basename(path))[0]
    if stem in {split.value for split in Split}:
        parent = os.path.basename(os.path.dirname(os.path.abspath(path)))
        return parent, Split(stem)
    return stem, None


def _read_table(path):
    try:
        with open(path, encoding='utf-8', newline='') as handle:
            content = handle.read()
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    if not content.strip():
        raise FormatError(f'{path}: empty file')
    lines = LINE_BREAK_REGEXP.split(content)
    width = lines[0].count('\t')
    data_lines = 0
    for number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        data_lines += 1
        if line.count('\t') != width:
            raise FormatError(f'{path}:{number}: expected {width + 1} columns')
    try:
        # quote characters are literal text in these files
        table = tablib.Dataset().load(content, format='tsv', quoting=csv.QUOTE_NONE)
    except InvalidDimensions:
        raise FormatError(f'{path}: rows do not all have the header column count')
    if len(table) != data_lines:
        raise FormatError(f'{path}: parsed {len(table)} rows from {data_lines} data lines')
    return table


def load_tsv_dataset(path, vocabulary=None, label_names=None, language=None,
                     text_column=None, category_column=None, seed=0):
    """
    Load one TSV file into a ``Dataset``.

    Labels are numbered in first-appearance order of the category strings,
    unless ``label_names`` fixes the inventory (useful to share one label
    numbering across languages). Without a split column or a split file
    name, examples are split 80/10/10 per class with a seeded shuffle.
    """
    vocabulary = vocabulary or HashVocabulary()
    table = _read_table(path)
    headers = table.headers or []
    text_column = text_column or _find_column(headers, settings.TSV_TEXT_COLUMNS, 'text')
    category_column = category_column or _find_column(
        headers, settings.TSV_CATEGORY_COLUMNS, 'category'
    )
    for column in (text_column, category_column):
        if column not in headers:
            raise FormatError(f'{path}: missing column {column!r}')
    if not len(table):
        raise FormatError(f'{path}: no data rows')
    stem_language, file_split = _language_and_split(path)
    language = language or stem_language

    names = list(label_names or [])
    fixed_inventory = bool(label_names)
    labels, texts = [], []
    for line, (category, text) in enumerate(
            zip(table[category_column], table[text_column]), start=2):
        category = (category or '').strip()
        if category not in names:
            if fixed_inventory:
                raise FormatError(f'{path}:{line}: unknown category {category!r}')
            names.append(category)
        labels.append(names.index(category))
        texts.append(vocabulary.encode(text or ''))

    if SPLIT_COLUMN in headers:
        try:
            tags = [Split(value.strip()) for value in table[SPLIT_COLUMN]]
        except ValueError as exc:
            raise FormatError(f'{path}: {exc}')
    elif file_split is not None:
        tags = [file_split] * len(labels)
    else:
        tags = stratified_split_tags(
            labels, SeededRng(seed).child('split', language),
            settings.VALIDATION_FRACTION, settings.TEST_FRACTION,
        )
    examples = [
        LabeledExample(tokens=tokens, label=label, language=language, split=tag)
        for tokens, label, tag in zip(texts, labels, tags)
    ]
    dataset = Dataset(language, examples, len(names), vocabulary.vocab_size, label_names=names)
    log.info('Loaded %d examples of %s (K=%d) from %s', len(dataset), language, len(names), path)
    return dataset


def load_tsv_directory(directory, vocabulary=None, label_names=None):
    """Merge ``train.tsv``, ``dev.tsv`` and ``test.tsv`` of one language directory."""
    vocabulary = vocabulary or HashVocabulary()
    examples, names = [], list(label_names or [])
    for split in Split:
        path = os.path.join(directory, f'{split.value}.tsv')
        if not os.path.exists(path):
            continue
        part = load_tsv_dataset(path, vocabulary, label_names=names or None)
        names = part.label_names
        examples += part.examples
    if not examples:
        raise FormatError(f'{directory}: no train/dev/test TSV files')
    language = os.path.basename(os.path.normpath(directory))
    return Dataset(language, examples, len(names), vocabulary.vocab_size, label_names=names)


def write_tsv_dataset(dataset, path, vocabulary):
    """Write every example with its split column; ``vocabulary`` renders the tokens."""
    table = tablib.Dataset(headers=['index_id', 'category', 'text', SPLIT_COLUMN])
    for index, example in enumerate(dataset.examples):
        table.append([
            index,
            dataset.label_names[example.label],
            vocabulary.render(example.tokens),
            example.split.value,
        ])
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(table.export('tsv', quoting=csv.QUOTE_NONE))
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    return path
