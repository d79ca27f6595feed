"""Synthetic languages over a shared concept vocabulary.

Every language realizes the same latent concepts as token ids. A language's
cipher permutes the concepts; its alignment decides, concept by concept,
whether the token lands in the seen region of the vocabulary (the part the
backbone learns during pretraining) or in the unseen region.

Token id layout::

    0, 1                 PAD, CLS
    [2, 2 + V)           seen region
    [2 + V, 2 + 2V)      unseen region
"""
import dataclasses
import logging
from typing import Optional, Tuple

import numpy as np

from crossprompt.app.constants import N_SPECIAL_TOKENS
from crossprompt.app.exceptions import ConfigurationError, RangeError
from crossprompt.app.tensor import SeededRng

log = logging.getLogger(__name__)

__all__ = (
    'VocabularyLayout',
    'AlignmentProfile',
    'SyntheticLanguage',
    'generate_language_family',
)

SEEN = 'seen'
UNSEEN = 'unseen'


@dataclasses.dataclass(frozen=True)
class VocabularyLayout:
    concept_vocab: int
    vocab_size: Optional[int] = None

    def __post_init__(self):
        if self.concept_vocab <= 0:
            raise ConfigurationError(f'concept_vocab must be positive, got {self.concept_vocab}')
        needed = N_SPECIAL_TOKENS + 2 * self.concept_vocab
        if self.vocab_size is None:
            object.__setattr__(self, 'vocab_size', needed)
        elif self.vocab_size < needed:
            raise ConfigurationError(
                f'vocab_size {self.vocab_size} cannot hold two disjoint regions of '
                f'{self.concept_vocab} ids plus {N_SPECIAL_TOKENS} special tokens ({needed})'
            )

    @property
    def seen_range(self):
        return N_SPECIAL_TOKENS, N_SPECIAL_TOKENS + self.concept_vocab

    @property
    def unseen_range(self):
        start = N_SPECIAL_TOKENS + self.concept_vocab
        return start, start + self.concept_vocab

    def seen_mask(self):
        """Boolean mask over token ids, true on the seen region."""
        mask = np.zeros(self.vocab_size, dtype=bool)
        low, high = self.seen_range
        mask[low:high] = True
        return mask


@dataclasses.dataclass(frozen=True)
class AlignmentProfile:
    """
    Distribution of alignment α for generated languages.

    Fields:
        seen: ``(low, high)`` range α is drawn from for seen languages.
        unseen: ``(low, high, weight)`` bins α is drawn from for unseen
            languages; the lowest bin yields the poorly aligned analogues of
            low-performing languages.
    """

    seen: Tuple[float, float] = (1.0, 1.0)
    unseen: Tuple[Tuple[float, float, float], ...] = (
        (0.0, 0.1, 0.4),
        (0.1, 0.5, 0.3),
        (0.5, 0.9, 0.3),
    )

    def __post_init__(self):
        bounds = [self.seen] + [bin_[:2] for bin_ in self.unseen]
        for low, high in bounds:
            if not 0.0 <= low <= high <= 1.0:
                raise ConfigurationError(f'alignment range ({low}, {high}) outside [0, 1]')
        if not self.unseen or sum(weight for _, _, weight in self.unseen) <= 0:
            raise ConfigurationError('unseen alignment bins need positive total weight')

    def sample_seen(self, rng):
        return float(rng.uniform(*self.seen))

    def sample_unseen(self, rng):
        weights = np.array([weight for _, _, weight in self.unseen], dtype=np.float64)
        index = int(rng.choice(len(self.unseen), p=weights / weights.sum()))
        low, high, _ = self.unseen[index]
        return float(rng.uniform(low, high))


@dataclasses.dataclass(frozen=True, eq=False)
class SyntheticLanguage:
    """
    Fields:
        language_id: Identifier, e.g. ``syn-s00``.
        cipher: Bijection over concept ids (``cipher[c]`` is the slot of concept c).
        alpha: Fraction of concepts realized in the seen region.
        concept_seen: Per-concept flag; true when the concept maps into the seen region.
        tag: ``seen`` or ``unseen``.
        family: Family id; languages of one family share a base cipher.
    """

    language_id: str
    cipher: np.ndarray
    alpha: float
    concept_seen: np.ndarray
    tag: str
    family: int
    layout: VocabularyLayout

    @property
    def seen(self):
        return self.tag == SEEN

    def encode(self, concepts):
        concepts = np.asarray(concepts, dtype=np.int64)
        offset = np.where(
            self.concept_seen[concepts], self.layout.seen_range[0], self.layout.unseen_range[0]
        )
        return offset + self.cipher[concepts]

    def decode(self, token_ids):
        """Inverse of ``encode``; raises RangeError for ids no concept maps to."""
        token_ids = np.asarray(token_ids, dtype=np.int64)
        inverse = np.argsort(self.cipher)
        seen_low, seen_high = self.layout.seen_range
        in_seen = (token_ids >= seen_low) & (token_ids < seen_high)
        slots = np.where(in_seen, token_ids - seen_low, token_ids - self.layout.unseen_range[0])
        if slots.size and (slots.min() < 0 or slots.max() >= self.layout.concept_vocab):
            raise RangeError(f'token ids outside the {self.language_id} vocabulary')
        concepts = inverse[slots]
        if not np.array_equal(self.concept_seen[concepts], in_seen):
            raise RangeError(f'token ids in the wrong vocabulary region for {self.language_id}')
        return concepts


def _diverge(base, divergence, rng):
    cipher = base.copy()
    count = int(round(divergence * base.size))
    if count >= 2:
        slots = rng.choice(base.size, size=count, replace=False)
        cipher[slots] = cipher[rng.permutation(slots)]
    return cipher


def _concept_mask(alpha, concept_vocab, rng):
    mask = np.zeros(concept_vocab, dtype=bool)
    n_seen = int(round(alpha * concept_vocab))
    mask[rng.choice(concept_vocab, size=n_seen, replace=False)] = True
    return mask


def generate_language_family(seed, n_seen, n_unseen, alignment_profile=None, *,
                             concept_vocab=64, vocab_size=None, n_families=2, divergence=0.25):
    """
    Generate ``n_seen`` seen and ``n_unseen`` unseen languages.

    Languages are dealt round-robin into ``n_families`` families. A family
    shares a base cipher; each member reshuffles a ``divergence`` fraction of
    it. The result is a pure function of the arguments.
    """
    if n_seen + n_unseen < 2:
        raise ConfigurationError(f'a family needs at least two languages, got {n_seen + n_unseen}')
    if n_seen < 0 or n_unseen < 0:
        raise ConfigurationError('language counts must be non-negative')
    if not 0.0 <= divergence <= 1.0:
        raise ConfigurationError(f'divergence must lie in [0, 1], got {divergence}')
    profile = alignment_profile or AlignmentProfile()
    layout = VocabularyLayout(concept_vocab, vocab_size)
    root = SeededRng(seed).child('languages')
    n_families = max(1, min(n_families, n_seen + n_unseen))
    bases = [root.child('family', index).permutation(concept_vocab) for index in range(n_families)]

    languages = []
    specs = [(SEEN, index) for index in range(n_seen)]
    specs += [(UNSEEN, index) for index in range(n_unseen)]
    for position, (tag, index) in enumerate(specs):
        language_id = f'syn-{tag[0]}{index:02d}'
        rng = root.child(language_id)
        family = position % n_families
        if tag == SEEN:
            alpha = profile.sample_seen(rng)
        else:
            alpha = profile.sample_unseen(rng)
        concept_seen = _concept_mask(alpha, concept_vocab, rng)
        languages.append(SyntheticLanguage(
            language_id=language_id,
            cipher=_diverge(bases[family], divergence, rng),
            alpha=float(concept_seen.mean()),
            concept_seen=concept_seen,
            tag=tag,
            family=family,
            layout=layout,
        ))
    log.debug('Generated %d languages (%d seen) over %d concepts',
              len(languages), n_seen, concept_vocab)
    return languages
