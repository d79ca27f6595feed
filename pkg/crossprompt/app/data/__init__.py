from .datasets import (
    Dataset,
    LabeledExample,
    collate,
)
from .grouping import (
    LanguageGrouping,
    classify_low_performing,
    load_grouping,
    resolve_groups,
    select_supervised_targets,
)
from .languages import (
    AlignmentProfile,
    SyntheticLanguage,
    VocabularyLayout,
    generate_language_family,
)
from .oracles import (
    FrequencyClassifier,
    reference_accuracy,
)
from .suites import (
    Suite,
    SyntheticSuiteConfig,
    build_synthetic_suite,
    load_suite,
    write_suite,
)
from .topics import (
    TopicTask,
    generate_dataset,
)
from .tsv import (
    HashVocabulary,
    IdVocabulary,
    load_tsv_dataset,
    write_tsv_dataset,
)

__all__ = (
    'Dataset',
    'LabeledExample',
    'collate',
    'LanguageGrouping',
    'classify_low_performing',
    'load_grouping',
    'resolve_groups',
    'select_supervised_targets',
    'AlignmentProfile',
    'SyntheticLanguage',
    'VocabularyLayout',
    'generate_language_family',
    'FrequencyClassifier',
    'reference_accuracy',
    'Suite',
    'SyntheticSuiteConfig',
    'build_synthetic_suite',
    'load_suite',
    'write_suite',
    'TopicTask',
    'generate_dataset',
    'HashVocabulary',
    'IdVocabulary',
    'load_tsv_dataset',
    'write_tsv_dataset',
)
