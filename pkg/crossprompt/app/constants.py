import enum


class PromptMethod(enum.Enum):
    SPT = 'SPT'
    XPE = 'XPE'
    DUAL = 'DUAL'


class PhaseKind(enum.Enum):
    SOURCE = 'source'
    TARGET = 'target'


class Supervision(enum.Enum):
    ZERO_SHOT = 'zero-shot'
    SEQUENTIAL = 'sequential'


class ReportFormat(enum.Enum):
    CSV = 'csv'
    STRUCTURED_TEXT = 'structured-text'
    MARKDOWN_TABLE = 'markdown-table'


class Split(enum.Enum):
    TRAIN = 'train'
    DEV = 'dev'
    TEST = 'test'


PAD_TOKEN_ID = 0
CLS_TOKEN_ID = 1
N_SPECIAL_TOKENS = 2

# Target group names, in report row order.
GROUP_ALL_WO_SOURCES = 'All-wo-sources'
GROUP_SEEN_WO_SOURCES = 'Seen-wo-sources'
GROUP_UNSEEN = 'Unseen'
GROUP_LOW_PERFORMING = 'LowPerforming'
TARGET_GROUPS = (
    GROUP_ALL_WO_SOURCES,
    GROUP_SEEN_WO_SOURCES,
    GROUP_UNSEEN,
    GROUP_LOW_PERFORMING,
)

# Method labels compared in the main results table.
DEFAULT_SWEEP_METHODS = ('SPT', 'DUAL-30', 'DUAL-70', 'XPE')
DEFAULT_SWEEP_SOURCE_SETS = ('compact-3', 'mid-7', 'seen-all')

PROMPT_PARAM_GROUP = 'soft-prompt'
ENCODER_PARAM_GROUP = 'encoder+head'
