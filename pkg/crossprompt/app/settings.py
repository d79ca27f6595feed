import os

SECRET_KEY = os.getenv('CROSSPROMPT_SECRET_KEY', 'crossprompt-not-served')

INSTALLED_APPS = [
    'rest_framework',
    'crossprompt.app',
]

# Nothing is persisted through the ORM; run records are files under OUTPUT_ROOT.
DATABASES = {}

USE_TZ = True

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'crossprompt': {
            'handlers': ['console'],
            'level': 'INFO',
        },
        # Training records go to per-run files only, see common.records.
        'crossprompt.training.records': {
            'handlers': [],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Output root for campaigns, overridable with CROSSPROMPT_OUTPUT_ROOT
OUTPUT_ROOT = 'runs'

# Soft prompt layout
# -----------------

PROMPT_LENGTH = 20
PROMPT_INIT_STD = 0.02
ENCODER_BOTTLENECK = 256

# Backbone
# --------

PADDING_MASK_VALUE = -1e9
LAYER_NORM_EPS = 1e-5
WEIGHT_INIT_STD = 0.02
PRETRAIN_STEPS = 3000
PRETRAIN_LR = 2e-3
PRETRAIN_WEIGHT_DECAY = 0.0
PRETRAIN_SEED = 0
# Reference backbone size used for the trainable fraction in `params`
REFERENCE_TOTAL_PARAMS = 550000000

# Optimization protocol
# ---------------------

BATCH_SIZE = 32
SOURCE_MAX_STEPS = 24000
TARGET_MAX_STEPS = 6000
SCHEDULE_CYCLES = 2
SCHEDULE_MIN_LR = 0.0
SOURCE_PATIENCE = 20
TARGET_PATIENCE = 30

PROMPT_LR = 5e-3
PROMPT_WEIGHT_DECAY = 0.0
ENCODER_LR = 5e-5
ENCODER_WEIGHT_DECAY = 0.1

# Keep the head between the source and target phases
REINIT_HEAD_FOR_TARGET = False

ADAFACTOR_EPS = (1e-30, 1e-3)
ADAFACTOR_CLIP_THRESHOLD = 1.0
ADAFACTOR_DECAY_RATE = -0.8

# Campaigns
# ---------

ZERO_SHOT_SEEDS = 10
SEQUENTIAL_SEEDS = 6
VALIDATION_FRACTION = 0.1
TEST_FRACTION = 0.1

# Data
# ----

LOW_PERFORMANCE_THRESHOLD = 0.60
HASH_VOCABULARY_BINS = 30000
TSV_TEXT_COLUMNS = ['text', 'sentence', 'content']
TSV_CATEGORY_COLUMNS = ['category', 'label', 'topic']
SUPERVISED_TARGETS_PER_GROUP = 23

# HERE STARTS DYNACONF EXTENSION LOAD
import dynaconf  # noqa: E402
settings = dynaconf.DjangoDynaconf(  # noqa
    __name__,
    ENVVAR_PREFIX_FOR_DYNACONF='CROSSPROMPT',
)
# HERE ENDS DYNACONF EXTENSION LOAD
