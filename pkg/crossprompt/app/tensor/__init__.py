from .core import Record, Tape, Tensor, backward, float_dtype, precision  # noqa: F401
from .rng import SeededRng  # noqa: F401
from .gradcheck import finite_diff_check  # noqa: F401
from . import ops  # noqa: F401
