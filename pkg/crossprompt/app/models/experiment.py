import copy
import dataclasses
import os
from typing import List, Optional, Union

from django.conf import settings

from crossprompt.app.constants import Supervision
from crossprompt.app.optim import PhasePlan

from .backbone import BackboneConfig
from .prompts import parse_method_label

__all__ = ('ExperimentConfig', 'RunResult')

# fields whose overrides are mirrored into the raw configuration echo
ECHOED_FIELDS = (
    'method', 'sources', 'targets', 'seeds', 'prompt_length', 'bottleneck',
    'output_dir', 'pretrain_steps', 'backbone_snapshot',
)


@dataclasses.dataclass
class ExperimentConfig:
    """
    A validated experiment, built by ``ExperimentConfigSerializer``.

    Fields:
        name: Run name, used for the default output directory.
        backbone: Backbone shape; vocabulary size and class count may be left
            to the data suite (``None``) until ``bind_suite``.
        method: Method label (SPT, XPE, DUAL-<pct>).
        prompt_length: Token budget L.
        bottleneck: Prompt encoder width r.
        sources: Source set name or explicit language list.
        targets: Target languages; ``None`` picks them from the grouping.
        seeds: Seeds; ``None`` uses the campaign default count.
        source_phase: Source ``PhasePlan``.
        target_phase: Target ``PhasePlan``.
        data: Data suite section (synthetic parameters or TSV directory).
        output_dir: Where results go; defaults to ``OUTPUT_ROOT/name``.
        pretrain_steps: Surrogate pretraining budget.
        backbone_snapshot: Existing frozen backbone to load instead of pretraining.
        sweep_methods: Method labels of the sweep grid.
        sweep_source_sets: Source sets of the sweep grid.
        raw: The configuration as supplied, echoed into every output.
    """

    name: str
    backbone: dict
    method: str
    prompt_length: int
    bottleneck: int
    sources: Union[str, List[str]]
    targets: Optional[List[str]]
    seeds: Optional[List[int]]
    source_phase: PhasePlan
    target_phase: PhasePlan
    data: dict
    output_dir: Optional[str] = None
    pretrain_steps: Optional[int] = None
    backbone_snapshot: Optional[str] = None
    sweep_methods: List[str] = dataclasses.field(default_factory=list)
    sweep_source_sets: List[str] = dataclasses.field(default_factory=list)
    raw: dict = dataclasses.field(default_factory=dict)

    @property
    def parsed_method(self):
        return parse_method_label(self.method)

    @property
    def source_set_id(self):
        if isinstance(self.sources, str):
            return self.sources
        return '+'.join(self.sources)

    def resolved_output_dir(self):
        return self.output_dir or os.path.join(settings.OUTPUT_ROOT, self.name)

    def backbone_config(self, suite=None):
        """The ``BackboneConfig``, with vocabulary size and K taken from ``suite`` when unset."""
        values = dict(self.backbone)
        if suite is not None:
            if values.get('vocab_size') is None:
                values['vocab_size'] = suite.vocab_size
            if values.get('n_classes') is None:
                values['n_classes'] = suite.n_classes
        return BackboneConfig(**values)

    def seeds_for(self, supervision):
        if self.seeds:
            return list(self.seeds)
        if supervision is Supervision.SEQUENTIAL:
            return list(range(settings.SEQUENTIAL_SEEDS))
        return list(range(settings.ZERO_SHOT_SEEDS))

    def with_overrides(self, **changes):
        """A copy with ``changes`` applied; overridden echoed fields are written into ``raw``."""
        raw = copy.deepcopy(self.raw)
        for key, value in changes.items():
            if key in ECHOED_FIELDS:
                raw[key] = copy.deepcopy(value)
        changes.setdefault('raw', raw)
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class RunResult:
    """
    Accuracy of one (method, source set, target, seed) cell.

    Fields:
        accuracy: ``correct / n_test`` over the full target test split.
        steps: Optimizer steps of the source phase plus the target phase.
        wall_time: Seconds from the start of the seed's training to evaluation.
    """

    method: str
    source_set: str
    target: str
    seed: int
    supervision: str
    accuracy: float
    steps: int
    wall_time: float
    n_test: int = 0

    def as_dict(self):
        return dataclasses.asdict(self)
