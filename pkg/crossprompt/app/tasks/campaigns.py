"""Multi-seed campaigns: zero-shot transfer, sequential adaptation and sweeps.

A campaign writes into its output directory::

    <output_dir>/config.yaml                  configuration echo
    <output_dir>/configs/<cell>.yaml          effective configuration of each sweep cell
    <output_dir>/backbone.safetensors         the frozen backbone, when pretrained here
    <output_dir>/logs/<run>.jsonl             one training log per seed
    <output_dir>/prompts/<run>.safetensors    exported prompt caches
    <output_dir>/results/<supervision>/*.json one record per RunResult
"""
import collections
import logging
import os
import time

import yaml

from crossprompt.app.common import metrics
from crossprompt.app.common.records import training_log
from crossprompt.app.constants import Split, Supervision
from crossprompt.app.data.grouping import resolve_source_set, select_supervised_targets
from crossprompt.app.data.suites import load_suite
from crossprompt.app.evaluation.evaluate import evaluate
from crossprompt.app.exceptions import CacheIOError, ConfigurationError, ContractError
from crossprompt.app.models import (
    ClassificationHead,
    EncoderStack,
    PromptComponents,
    PromptedClassifier,
    export_cached_prompt,
)
from crossprompt.app.models.experiment import RunResult
from crossprompt.app.optim import AdafactorConfig
from crossprompt.app.serializers.results import write_run_result
from crossprompt.app.tensor import SeededRng

from .pretraining import pretrain_backbone
from .training import adapt_target, train_source

log = logging.getLogger(__name__)

__all__ = (
    'CampaignContext',
    'prepare_campaign',
    'obtain_backbone',
    'pretraining_languages',
    'build_model',
    'source_datasets',
    'run_zero_shot',
    'run_sequential',
    'sweep',
    'audit_zero_shot_purity',
)

BACKBONE_FILE = 'backbone.safetensors'
CONFIG_ECHO = 'config.yaml'

# pretrained_on: languages whose suite datasets fed the backbone
CampaignContext = collections.namedtuple(
    'CampaignContext', ['suite', 'backbone_config', 'stack', 'checksum', 'pretrained_on'],
    defaults=(frozenset(),),
)


def pretraining_languages(suite, source_sets):
    """
    Suite languages a freshly pretrained backbone may read.

    Empty when the suite has separate pretraining corpora. Otherwise the seen
    languages that belong to every source set in ``source_sets``, so that no
    zero-shot target of any campaign sharing the backbone feeds it.
    """
    if suite.pretraining:
        return frozenset()
    members = [resolve_source_set(suite.grouping, source_set) for source_set in source_sets]
    languages = frozenset.intersection(*members) & suite.grouping.seen if members else frozenset()
    if not languages:
        raise ConfigurationError(
            'the suite has no pretraining corpora and no seen language is shared by every '
            'source set; configure backbone_snapshot instead'
        )
    return languages


def obtain_backbone(config, suite, output_dir=None, languages=None):
    """
    Load ``backbone_snapshot`` when configured, else pretrain on the suite's seen languages.

    ``languages`` restricts which suite datasets pretraining reads. A freshly
    pretrained backbone is written to ``output_dir`` when given.
    Returns ``(stack, checksum)``.
    """
    backbone_config = config.backbone_config(suite)
    if config.backbone_snapshot:
        stack = EncoderStack.load(config.backbone_snapshot, backbone_config)
        log.info('Loaded frozen backbone from %s', config.backbone_snapshot)
        return stack, stack.checksum()
    stack, checksum = pretrain_backbone(backbone_config, suite, steps=config.pretrain_steps,
                                        languages=languages)
    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
        stack.save(os.path.join(output_dir, BACKBONE_FILE))
    return stack, checksum


def prepare_campaign(config, suite=None, context=None, source_sets=None):
    """
    Load the suite and the frozen backbone once; sweeps hand the result to every cell.

    ``source_sets`` lists every source set that will train on the backbone,
    ``[config.sources]`` by default.
    """
    if context is not None:
        return context
    output_dir = config.resolved_output_dir()
    suite = suite if suite is not None else load_suite(config.data)
    pretrained_on = frozenset()
    if not config.backbone_snapshot:
        pretrained_on = pretraining_languages(suite, source_sets or [config.sources])
    stack, checksum = obtain_backbone(config, suite, output_dir,
                                      languages=pretrained_on or None)
    return CampaignContext(suite, config.backbone_config(suite), stack, checksum, pretrained_on)


def build_model(config, context, rng):
    """A fresh head and fresh prompt components over the shared frozen stack."""
    method, fraction = config.parsed_method
    backbone_config = context.backbone_config
    head = ClassificationHead.initialize(backbone_config, rng.child('head'))
    components = PromptComponents.build(
        method, fraction, config.prompt_length, backbone_config.d_model, config.bottleneck,
        rng.child('prompt'),
    )
    return PromptedClassifier(backbone_config, context.stack, head, components)


def source_datasets(config, suite):
    members = resolve_source_set(suite.grouping, config.sources)
    return collections.OrderedDict(
        (language, suite.dataset(language)) for language in suite.grouping.ordered(members)
    )


def _run_name(supervision, config, seed):
    return f'{supervision.value}__{config.method}__{config.source_set_id}__seed{seed}'


def _write_config_echo(config, output_dir, name=CONFIG_ECHO):
    path = os.path.join(output_dir, name)
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(config.raw, handle, sort_keys=False)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))


def _log_header(records, config, supervision, checksum):
    records.header(
        supervision=supervision.value,
        method=config.method,
        source_set=config.source_set_id,
        prompt_length=config.prompt_length,
        bottleneck=config.bottleneck,
        backbone_checksum=checksum,
        source_phase=config.source_phase.as_dict(),
        target_phase=config.target_phase.as_dict(),
        **AdafactorConfig.from_settings().as_dict(),
    )


def snapshot_reads(suite):
    """Copy every dataset's split read counts."""
    return {language: collections.Counter(dataset.reads)
            for language, dataset in suite.datasets.items()}


def audit_zero_shot_purity(suite, targets, sources, baseline=None, pretrained_on=()):
    """
    Raise ContractError when a zero-shot target's train or dev split was read.

    Reads are counted since ``baseline`` (a ``snapshot_reads`` result), or in
    total without one. A target named in ``pretrained_on`` fed the backbone and
    fails too. Targets that are also sources are skipped.
    """
    baseline = baseline or {}
    leaks = {}
    for language in targets:
        if language in sources:
            continue
        reads = suite.dataset(language).reads - baseline.get(language, collections.Counter())
        touched = {split.value: reads[split.value] for split in (Split.TRAIN, Split.DEV)
                   if reads[split.value]}
        if language in pretrained_on:
            touched['pretraining'] = True
        if touched:
            leaks[language] = touched
    if leaks:
        raise ContractError(f'zero-shot targets had training data read: {leaks}')
    log.info('Zero-shot purity audit passed for %d targets',
             len([language for language in targets if language not in sources]))


def run_zero_shot(config, suite=None, context=None, config_echo=CONFIG_ECHO):
    """
    Train one prompt per seed on the source set and evaluate it on every target.

    Targets default to every language of the grouping outside the source set.
    A seed that raises is logged and skipped; the other seeds proceed. Every
    split read from here on, backbone pretraining included, is audited.
    """
    known = context.suite if context is not None else suite
    baseline = snapshot_reads(known) if known is not None else {}
    context = prepare_campaign(config, suite, context)
    suite = context.suite
    output_dir = config.resolved_output_dir()
    _write_config_echo(config, output_dir, config_echo)
    sources = source_datasets(config, suite)
    targets = config.targets or suite.grouping.ordered(suite.grouping.all_languages - set(sources))
    for language in targets:
        suite.dataset(language)
    overlap = [language for language in targets if language in sources]
    if overlap:
        log.warning('Zero-shot targets that are also sources: %s', overlap)

    results = []
    seeds = config.seeds_for(Supervision.ZERO_SHOT)
    log.info('Zero-shot campaign %s %s: %d seeds, %d sources, %d targets', config.method,
             config.source_set_id, len(seeds), len(sources), len(targets))
    for seed in seeds:
        name = _run_name(Supervision.ZERO_SHOT, config, seed)
        try:
            results.extend(_zero_shot_seed(config, context, sources, targets, seed, name))
        except Exception:
            metrics.seed_failures.inc()
            log.exception('Seed %d of %s failed', seed, name)
    audit_zero_shot_purity(suite, targets, sources, baseline, context.pretrained_on)
    return results


def _zero_shot_seed(config, context, sources, targets, seed, name):
    output_dir = config.resolved_output_dir()
    rng = SeededRng(seed)
    started = time.monotonic()
    model = build_model(config, context, rng)
    os.makedirs(os.path.join(output_dir, 'logs'), exist_ok=True)
    with training_log(os.path.join(output_dir, 'logs', f'{name}.jsonl'), seed=seed) as records:
        _log_header(records, config, Supervision.ZERO_SHOT, context.checksum)
        outcome = train_source(model, sources, config.source_phase, rng, records)
    os.makedirs(os.path.join(output_dir, 'prompts'), exist_ok=True)
    cached = export_cached_prompt(
        model.components,
        {'source_set': config.source_set_id, 'seed': seed, 'creation_step': outcome.best_step},
        os.path.join(output_dir, 'prompts', f'{name}.safetensors'),
    )

    results = []
    for language in targets:
        dataset = context.suite.dataset(language)
        accuracy = evaluate(context.stack, model.head, cached, dataset)
        result = _result(config, Supervision.ZERO_SHOT, language, seed, accuracy,
                         outcome.steps, time.monotonic() - started, dataset)
        write_run_result(result, os.path.join(output_dir, 'results', Supervision.ZERO_SHOT.value),
                         config.raw)
        results.append(result)
    log.info('Seed %d: mean zero-shot accuracy %.4f over %d targets', seed,
             sum(result.accuracy for result in results) / max(1, len(results)), len(results))
    return results


def _result(config, supervision, language, seed, accuracy, steps, wall_time, dataset):
    return RunResult(
        method=config.method,
        source_set=config.source_set_id,
        target=language,
        seed=seed,
        supervision=supervision.value,
        accuracy=float(accuracy),
        steps=int(steps),
        wall_time=float(wall_time),
        n_test=dataset.split_sizes()[Split.TEST.value],
    )


def run_sequential(config, suite=None, context=None):
    """
    Source phase once per seed, then one adaptation per target from a copy of that state.

    Targets default to a balanced seen/unseen subset outside the source set.
    """
    context = prepare_campaign(config, suite, context)
    suite = context.suite
    output_dir = config.resolved_output_dir()
    _write_config_echo(config, output_dir)
    sources = source_datasets(config, suite)
    targets = config.targets or select_supervised_targets(
        suite.grouping, rng=SeededRng(0).child('supervised-targets'), exclude=set(sources)
    )
    if not targets:
        raise ConfigurationError('sequential campaign has no target languages')
    for language in targets:
        suite.dataset(language)

    results = []
    seeds = config.seeds_for(Supervision.SEQUENTIAL)
    log.info('Sequential campaign %s %s: %d seeds, %d targets', config.method,
             config.source_set_id, len(seeds), len(targets))
    for seed in seeds:
        name = _run_name(Supervision.SEQUENTIAL, config, seed)
        try:
            results.extend(_sequential_seed(config, context, sources, targets, seed, name))
        except Exception:
            metrics.seed_failures.inc()
            log.exception('Seed %d of %s failed', seed, name)
    return results


def _sequential_seed(config, context, sources, targets, seed, name):
    output_dir = config.resolved_output_dir()
    rng = SeededRng(seed)
    started = time.monotonic()
    model = build_model(config, context, rng)
    results = []
    os.makedirs(os.path.join(output_dir, 'logs'), exist_ok=True)
    os.makedirs(os.path.join(output_dir, 'prompts'), exist_ok=True)
    with training_log(os.path.join(output_dir, 'logs', f'{name}.jsonl'), seed=seed) as records:
        _log_header(records, config, Supervision.SEQUENTIAL, context.checksum)
        source_outcome = train_source(model, sources, config.source_phase, rng, records)
        source_time = time.monotonic() - started
        for language in targets:
            target_started = time.monotonic()
            dataset = context.suite.dataset(language)
            adapted = model.clone()
            outcome = adapt_target(adapted, dataset, config.target_phase, rng, records,
                                   sources=sources)
            cached = export_cached_prompt(
                adapted.components,
                {'source_set': f'{config.source_set_id}>{language}', 'seed': seed,
                 'creation_step': outcome.best_step},
                os.path.join(output_dir, 'prompts', f'{name}__{language}.safetensors'),
            )
            accuracy = evaluate(context.stack, adapted.head, cached, dataset)
            result = _result(config, Supervision.SEQUENTIAL, language, seed, accuracy,
                             source_outcome.steps + outcome.steps,
                             source_time + time.monotonic() - target_started, dataset)
            write_run_result(
                result, os.path.join(output_dir, 'results', Supervision.SEQUENTIAL.value),
                config.raw,
            )
            results.append(result)
    return results


def sweep(config, suite=None, context=None):
    """
    Zero-shot campaigns over every configured method and source set.

    The suite and the frozen backbone are shared by every cell; all results
    land in the one output directory. Each cell echoes its own effective
    configuration under ``configs/``.
    """
    context = prepare_campaign(config, suite, context, source_sets=config.sweep_source_sets)
    _write_config_echo(config, config.resolved_output_dir())
    results = []
    for source_set in config.sweep_source_sets:
        for method in config.sweep_methods:
            log.info('Sweep cell %s / %s', method, source_set)
            cell = config.with_overrides(method=method.upper(), sources=source_set)
            echo = os.path.join('configs', f'{cell.method}__{cell.source_set_id}.yaml')
            results.extend(run_zero_shot(cell, context=context, config_echo=echo))
    return results
