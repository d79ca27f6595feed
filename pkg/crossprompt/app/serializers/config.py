import copy
import logging

import yaml
from django.conf import settings
from rest_framework import serializers
from rest_framework.exceptions import ValidationError

from crossprompt.app.constants import DEFAULT_SWEEP_METHODS, DEFAULT_SWEEP_SOURCE_SETS
from crossprompt.app.exceptions import CacheIOError, ConfigurationError
from crossprompt.app.models.experiment import ExperimentConfig
from crossprompt.app.models.prompts import parse_method_label
from crossprompt.app.optim import PhasePlan

log = logging.getLogger(__name__)

__all__ = (
    'BackboneConfigSerializer',
    'PhasePlanSerializer',
    'SweepSerializer',
    'ExperimentConfigSerializer',
    'load_experiment_config',
    'apply_overrides',
)


class BackboneConfigSerializer(serializers.Serializer):
    d_model = serializers.IntegerField(min_value=1)
    n_layers = serializers.IntegerField(min_value=1)
    n_heads = serializers.IntegerField(min_value=1)
    d_ffn = serializers.IntegerField(min_value=1)
    max_positions = serializers.IntegerField(min_value=1)
    vocab_size = serializers.IntegerField(min_value=3, allow_null=True, default=None)
    n_classes = serializers.IntegerField(min_value=2, allow_null=True, default=None)
    total_params_override = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    layer_norm_eps = serializers.FloatField(default=1e-5)

    def validate_layer_norm_eps(self, value):
        if not value > 0:
            raise ValidationError('layer_norm_eps must be positive')
        return value

    def validate(self, data):
        if data['d_model'] % data['n_heads']:
            raise ValidationError(detail={
                'n_heads': f"n_heads {data['n_heads']} does not divide d_model {data['d_model']}"})
        return data


class PhasePlanSerializer(serializers.Serializer):
    """Phase overrides; anything left out keeps the protocol default."""

    max_steps = serializers.IntegerField(min_value=1, required=False)
    batch_size = serializers.IntegerField(min_value=1, required=False)
    patience = serializers.IntegerField(min_value=0, required=False)
    n_cycles = serializers.IntegerField(min_value=1, required=False)
    min_lr = serializers.FloatField(min_value=0.0, required=False)

    def validate(self, data):
        if 'max_steps' in data and data.get('n_cycles', 1) > data['max_steps']:
            raise ValidationError(detail={'n_cycles': 'more cycles than steps'})
        return data


class SweepSerializer(serializers.Serializer):
    methods = serializers.ListField(child=serializers.CharField(), allow_empty=False,
                                    default=list(DEFAULT_SWEEP_METHODS))
    source_sets = serializers.ListField(child=serializers.CharField(), allow_empty=False,
                                        default=list(DEFAULT_SWEEP_SOURCE_SETS))

    def validate_methods(self, methods):
        for label in methods:
            try:
                parse_method_label(label)
            except ConfigurationError as exc:
                raise ValidationError(str(exc))
        return methods


class ExperimentConfigSerializer(serializers.Serializer):
    name = serializers.RegexField(r'^[A-Za-z0-9_.+-]+$', default='experiment')
    backbone = BackboneConfigSerializer()
    method = serializers.CharField(default='XPE')
    prompt_length = serializers.IntegerField(min_value=1, required=False)
    bottleneck = serializers.IntegerField(min_value=1, required=False)
    sources = serializers.JSONField(default='compact-3')
    targets = serializers.ListField(child=serializers.CharField(), required=False,
                                    allow_null=True, allow_empty=False)
    grouping = serializers.CharField(required=False, allow_null=True)
    seeds = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False,
                                  allow_null=True, allow_empty=False)
    source_phase = PhasePlanSerializer(required=False)
    target_phase = PhasePlanSerializer(required=False)
    data = serializers.DictField(required=False)
    output_dir = serializers.CharField(required=False, allow_null=True)
    pretrain_steps = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    backbone_snapshot = serializers.CharField(required=False, allow_null=True)
    sweep = SweepSerializer(required=False)

    def validate_method(self, label):
        try:
            parse_method_label(label)
        except ConfigurationError as exc:
            raise ValidationError(str(exc))
        return label.upper()

    def validate_sources(self, sources):
        if isinstance(sources, str) and sources:
            return sources
        if isinstance(sources, list) and sources and all(isinstance(s, str) for s in sources):
            return sources
        raise ValidationError('sources must be a source set name or a list of language ids')

    def validate_seeds(self, seeds):
        if seeds is not None and len(set(seeds)) != len(seeds):
            raise ValidationError('seeds must be distinct')
        return seeds

    def create(self, validated_data):
        data = dict(validated_data.get('data') or {})
        if validated_data.get('grouping'):
            data['grouping'] = validated_data['grouping']
        sweep = validated_data.get('sweep') or {}
        return ExperimentConfig(
            name=validated_data['name'],
            backbone=dict(validated_data['backbone']),
            method=validated_data['method'],
            prompt_length=validated_data.get('prompt_length', settings.PROMPT_LENGTH),
            bottleneck=validated_data.get('bottleneck', settings.ENCODER_BOTTLENECK),
            sources=validated_data['sources'],
            targets=validated_data.get('targets'),
            seeds=validated_data.get('seeds'),
            source_phase=PhasePlan.source(**validated_data.get('source_phase', {})),
            target_phase=PhasePlan.target(**validated_data.get('target_phase', {})),
            data=data,
            output_dir=validated_data.get('output_dir'),
            pretrain_steps=validated_data.get('pretrain_steps'),
            backbone_snapshot=validated_data.get('backbone_snapshot'),
            sweep_methods=list(sweep.get('methods', DEFAULT_SWEEP_METHODS)),
            sweep_source_sets=list(sweep.get('source_sets', DEFAULT_SWEEP_SOURCE_SETS)),
            raw=copy.deepcopy(self.initial_data),
        )


def _parse_override(item):
    key, sep, value = item.partition('=')
    if not sep or not key:
        raise ConfigurationError(f'override {item!r} is not of the form key.path=value')
    try:
        return key.split('.'), yaml.safe_load(value)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f'override {item!r}: {exc}')


def apply_overrides(document, overrides):
    """Set ``key.path=value`` overrides into a nested dict; values are parsed as YAML."""
    document = copy.deepcopy(document or {})
    for item in overrides or ():
        path, value = _parse_override(item)
        node = document
        for key in path[:-1]:
            child = node.get(key)
            if not isinstance(child, dict):
                child = node[key] = {}
            node = child
        node[path[-1]] = value
    return document


def load_experiment_config(path=None, overrides=(), document=None):
    """
    Read, override and validate an experiment configuration.

    Raises ConfigurationError with the serializer's field errors.
    """
    if document is None and path is not None:
        try:
            with open(path, encoding='utf-8') as handle:
                document = yaml.safe_load(handle) or {}
        except OSError as exc:
            raise CacheIOError(path, exc.strerror or str(exc))
        except yaml.YAMLError as exc:
            raise ConfigurationError(f'{path}: invalid YAML ({exc})')
    if not isinstance(document or {}, dict):
        raise ConfigurationError(f'{path}: configuration must be a mapping')
    document = apply_overrides(document, overrides)
    serializer = ExperimentConfigSerializer(data=document)
    if not serializer.is_valid():
        raise ConfigurationError(f'invalid configuration: {_flatten_errors(serializer.errors)}')
    return serializer.save()


def _flatten_errors(errors, prefix=''):
    parts = []
    for field, detail in errors.items():
        name = f'{prefix}{field}'
        if isinstance(detail, dict):
            parts.append(_flatten_errors(detail, f'{name}.'))
        else:
            parts.append(f'{name}: {" ".join(str(message) for message in detail)}')
    return '; '.join(parts)
