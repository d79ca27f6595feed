import glob
import json
import logging
import os

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from crossprompt.app.common import metrics
from crossprompt.app.constants import Supervision
from crossprompt.app.exceptions import CacheIOError, FormatError
from crossprompt.app.models.experiment import RunResult

log = logging.getLogger(__name__)

__all__ = (
    'RunResultSerializer',
    'write_run_result',
    'read_run_results',
)


class RunResultSerializer(serializers.Serializer):
    method = serializers.CharField()
    source_set = serializers.CharField()
    target = serializers.CharField()
    seed = serializers.IntegerField(min_value=0)
    supervision = serializers.ChoiceField(choices=[choice.value for choice in Supervision])
    accuracy = serializers.FloatField(min_value=0.0, max_value=1.0)
    steps = serializers.IntegerField(min_value=0)
    wall_time = serializers.FloatField(min_value=0.0)
    n_test = serializers.IntegerField(min_value=0, default=0)

    def create(self, validated_data):
        return RunResult(**validated_data)


def result_filename(result):
    return (f'{result.supervision}__{result.method}__{result.source_set}__'
            f'{result.target}__seed{result.seed}.json')


def write_run_result(result, directory, config_echo=None):
    """One JSON record per result; the experiment configuration rides along."""
    payload = dict(RunResultSerializer(result).data)
    if config_echo is not None:
        payload['config'] = config_echo
    path = os.path.join(directory, result_filename(result))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, 'wb') as handle:
            handle.write(JSONRenderer().render(payload))
            handle.write(b'\n')
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    return path


def read_run_results(directory, strict=False):
    """
    Every result record under ``directory``, sorted by file name.

    A JSON file that is not a valid run result is skipped with a warning, or
    raises FormatError when ``strict``.
    """
    results = []
    for path in sorted(glob.glob(os.path.join(directory, '**', '*.json'), recursive=True)):
        try:
            with open(path, encoding='utf-8') as handle:
                payload = json.load(handle)
        except OSError as exc:
            raise CacheIOError(path, exc.strerror or str(exc))
        except ValueError as exc:
            raise FormatError(f'{path}: invalid JSON ({exc})')
        serializer = RunResultSerializer(data=payload)
        if not serializer.is_valid():
            if strict:
                raise FormatError(f'{path}: not a run result ({serializer.errors})')
            metrics.run_result_records_skipped.inc()
            log.warning('Skipping %s: not a run result (%s)', path, serializer.errors)
            continue
        results.append(serializer.save())
    return results
