"""Result tables.

Rows are the target groups, columns the method / source set cells. Cells
hold the cross-seed mean accuracy in percent: full precision in csv, one
decimal in markdown. Empty groups render as ``--``.
"""
import collections
import logging
import os

import tablib
import yaml

from crossprompt.app.constants import TARGET_GROUPS, ReportFormat
from crossprompt.app.exceptions import CacheIOError, ConfigurationError

from .aggregate import cell_key, language_means

log = logging.getLogger(__name__)

__all__ = (
    'build_group_table',
    'build_language_table',
    'emit_report',
    'emit_language_report',
    'render',
)

EMPTY_CELL = '--'
REPORT_EXTENSIONS = {
    ReportFormat.CSV: 'csv',
    ReportFormat.STRUCTURED_TEXT: 'yaml',
    ReportFormat.MARKDOWN_TABLE: 'md',
}


def _percent(value, report_format):
    if value is None:
        return EMPTY_CELL
    if report_format is ReportFormat.MARKDOWN_TABLE:
        return f'{100 * value:.1f}'
    return repr(100 * value)


def _column_name(supervision, method, source_set, supervisions):
    name = f'{method} / {source_set}'
    if len(supervisions) > 1:
        name = f'{name} ({supervision})'
    return name


def build_group_table(aggregates, report_format=ReportFormat.CSV):
    """A ``tablib.Dataset`` with one row per target group and one column per cell."""
    cells = collections.OrderedDict()
    for item in aggregates:
        cells.setdefault((item.supervision, item.method, item.source_set), {})[item.group] = item
    supervisions = {key[0] for key in cells}
    table = tablib.Dataset(
        headers=['group'] + [_column_name(*key, supervisions) for key in cells]
    )
    groups = [group for group in TARGET_GROUPS
              if any(group in by_group for by_group in cells.values())]
    for group in groups:
        row = [group]
        for by_group in cells.values():
            item = by_group.get(group)
            row.append(_percent(item.mean if item is not None else None, report_format))
        table.append(row)
    return table


def build_language_table(results, grouping, report_format=ReportFormat.CSV):
    """One row per target language, one column per cell, cross-seed mean accuracy."""
    means = language_means(results)
    keys = sorted({cell_key(result) for result in results})
    supervisions = {key[0] for key in keys}
    table = tablib.Dataset(
        headers=['language', 'seen'] + [_column_name(*key, supervisions) for key in keys]
    )
    targets = grouping.ordered({result.target for result in results})
    for language in targets:
        row = [language, 'yes' if grouping.languages[language].seen else 'no']
        row.extend(_percent(means.get((key, language)), report_format) for key in keys)
        table.append(row)
    return table


def _comment_block(config_echo, prefix, suffix=''):
    if not config_echo:
        return ''
    text = yaml.safe_dump(config_echo, sort_keys=False, default_flow_style=True, width=10 ** 6)
    return ''.join(f'{prefix}config: {line}{suffix}\n' for line in text.strip().splitlines())


def render(table, report_format, config_echo=None, extra=None):
    """Serialize ``table``; the configuration is echoed as a header comment."""
    if report_format is ReportFormat.CSV:
        return _comment_block(config_echo, '# ') + table.export('csv', lineterminator='\n')
    if report_format is ReportFormat.MARKDOWN_TABLE:
        body = table.export('cli', tablefmt='github', disable_numparse=True)
        return _comment_block(config_echo, '<!-- ', ' -->') + body + '\n'
    if report_format is ReportFormat.STRUCTURED_TEXT:
        document = {'config': config_echo, 'rows': [dict(row) for row in table.dict]}
        if extra is not None:
            document['aggregates'] = extra
        return yaml.safe_dump(document, sort_keys=False)
    raise ConfigurationError(f'unknown report format {report_format!r}')


def _report_format(value):
    try:
        return ReportFormat(value)
    except ValueError:
        choices = [item.value for item in ReportFormat]
        raise ConfigurationError(f'unknown report format {value!r}; expected one of {choices}')


def _write(text, path):
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    except OSError as exc:
        raise CacheIOError(path, exc.strerror or str(exc))
    log.info('Wrote report %s', path)
    return path


def emit_report(aggregates, report_format, path, config_echo=None):
    """Write the group table to ``path``; raises ConfigurationError for no aggregates."""
    report_format = _report_format(report_format)
    aggregates = list(aggregates)
    if not aggregates:
        raise ConfigurationError('nothing to report: no aggregates')
    table = build_group_table(aggregates, report_format)
    extra = [item.as_dict() for item in aggregates]
    return _write(render(table, report_format, config_echo, extra), path)


def emit_language_report(results, grouping, report_format, path, config_echo=None):
    report_format = _report_format(report_format)
    results = list(results)
    if not results:
        raise ConfigurationError('nothing to report: no results')
    table = build_language_table(results, grouping, report_format)
    return _write(render(table, report_format, config_echo), path)
