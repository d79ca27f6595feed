"""Command-line entry point: ``crossprompt <subcommand> [options]``."""
import os
import sys

SUBCOMMANDS = (
    'gen-data',
    'pretrain',
    'train-source',
    'adapt-target',
    'export-prompt',
    'eval',
    'run-zs',
    'run-seq',
    'report',
    'params',
    'gradcheck',
    'sweep',
)

USAGE = 'usage: crossprompt {%s} [--config PATH] [--set KEY.PATH=VALUE ...]' % ','.join(
    SUBCOMMANDS
)


def cli(argv=None):
    """
    Run one subcommand and return its exit code.

    0 on success, 1 when the command fails, 2 for usage errors.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        sys.stdout.write(USAGE + '\n')
        return 0 if argv else 2
    if argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"{USAGE}\ncrossprompt: error: unknown subcommand '{argv[0]}'\n")
        return 2

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'crossprompt.app.settings')
    import django
    from django.core.management import execute_from_command_line

    django.setup()
    try:
        execute_from_command_line(['crossprompt'] + argv)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main():
    sys.exit(cli())


if __name__ == '__main__':
    main()
