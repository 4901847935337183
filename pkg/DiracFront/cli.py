"""
dirac-front command-line front end.

Maps ``run``, ``list``, ``validate`` and ``history`` onto the experiments
app's management commands.
"""
import os
import sys

COMMANDS = {
    'run': 'run_experiment',
    'list': 'list_experiments',
    'validate': 'validate_config',
    'history': 'experiment_history',
}

USAGE = """usage: dirac-front <command> [options]

commands:
  run <config.json> [--strict] [--out DIR]   run an experiment
  list                                       list named experiments
  validate <config.json>                     validate a configuration
  history [--limit N] [--json]               list stored runs
"""


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(USAGE)
        return 2
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'DiracFront.settings')
    from django.core.management import execute_from_command_line
    execute_from_command_line(['dirac-front', COMMANDS[argv[0]], *argv[1:]])
    return 0


if __name__ == '__main__':
    sys.exit(main())
