"""
Management command to run one experiment configuration
"""
import json
import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from experiments.runner import ExperimentRunner
from experiments.serializers import validate_config
from lab_services.exceptions import DiracFrontError

logger = logging.getLogger(__name__)


def load_config(path):
    """Read a JSON configuration document, raising CommandError on I/O or syntax errors."""
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise CommandError(f"Cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise CommandError(f"Config {path} is not valid JSON: {e}")


def format_violations(detail):
    """Flatten a DRF error detail into 'path: message' lines."""
    lines = []

    def _walk(node, prefix):
        if isinstance(node, dict):
            for key, value in node.items():
                _walk(value, f"{prefix}.{key}" if prefix else str(key))
        elif isinstance(node, list):
            for value in node:
                _walk(value, prefix)
        else:
            lines.append(f"{prefix}: {node}" if prefix and prefix != 'non_field_errors' else str(node))

    _walk(detail, '')
    return lines


class Command(BaseCommand):
    help = 'Run an experiment configuration and write its CSV/JSON outputs'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path to the JSON configuration document')
        parser.add_argument('--strict', action='store_true',
                            help='Exit with a nonzero status when any check fails')
        parser.add_argument('--out', dest='out', default=None,
                            help='Output directory (overrides output_dir in the config)')

    def handle(self, *args, **options):
        raw = load_config(options['config'])
        try:
            config = validate_config(raw)
        except ValidationError as e:
            for line in format_violations(e.detail):
                self.stderr.write(self.style.ERROR(f"  {line}"))
            raise CommandError('Invalid configuration')

        self.stdout.write(f"Running experiment '{config['experiment']}'...")
        try:
            result = ExperimentRunner(config, output_dir=options['out']).run()
        except DiracFrontError as e:
            raise CommandError(f"Experiment failed: {e}")
        except OSError as e:
            raise CommandError(f"Could not write outputs: {e}")

        for report in result.checks:
            line = (f"  {report.name}: {'passed' if report.passed else 'FAILED'} "
                    f"(violations={report.violations}, worst margin={report.worst_margin:.3e})")
            self.stdout.write(self.style.SUCCESS(line) if report.passed else self.style.WARNING(line))
        self.stdout.write(f"Outputs written to {result.output_dir}")

        if result.all_passed:
            self.stdout.write(self.style.SUCCESS('All checks passed'))
        elif options['strict']:
            raise CommandError('Some checks failed', returncode=1)
        else:
            self.stdout.write(self.style.WARNING('Some checks failed'))
