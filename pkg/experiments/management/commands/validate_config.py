"""
Management command to validate a configuration without running it
"""
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from experiments.serializers import validate_config

from .run_experiment import format_violations, load_config


class Command(BaseCommand):
    help = 'Validate an experiment configuration and list every violation'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path to the JSON configuration document')

    def handle(self, *args, **options):
        raw = load_config(options['config'])
        try:
            config = validate_config(raw)
        except ValidationError as e:
            violations = format_violations(e.detail)
            for line in violations:
                self.stderr.write(self.style.ERROR(f"  {line}"))
            raise CommandError(f"{len(violations)} violation(s) in {options['config']}")
        self.stdout.write(self.style.SUCCESS(f"Valid '{config['experiment']}' configuration"))
