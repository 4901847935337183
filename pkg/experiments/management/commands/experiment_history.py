"""
Management command to list stored experiment runs
"""
import json

from django.core.management.base import BaseCommand

from experiments.models import ExperimentRun
from experiments.serializers import ExperimentRunSerializer


class Command(BaseCommand):
    help = 'List stored experiment runs, newest first'

    def add_arguments(self, parser):
        parser.add_argument('--limit', type=int, default=20, help='Number of runs to show')
        parser.add_argument('--experiment', default=None, help='Only show runs of this experiment')
        parser.add_argument('--json', action='store_true', help='Print the runs as a JSON array')

    def handle(self, *args, **options):
        runs = ExperimentRun.objects.all()
        if options['experiment']:
            runs = runs.filter(experiment=options['experiment'])
        runs = list(runs[:options['limit']])
        if options['json']:
            self.stdout.write(json.dumps(ExperimentRunSerializer(runs, many=True).data, indent=2))
            return
        if not runs:
            self.stdout.write('No runs recorded')
            return
        for run in runs:
            status = self.style.SUCCESS('passed') if run.all_passed else self.style.ERROR('failed')
            self.stdout.write(f"{run.created_at:%Y-%m-%d %H:%M:%S}  {run.experiment:<22} {status}  {run.output_dir}")
