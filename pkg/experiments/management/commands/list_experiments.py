"""
Management command to list the named experiments
"""
from django.core.management.base import BaseCommand

from experiments.catalog import experiment_table


class Command(BaseCommand):
    help = 'List available experiments with descriptions and result anchors'

    def handle(self, *args, **options):
        rows = experiment_table()
        width = max(len(row['name']) for row in rows)
        for row in rows:
            self.stdout.write(f"{row['name']:<{width}}  {row['description']}  [{row['anchor']}]")
