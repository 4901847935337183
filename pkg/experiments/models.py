from django.db import models

from .catalog import EXPERIMENT_CHOICES


class ExperimentRun(models.Model):
    """One completed experiment run; mirrors the run's manifest.json"""

    experiment = models.CharField(max_length=40, choices=EXPERIMENT_CHOICES)
    config = models.JSONField(default=dict)
    manifest = models.JSONField(default=dict)
    output_dir = models.CharField(max_length=500)
    all_passed = models.BooleanField(default=False)
    seed = models.IntegerField(default=0)
    tool_version = models.CharField(max_length=20)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        status = 'passed' if self.all_passed else 'failed'
        return f"{self.experiment} ({status}) -> {self.output_dir}"

    def check_summaries(self):
        """Per-check summaries stored in the manifest"""
        return self.manifest.get('checks', [])
