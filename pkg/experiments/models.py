from django.db import models

from metrics.enums import Target
from .enums import RunStatus


class ExperimentRun(models.Model):
    """One invocation of run_experiment: a config, its seeds and where the artefacts went"""

    name = models.CharField(max_length=100)
    preset = models.CharField(max_length=50, blank=True)
    target = models.CharField(max_length=30, choices=Target.choices)
    config = models.JSONField(help_text="Validated config echo; re-parsing it reproduces the run")
    output_dir = models.CharField(max_length=500)
    status = models.CharField(max_length=20, choices=RunStatus.choices, default=RunStatus.PENDING)
    partial = models.BooleanField(default=False)
    summary = models.JSONField(null=True, blank=True)

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"Experiment {self.id} - {self.name} ({self.status})"

    def get_completed_seeds(self):
        return self.seed_runs.filter(status=RunStatus.COMPLETED).count()


class SeedRun(models.Model):
    """A single (seed, horizon) job of an experiment"""

    experiment = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name='seed_runs',
    )
    seed = models.PositiveIntegerField()
    horizon = models.PositiveIntegerField()
    status = models.CharField(max_length=20, choices=RunStatus.choices, default=RunStatus.PENDING)
    error = models.TextField(blank=True)
    csv_path = models.CharField(max_length=500, blank=True)
    metrics = models.JSONField(default=dict, blank=True, help_text="Headline values of this seed")

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['horizon', 'seed']
        unique_together = ['experiment', 'seed', 'horizon']

    def __str__(self):
        return f"Seed {self.seed} (T={self.horizon}) of experiment {self.experiment_id}"
