from django.db import models


class ExperimentRun(models.Model):
    """Ledger entry for one management-command run and the files it produced"""
    command = models.CharField(
        max_length=30,
        help_text="Management command that ran (predict, run, ramsey, ...)"
    )
    seed = models.CharField(
        max_length=20,
        blank=True,
        help_text="Seed of the run as a decimal string (64-bit unsigned)"
    )
    parameters = models.JSONField(
        default=dict,
        blank=True,
        help_text="Resolved command options and device overrides"
    )
    output_path = models.CharField(
        max_length=500,
        blank=True,
        help_text="File written by the run, empty when only stdout was used"
    )
    summary = models.JSONField(
        default=dict,
        blank=True,
        help_text="Headline numbers printed by the command"
    )
    created_at = models.DateTimeField(
        auto_now_add=True,
        help_text="When the run finished"
    )

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['command', 'created_at'], name='experiments_command_9f1c2e_idx'),
            models.Index(fields=['seed'], name='experiments_seed_4b7d10_idx'),
        ]

    def __str__(self):
        return f"{self.command} (seed {self.seed or '-'}) at {self.created_at}"
