# Generated by Django 4.2.26 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(help_text='Management command that ran (predict, run, ramsey, ...)', max_length=30)),
                ('seed', models.CharField(blank=True, help_text='Seed of the run as a decimal string (64-bit unsigned)', max_length=20)),
                ('parameters', models.JSONField(blank=True, default=dict, help_text='Resolved command options and device overrides')),
                ('output_path', models.CharField(blank=True, help_text='File written by the run, empty when only stdout was used', max_length=500)),
                ('summary', models.JSONField(blank=True, default=dict, help_text='Headline numbers printed by the command')),
                ('created_at', models.DateTimeField(auto_now_add=True, help_text='When the run finished')),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.AddIndex(
            model_name='experimentrun',
            index=models.Index(fields=['command', 'created_at'], name='experiments_command_9f1c2e_idx'),
        ),
        migrations.AddIndex(
            model_name='experimentrun',
            index=models.Index(fields=['seed'], name='experiments_seed_4b7d10_idx'),
        ),
    ]
