# Generated by Django 4.2.4 on 2026-10-17 09:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100)),
                ('preset', models.CharField(blank=True, max_length=50)),
                ('target', models.CharField(choices=[('regret', 'Static Regret'), ('convergence', 'Convergence Under Stabilization'), ('tracking', 'Equilibrium Tracking'), ('dynamic_regret', 'Dynamic Regret'), ('bandit_tracking', 'Payoff-Based Tracking'), ('bandit_convergence', 'Payoff-Based Convergence'), ('ergodic', 'Ergodic Saddle-Point Convergence')], max_length=30)),
                ('config', models.JSONField(help_text='Validated config echo; re-parsing it reproduces the run')),
                ('output_dir', models.CharField(max_length=500)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('partial', 'Partially Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('partial', models.BooleanField(default=False)),
                ('summary', models.JSONField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SeedRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('seed', models.PositiveIntegerField()),
                ('horizon', models.PositiveIntegerField()),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('partial', 'Partially Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('error', models.TextField(blank=True)),
                ('csv_path', models.CharField(blank=True, max_length=500)),
                ('metrics', models.JSONField(blank=True, default=dict, help_text='Headline values of this seed')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                ('experiment', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='seed_runs', to='experiments.experimentrun')),
            ],
            options={
                'ordering': ['horizon', 'seed'],
                'unique_together': {('experiment', 'seed', 'horizon')},
            },
        ),
    ]
