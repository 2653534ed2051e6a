"""
Management command to run an experiment from a config file or a shipped preset
"""
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from experiments.enums import RunStatus, ErrorMessages, ResponseMessages
from experiments.presets import get_preset
from experiments.services import ExperimentService


class Command(BaseCommand):
    help = 'Run an experiment: one CSV trace per seed plus summary.json'

    def add_arguments(self, parser):
        parser.add_argument('config_path', nargs='?', help='JSON experiment config')
        parser.add_argument('--preset', help='Run a shipped preset instead of a config file')
        parser.add_argument('--seeds', type=int, help='Run seeds 0..N-1 instead of the configured seeds')
        parser.add_argument('--out', dest='output_dir', help='Output directory for the artefacts')
        parser.add_argument('--workers', type=int, help='Seeds run in parallel')

    def handle(self, *args, **options):
        try:
            if options['preset']:
                config, preset = get_preset(options['preset']), options['preset']
            elif options['config_path']:
                config, preset = ExperimentService.load_config(options['config_path']), ''
            else:
                raise CommandError(ErrorMessages.NO_CONFIG)

            seeds = None
            if options['seeds'] is not None:
                if options['seeds'] < 1:
                    raise CommandError(ErrorMessages.SEEDS_COUNT.format(count=options['seeds']))
                seeds = range(options['seeds'])
            run = ExperimentService.run_experiment(
                config,
                seeds=seeds,
                output_dir=options['output_dir'],
                preset=preset,
                max_workers=options['workers'],
            )
        except ValidationError as e:
            raise CommandError('; '.join(e.messages))

        for name, check in run.summary['checks'].items():
            line = f"  {name}: {check['observed']} in {check['range']}"
            self.stdout.write(self.style.SUCCESS(line) if check['passed'] else self.style.WARNING(line))

        message = ResponseMessages.RUN_FINISHED.format(name=run.name, status=run.status, path=run.output_dir)
        if run.status == RunStatus.FAILED:
            raise CommandError(message)
        if run.partial:
            self.stdout.write(self.style.WARNING(message))
        else:
            self.stdout.write(self.style.SUCCESS(message))
