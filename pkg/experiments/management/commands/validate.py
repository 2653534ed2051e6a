"""
Management command to validate a config file or a preset without running it
"""
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from experiments.enums import ErrorMessages, ResponseMessages
from experiments.presets import get_preset
from experiments.services import ExperimentService


class Command(BaseCommand):
    help = 'Validate an experiment config: schema, exponent rules and SPSA radii'

    def add_arguments(self, parser):
        parser.add_argument('config_path', nargs='?', help='JSON experiment config')
        parser.add_argument('--preset', help='Validate a shipped preset')
        parser.add_argument(
            '--certify',
            action='store_true',
            help='Also sample the geometry properties and the game certificates',
        )

    def handle(self, *args, **options):
        try:
            if options['preset']:
                config = get_preset(options['preset'])
            elif options['config_path']:
                config = ExperimentService.load_config(options['config_path'])
            else:
                raise CommandError(ErrorMessages.NO_CONFIG)
        except ValidationError as e:
            raise CommandError('; '.join(e.messages))

        result = ExperimentService.validate_config(config)
        if not result['is_valid']:
            raise CommandError(ErrorMessages.CONFIG_INVALID.format(errors='; '.join(result['errors'])))
        for warning in result['warnings']:
            self.stdout.write(self.style.WARNING(f"  {warning}"))
        if result['warnings']:
            self.stdout.write(self.style.SUCCESS(
                ResponseMessages.CONFIG_VALID_WITH_WARNINGS.format(count=len(result['warnings']))
            ))
        else:
            self.stdout.write(self.style.SUCCESS(ResponseMessages.CONFIG_VALID))

        if options['certify']:
            self.certify(result['data'])

    def certify(self, config):
        certificate = ExperimentService.certify_config(config)
        for name, check in certificate['checks'].items():
            line = f"  {name}: {check['violation']:.3g} (tolerance {check['tolerance']:g})"
            self.stdout.write(self.style.SUCCESS(line) if check['passed'] else self.style.ERROR(line))
        if not certificate['passed']:
            raise CommandError(ErrorMessages.CERTIFICATE_FAILED)
        self.stdout.write(self.style.SUCCESS(ResponseMessages.CERTIFIED))
