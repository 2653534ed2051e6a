from django.core.management.base import BaseCommand

from experiments.presets import get_preset, preset_names


class Command(BaseCommand):
    help = 'List the shipped experiment presets'

    def handle(self, *args, **options):
        for name in preset_names():
            preset = get_preset(name)
            self.stdout.write(f"{self.style.SUCCESS(name)}  [{preset['target']}] {preset.get('description', '')}")
