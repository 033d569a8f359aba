import json
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ToolkitError

logger = logging.getLogger(__name__)

VERBOSITY_LEVELS = {0: logging.WARNING, 2: logging.DEBUG, 3: logging.DEBUG}


def apply_verbosity(verbosity: int) -> None:
    """0 скрывает INFO, 2 и выше включают DEBUG; 1 возвращает LOGGING."""
    level = VERBOSITY_LEVELS.get(int(verbosity))
    for name, config in settings.LOGGING.get('loggers', {}).items():
        logging.getLogger(name).setLevel(
            level if level is not None else config.get('level', 'NOTSET')
        )


class ToolkitCommand(BaseCommand):
    """Подкоманда, переводящая ToolkitError в код выхода 1 или 2."""

    def add_threads_argument(self, parser):
        parser.add_argument(
            '--threads', default=None,
            help='Число потоков (по умолчанию PGMKIT_THREADS или число ядер).'
        )

    def execute(self, *args, **options):
        apply_verbosity(options.get('verbosity', 1))
        try:
            return super().execute(*args, **options)
        except ToolkitError as exc:
            logger.warning('%s failed: %s', self.command_name(), exc)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def write_json(self, payload) -> None:
        self.stdout.write(json.dumps(payload, indent=2))
