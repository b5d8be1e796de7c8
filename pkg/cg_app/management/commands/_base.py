"""
Shared plumbing for the cgSpan management commands: file access, log
levels and the exception -> exit code contract (1 invalid data, 2 bad
input or configuration).
"""

import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from cg_app.exceptions import CGSpanError, ValidationFailed
from cg_app.serializers import parse_database, parse_rules, parse_vocabulary

EXIT_INVALID = 1
EXIT_USAGE = 2

VERBOSITY_LEVELS = {0: logging.ERROR, 2: logging.INFO, 3: logging.DEBUG}


class CGSpanCommand(BaseCommand):
    """Base command: subclasses implement run(**options) instead of handle()."""

    def handle(self, *args, **options):
        self.configure_logging(options.get('verbosity', 1))
        try:
            return self.run(**options)
        except ValidationFailed as exc:
            for violation in exc.violations:
                self.stderr.write(str(violation))
            raise CommandError(str(exc), returncode=EXIT_INVALID) from exc
        except CGSpanError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of CGSpanCommand must provide a run() method')

    def configure_logging(self, verbosity):
        level = VERBOSITY_LEVELS.get(verbosity, settings.CGSPAN_LOG_LEVEL)
        logging.getLogger('cg_app').setLevel(level)

    def read_file(self, path, what):
        file_path = Path(path)
        if not file_path.is_file():
            raise CommandError(f'{what} file not found: {path}', returncode=EXIT_USAGE)
        return file_path.read_text(encoding='utf-8')

    def write_file(self, path, content):
        file_path = Path(path)
        if file_path.parent and not file_path.parent.exists():
            file_path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            file_path.write_bytes(content)
        else:
            file_path.write_text(content, encoding='utf-8')

    def load_vocabulary(self, path):
        return parse_vocabulary(self.read_file(path, 'Vocabulary'))

    def load_database(self, path):
        return parse_database(self.read_file(path, 'Database'))

    def load_rules(self, path):
        if not path:
            return []
        return parse_rules(self.read_file(path, 'Rule'))

    def default_workers(self, workers):
        return settings.CGSPAN_WORKERS if workers is None else workers
