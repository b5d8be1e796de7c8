"""
Check a database (and optionally a rule file) against a vocabulary.

Usage: python manage.py validate --vocab v.json --db d.json [--rules rules.json]
"""

from cg_app.exceptions import ValidationFailed
from cg_app.models import validate_database

from ._base import CGSpanCommand


class Command(CGSpanCommand):
    help = 'List every vocabulary violation in a database; exits 1 when there is any'

    def add_arguments(self, parser):
        parser.add_argument('--vocab', required=True, help='Vocabulary file (JSON)')
        parser.add_argument('--db', required=True, help='Database file (JSON list of graphs)')
        parser.add_argument('--rules', help='Lambda-rule file to check as well')

    def run(self, **options):
        v = self.load_vocabulary(options['vocab'])
        db = self.load_database(options['db'])
        rules = self.load_rules(options['rules'])

        violations = validate_database(db, v, rules)
        if violations:
            raise ValidationFailed(violations)

        self.stdout.write(self.style.SUCCESS(
            f"{len(db)} graph(s) and {len(rules)} rule(s) validate against the vocabulary"
        ))
