from cg_app.exceptions import ValidationFailed
from cg_app.miner import parse_modules
from cg_app.models import validate_database
from cg_app.serializers import dump_json
from cg_app.translator import TranslationOptions, dump_brick_graphs

from ._base import CGSpanCommand


class Command(CGSpanCommand):
    help = 'Write the brick graphs a database translates to, for debugging'

    def add_arguments(self, parser):
        parser.add_argument('--vocab', required=True, help='Vocabulary file (JSON)')
        parser.add_argument('--db', required=True, help='Database file (JSON list of graphs)')
        parser.add_argument('--rules', help='Lambda-rule file; specialization rules are applied first')
        parser.add_argument('--modules', default='all', help='Module flags, as for mine')
        parser.add_argument('--strict-markers', action='store_true', dest='strict_markers')
        parser.add_argument('--out', help='File to write; printed when omitted')

    def run(self, **options):
        v = self.load_vocabulary(options['vocab'])
        db = self.load_database(options['db'])
        flags = parse_modules(options['modules'])
        rules = self.load_rules(options['rules']) if flags['rules'] else []
        violations = validate_database(db, v, rules)
        if violations:
            raise ValidationFailed(violations)
        rules = [rule for rule in rules if rule.is_specialization(v)]
        translation = TranslationOptions(bricks=True, signatures=flags['signatures'],
                                         strict_markers=options['strict_markers'])

        dumped = dump_json(dump_brick_graphs(db, v, rules, translation))
        if options['out']:
            self.write_file(options['out'], dumped)
            self.stdout.write(self.style.SUCCESS(f"Brick graphs of {len(db)} graph(s) written to {options['out']}"))
        else:
            self.stdout.write(dumped, ending='')
