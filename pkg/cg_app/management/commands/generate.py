"""
Generate a synthetic CG database with planted seed patterns.

Usage: python manage.py generate --vocab v.json --config gen.json --seed 42 \
           --out-db d.json --out-manifest manifest.json
"""

from cg_app.cggen import gen_config_from_data, generate
from cg_app.serializers import parse_gen_config_data, serialize_database, serialize_manifest_data

from ._base import CGSpanCommand


class Command(CGSpanCommand):
    help = 'Generate a synthetic conceptual-graph database and its manifest'

    def add_arguments(self, parser):
        parser.add_argument('--vocab', required=True, help='Vocabulary file (JSON)')
        parser.add_argument('--config', required=True, help='Generator config file (JSON)')
        parser.add_argument('--seed', type=int, help='Random seed (overrides the config)')
        parser.add_argument('--graphs', type=int, help='Number of graphs (overrides graph_count)')
        parser.add_argument('--out-db', required=True, dest='out_db', help='Database file to write')
        parser.add_argument('--out-manifest', required=True, dest='out_manifest', help='Manifest file to write')
        parser.add_argument('--workers', type=int, help='Worker processes (default: CGSPAN_WORKERS)')

    def run(self, **options):
        v = self.load_vocabulary(options['vocab'])
        data = parse_gen_config_data(self.read_file(options['config'], 'Generator config'))
        config = gen_config_from_data(data, graph_count=options['graphs'], seed=options['seed'])

        db, manifest = generate(v, config, workers=self.default_workers(options['workers']))

        self.write_file(options['out_db'], serialize_database(db))
        self.write_file(options['out_manifest'], serialize_manifest_data(manifest))

        self.stdout.write(self.style.SUCCESS(
            f"Generated {len(db)} graph(s) with {len(manifest['seeds'])} planted seed(s) "
            f"(seed {config.seed}) into {options['out_db']}"
        ))
        for seed in manifest['seeds']:
            self.stdout.write(
                f"  {seed['name']}: planted in {seed['planted_count']} graph(s) "
                f"({seed['realized_frequency']:.1%})"
            )
