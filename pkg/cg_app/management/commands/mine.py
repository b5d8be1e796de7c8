"""
Mine frequent patterns from a CG database.

Usage: python manage.py mine --vocab v.json --db d.json --minsup 0.1 \
           --modules bricks,signatures,rules --out patterns.json
"""

from pathlib import Path

from cg_app.evaluation import median_ms
from cg_app.miner import MiningConfig, mine, parse_modules, resolve_minsup
from cg_app.serializers import serialize_patterns, serialize_summary_data

from ._base import CGSpanCommand


def summary_path(out):
    """patterns.json -> patterns.summary.json"""
    path = Path(out)
    return path.with_name(f'{path.stem}.summary.json')


class Command(CGSpanCommand):
    help = 'Mine frequent generalized patterns from a conceptual-graph database'

    def add_arguments(self, parser):
        parser.add_argument('--vocab', required=True, help='Vocabulary file (JSON)')
        parser.add_argument('--db', required=True, help='Database file (JSON list of graphs)')
        parser.add_argument('--rules', help='Lambda-rule file (one rule or a list)')
        parser.add_argument(
            '--minsup',
            default='1',
            help='Minimum support: an absolute count ("3") or a share of the database ("0.1", "10%%")',
        )
        parser.add_argument(
            '--modules',
            default='all',
            help='Comma list of bricks,signatures,rules, or "all" / "none" (baseline)',
        )
        parser.add_argument('--out', required=True, help='Pattern file to write')
        parser.add_argument('--summary', help='Run summary file (default: <out stem>.summary.json)')
        parser.add_argument('--workers', type=int, help='Worker processes (default: CGSPAN_WORKERS)')
        parser.add_argument('--max-size', type=int, dest='max_size', help='Largest mined pattern, in vertices')
        parser.add_argument('--seed', type=int, default=0, help='Seed echoed in the run summary')
        parser.add_argument('--injective', action='store_true', help='Count support with injective matching')
        parser.add_argument(
            '--strict-markers',
            action='store_true',
            dest='strict_markers',
            help='Keep individual markers in labels while mining',
        )
        parser.add_argument('--repeat', type=int, default=5, help='Timed runs; the summary keeps the median')

    def run(self, **options):
        v = self.load_vocabulary(options['vocab'])
        db = self.load_database(options['db'])
        rules = self.load_rules(options['rules'])

        config = MiningConfig(
            minsup=resolve_minsup(options['minsup'], len(db)),
            max_size=options['max_size'],
            seed=options['seed'],
            workers=self.default_workers(options['workers']),
            injective=options['injective'],
            strict_markers=options['strict_markers'],
            **parse_modules(options['modules']),
        )

        runs_ms = []
        result = None
        for _ in range(max(1, options['repeat'])):
            result = mine(db, v, rules, config)
            runs_ms.append(result.timings_ms['total'])

        self.write_file(options['out'], serialize_patterns(result.records))

        summary = {
            'modules': list(config.modules),
            'minsup': config.minsup,
            'seed': config.seed,
            'workers': config.workers,
            'max_size': config.max_size,
            'injective': config.injective,
            'strict_markers': config.strict_markers,
            'pattern_count': len(result.records),
            'pruned_count': result.pruned_count,
            'counts': result.counts,
            'timings_ms': result.timings_ms,
            'runs_ms': runs_ms,
            'median_ms': median_ms(runs_ms),
        }
        summary_file = options['summary'] or summary_path(options['out'])
        self.write_file(summary_file, serialize_summary_data(summary))

        modules = ', '.join(config.modules) or 'baseline'
        self.stdout.write(self.style.SUCCESS(
            f"Mined {len(result.records)} pattern(s) from {len(db)} graph(s) at minsup {config.minsup} "
            f"[{modules}], {result.pruned_count} pruned; written to {options['out']}"
        ))
