"""
Score a pattern file against a generator manifest.

Usage: python manage.py eval --vocab v.json --patterns patterns.json \
           --manifest manifest.json [--summary patterns.summary.json] [--baseline baseline.summary.json]
"""

from cg_app.evaluation import SIZE_UNITS, evaluate
from cg_app.pdf_utils import PDFReportGenerator
from cg_app.serializers import (
    graph_from_data, parse_manifest_data, parse_patterns, parse_summary_data, serialize_report_data,
)

from ._base import CGSpanCommand


class Command(CGSpanCommand):
    help = 'Compute recall, precision, redundancy and time efficiency of a mining run'

    def add_arguments(self, parser):
        parser.add_argument('--vocab', required=True, help='Vocabulary file (JSON)')
        parser.add_argument('--patterns', required=True, help='Pattern file written by mine')
        parser.add_argument('--manifest', required=True, help='Manifest written by generate')
        parser.add_argument('--summary', help='Run summary of the evaluated run (redundancy, run time)')
        parser.add_argument('--baseline', help='Run summary of the baseline run (time efficiency)')
        parser.add_argument('--out', help='Report file to write (JSON); printed when omitted')
        parser.add_argument('--table', help='Plain-text metrics table to write')
        parser.add_argument('--histogram', help='Size/frequency histogram CSV to write')
        parser.add_argument('--pdf', help='PDF report to write')
        parser.add_argument('--label', default='cgSpan', help='Row label in the metrics table')
        parser.add_argument('--unit', default='nodes', choices=SIZE_UNITS, help='Pattern size unit')

    def run(self, **options):
        v = self.load_vocabulary(options['vocab'])
        records = parse_patterns(self.read_file(options['patterns'], 'Pattern'), v)
        manifest = parse_manifest_data(self.read_file(options['manifest'], 'Manifest'))
        expected = [graph_from_data(seed['pattern']) for seed in manifest['seeds']]
        for seed in expected:
            seed.check_references()

        pruned_count = run_ms = baseline_ms = None
        if options['summary']:
            summary = parse_summary_data(self.read_file(options['summary'], 'Run summary'))
            pruned_count = summary['pruned_count']
            run_ms = summary['median_ms']
        if options['baseline']:
            baseline_ms = parse_summary_data(self.read_file(options['baseline'], 'Baseline summary'))['median_ms']

        report = evaluate(
            [record.pattern for record in records],
            expected,
            v,
            label=options['label'],
            pruned_count=pruned_count,
            run_ms=run_ms,
            baseline_ms=baseline_ms,
            unit=options['unit'],
        )

        report_json = serialize_report_data(report.to_data())
        if options['out']:
            self.write_file(options['out'], report_json)
        else:
            self.stdout.write(report_json, ending='')
        if options['table']:
            self.write_file(options['table'], report.to_table())
        if options['histogram']:
            self.write_file(options['histogram'], report.histogram_csv())
        if options['pdf']:
            self.write_file(options['pdf'], PDFReportGenerator().generate_eval_report([report]).getvalue())

        if options['out']:
            self.stdout.write(report.to_table(), ending='')
            self.stdout.write(self.style.SUCCESS(f"Report written to {options['out']}"))
