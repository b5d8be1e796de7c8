"""
PDF rendering of evaluation reports
"""

import io

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER, TA_LEFT
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from .evaluation import TABLE_COLUMNS

# name -> (parent, font size, space before, space after, alignment, colour)
REPORT_STYLES = {
    'ReportTitle': ('Heading1', 22, 0, 24, TA_CENTER, '#111827'),
    'SectionHeading': ('Heading2', 14, 14, 8, TA_LEFT, '#1e3a8a'),
    'Counts': ('Normal', 9, 0, 6, TA_LEFT, '#374151'),
    'Footer': ('Normal', 8, 0, 0, TA_CENTER, '#6b7280'),
}

HEADER_BACKGROUND = colors.HexColor('#1e3a8a')
STRIPE_BACKGROUND = colors.HexColor('#eef2ff')


class PDFReportGenerator:
    """Generate PDF reports for evaluation runs"""

    def __init__(self):
        self.styles = getSampleStyleSheet()
        for name, (parent, size, before, after, alignment, colour) in REPORT_STYLES.items():
            self.styles.add(ParagraphStyle(
                name=name,
                parent=self.styles[parent],
                fontSize=size,
                spaceBefore=before,
                spaceAfter=after,
                alignment=alignment,
                textColor=colors.HexColor(colour),
            ))

    def _table(self, rows, label_column=False):
        """Header row in bold on the accent colour, striped body; the first column left-aligned when it holds labels."""
        commands = [
            ('BACKGROUND', (0, 0), (-1, 0), HEADER_BACKGROUND),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.white),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTNAME', (0, 1), (-1, -1), 'Helvetica'),
            ('FONTSIZE', (0, 0), (-1, -1), 9),
            ('ALIGN', (0, 0), (-1, -1), 'RIGHT'),
            ('LINEBELOW', (0, 0), (-1, 0), 1, HEADER_BACKGROUND),
            ('BOX', (0, 0), (-1, -1), 0.5, colors.grey),
            ('TOPPADDING', (0, 0), (-1, -1), 4),
            ('BOTTOMPADDING', (0, 0), (-1, -1), 4),
        ]
        if label_column:
            commands.append(('ALIGN', (0, 0), (0, -1), 'LEFT'))
        if len(rows) > 1:
            commands.append(('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, STRIPE_BACKGROUND]))
        table = Table(rows, repeatRows=1)
        table.setStyle(TableStyle(commands))
        return table

    def metrics_table(self, reports):
        rows = [list(TABLE_COLUMNS)]
        for report in reports:
            rows.extend(report.to_frame().values.tolist())
        return self._table(rows, label_column=True)

    def histogram_table(self, report):
        rows = [[f"Size ({report.size_unit})", "Maximal patterns"]]
        rows.extend([str(size), str(count)] for size, count in sorted(report.histogram.items()))
        return self._table(rows)

    def report_section(self, report):
        counts = [
            f"Expected patterns found: {report.found_count} / {report.expected_count}",
            f"Correct returned patterns: {report.correct_count} / {report.returned_count}",
        ]
        if report.pruned_count is not None:
            counts.append(f"Pruned patterns: {report.pruned_count}")
        if report.run_ms is not None:
            counts.append(f"Run time: {report.run_ms:.1f} ms")

        flowables = [Paragraph(f"{report.label}: maximal patterns by size", self.styles['SectionHeading'])]
        flowables.append(Paragraph("<br/>".join(counts), self.styles['Counts']))
        if report.histogram:
            flowables.append(self.histogram_table(report))
        else:
            flowables.append(Paragraph("No returned pattern.", self.styles['Counts']))
        return flowables

    def generate_eval_report(self, reports):
        """Render one or more EvalReports; returns a BytesIO positioned at the start"""
        buffer = io.BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=A4, leftMargin=60, rightMargin=60, topMargin=60,
                                bottomMargin=40, invariant=1, title="cgSpan evaluation")

        story = [
            Paragraph("cgSpan evaluation", self.styles['ReportTitle']),
            Paragraph(", ".join(report.label for report in reports), self.styles['Counts']),
            Paragraph("Criteria", self.styles['SectionHeading']),
            self.metrics_table(reports),
        ]
        for report in reports:
            story.extend(self.report_section(report))
        story.extend([Spacer(1, 24), Paragraph("Generated by cgSpan", self.styles['Footer'])])

        doc.build(story)
        buffer.seek(0)
        return buffer
