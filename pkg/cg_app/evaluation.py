"""
Evaluation of mining results against a generator manifest.

Recall, precision, redundancy and time efficiency, plus the size/frequency
histogram of maximal returned patterns.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import pandas as pd

from .exceptions import EvaluationError
from .models import ConceptualGraph, Vocabulary
from .rules import embeds, find_homomorphisms

logger = logging.getLogger(__name__)

SIZE_UNITS = ("nodes", "bricks")
TABLE_COLUMNS = ["Test", "Rec. (%)", "Prec. (%)", "Red. (%)", "T-Eff. (%)"]


def pattern_size(p: ConceptualGraph, unit: str = "nodes") -> int:
    if unit == "bricks":
        return len(p.relations)
    if unit == "nodes":
        return p.node_count
    raise EvaluationError(f"Unknown size unit {unit!r} (choose from {', '.join(SIZE_UNITS)})")


def found_expected(returned: Sequence[ConceptualGraph], expected: Sequence[ConceptualGraph],
                   v: Vocabulary) -> List[ConceptualGraph]:
    return [e for e in expected if any(embeds(e, r, v) for r in returned)]


def recall(returned: Sequence[ConceptualGraph], expected: Sequence[ConceptualGraph], v: Vocabulary) -> float:
    """Share of expected patterns that embed in some returned pattern."""
    if not expected:
        raise EvaluationError("Recall is undefined without expected patterns")
    return len(found_expected(returned, expected, v)) / len(expected)


def is_correct(r: ConceptualGraph, expected: Sequence[ConceptualGraph], v: Vocabulary) -> bool:
    """
    A returned pattern is correct when it embeds in an expected pattern, or
    when expected-pattern images cover every one of its relation nodes.
    Patterns without relations or with missing arguments never are.
    """
    if not r.relations or not all(rel.is_complete for rel in r.relations):
        return False
    if any(embeds(r, e, v) for e in expected):
        return True
    uncovered = {rel.id for rel in r.relations}
    for e in expected:
        for mapping in find_homomorphisms(e, r, v):
            uncovered.difference_update(mapping[rel.id] for rel in e.relations)
            if not uncovered:
                return True
    return False


def correct_patterns(returned: Sequence[ConceptualGraph], expected: Sequence[ConceptualGraph],
                     v: Vocabulary) -> List[ConceptualGraph]:
    return [r for r in returned if is_correct(r, expected, v)]


def precision(returned: Sequence[ConceptualGraph], expected: Sequence[ConceptualGraph], v: Vocabulary) -> float:
    if not returned:
        raise EvaluationError("Precision is undefined without returned patterns")
    return len(correct_patterns(returned, expected, v)) / len(returned)


def redundancy(pruned_count: int, returned_count: int) -> float:
    """Pruned patterns over all patterns, returned or pruned."""
    if pruned_count < 0 or returned_count < 0:
        raise EvaluationError("Pattern counts cannot be negative")
    total = pruned_count + returned_count
    if total == 0:
        raise EvaluationError("Redundancy is undefined when nothing was returned or pruned")
    return pruned_count / total


def time_efficiency(run_ms: Optional[float], baseline_ms: Optional[float]) -> Optional[float]:
    """run / baseline time; None when there is no baseline."""
    if baseline_ms is None or run_ms is None:
        return None
    if baseline_ms <= 0:
        raise EvaluationError(f"Baseline time must be positive, got {baseline_ms}")
    return run_ms / baseline_ms


def median_ms(runs: Sequence[float]) -> float:
    if not runs:
        raise EvaluationError("No timing runs")
    return float(pd.Series(list(runs), dtype=float).median())


def maximal_patterns(patterns: Sequence[ConceptualGraph], v: Vocabulary, unit: str = "nodes") -> List[ConceptualGraph]:
    """Patterns that embed in no strictly larger returned pattern."""
    sizes = [pattern_size(p, unit) for p in patterns]
    maximal = []
    for k, p in enumerate(patterns):
        larger = (q for j, q in enumerate(patterns) if sizes[j] > sizes[k])
        if not any(embeds(p, q, v) for q in larger):
            maximal.append(p)
    return maximal


def size_frequency_histogram(patterns: Sequence[ConceptualGraph], v: Vocabulary, unit: str = "nodes") -> Dict[int, int]:
    """Number of maximal patterns per size, sizes ascending."""
    sizes = [pattern_size(p, unit) for p in maximal_patterns(patterns, v, unit)]
    if not sizes:
        return {}
    counts = pd.Series(sizes, dtype=int).value_counts().sort_index()
    return {int(size): int(count) for size, count in counts.items()}


@dataclass
class EvalReport:
    """
    Fields:
    - recall / precision: fractions, None only when undefined for the inputs
    - redundancy: pruned / (pruned + returned), None without a run summary
    - time_efficiency: run time / baseline time, None without a baseline
    - histogram: size -> count of maximal patterns, in `size_unit`
    """
    label: str
    recall: Optional[float]
    precision: Optional[float]
    expected_count: int
    returned_count: int
    found_count: int
    correct_count: int
    size_unit: str = "nodes"
    histogram: Dict[int, int] = field(default_factory=dict)
    redundancy: Optional[float] = None
    time_efficiency: Optional[float] = None
    run_ms: Optional[float] = None
    baseline_ms: Optional[float] = None
    pruned_count: Optional[int] = None

    def to_data(self) -> dict:
        return {
            "label": self.label,
            "recall": self.recall,
            "precision": self.precision,
            "redundancy": self.redundancy,
            "time_efficiency": self.time_efficiency,
            "run_ms": self.run_ms,
            "baseline_ms": self.baseline_ms,
            "expected_count": self.expected_count,
            "returned_count": self.returned_count,
            "found_count": self.found_count,
            "correct_count": self.correct_count,
            "pruned_count": self.pruned_count,
            "size_unit": self.size_unit,
            "histogram": [{"size": size, "count": count} for size, count in sorted(self.histogram.items())],
        }

    def to_frame(self) -> pd.DataFrame:
        def percent(value):
            return "-" if value is None else f"{value * 100:.1f}"

        return pd.DataFrame(
            [[self.label, percent(self.recall), percent(self.precision), percent(self.redundancy),
              percent(self.time_efficiency)]],
            columns=TABLE_COLUMNS,
        )

    def to_table(self) -> str:
        return self.to_frame().to_string(index=False) + "\n"

    def histogram_csv(self) -> str:
        frame = pd.DataFrame(sorted(self.histogram.items()), columns=["size", "count"])
        return frame.to_csv(index=False)


def metrics_table(reports: Sequence[EvalReport]) -> str:
    """One row per report, in the given order."""
    if not reports:
        return pd.DataFrame(columns=TABLE_COLUMNS).to_string(index=False) + "\n"
    return pd.concat([r.to_frame() for r in reports], ignore_index=True).to_string(index=False) + "\n"


def evaluate(returned: Sequence[ConceptualGraph], expected: Sequence[ConceptualGraph], v: Vocabulary,
             label: str = "cgSpan", pruned_count: Optional[int] = None, run_ms: Optional[float] = None,
             baseline_ms: Optional[float] = None, unit: str = "nodes") -> EvalReport:
    """
    Score returned patterns against the expected ones.

    Raises EvaluationError when there is nothing expected. An empty result
    set gets recall 0 and an undefined (None) precision.
    """
    if not expected:
        raise EvaluationError("The manifest lists no expected pattern")
    found = found_expected(returned, expected, v)
    correct = correct_patterns(returned, expected, v)
    report = EvalReport(
        label=label,
        recall=len(found) / len(expected),
        precision=len(correct) / len(returned) if returned else None,
        expected_count=len(expected),
        returned_count=len(returned),
        found_count=len(found),
        correct_count=len(correct),
        size_unit=unit,
        histogram=size_frequency_histogram(returned, v, unit),
        pruned_count=pruned_count,
        run_ms=run_ms,
        baseline_ms=baseline_ms,
    )
    if pruned_count is not None and pruned_count + len(returned) > 0:
        report.redundancy = redundancy(pruned_count, len(returned))
    report.time_efficiency = time_efficiency(run_ms, baseline_ms)
    logger.info("Evaluated %s: recall %.3f, %d/%d returned correct", label, report.recall, len(correct), len(returned))
    return report
