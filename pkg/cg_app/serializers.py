"""
JSON schemas of every file the app reads or writes.

Each schema is a DRF serializer. Parsing goes text -> json -> serializer
validation -> domain objects; writing goes domain objects -> serializer
representation -> json text. Unknown keys are rejected everywhere.
"""

import json
from typing import Dict, List, Optional, Sequence, Tuple, Union

from rest_framework import serializers

from .exceptions import ParseError
from .models import (
    ConceptNode, ConceptType, ConceptualGraph, Connection, Individual, LambdaRule, RelationNode,
    RelationType, Vocabulary,
)
from .postprocessor import PatternRecord, compress


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare and omits null values on output."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown field."] for key in unknown})
        return super().to_internal_value(data)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        return {key: value for key, value in data.items() if value is not None}


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------

class ConceptTypeSerializer(StrictSerializer):
    name = serializers.CharField()
    parent = serializers.CharField(required=False, allow_null=True)


class RelationTypeSerializer(StrictSerializer):
    name = serializers.CharField()
    arity = serializers.IntegerField()
    parent = serializers.CharField(required=False, allow_null=True)
    signature = serializers.ListField(child=serializers.CharField())


class IndividualSerializer(StrictSerializer):
    marker = serializers.CharField()
    type = serializers.CharField()


class VocabularySerializer(StrictSerializer):
    """
    Serializer for a vocabulary file.
    concept_types is required; relation_types and individuals default to empty.
    """
    concept_types = ConceptTypeSerializer(many=True)
    relation_types = RelationTypeSerializer(many=True, required=False)
    individuals = IndividualSerializer(many=True, required=False)


# ---------------------------------------------------------------------------
# Graphs and rules
# ---------------------------------------------------------------------------

class ConceptSerializer(StrictSerializer):
    id = serializers.CharField()
    type = serializers.CharField()
    marker = serializers.CharField(required=False, allow_null=True)


class LambdaConceptSerializer(ConceptSerializer):
    var = serializers.CharField(required=False, allow_null=True)


class RelationSerializer(StrictSerializer):
    id = serializers.CharField()
    type = serializers.CharField()
    args = serializers.ListField(child=serializers.CharField(allow_null=True), allow_empty=True)


class GraphSerializer(StrictSerializer):
    id = serializers.CharField()
    concepts = ConceptSerializer(many=True, required=False)
    relations = RelationSerializer(many=True, required=False)
    source = serializers.CharField(required=False, allow_blank=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if not data.get("source"):
            data.pop("source", None)
        return data


class LambdaGraphSerializer(GraphSerializer):
    concepts = LambdaConceptSerializer(many=True, required=False)


class ConnectionSerializer(StrictSerializer):
    var = serializers.CharField()
    hyp = serializers.CharField()
    concl = serializers.CharField()


class RuleSerializer(StrictSerializer):
    name = serializers.CharField()
    hypothesis = LambdaGraphSerializer()
    conclusion = LambdaGraphSerializer()
    connections = ConnectionSerializer(many=True, required=False)


# ---------------------------------------------------------------------------
# Pattern file
# ---------------------------------------------------------------------------

class PatternRelationSerializer(StrictSerializer):
    """A pattern relation is either a plain relation (type) or a signature reference (sig_ref)."""
    id = serializers.CharField()
    type = serializers.CharField(required=False)
    sig_ref = serializers.CharField(required=False)
    args = serializers.ListField(child=serializers.CharField(allow_null=True), allow_empty=True)

    def validate(self, data):
        if ("type" in data) == ("sig_ref" in data):
            raise serializers.ValidationError("Exactly one of 'type' and 'sig_ref' is required.")
        return data


class PatternGraphSerializer(GraphSerializer):
    relations = PatternRelationSerializer(many=True, required=False)


class PatternRecordSerializer(StrictSerializer):
    pattern = PatternGraphSerializer()
    support = serializers.IntegerField(min_value=0)
    provenance = serializers.CharField()
    canonical_code = serializers.CharField(allow_blank=True)
    size = serializers.IntegerField(required=False, min_value=0)


# ---------------------------------------------------------------------------
# Generator config and manifest
# ---------------------------------------------------------------------------

class NoiseSerializer(StrictSerializer):
    specialization_probability = serializers.FloatField(min_value=0, max_value=1, required=False)
    attach_probability = serializers.FloatField(min_value=0, max_value=1, required=False)
    isolated_concept_probability = serializers.FloatField(min_value=0, max_value=1, required=False)
    marker_probability = serializers.FloatField(min_value=0, max_value=1, required=False)


class SeedSerializer(StrictSerializer):
    name = serializers.CharField(required=False)
    pattern = GraphSerializer()
    frequency = serializers.FloatField()


class LabelDistributionSerializer(StrictSerializer):
    concepts = serializers.DictField(child=serializers.FloatField(), required=False)
    relations = serializers.DictField(child=serializers.FloatField(), required=False)


class GenConfigSerializer(StrictSerializer):
    graph_count = serializers.IntegerField(min_value=0)
    size_distribution = serializers.DictField(child=serializers.FloatField())
    label_distribution = LabelDistributionSerializer(required=False)
    seeds = SeedSerializer(many=True, required=False)
    noise = NoiseSerializer(required=False)
    seed = serializers.IntegerField(required=False, min_value=0)

    def validate_size_distribution(self, value):
        for key in value:
            if not str(key).isdigit() or int(key) < 1:
                raise serializers.ValidationError(f"Size {key!r} is not a positive integer.")
        return value


class ManifestSeedSerializer(StrictSerializer):
    name = serializers.CharField()
    pattern = GraphSerializer()
    frequency = serializers.FloatField()
    planted_graphs = serializers.ListField(child=serializers.CharField(), allow_empty=True)
    planted_count = serializers.IntegerField(min_value=0)
    realized_frequency = serializers.FloatField()


class ManifestSerializer(StrictSerializer):
    seed = serializers.IntegerField()
    graph_count = serializers.IntegerField(min_value=0)
    seeds = ManifestSeedSerializer(many=True)
    size_histogram = serializers.DictField(child=serializers.IntegerField())
    concept_histogram = serializers.DictField(child=serializers.IntegerField())
    relation_histogram = serializers.DictField(child=serializers.IntegerField())


# ---------------------------------------------------------------------------
# Run summary and evaluation report
# ---------------------------------------------------------------------------

class RunSummarySerializer(StrictSerializer):
    modules = serializers.ListField(child=serializers.CharField(), allow_empty=True)
    minsup = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    workers = serializers.IntegerField(min_value=1)
    max_size = serializers.IntegerField(required=False, allow_null=True)
    injective = serializers.BooleanField()
    strict_markers = serializers.BooleanField()
    pattern_count = serializers.IntegerField(min_value=0)
    pruned_count = serializers.IntegerField(min_value=0)
    counts = serializers.DictField(child=serializers.IntegerField())
    timings_ms = serializers.DictField(child=serializers.FloatField())
    runs_ms = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    median_ms = serializers.FloatField()


class HistogramBucketSerializer(StrictSerializer):
    size = serializers.IntegerField()
    count = serializers.IntegerField()


class EvalReportSerializer(StrictSerializer):
    label = serializers.CharField()
    recall = serializers.FloatField(required=False, allow_null=True)
    precision = serializers.FloatField(required=False, allow_null=True)
    redundancy = serializers.FloatField(required=False, allow_null=True)
    time_efficiency = serializers.FloatField(required=False, allow_null=True)
    run_ms = serializers.FloatField(required=False, allow_null=True)
    baseline_ms = serializers.FloatField(required=False, allow_null=True)
    expected_count = serializers.IntegerField()
    returned_count = serializers.IntegerField()
    found_count = serializers.IntegerField()
    correct_count = serializers.IntegerField()
    pruned_count = serializers.IntegerField(required=False, allow_null=True)
    size_unit = serializers.CharField()
    histogram = HistogramBucketSerializer(many=True)


# ---------------------------------------------------------------------------
# Text <-> domain objects
# ---------------------------------------------------------------------------

def format_errors(errors, prefix: str = "") -> List[str]:
    """Flatten DRF error structures into "path: message" lines."""
    if isinstance(errors, dict):
        messages = []
        for key, value in errors.items():
            messages.extend(format_errors(value, f"{prefix}.{key}" if prefix else str(key)))
        return messages
    if isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            return [f"{prefix or 'document'}: {' '.join(str(item) for item in errors)}"]
        messages = []
        for index, item in enumerate(errors):
            if item:
                messages.extend(format_errors(item, f"{prefix}[{index}]"))
        return messages
    return [f"{prefix or 'document'}: {errors}"]


def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None


def dump_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def validated(serializer_class, data, many: bool = False, what: str = "document"):
    serializer = serializer_class(data=data, many=many)
    if not serializer.is_valid():
        raise ParseError(f"Invalid {what}: " + "; ".join(format_errors(serializer.errors)))
    return serializer.validated_data


# --- vocabulary ---

def vocabulary_from_data(data) -> Vocabulary:
    return Vocabulary(
        concept_types=tuple(ConceptType(item["name"], item.get("parent")) for item in data["concept_types"]),
        relation_types=tuple(
            RelationType(item["name"], item["arity"], tuple(item["signature"]), item.get("parent"))
            for item in data.get("relation_types", [])
        ),
        individuals=tuple(Individual(item["marker"], item["type"]) for item in data.get("individuals", [])),
    )


def parse_vocabulary(text: str) -> Vocabulary:
    return vocabulary_from_data(validated(VocabularySerializer, load_json(text), what="vocabulary"))


def serialize_vocabulary(v: Vocabulary) -> str:
    return dump_json(VocabularySerializer(v).data)


# --- graphs ---

def graph_from_data(data) -> ConceptualGraph:
    return ConceptualGraph(
        id=data["id"],
        concepts=tuple(
            ConceptNode(item["id"], item["type"], item.get("marker"), item.get("var"))
            for item in data.get("concepts", [])
        ),
        relations=tuple(
            RelationNode(item["id"], item["type"], tuple(item["args"])) for item in data.get("relations", [])
        ),
        source=data.get("source", ""),
    )


def graph_to_data(g: ConceptualGraph) -> dict:
    return GraphSerializer(g).data


def parse_graph(text: str) -> ConceptualGraph:
    return graph_from_data(validated(GraphSerializer, load_json(text), what="graph"))


def serialize_graph(g: ConceptualGraph) -> str:
    return dump_json(graph_to_data(g))


def parse_database(text: str) -> List[ConceptualGraph]:
    graphs = [graph_from_data(item) for item in validated(GraphSerializer, load_json(text), many=True, what="database")]
    seen = set()
    for g in graphs:
        if g.id in seen:
            raise ParseError(f"Invalid database: duplicate graph id {g.id!r}")
        seen.add(g.id)
    return graphs


def serialize_database(db: Sequence[ConceptualGraph]) -> str:
    return dump_json([graph_to_data(g) for g in db])


# --- rules ---

def rule_from_data(data) -> LambdaRule:
    return LambdaRule(
        name=data["name"],
        hypothesis=graph_from_data(data["hypothesis"]),
        conclusion=graph_from_data(data["conclusion"]),
        connections=tuple(Connection(c["var"], c["hyp"], c["concl"]) for c in data.get("connections", [])),
    )


def parse_rules(text: str) -> List[LambdaRule]:
    """A rule file holds one rule object or a list of them."""
    data = load_json(text)
    many = isinstance(data, list)
    items = validated(RuleSerializer, data, many=many, what="rule file")
    return [rule_from_data(item) for item in (items if many else [items])]


def serialize_rules(rules: Sequence[LambdaRule]) -> str:
    return dump_json([RuleSerializer(rule).data for rule in rules])


# --- patterns ---

def pattern_record_to_data(record: PatternRecord) -> dict:
    if record.compressed is None:
        pattern = graph_to_data(record.pattern)
    else:
        pattern = graph_to_data(record.compressed.graph)
        relations = pattern.setdefault("relations", [])
        for ref in record.compressed.references:
            relations.insert(ref.index, {"id": ref.relation_id, "sig_ref": ref.relation_type, "args": list(ref.args)})
    return {
        "pattern": pattern,
        "support": record.support,
        "provenance": record.provenance,
        "canonical_code": record.canonical_code,
        "size": record.size,
    }


def serialize_patterns(records: Sequence[PatternRecord]) -> str:
    return dump_json([pattern_record_to_data(record) for record in records])


def _expand_references(data, v: Optional[Vocabulary]) -> Tuple[ConceptualGraph, bool]:
    concepts = [dict(item) for item in data.get("concepts", [])]
    known = {item["id"] for item in concepts}
    relations = []
    has_references = False
    for item in data.get("relations", []):
        if "sig_ref" not in item:
            relations.append(item)
            continue
        has_references = True
        if v is None:
            raise ParseError("Pattern file holds signature references; a vocabulary is needed to read it")
        signature = v.signature(item["sig_ref"])
        for position, arg in enumerate(item["args"]):
            if arg is not None and arg not in known:
                concepts.append({"id": arg, "type": signature[position]})
                known.add(arg)
        relations.append({"id": item["id"], "type": item["sig_ref"], "args": item["args"]})
    graph = graph_from_data({**data, "concepts": concepts, "relations": relations})
    return graph, has_references


def parse_patterns(text: str, v: Optional[Vocabulary] = None) -> List[PatternRecord]:
    """Read a pattern file; signature references are expanded back into relation nodes."""
    records = []
    for item in validated(PatternRecordSerializer, load_json(text), many=True, what="pattern file"):
        graph, has_references = _expand_references(item["pattern"], v)
        graph.check_references()
        records.append(PatternRecord(
            pattern=graph,
            support=item["support"],
            provenance=item["provenance"],
            canonical_code=item["canonical_code"],
            compressed=compress(graph, v) if has_references else None,
        ))
    return records


# --- generator config, manifest, summary, report ---

def parse_gen_config_data(text: str) -> dict:
    return validated(GenConfigSerializer, load_json(text), what="generator config")


def parse_manifest_data(text: str) -> dict:
    return validated(ManifestSerializer, load_json(text), what="manifest")


def serialize_manifest_data(data: dict) -> str:
    return dump_json(ManifestSerializer(data).data)


def parse_summary_data(text: str) -> dict:
    return validated(RunSummarySerializer, load_json(text), what="run summary")


def serialize_summary_data(data: dict) -> str:
    return dump_json(RunSummarySerializer(data).data)


def serialize_report_data(data: Union[dict, object]) -> str:
    return dump_json(EvalReportSerializer(data).data)


def parse_report_data(text: str) -> Dict:
    return validated(EvalReportSerializer, load_json(text), what="evaluation report")
