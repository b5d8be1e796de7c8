"""
Signature-aware pruning and compression of mined patterns.

A relation node is "signature-only" when each of its arguments is a generic
concept typed exactly by the signature type at that position. Such a node
says nothing the vocabulary does not already say.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .models import ConceptNode, ConceptualGraph, RelationNode, Vocabulary

logger = logging.getLogger(__name__)

MINED = "mined"
RULE_PREFIX = "rule-extended"


def rule_provenance(rule_name: str) -> str:
    return f"{RULE_PREFIX}({rule_name})"


def is_rule_provenance(provenance: str) -> bool:
    return provenance.startswith(RULE_PREFIX + "(")


@dataclass(frozen=True)
class SignatureReference:
    """
    Stands for a signature-only relation node.

    `index` is the node's position in the relation list of the original
    pattern so decompression restores the exact order.
    """
    relation_id: str
    relation_type: str
    args: Tuple[str, ...]
    index: int

    @property
    def marker(self) -> str:
        return f"S_{self.relation_type}"


@dataclass(frozen=True)
class CompressedPattern:
    """
    Fields:
    - graph: the pattern without its referenced relations, and without the
      concept nodes only those relations used
    - references: the signature references, in relation order
    - dropped_concepts: (original index, node) of the removed concept nodes
    """
    graph: ConceptualGraph
    references: Tuple[SignatureReference, ...] = ()
    dropped_concepts: Tuple[Tuple[int, ConceptNode], ...] = ()

    @property
    def is_compressed(self) -> bool:
        return bool(self.references)

    def decompress(self) -> ConceptualGraph:
        concepts = list(self.graph.concepts)
        for index, node in self.dropped_concepts:
            concepts.insert(index, node)
        relations = list(self.graph.relations)
        for ref in self.references:
            relations.insert(ref.index, RelationNode(id=ref.relation_id, type=ref.relation_type, args=ref.args))
        return replace(self.graph, concepts=tuple(concepts), relations=tuple(relations))


@dataclass(frozen=True)
class PatternRecord:
    """A mined pattern as written to the pattern file."""
    pattern: ConceptualGraph
    support: int
    provenance: str = MINED
    canonical_code: str = ""
    compressed: Optional[CompressedPattern] = None

    @property
    def size(self) -> int:
        return self.pattern.node_count

    @property
    def brick_count(self) -> int:
        return len(self.pattern.relations)


def is_signature_relation(rel: RelationNode, p: ConceptualGraph, v: Vocabulary) -> bool:
    if not rel.is_complete or not v.has_relation_type(rel.type):
        return False
    signature = v.signature(rel.type)
    if len(signature) != len(rel.args):
        return False
    for arg, sig_type in zip(rel.args, signature):
        concept = p.concept(arg)
        if concept.marker is not None or concept.type != sig_type:
            return False
    return True


def is_signature_only(p: ConceptualGraph, v: Vocabulary) -> bool:
    """True iff every relation of p carries exactly its signature types; an empty pattern qualifies."""
    return all(is_signature_relation(rel, p, v) for rel in p.relations)


def compress(p: ConceptualGraph, v: Vocabulary) -> CompressedPattern:
    references = []
    kept_relations = []
    for index, rel in enumerate(p.relations):
        if is_signature_relation(rel, p, v):
            references.append(SignatureReference(rel.id, rel.type, tuple(rel.args), index))
        else:
            kept_relations.append(rel)
    if not references:
        return CompressedPattern(graph=p)

    still_used = {arg for rel in kept_relations for arg in rel.args if arg is not None}
    referenced = {arg for ref in references for arg in ref.args}
    dropped = []
    kept_concepts = []
    for index, concept in enumerate(p.concepts):
        if concept.id in referenced and concept.id not in still_used:
            dropped.append((index, concept))
        else:
            kept_concepts.append(concept)
    graph = replace(p, concepts=tuple(kept_concepts), relations=tuple(kept_relations))
    return CompressedPattern(graph=graph, references=tuple(references), dropped_concepts=tuple(dropped))


def split_signature_only(patterns: Sequence[PatternRecord], v: Vocabulary) -> Tuple[List[PatternRecord], List[PatternRecord]]:
    """Partition records into (kept, pruned); rule-extended records are never pruned."""
    kept, pruned = [], []
    for record in patterns:
        if is_signature_only(record.pattern, v) and not is_rule_provenance(record.provenance):
            pruned.append(record)
        else:
            kept.append(record)
    return kept, pruned


def prune(patterns: Sequence[PatternRecord], v: Vocabulary) -> Tuple[List[PatternRecord], int]:
    """Drop signature-only patterns and compress the others; returns (kept, pruned count)."""
    kept, pruned = split_signature_only(patterns, v)
    compressed = []
    for record in kept:
        packed = compress(record.pattern, v)
        compressed.append(replace(record, compressed=packed if packed.is_compressed else None))
    if pruned:
        logger.info("Pruned %d signature-only pattern(s), kept %d", len(pruned), len(kept))
    return compressed, len(pruned)
