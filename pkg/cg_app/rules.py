"""
CG homomorphisms and lambda-rule application.

A homomorphism from h to g maps concept nodes onto concept nodes and relation
nodes onto relation nodes so that every label of h generalizes the label of
its image, markers present in h are kept, and argument positions are kept.
"""

import logging
from typing import Dict, Iterator, List, Optional, Tuple

from .models import ConceptNode, ConceptualGraph, LambdaRule, RelationNode, Vocabulary

logger = logging.getLogger(__name__)

Mapping = Dict[str, str]


def _concept_compatible(v: Vocabulary, pattern: ConceptNode, target: ConceptNode) -> bool:
    if pattern.marker is not None and pattern.marker != target.marker:
        return False
    return v.is_generalization(pattern.type, target.type)


def _relation_compatible(v: Vocabulary, pattern: RelationNode, target: RelationNode) -> bool:
    if len(pattern.args) != len(target.args):
        return False
    return v.is_generalization(pattern.type, target.type)


def find_homomorphisms(h: ConceptualGraph, g: ConceptualGraph, v: Vocabulary,
                       injective: bool = False) -> Iterator[Mapping]:
    """
    Yield every homomorphism from h to g as a dict of node ids.

    Mappings come out in a deterministic order: relations of h are matched in
    declaration order against relations of g in declaration order, then the
    concepts of h left unbound are matched in the same way.
    """
    relations = list(h.relations)
    concepts = list(h.concepts)

    def bind(mapping: Mapping, used: set, h_id: str, g_id: str) -> Optional[bool]:
        # True: newly bound, False: already bound to g_id, None: conflict
        current = mapping.get(h_id)
        if current is not None:
            return False if current == g_id else None
        if injective and g_id in used:
            return None
        if not _concept_compatible(v, h.concept(h_id), g.concept(g_id)):
            return None
        mapping[h_id] = g_id
        used.add(g_id)
        return True

    def match_relations(index: int, mapping: Mapping, used: set) -> Iterator[Mapping]:
        if index == len(relations):
            yield from match_concepts(0, mapping, used)
            return
        rel = relations[index]
        for target in g.relations:
            if injective and target.id in used:
                continue
            if not _relation_compatible(v, rel, target):
                continue
            bound: List[str] = []
            ok = True
            for arg, target_arg in zip(rel.args, target.args):
                if arg is None:
                    continue
                if target_arg is None:
                    ok = False
                    break
                outcome = bind(mapping, used, arg, target_arg)
                if outcome is None:
                    ok = False
                    break
                if outcome:
                    bound.append(arg)
            if ok:
                mapping[rel.id] = target.id
                used.add(target.id)
                yield from match_relations(index + 1, mapping, used)
                del mapping[rel.id]
                used.discard(target.id)
            for arg in bound:
                used.discard(mapping.pop(arg))

    def match_concepts(index: int, mapping: Mapping, used: set) -> Iterator[Mapping]:
        while index < len(concepts) and concepts[index].id in mapping:
            index += 1
        if index == len(concepts):
            yield dict(mapping)
            return
        node = concepts[index]
        for target in g.concepts:
            if bind(mapping, used, node.id, target.id):
                yield from match_concepts(index + 1, mapping, used)
                del mapping[node.id]
                used.discard(target.id)

    yield from match_relations(0, {}, set())


def embeds(h: ConceptualGraph, g: ConceptualGraph, v: Vocabulary, injective: bool = False) -> bool:
    return next(find_homomorphisms(h, g, v, injective), None) is not None


def _fresh_id(base: str, taken: set) -> str:
    candidate = base
    suffix = 1
    while candidate in taken:
        suffix += 1
        candidate = f"{base}.{suffix}"
    taken.add(candidate)
    return candidate


def apply_rule(g: ConceptualGraph, rule: LambdaRule, v: Vocabulary,
               mapping: Mapping) -> Tuple[ConceptualGraph, Dict[str, str]]:
    """
    Glue the conclusion of `rule` onto g along a homomorphism of its hypothesis.

    Connection nodes are specialized to the conclusion type when it is
    strictly more specific; conclusion concepts and relations not already
    present are added with fresh ids. Returns the new graph and the mapping
    from conclusion node ids to node ids of the new graph.
    """
    placed: Dict[str, str] = {}
    retype: Dict[str, str] = {}
    for connection in rule.connections:
        target = mapping[connection.hyp]
        placed[connection.concl] = target
        concl_type = rule.conclusion.concept(connection.concl).type
        current = retype.get(target, g.concept(target).type)
        if concl_type != current and v.is_generalization(current, concl_type):
            retype[target] = concl_type

    taken = {node.id for node in (*g.concepts, *g.relations)}
    concepts = [c for c in g.concepts]
    for node in rule.conclusion.concepts:
        if node.id in placed:
            continue
        new_id = _fresh_id(f"{rule.name}.{node.id}", taken)
        concepts.append(ConceptNode(id=new_id, type=node.type, marker=node.marker))
        placed[node.id] = new_id

    relations = list(g.relations)
    for rel in rule.conclusion.relations:
        args = tuple(placed[arg] if arg is not None else None for arg in rel.args)
        existing = next(
            (r for r in relations if r.args == args and v.is_generalization(rel.type, r.type)), None,
        )
        if existing is not None:
            placed[rel.id] = existing.id
            continue
        new_id = _fresh_id(f"{rule.name}.{rel.id}", taken)
        relations.append(RelationNode(id=new_id, type=rel.type, args=args))
        placed[rel.id] = new_id

    extended = ConceptualGraph(id=g.id, concepts=tuple(concepts), relations=tuple(relations), source=g.source)
    return extended.with_concept_types(retype), placed
