"""
Domain models of the conceptual graph formalism.

Nothing here is a database model: the app stores nothing, it reads and writes
JSON documents (see serializers.py). All values are immutable once built and
may be shared freely between worker processes.
"""

import logging
import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .exceptions import GraphError, RuleError, UnknownTypeError, VocabularyError

logger = logging.getLogger(__name__)

PATH_SEPARATOR = "_"
TypePath = Tuple[str, ...]

_RELATION_TOP = re.compile(r"^T(\d+)$")

SPECIALIZATION = "specialization"
EXTENSION = "extension"


def relation_top(arity: int) -> str:
    """Name of the virtual greatest relation type of the given arity."""
    return f"T{arity}"


def join_path(path: TypePath) -> str:
    return PATH_SEPARATOR.join(path)


def split_path(label: str) -> TypePath:
    return tuple(label.split(PATH_SEPARATOR)) if label else ()


@dataclass(frozen=True)
class ConceptType:
    name: str
    parent: Optional[str] = None


@dataclass(frozen=True)
class RelationType:
    """
    A relation type of the vocabulary.

    Fields:
    - name: type name, e.g. "fly-in"
    - arity: number of arguments, at least 1
    - signature: maximal concept type allowed at each argument position
    - parent: more general relation type of the same arity; None means the
      virtual top T<arity>
    """
    name: str
    arity: int
    signature: Tuple[str, ...]
    parent: Optional[str] = None


@dataclass(frozen=True)
class Individual:
    marker: str
    type: str


@dataclass(frozen=True)
class Vocabulary:
    """
    Ontological part of a CG knowledge base.

    Fields:
    - concept_types: tree of concept types with a single top (no parent)
    - relation_types: relation types with arity, signature and optional parent
    - individuals: individual markers with their concept type (tau)

    Hierarchies are trees: every type has at most one parent, so the chain
    from the top down to a type is unique. Construction raises
    VocabularyError when an invariant does not hold.
    """
    concept_types: Tuple[ConceptType, ...]
    relation_types: Tuple[RelationType, ...] = ()
    individuals: Tuple[Individual, ...] = ()

    def __post_init__(self):
        self._check_concepts()
        self._check_relations()
        self._check_individuals()

    # --- invariants ---------------------------------------------------------

    @staticmethod
    def _check_name(kind: str, name: str):
        if not name or PATH_SEPARATOR in name or name.strip() != name:
            raise VocabularyError(f"Invalid {kind} name {name!r}: must be non-empty without '_' or spaces")

    def _check_concepts(self):
        names = set()
        for ct in self.concept_types:
            self._check_name("concept type", ct.name)
            if ct.name in names:
                raise VocabularyError(f"Duplicate concept type {ct.name!r}")
            names.add(ct.name)
        for ct in self.concept_types:
            if ct.parent is not None and ct.parent not in names:
                raise VocabularyError(f"Concept type {ct.name!r} references unknown parent {ct.parent!r}")

        parents = {ct.name: ct.parent for ct in self.concept_types}
        _check_acyclic("concept", parents)

        roots = [ct.name for ct in self.concept_types if ct.parent is None]
        if not roots:
            raise VocabularyError("Missing top concept type (a type without parent)")
        if len(roots) > 1:
            raise VocabularyError(f"Several top concept types: {', '.join(roots)}")

    def _check_relations(self):
        names = set()
        for rt in self.relation_types:
            self._check_name("relation type", rt.name)
            if _RELATION_TOP.match(rt.name):
                raise VocabularyError(f"Relation type name {rt.name!r} is reserved for virtual tops")
            if rt.name in names:
                raise VocabularyError(f"Duplicate relation type {rt.name!r}")
            names.add(rt.name)
            if rt.arity < 1:
                raise VocabularyError(f"Relation type {rt.name!r} has arity {rt.arity} < 1")
            if len(rt.signature) != rt.arity:
                raise VocabularyError(
                    f"Signature of {rt.name!r} lists {len(rt.signature)} types for arity {rt.arity}"
                )
            for sig_type in rt.signature:
                if sig_type not in self._concepts:
                    raise VocabularyError(f"Signature of {rt.name!r} references unknown concept type {sig_type!r}")

        by_name = {rt.name: rt for rt in self.relation_types}
        for rt in self.relation_types:
            if rt.parent is None:
                continue
            parent = by_name.get(rt.parent)
            if parent is None:
                raise VocabularyError(f"Relation type {rt.name!r} references unknown parent {rt.parent!r}")
            if parent.arity != rt.arity:
                raise VocabularyError(
                    f"Relation type {rt.name!r} (arity {rt.arity}) has parent {rt.parent!r} of arity {parent.arity}"
                )
        _check_acyclic("relation", {rt.name: rt.parent for rt in self.relation_types})

    def _check_individuals(self):
        markers = set()
        type_names = set(self._concepts) | set(self._relations)
        for ind in self.individuals:
            self._check_name("marker", ind.marker)
            if ind.marker in markers:
                raise VocabularyError(f"Duplicate individual marker {ind.marker!r}")
            if ind.marker in type_names:
                raise VocabularyError(f"Marker {ind.marker!r} collides with a type name")
            if ind.type not in self._concepts:
                raise VocabularyError(f"Marker {ind.marker!r} is typed by unknown concept type {ind.type!r}")
            markers.add(ind.marker)

    # --- indexes ------------------------------------------------------------

    @cached_property
    def _concepts(self) -> Dict[str, ConceptType]:
        return {ct.name: ct for ct in self.concept_types}

    @cached_property
    def _relations(self) -> Dict[str, RelationType]:
        return {rt.name: rt for rt in self.relation_types}

    @cached_property
    def _markers(self) -> Dict[str, str]:
        return {ind.marker: ind.type for ind in self.individuals}

    @cached_property
    def _children(self) -> Dict[str, Tuple[str, ...]]:
        children: Dict[str, List[str]] = {name: [] for name in self._concepts}
        for ct in self.concept_types:
            if ct.parent is not None:
                children[ct.parent].append(ct.name)
        return {name: tuple(kids) for name, kids in children.items()}

    @cached_property
    def _concept_chains(self) -> Dict[str, TypePath]:
        chains: Dict[str, TypePath] = {}
        for name in self._concepts:
            chain = []
            current: Optional[str] = name
            while current is not None:
                chain.append(current)
                current = self._concepts[current].parent
            chains[name] = tuple(reversed(chain))
        return chains

    @property
    def top(self) -> str:
        return next(ct.name for ct in self.concept_types if ct.parent is None)

    # --- queries ------------------------------------------------------------

    def has_concept_type(self, name: str) -> bool:
        return name in self._concepts

    def has_relation_type(self, name: str) -> bool:
        if name in self._relations:
            return True
        match = _RELATION_TOP.match(name or "")
        return bool(match) and int(match.group(1)) >= 1

    def is_marker(self, name: str) -> bool:
        return name in self._markers

    def marker_type(self, marker: str) -> str:
        try:
            return self._markers[marker]
        except KeyError:
            raise UnknownTypeError(f"Unknown individual marker {marker!r}") from None

    def relation_type(self, name: str) -> RelationType:
        if name in self._relations:
            return self._relations[name]
        if self.has_relation_type(name):
            arity = int(_RELATION_TOP.match(name).group(1))
            return RelationType(name=name, arity=arity, signature=(self.top,) * arity)
        raise UnknownTypeError(f"Unknown relation type {name!r}")

    def arity(self, relation: str) -> int:
        return self.relation_type(relation).arity

    def signature(self, relation: str) -> Tuple[str, ...]:
        return self.relation_type(relation).signature

    def children(self, concept: str) -> Tuple[str, ...]:
        self.concept_chain(concept)
        return self._children[concept]

    def descendants(self, concept: str) -> Tuple[str, ...]:
        """Strict descendants of a concept type, in declaration order."""
        self.concept_chain(concept)
        return tuple(name for name, chain in self._concept_chains.items() if concept in chain[:-1])

    def concept_chain(self, name: str) -> TypePath:
        try:
            return self._concept_chains[name]
        except KeyError:
            raise UnknownTypeError(f"Unknown concept type {name!r}") from None

    def relation_chain(self, name: str) -> TypePath:
        rt = self.relation_type(name)
        if name not in self._relations:
            return (name,)
        chain = []
        current: Optional[RelationType] = rt
        while current is not None:
            chain.append(current.name)
            current = self._relations[current.parent] if current.parent else None
        chain.append(relation_top(rt.arity))
        return tuple(reversed(chain))

    def path(self, concept: str, marker: Optional[str] = None) -> TypePath:
        chain = self.concept_chain(concept)
        return chain + (marker,) if marker else chain

    def taxonomy_path(self, concept: str, marker: Optional[str] = None) -> str:
        return join_path(self.path(concept, marker))

    def is_generalization(self, a: str, b: str) -> bool:
        """True iff a = b or a is an ancestor of b (both concept or both relation types)."""
        if a in self._concepts and b in self._concepts:
            return a in self._concept_chains[b]
        if self.has_relation_type(a) and self.has_relation_type(b):
            return a in self.relation_chain(b)
        unknown = [name for name in (a, b) if name not in self._concepts and not self.has_relation_type(name)]
        if unknown:
            raise UnknownTypeError(f"Unknown type {unknown[0]!r}")
        raise UnknownTypeError(f"Types {a!r} and {b!r} belong to different hierarchies")

    def most_specific(self, a: str, b: str) -> Optional[str]:
        """The more specific of two comparable concept types, None if incomparable."""
        if self.is_generalization(a, b):
            return b
        if self.is_generalization(b, a):
            return a
        return None


def _check_acyclic(kind: str, parents: Mapping[str, Optional[str]]):
    for start in parents:
        seen = {start}
        current = parents[start]
        while current is not None:
            if current in seen:
                raise VocabularyError(f"Cycle in {kind} hierarchy through {current!r}")
            seen.add(current)
            current = parents.get(current)


def is_generalization(v: Vocabulary, a: str, b: str) -> bool:
    return v.is_generalization(a, b)


def taxonomy_path(v: Vocabulary, t: str, marker: Optional[str] = None) -> str:
    return v.taxonomy_path(t, marker)


@dataclass(frozen=True)
class ConceptNode:
    """A concept node: a type, an optional individual marker, and (in rules) a connection variable."""
    id: str
    type: str
    marker: Optional[str] = None
    var: Optional[str] = None


@dataclass(frozen=True)
class RelationNode:
    """
    A relation node with its ordered arguments.

    Argument i is the concept node attached by the edge labelled i+1. Pattern
    graphs of the non-brick baseline may leave arguments unset (None).
    """
    id: str
    type: str
    args: Tuple[Optional[str], ...]

    @property
    def is_complete(self) -> bool:
        return all(arg is not None for arg in self.args)


@dataclass(frozen=True)
class ConceptualGraph:
    """
    A conceptual graph: bipartite multigraph of concept and relation nodes.

    Fields:
    - id: graph identifier, unique within a database
    - concepts: concept nodes
    - relations: relation nodes; edges are the positional argument lists
    - source: free provenance tag
    """
    id: str
    concepts: Tuple[ConceptNode, ...] = ()
    relations: Tuple[RelationNode, ...] = ()
    source: str = ""

    def __post_init__(self):
        seen = set()
        for node in (*self.concepts, *self.relations):
            if node.id in seen:
                raise GraphError(f"Graph {self.id!r}: duplicate node id {node.id!r}")
            seen.add(node.id)

    @cached_property
    def _concept_index(self) -> Dict[str, ConceptNode]:
        return {c.id: c for c in self.concepts}

    def concept(self, node_id: str) -> ConceptNode:
        return self._concept_index[node_id]

    @property
    def node_count(self) -> int:
        return len(self.concepts) + len(self.relations)

    @property
    def is_empty(self) -> bool:
        return not self.concepts and not self.relations

    def unknown_references(self) -> List[Tuple[RelationNode, int, str]]:
        """(relation, 1-based position, argument) for every argument naming no concept of the graph."""
        return [
            (rel, position, arg)
            for rel in self.relations
            for position, arg in enumerate(rel.args, start=1)
            if arg is not None and arg not in self._concept_index
        ]

    def check_references(self) -> None:
        for rel, _, arg in self.unknown_references():
            raise GraphError(f"Graph {self.id!r}: relation {rel.id!r} references unknown concept {arg!r}")

    def isolated_concepts(self) -> Tuple[ConceptNode, ...]:
        used = {arg for rel in self.relations for arg in rel.args if arg is not None}
        return tuple(c for c in self.concepts if c.id not in used)

    def with_concept_types(self, types: Mapping[str, str]) -> "ConceptualGraph":
        """Copy with the concept types of the given node ids replaced."""
        if not types:
            return self
        concepts = tuple(replace(c, type=types[c.id]) if c.id in types else c for c in self.concepts)
        return replace(self, concepts=concepts)


@dataclass(frozen=True)
class Violation:
    graph_id: str
    node_id: str
    message: str
    position: Optional[int] = None

    def __str__(self):
        where = f"{self.graph_id}/{self.node_id}"
        if self.position is not None:
            where += f" position {self.position}"
        return f"{where}: {self.message}"


def validate_graph(g: ConceptualGraph, v: Vocabulary) -> List[Violation]:
    """List every way g breaks the vocabulary; an empty list means g is well-formed."""
    violations = []
    concept_ids = {c.id for c in g.concepts}
    for concept in g.concepts:
        if not v.has_concept_type(concept.type):
            violations.append(Violation(g.id, concept.id, f"unknown concept type {concept.type!r}"))
            continue
        if concept.marker is not None:
            if not v.is_marker(concept.marker):
                violations.append(Violation(g.id, concept.id, f"unknown individual marker {concept.marker!r}"))
            elif not v.is_generalization(concept.type, v.marker_type(concept.marker)):
                violations.append(Violation(
                    g.id, concept.id,
                    f"marker {concept.marker!r} is a {v.marker_type(concept.marker)}, not a {concept.type}",
                ))

    for rel in g.relations:
        if not v.has_relation_type(rel.type):
            violations.append(Violation(g.id, rel.id, f"unknown relation type {rel.type!r}"))
            continue
        rt = v.relation_type(rel.type)
        if len(rel.args) != rt.arity:
            violations.append(Violation(
                g.id, rel.id, f"arity violation: {rel.type} takes {rt.arity} arguments, got {len(rel.args)}",
            ))
            continue
        for position, (arg, sig_type) in enumerate(zip(rel.args, rt.signature), start=1):
            if arg is None:
                violations.append(Violation(g.id, rel.id, "arity violation: missing argument", position))
                continue
            if arg not in concept_ids:
                violations.append(Violation(g.id, rel.id, f"dangling reference: unknown concept {arg!r}", position))
                continue
            arg_type = g.concept(arg).type
            if v.has_concept_type(arg_type) and not v.is_generalization(sig_type, arg_type):
                violations.append(Violation(
                    g.id, rel.id, f"signature violation: {arg_type} is not a {sig_type}", position,
                ))
    return violations


def validate_database(db: Sequence[ConceptualGraph], v: Vocabulary,
                      rules: Sequence["LambdaRule"] = ()) -> List[Violation]:
    """Violations of every graph, then of both sides of every rule."""
    violations = [violation for g in db for violation in validate_graph(g, v)]
    for rule in rules:
        violations.extend(validate_graph(rule.hypothesis, v))
        violations.extend(validate_graph(rule.conclusion, v))
    return violations


@dataclass(frozen=True)
class Connection:
    var: str
    hyp: str
    concl: str


@dataclass(frozen=True)
class LambdaRule:
    """
    A lambda-rule: hypothesis and conclusion lambda-CGs glued by connection nodes.

    Connection concept nodes carry the variable (e.g. "*x") in their `var`
    field; each variable appears exactly once on each side.
    """
    name: str
    hypothesis: ConceptualGraph
    conclusion: ConceptualGraph
    connections: Tuple[Connection, ...] = ()

    def __post_init__(self):
        variables = [c.var for c in self.connections]
        if len(set(variables)) != len(variables):
            raise RuleError(f"Rule {self.name!r}: a connection variable is listed twice")
        for side, graph, attr in (("hypothesis", self.hypothesis, "hyp"), ("conclusion", self.conclusion, "concl")):
            by_var: Dict[str, List[str]] = {}
            for node in graph.concepts:
                if node.var is not None:
                    by_var.setdefault(node.var, []).append(node.id)
            for var, nodes in by_var.items():
                if len(nodes) > 1:
                    raise RuleError(f"Rule {self.name!r}: variable {var!r} occurs {len(nodes)} times in the {side}")
                if var not in variables:
                    raise RuleError(f"Rule {self.name!r}: variable {var!r} in the {side} has no connection")
            for connection in self.connections:
                node_id = getattr(connection, attr)
                if by_var.get(connection.var) != [node_id]:
                    raise RuleError(
                        f"Rule {self.name!r}: connection {connection.var!r} does not match {side} node {node_id!r}"
                    )

    @cached_property
    def conclusion_to_hypothesis(self) -> Dict[str, str]:
        return {c.concl: c.hyp for c in self.connections}

    def classify(self, v: Vocabulary) -> FrozenSet[str]:
        kinds = set()
        for connection in self.connections:
            hyp_type = self.hypothesis.concept(connection.hyp).type
            concl_type = self.conclusion.concept(connection.concl).type
            if hyp_type != concl_type and v.is_generalization(hyp_type, concl_type):
                kinds.add(SPECIALIZATION)

        mapping = self.conclusion_to_hypothesis
        if any(c.id not in mapping for c in self.conclusion.concepts):
            kinds.add(EXTENSION)
        for rel in self.conclusion.relations:
            mapped = tuple(mapping.get(arg) for arg in rel.args)
            covered = None not in mapped and any(
                h.args == mapped and v.is_generalization(h.type, rel.type) for h in self.hypothesis.relations
            )
            if not covered:
                kinds.add(EXTENSION)
        return frozenset(kinds)

    def is_specialization(self, v: Vocabulary) -> bool:
        return SPECIALIZATION in self.classify(v)

    def is_extension(self, v: Vocabulary) -> bool:
        return EXTENSION in self.classify(v)
