"""
Pre- and post-processing between conceptual graphs and labeled graphs.

Pre-processing applies specialization rules, encodes concept and relation
types as taxonomy paths (optionally truncated at the signature type) and
turns each CG into a brick graph, or into a raw node graph when bricks are
disabled. Post-processing translates mined patterns back into CGs.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .dfs import LabeledGraph, NodeLabel, argument_classes, format_classes
from .exceptions import FormalismViolation, InternalInvariantError, RuleApplicationError
from .models import (
    ConceptNode, ConceptualGraph, LambdaRule, RelationNode, TypePath, Vocabulary,
    join_path, split_path,
)
from .rules import find_homomorphisms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TranslationOptions:
    bricks: bool = True
    signatures: bool = True
    strict_markers: bool = False


# ---------------------------------------------------------------------------
# Specialization rules
# ---------------------------------------------------------------------------

def apply_specialization_rules(g: ConceptualGraph, rules: Sequence[LambdaRule],
                               v: Vocabulary) -> ConceptualGraph:
    """
    Specialize the connection nodes matched by each rule hypothesis.

    Rules run in the given order; each rule is matched once against the graph
    left by the previous rules. A conclusion type incomparable with the node's
    current type is reported and the node is left as it is.
    """
    for rule in rules:
        retype: Dict[str, str] = {}
        for mapping in find_homomorphisms(rule.hypothesis, g, v):
            for connection in rule.connections:
                node_id = mapping[connection.hyp]
                wanted = rule.conclusion.concept(connection.concl).type
                current = retype.get(node_id, g.concept(node_id).type)
                if v.is_generalization(current, wanted):
                    retype[node_id] = wanted
                elif not v.is_generalization(wanted, current):
                    error = RuleApplicationError(
                        f"Rule {rule.name!r} cannot specialize {g.id}/{node_id} "
                        f"from {current} to incomparable type {wanted}"
                    )
                    logger.warning("%s", error)
                else:
                    logger.debug("Rule %r: %s is more general than %s at %s/%s, node left as it is",
                                 rule.name, wanted, current, g.id, node_id)
        changed = {node: t for node, t in retype.items() if g.concept(node).type != t}
        if changed:
            logger.debug("Rule %r specialized %d node(s) of graph %r", rule.name, len(changed), g.id)
        g = g.with_concept_types(changed)
    return g


# ---------------------------------------------------------------------------
# Taxonomy paths
# ---------------------------------------------------------------------------

def truncate_by_signature(path: Union[str, TypePath], rel: str, position: int, v: Vocabulary,
                          enabled: bool = True):
    """
    Cut `path` so that it starts at the signature type of `rel` at `position` (1-based).

    Accepts and returns either a '_'-joined label or a tuple of segments.
    """
    as_text = isinstance(path, str)
    segments = split_path(path) if as_text else tuple(path)
    if enabled:
        signature = v.signature(rel)
        if not 1 <= position <= len(signature):
            raise FormalismViolation(f"Relation {rel!r} has no argument position {position}")
        sig_type = signature[position - 1]
        if sig_type not in segments:
            raise FormalismViolation(
                f"Signature type {sig_type!r} of {rel} at position {position} is not on path {join_path(segments)!r}"
            )
        segments = segments[segments.index(sig_type):]
    return join_path(segments) if as_text else segments


def _strip(path: TypePath, marker: Optional[str], strict_markers: bool) -> TypePath:
    if marker is not None and not strict_markers:
        return path[:-1]
    return path


def split_marker(path: TypePath, v: Vocabulary) -> Tuple[TypePath, Optional[str]]:
    """Separate a trailing individual marker from a concept path."""
    if path and v.is_marker(path[-1]):
        return path[:-1], path[-1]
    return path, None


# ---------------------------------------------------------------------------
# Bricks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Brick:
    """
    A relation node together with its argument concept nodes.

    Argument paths keep an individual marker as their last segment; `markers`
    tells which positions carry one. `classes` marks the positions filled by
    the same concept (see dfs.argument_classes).
    """
    relation_path: TypePath
    argument_paths: Tuple[TypePath, ...]
    origin: Tuple[str, str]
    markers: Tuple[Optional[str], ...] = ()
    classes: Tuple[int, ...] = ()

    @property
    def label(self) -> str:
        text = join_path(self.relation_path) + "(" + ",".join(join_path(p) for p in self.argument_paths) + ")"
        return text + "{" + format_classes(self.classes) + "}" if self.classes else text

    def mining_label(self, strict_markers: bool = False) -> NodeLabel:
        markers = self.markers or (None,) * len(self.argument_paths)
        return (
            self.relation_path,
            tuple(_strip(path, marker, strict_markers) for path, marker in zip(self.argument_paths, markers)),
            self.classes,
        )


@dataclass(frozen=True)
class BrickEdge:
    """Undirected edge between bricks a and b sharing a concept at positions pos_a/pos_b (1-based)."""
    a: int
    pos_a: int
    b: int
    pos_b: int
    path: TypePath
    marker: Optional[str] = None


@dataclass(frozen=True)
class BrickGraph:
    graph_id: str
    nodes: Tuple[Brick, ...] = ()
    edges: Tuple[BrickEdge, ...] = ()
    isolated_concepts: Tuple[TypePath, ...] = field(default_factory=tuple)

    def to_labeled_graph(self, strict_markers: bool = False) -> LabeledGraph:
        return LabeledGraph(
            graph_id=self.graph_id,
            labels=tuple(brick.mining_label(strict_markers) for brick in self.nodes),
            edges=tuple(
                (e.a, e.b, (e.pos_a, e.pos_b, _strip(e.path, e.marker, strict_markers)))
                for e in self.edges
            ),
        )


def _argument_path(g: ConceptualGraph, rel: RelationNode, position: int, v: Vocabulary,
                   signatures: bool) -> Tuple[TypePath, Optional[str]]:
    concept = g.concept(rel.args[position - 1])
    path = truncate_by_signature(v.path(concept.type), rel.type, position, v, enabled=signatures)
    if concept.marker is not None:
        path = path + (concept.marker,)
    return path, concept.marker


def build_brick_graph(g: ConceptualGraph, v: Vocabulary,
                      options: TranslationOptions = TranslationOptions()) -> BrickGraph:
    bricks = []
    for rel in g.relations:
        arguments = [_argument_path(g, rel, p, v, options.signatures) for p in range(1, len(rel.args) + 1)]
        bricks.append(Brick(
            relation_path=v.relation_chain(rel.type),
            argument_paths=tuple(path for path, _ in arguments),
            origin=(g.id, rel.id),
            markers=tuple(marker for _, marker in arguments),
            classes=argument_classes(rel.args),
        ))

    edges = []
    for a, rel_a in enumerate(g.relations):
        for b in range(a + 1, len(g.relations)):
            rel_b = g.relations[b]
            for pos_a, concept_a in enumerate(rel_a.args, start=1):
                for pos_b, concept_b in enumerate(rel_b.args, start=1):
                    if concept_a != concept_b:
                        continue
                    path_a = bricks[a].argument_paths[pos_a - 1]
                    path_b = bricks[b].argument_paths[pos_b - 1]
                    # both are suffixes of the same full path; the shorter one is shared
                    shared = path_a if len(path_a) <= len(path_b) else path_b
                    edges.append(BrickEdge(a, pos_a, b, pos_b, shared, g.concept(concept_a).marker))

    isolated = tuple(v.path(c.type, c.marker) for c in g.isolated_concepts())
    return BrickGraph(graph_id=g.id, nodes=tuple(bricks), edges=tuple(edges), isolated_concepts=isolated)


def build_node_graph(g: ConceptualGraph, v: Vocabulary,
                     options: TranslationOptions = TranslationOptions(bricks=False)) -> LabeledGraph:
    """
    Raw labeled graph: one vertex per relation node and one per concept node.

    Relations come first in declaration order, then concepts. An edge joins a
    relation to its argument at (position, 0). With signatures on, a concept
    path starts at the deepest signature type among the positions it fills.
    """
    concept_vertex = {c.id: len(g.relations) + k for k, c in enumerate(g.concepts)}
    deepest: Dict[str, str] = {}
    for rel in g.relations:
        for position, arg in enumerate(rel.args, start=1):
            if arg is None:
                continue
            sig_type = v.signature(rel.type)[position - 1]
            current = deepest.get(arg)
            if current is None or v.is_generalization(current, sig_type):
                deepest[arg] = sig_type

    labels: List[NodeLabel] = [(v.relation_chain(rel.type), (), ()) for rel in g.relations]
    for concept in g.concepts:
        path = v.path(concept.type)
        if options.signatures and concept.id in deepest:
            sig_type = deepest[concept.id]
            if sig_type not in path:
                raise FormalismViolation(
                    f"Signature type {sig_type!r} is not on path {join_path(path)!r} of {g.id}/{concept.id}"
                )
            path = path[path.index(sig_type):]
        if concept.marker is not None and options.strict_markers:
            path = path + (concept.marker,)
        labels.append(((), (path,), ()))

    edges = []
    for index, rel in enumerate(g.relations):
        for position, arg in enumerate(rel.args, start=1):
            if arg is not None:
                edges.append((index, concept_vertex[arg], (position, 0, ())))
    return LabeledGraph(graph_id=g.id, labels=tuple(labels), edges=tuple(edges))


def translate_graph(g: ConceptualGraph, v: Vocabulary, rules: Sequence[LambdaRule] = (),
                    options: TranslationOptions = TranslationOptions()) -> LabeledGraph:
    g = apply_specialization_rules(g, rules, v)
    if options.bricks:
        return build_brick_graph(g, v, options).to_labeled_graph(options.strict_markers)
    return build_node_graph(g, v, options)


def _translate_job(job):
    g, v, rules, options = job
    return translate_graph(g, v, rules, options)


def translate_database(db: Sequence[ConceptualGraph], v: Vocabulary, rules: Sequence[LambdaRule] = (),
                       options: TranslationOptions = TranslationOptions(), workers: int = 1) -> List[LabeledGraph]:
    """Translate every graph; the result follows the input order whatever the worker count."""
    if workers <= 1 or len(db) < 2:
        return [translate_graph(g, v, rules, options) for g in db]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        jobs = ((g, v, tuple(rules), options) for g in db)
        return list(pool.map(_translate_job, jobs, chunksize=max(1, len(db) // (workers * 4))))


def dump_brick_graphs(db: Sequence[ConceptualGraph], v: Vocabulary, rules: Sequence[LambdaRule] = (),
                      options: TranslationOptions = TranslationOptions()) -> List[dict]:
    """Diagnostic view of the translated database, one dict per graph."""
    dumped = []
    for g in db:
        bg = build_brick_graph(apply_specialization_rules(g, rules, v), v, options)
        dumped.append({
            "id": bg.graph_id,
            "bricks": [{"id": brick.origin[1], "label": brick.label} for brick in bg.nodes],
            "edges": [
                {"a": bg.nodes[e.a].origin[1], "pos_a": e.pos_a,
                 "b": bg.nodes[e.b].origin[1], "pos_b": e.pos_b, "path": join_path(e.path)}
                for e in bg.edges
            ],
            "isolated_concepts": [join_path(p) for p in bg.isolated_concepts],
        })
    return dumped


# ---------------------------------------------------------------------------
# Back-translation
# ---------------------------------------------------------------------------

def _deepest(paths: Sequence[TypePath], v: Vocabulary, where: str) -> Tuple[str, Optional[str]]:
    best: Optional[str] = None
    marker: Optional[str] = None
    for path in paths:
        types, found_marker = split_marker(path, v)
        if found_marker is not None:
            if marker is not None and marker != found_marker:
                raise InternalInvariantError(f"{where}: conflicting markers {marker!r} and {found_marker!r}")
            marker = found_marker
        if not types:
            continue
        candidate = types[-1]
        if best is None:
            best = candidate
            continue
        merged = v.most_specific(best, candidate)
        if merged is None:
            raise InternalInvariantError(f"{where}: incomparable shared types {best!r} and {candidate!r}")
        best = merged
    if best is None:
        best = v.top
    return best, marker


def _slot_graph(labeled: LabeledGraph) -> nx.Graph:
    """Argument slots (brick, position) joined where they hold the same concept."""
    slots = nx.Graph()
    for k, (_, arguments, classes) in enumerate(labeled.labels):
        slots.add_nodes_from((k, position) for position in range(1, len(arguments) + 1))
        first: Dict[int, int] = {}
        for position, cls in enumerate(classes, start=1):
            if cls in first:
                slots.add_edge((k, first[cls]), (k, position))
            else:
                first[cls] = position
    slots.add_edges_from(((a, pos_a), (b, pos_b)) for a, b, (pos_a, pos_b, _) in labeled.edges)
    return slots


def back_translate(p: Union[BrickGraph, LabeledGraph], v: Vocabulary, graph_id: Optional[str] = None) -> ConceptualGraph:
    """
    Rebuild a CG pattern from a brick pattern.

    Brick k becomes relation node r<k+1>; its arguments become concept nodes
    c1, c2, ... in brick order, merged along edges and along repeated
    argument positions. A merged concept takes the deepest type seen on its
    slots. The result validates against the vocabulary when signature
    truncation was on (otherwise generalized argument labels may sit above
    the signature).
    """
    labeled = p.to_labeled_graph(strict_markers=True) if isinstance(p, BrickGraph) else p
    graph_id = graph_id or labeled.graph_id
    components = sorted((sorted(component) for component in nx.connected_components(_slot_graph(labeled))),
                        key=lambda component: component[0])

    owner = {slot: index for index, component in enumerate(components) for slot in component}
    members: List[List[TypePath]] = [
        [labeled.labels[k][1][position - 1] for k, position in component] for component in components
    ]
    for a, _, (pos_a, _, path) in labeled.edges:
        members[owner[(a, pos_a)]].append(path)

    concepts = []
    for index, paths in enumerate(members, start=1):
        node_id = f"c{index}"
        concept_type, marker = _deepest(paths, v, f"{graph_id}/{node_id}")
        concepts.append(ConceptNode(id=node_id, type=concept_type, marker=marker))

    relations = []
    for k, (relation_path, arguments, _) in enumerate(labeled.labels):
        args = tuple(f"c{owner[(k, position)] + 1}" for position in range(1, len(arguments) + 1))
        relations.append(RelationNode(id=f"r{k + 1}", type=relation_path[-1], args=args))
    return ConceptualGraph(id=graph_id, concepts=tuple(concepts), relations=tuple(relations))


def back_translate_nodes(p: LabeledGraph, v: Vocabulary, graph_id: Optional[str] = None) -> ConceptualGraph:
    """
    Rebuild a CG pattern from a raw node pattern.

    Relation vertices become relation nodes whose unmatched positions stay
    None (partial neighbourhoods); concept vertices become concept nodes.
    """
    graph_id = graph_id or p.graph_id
    ids: Dict[int, str] = {}
    concepts = []
    relation_vertices = []
    for k, (relation_path, arguments, _) in enumerate(p.labels):
        if relation_path:
            relation_vertices.append(k)
            continue
        types, marker = split_marker(arguments[0], v)
        node_id = f"c{len(concepts) + 1}"
        ids[k] = node_id
        concepts.append(ConceptNode(id=node_id, type=types[-1] if types else v.top, marker=marker))

    relations = []
    for k in relation_vertices:
        relation_path = p.labels[k][0]
        args: List[Optional[str]] = [None] * v.arity(relation_path[-1])
        for neighbour, _, (position, _, _) in p.adjacency[k]:
            if position < 1 or position > len(args) or neighbour not in ids:
                raise InternalInvariantError(f"{graph_id}: bad raw edge at relation vertex {k}")
            args[position - 1] = ids[neighbour]
        node_id = f"r{len(relations) + 1}"
        ids[k] = node_id
        relations.append(RelationNode(id=node_id, type=relation_path[-1], args=tuple(args)))
    return ConceptualGraph(id=graph_id, concepts=tuple(concepts), relations=tuple(relations))


def vertex_node_ids(p: LabeledGraph, bricks: bool) -> List[str]:
    """Node id that back-translation gives to the node built from each vertex of p."""
    if bricks:
        return [f"r{k + 1}" for k in range(p.size)]
    ids = []
    counts = {"c": 0, "r": 0}
    for relation_path, _, _ in p.labels:
        prefix = "r" if relation_path else "c"
        counts[prefix] += 1
        ids.append(f"{prefix}{counts[prefix]}")
    return ids


def pattern_to_graph(p: LabeledGraph, v: Vocabulary, bricks: bool, graph_id: Optional[str] = None) -> ConceptualGraph:
    if bricks:
        return back_translate(p, v, graph_id)
    return back_translate_nodes(p, v, graph_id)
