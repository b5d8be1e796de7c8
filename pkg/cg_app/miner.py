"""
Generalized frequent pattern mining over translated CG databases.

Mining runs in three steps. Structural patterns are grown gSpan-style over
labels collapsed to the root of their taxonomy paths. Each frequent
structural pattern is then specialized one path segment at a time until no
further specialization is frequent. Finally extension rules let a
specialized pattern jump straight to the rule conclusion.
"""

import logging
import math
import time
from collections import defaultdict, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from .dfs import (
    DFSCode, DFSEdge, LabeledGraph, NodeLabel, argument_classes, canonical_code, code_string, code_vertex_count,
    edge_key, graph_from_code, is_min_code, rightmost_path,
)
from .exceptions import ConfigError, ValidationFailed
from .matching import count_support, embeds
from .models import ConceptualGraph, LambdaRule, TypePath, Vocabulary, validate_database
from .postprocessor import MINED, PatternRecord, is_rule_provenance, prune, rule_provenance
from .rules import apply_rule, find_homomorphisms
from .translator import (
    TranslationOptions, build_node_graph, pattern_to_graph, translate_database, truncate_by_signature,
    vertex_node_ids,
)

logger = logging.getLogger(__name__)

MODULES = ("bricks", "signatures", "rules")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MiningConfig:
    """
    Fields:
    - minsup: absolute support threshold (number of graphs), at least 1
    - bricks / signatures / rules: module flags; all off is the plain
      generalized-mining baseline over raw CG nodes
    - max_size: optional bound on the number of mined graph vertices
      (bricks, or raw nodes when bricks are off)
    - seed: echoed in run summaries; mining itself draws no random numbers
    - workers: process count; 1 runs everything in this process
    - injective: count support with injective matching instead of homomorphisms
    - strict_markers: keep individual markers in labels while mining
    """
    minsup: int = 1
    bricks: bool = True
    signatures: bool = True
    rules: bool = True
    max_size: Optional[int] = None
    seed: int = 0
    workers: int = 1
    injective: bool = False
    strict_markers: bool = False

    def __post_init__(self):
        if self.minsup < 1:
            raise ConfigError(f"minsup must be at least 1, got {self.minsup}")
        if self.max_size is not None and self.max_size < 1:
            raise ConfigError(f"max_size must be at least 1, got {self.max_size}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

    @property
    def translation_options(self) -> TranslationOptions:
        return TranslationOptions(bricks=self.bricks, signatures=self.signatures, strict_markers=self.strict_markers)

    @property
    def modules(self) -> Tuple[str, ...]:
        return tuple(name for name in MODULES if getattr(self, name))


def parse_modules(text: str) -> Dict[str, bool]:
    """Turn "bricks,signatures" (or "all" / "none") into module flags."""
    names = {part.strip().lower() for part in (text or "").split(",") if part.strip()}
    if names == {"all"}:
        return {name: True for name in MODULES}
    if names == {"none"} or not names:
        return {name: False for name in MODULES}
    unknown = sorted(names - set(MODULES))
    if unknown:
        raise ConfigError(f"Unknown module(s): {', '.join(unknown)} (choose from {', '.join(MODULES)}, all, none)")
    return {name: name in names for name in MODULES}


def resolve_minsup(value, db_size: int) -> int:
    """
    Absolute minsup from a CLI value.

    "3" is an absolute count; "0.1" or "10%" is a fraction of the database,
    rounded up.
    """
    text = str(value).strip()
    try:
        if text.endswith("%"):
            fraction = float(text[:-1]) / 100
        elif "." in text:
            fraction = float(text)
        else:
            absolute = int(text)
            if absolute < 1:
                raise ConfigError(f"Absolute minsup must be at least 1, got {absolute}")
            return absolute
    except ValueError:
        raise ConfigError(f"Invalid minsup {value!r}") from None
    if not 0 < fraction <= 1:
        raise ConfigError(f"Relative minsup must be in (0, 1], got {text}")
    return max(1, math.ceil(round(fraction * db_size, 9)))


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """
    A labeled pattern with its support.

    Labels of `graph` are prefixes of full taxonomy paths; `tids` are the
    indexes of the supporting database graphs.
    """
    graph: LabeledGraph
    support: int
    tids: Tuple[int, ...]
    provenance: str = MINED
    canonical: str = ""

    @classmethod
    def of(cls, graph: LabeledGraph, support: int, tids: Sequence[int], provenance: str = MINED,
           canonical: Optional[str] = None) -> "Pattern":
        return cls(graph, support, tuple(tids), provenance, canonical or canonical_code(graph))

    @property
    def size(self) -> int:
        return self.graph.size


@dataclass(frozen=True)
class RuleJump:
    rule: str
    source: Pattern
    extended: Pattern
    frontier: Tuple[Pattern, ...]


@dataclass
class MiningResult:
    records: List[PatternRecord] = field(default_factory=list)
    pruned_count: int = 0
    timings_ms: Dict[str, float] = field(default_factory=dict)
    counts: Dict[str, int] = field(default_factory=dict)


class _Embedding(NamedTuple):
    tid: int
    vertices: Tuple[int, ...]
    edges: FrozenSet[int]


def collapse_label(label: NodeLabel) -> NodeLabel:
    relation, arguments, classes = label
    return relation[:1], tuple(path[:1] for path in arguments), classes


def collapse_graph(g: LabeledGraph) -> LabeledGraph:
    """Same graph with every path cut down to its root segment."""
    return LabeledGraph(
        graph_id=g.graph_id,
        labels=tuple(collapse_label(label) for label in g.labels),
        edges=tuple((a, b, (pos_a, pos_b, path[:1])) for a, b, (pos_a, pos_b, path) in g.edges),
    )


class LabelTrie:
    """Next path segments seen in the database below each path prefix."""

    def __init__(self, paths):
        children = defaultdict(set)
        for path in paths:
            for depth in range(1, len(path)):
                children[path[:depth]].add(path[depth])
        self._children = {prefix: tuple(sorted(names)) for prefix, names in children.items()}

    def next_segments(self, prefix: TypePath) -> Tuple[str, ...]:
        return self._children.get(prefix, ())


def _extension_order(edge: DFSEdge):
    if edge.is_forward:
        return (1, -edge.i, edge_key(edge.edge_label), edge.label_j)
    return (0, edge.j, edge_key(edge.edge_label))


def _slots(graph: LabeledGraph):
    """Every specializable label position: ("relation", vertex, 0), ("argument", vertex, pos), ("edge", index, 0)."""
    for vertex, (relation, arguments, _) in enumerate(graph.labels):
        if relation:
            yield "relation", vertex, 0
        for position, path in enumerate(arguments, start=1):
            if path:
                yield "argument", vertex, position
    for index, (_, _, (_, _, path)) in enumerate(graph.edges):
        if path:
            yield "edge", index, 0


def _slot_path(graph: LabeledGraph, slot) -> TypePath:
    kind, index, position = slot
    if kind == "edge":
        return graph.edges[index][2][2]
    relation, arguments, _ = graph.labels[index]
    return relation if kind == "relation" else arguments[position - 1]


def _specialize_slot(graph: LabeledGraph, slot, segment: str) -> LabeledGraph:
    kind, index, position = slot
    if kind == "edge":
        a, b, (pos_a, pos_b, path) = graph.edges[index]
        edges = list(graph.edges)
        edges[index] = (a, b, (pos_a, pos_b, path + (segment,)))
        return LabeledGraph(graph.graph_id, graph.labels, tuple(edges))
    labels = list(graph.labels)
    relation, arguments, classes = labels[index]
    if kind == "relation":
        labels[index] = (relation + (segment,), arguments, classes)
    else:
        arguments = list(arguments)
        arguments[position - 1] = arguments[position - 1] + (segment,)
        labels[index] = (relation, tuple(arguments), classes)
    return LabeledGraph(graph.graph_id, tuple(labels), graph.edges)


# ---------------------------------------------------------------------------
# Miner
# ---------------------------------------------------------------------------

class Miner:
    """
    Mining state shared by every search branch.

    The translated database is read-only; a Miner is pickled once into each
    worker process.
    """

    def __init__(self, db: Sequence[LabeledGraph], config: MiningConfig, v: Optional[Vocabulary] = None,
                 extension_rules: Sequence[LambdaRule] = ()):
        self.db = list(db)
        self.db_root = [collapse_graph(g) for g in self.db]
        self.config = config
        self.v = v
        self.extension_rules = tuple(extension_rules)
        self.tries = {
            "relation": LabelTrie(label[0] for g in self.db for label in g.labels if label[0]),
            "argument": LabelTrie(path for g in self.db for label in g.labels for path in label[1]),
            "edge": LabelTrie(label[2] for g in self.db for _, _, label in g.edges),
        }

    # --- support -------------------------------------------------------------

    def support(self, graph: LabeledGraph, tids: Optional[Sequence[int]] = None) -> Tuple[int, Tuple[int, ...]]:
        return count_support(graph, self.db, tids, self.config.injective)

    # --- structural step ----------------------------------------------------

    def root_labels(self) -> List[NodeLabel]:
        """Root-collapsed vertex labels that are frequent on their own, sorted."""
        tids_by_label: Dict[NodeLabel, set] = defaultdict(set)
        for tid, g in enumerate(self.db_root):
            for label in g.labels:
                tids_by_label[label].add(tid)
        return sorted(label for label, tids in tids_by_label.items() if len(tids) >= self.config.minsup)

    def structural(self, root: NodeLabel) -> List[Pattern]:
        """Frequent root-collapsed patterns whose minimum code starts at a `root` vertex."""
        embeddings = [
            _Embedding(tid, (vertex,), frozenset())
            for tid, g in enumerate(self.db_root)
            for vertex, label in enumerate(g.labels) if label == root
        ]
        tids = tuple(sorted({e.tid for e in embeddings}))
        found: List[Pattern] = []
        if len(tids) >= self.config.minsup:
            self._grow((DFSEdge(0, 0, root, None, None),), embeddings, tids, found)
        return found

    def _grow(self, code: DFSCode, embeddings: List[_Embedding], tids: Tuple[int, ...], found: List[Pattern]):
        found.append(Pattern.of(graph_from_code(code), len(tids), tids, MINED, code_string(code)))
        extensions = self._extensions(code, embeddings)
        for edge in sorted(extensions, key=_extension_order):
            child_code = (edge,) if code[0].edge_label is None else code + (edge,)
            if not is_min_code(child_code):
                continue
            child_embeddings = extensions[edge]
            if self.config.injective:
                child_tids = tuple(sorted({e.tid for e in child_embeddings}))
            else:
                _, child_tids = count_support(graph_from_code(child_code), self.db_root, tids)
            if len(child_tids) < self.config.minsup:
                continue
            self._grow(child_code, child_embeddings, child_tids, found)

    def _extensions(self, code: DFSCode, embeddings: List[_Embedding]) -> Dict[DFSEdge, List[_Embedding]]:
        vertex_count = code_vertex_count(code)
        rmpath = rightmost_path(code)
        rightmost = rmpath[0]
        can_grow = self.config.max_size is None or vertex_count < self.config.max_size
        result: Dict[DFSEdge, List[_Embedding]] = defaultdict(list)
        for emb in embeddings:
            g = self.db_root[emb.tid]
            position = {vertex: k for k, vertex in enumerate(emb.vertices)}
            source = emb.vertices[rightmost]
            for neighbour, edge_index, label in g.adjacency[source]:
                if edge_index in emb.edges or neighbour not in position:
                    continue
                j = position[neighbour]
                if j not in rmpath:
                    continue
                edge = DFSEdge(rightmost, j, g.labels[source], label, g.labels[neighbour])
                result[edge].append(emb._replace(edges=emb.edges | {edge_index}))
            if not can_grow:
                continue
            for i in rmpath:
                source = emb.vertices[i]
                for neighbour, edge_index, label in g.adjacency[source]:
                    if neighbour in position:
                        continue
                    edge = DFSEdge(i, vertex_count, g.labels[source], label, g.labels[neighbour])
                    result[edge].append(_Embedding(emb.tid, emb.vertices + (neighbour,), emb.edges | {edge_index}))
        return result

    # --- specialization step ------------------------------------------------

    def specialize(self, pattern: Pattern) -> List[Pattern]:
        """
        Maximally specialized frequent versions of a frequent pattern.

        Walks the lattice of label specializations breadth-first, one path
        segment per step, and keeps the patterns none of whose one-step
        specializations is frequent.
        """
        frequent_by_code = {pattern.canonical: True}
        queue = deque([pattern])
        frontier = []
        while queue:
            current = queue.popleft()
            has_frequent_child = False
            for slot in _slots(current.graph):
                for segment in self.tries[slot[0]].next_segments(_slot_path(current.graph, slot)):
                    child = _specialize_slot(current.graph, slot, segment)
                    key = canonical_code(child)
                    if key in frequent_by_code:
                        has_frequent_child = has_frequent_child or frequent_by_code[key]
                        continue
                    count, tids = self.support(child, current.tids)
                    frequent = count >= self.config.minsup
                    frequent_by_code[key] = frequent
                    if frequent:
                        has_frequent_child = True
                        queue.append(Pattern(child, count, tids, current.provenance, key))
            if not has_frequent_child:
                frontier.append(current)
        logger.debug("Specialized %s into %d frontier pattern(s)", pattern.canonical, len(frontier))
        return frontier

    # --- extension rules ----------------------------------------------------

    def extend(self, pattern: Pattern, rule: LambdaRule) -> Optional[Pattern]:
        """The pattern grown with the conclusion of `rule`, when the hypothesis embeds and the result is frequent."""
        v = self.v
        cg = pattern_to_graph(pattern.graph, v, self.config.bricks)
        mapping = next(find_homomorphisms(rule.hypothesis, cg, v), None)
        if mapping is None:
            return None
        extended_cg, _ = apply_rule(cg, rule, v, mapping)
        graph = self._extend_graph(pattern.graph, cg, extended_cg)
        if graph is None:
            return None
        if self.config.max_size is not None and graph.size > self.config.max_size:
            logger.debug("Rule %r: extension of %s exceeds max size", rule.name, pattern.canonical)
            return None
        if not graph.is_connected():
            logger.debug("Rule %r: conclusion does not connect to %s", rule.name, pattern.canonical)
            return None
        count, tids = self.support(graph, pattern.tids)
        if count < self.config.minsup:
            logger.debug("Rule %r: extension of %s is infrequent (%d), keeping the pattern",
                         rule.name, pattern.canonical, count)
            return None
        return Pattern.of(graph, count, tids, rule_provenance(rule.name))

    def _concept_path(self, g: ConceptualGraph, relation_type: str, position: int, concept_id: str) -> TypePath:
        concept = g.concept(concept_id)
        path = truncate_by_signature(self.v.path(concept.type), relation_type, position, self.v,
                                     enabled=self.config.signatures)
        if concept.marker is not None and self.config.strict_markers:
            path = path + (concept.marker,)
        return path

    def _retyped_path(self, path: TypePath, g: ConceptualGraph, concept_id: str) -> TypePath:
        """`path` run down to the current type of the concept, from the same first segment."""
        concept = g.concept(concept_id)
        full = self.v.path(concept.type)
        if concept.marker is not None and self.config.strict_markers:
            full = full + (concept.marker,)
        if path and path[0] in full:
            return full[full.index(path[0]):]
        return path

    def _extend_graph(self, graph: LabeledGraph, cg: ConceptualGraph,
                      extended: ConceptualGraph) -> Optional[LabeledGraph]:
        known = {node.id for node in (*cg.concepts, *cg.relations)}
        new_relations = [rel for rel in extended.relations if rel.id not in known]
        new_concepts = [c for c in extended.concepts if c.id not in known]
        retyped = {c.id for c in cg.concepts if extended.concept(c.id).type != c.type}
        ids = vertex_node_ids(graph, self.config.bricks)
        labels = list(graph.labels)
        edges = list(graph.edges)

        if self.config.bricks:
            if not new_relations:
                return None
            relations = {rel.id: rel for rel in extended.relations}

            def concept_at(vertex: int, position: int) -> str:
                return relations[ids[vertex]].args[position - 1]

            for vertex, rel_id in enumerate(ids):
                relation, arguments, classes = labels[vertex]
                args = relations[rel_id].args
                if retyped.intersection(args):
                    arguments = tuple(
                        self._retyped_path(path, extended, arg) if arg in retyped else path
                        for arg, path in zip(args, arguments)
                    )
                    labels[vertex] = (relation, arguments, classes)
            for index, (a, b, (pos_a, pos_b, path)) in enumerate(edges):
                if concept_at(a, pos_a) in retyped:
                    edges[index] = (a, b, (pos_a, pos_b, self._retyped_path(path, extended, concept_at(a, pos_a))))

            incidence: Dict[str, List[Tuple[int, int, TypePath]]] = defaultdict(list)
            for vertex in range(len(ids)):
                for position, path in enumerate(labels[vertex][1], start=1):
                    incidence[concept_at(vertex, position)].append((vertex, position, path))
            for rel in new_relations:
                vertex = len(labels)
                paths = tuple(self._concept_path(extended, rel.type, p, arg) for p, arg in enumerate(rel.args, start=1))
                labels.append((self.v.relation_chain(rel.type), paths, argument_classes(rel.args)))
                for position, arg in enumerate(rel.args, start=1):
                    path = paths[position - 1]
                    for other, other_position, other_path in incidence[arg]:
                        if other == vertex:
                            continue
                        shared = path
                        if other_path and other_path[0] in path:
                            shared = path[path.index(other_path[0]):]
                        edges.append((other, vertex, (other_position, position, shared)))
                    incidence[arg].append((vertex, position, path))
            return LabeledGraph(graph.graph_id, tuple(labels), tuple(edges))

        if not new_relations and not new_concepts:
            return None
        raw = build_node_graph(extended, self.v, self.config.translation_options)
        raw_index = {c.id: len(extended.relations) + k for k, c in enumerate(extended.concepts)}
        concept_vertex = {node_id: vertex for vertex, node_id in enumerate(ids) if node_id.startswith("c")}
        for node_id, vertex in concept_vertex.items():
            if node_id in retyped:
                path = labels[vertex][1][0]
                labels[vertex] = ((), (self._retyped_path(path, extended, node_id),), ())
        for concept in new_concepts:
            concept_vertex[concept.id] = len(labels)
            labels.append(raw.labels[raw_index[concept.id]])
        for rel in new_relations:
            vertex = len(labels)
            labels.append((self.v.relation_chain(rel.type), (), ()))
            for position, arg in enumerate(rel.args, start=1):
                if arg is not None:
                    edges.append((vertex, concept_vertex[arg], (position, 0, ())))
        return LabeledGraph(graph.graph_id, tuple(labels), tuple(edges))

    def apply_extension_rules(self, pattern: Pattern, fired: FrozenSet[str] = frozenset()) -> List[Tuple[LambdaRule, Pattern]]:
        """(rule, extended pattern) for each extension rule, in file order, that fires on `pattern`."""
        jumps = []
        for rule in self.extension_rules:
            if rule.name in fired:
                continue
            extended = self.extend(pattern, rule)
            if extended is not None:
                jumps.append((rule, extended))
        return jumps

    def _jump(self, pattern: Pattern, fired: FrozenSet[str], emitted: List[Pattern], jumps: List[RuleJump]):
        for rule, extended in self.apply_extension_rules(pattern, fired):
            frontier = tuple(self.specialize(extended))
            jumps.append(RuleJump(rule.name, pattern, extended, frontier))
            emitted.extend(frontier)
            for target in frontier:
                self._jump(target, fired | {rule.name}, emitted, jumps)

    # --- one search subtree -------------------------------------------------

    def explore(self, root: NodeLabel) -> Tuple[List[Pattern], List[RuleJump], int]:
        """Structural mining, specialization and rule jumps below one root label."""
        structural = self.structural(root)
        emitted: List[Pattern] = []
        jumps: List[RuleJump] = []
        for candidate in structural:
            for pattern in self.specialize(candidate):
                emitted.append(pattern)
                if self.extension_rules:
                    self._jump(pattern, frozenset(), emitted, jumps)
        return emitted, jumps, len(structural)


_WORKER_MINER: Optional[Miner] = None


def _init_worker(miner: Miner):
    global _WORKER_MINER
    _WORKER_MINER = miner


def _explore_root(root: NodeLabel):
    return _WORKER_MINER.explore(root)


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def support(p: LabeledGraph, db: Sequence[LabeledGraph], injective: bool = False) -> int:
    """Number of database graphs admitting a label-compatible homomorphism from p."""
    return count_support(p, db, None, injective)[0]


def mine_structural(db: Sequence[LabeledGraph], config: MiningConfig) -> List[Pattern]:
    miner = Miner(db, config)
    patterns = [p for root in miner.root_labels() for p in miner.structural(root)]
    return sorted(patterns, key=lambda p: p.canonical)


def specialize(p: Pattern, db: Sequence[LabeledGraph], config: MiningConfig) -> List[Pattern]:
    return Miner(db, config).specialize(p)


def apply_extension_rules(p: Pattern, rules: Sequence[LambdaRule], db: Sequence[LabeledGraph], v: Vocabulary,
                          config: MiningConfig) -> Optional[Pattern]:
    """First extended pattern produced by the rules, in file order; None when no rule fires."""
    jumps = Miner(db, config, v, rules).apply_extension_rules(p)
    return jumps[0][1] if jumps else None


def suppressed_by_jumps(patterns: Dict[str, Pattern], jumps: Sequence[RuleJump]) -> set:
    """
    Canonical codes of mined patterns a rule jump makes redundant.

    A pattern r is dropped when the jump source p embeds in r, r embeds in
    the extended pattern or one of its frontier patterns q, r is not q, and
    r's size lies between those of p and the extended pattern.
    """
    suppressed = set()
    for jump in jumps:
        targets = (jump.extended,) + jump.frontier
        target_codes = {q.canonical for q in targets}
        low, high = jump.source.size, jump.extended.size
        for code in sorted(patterns):
            r = patterns[code]
            if code in suppressed or code in target_codes or is_rule_provenance(r.provenance):
                continue
            if not low <= r.size <= high:
                continue
            if embeds(jump.source.graph, r.graph) and any(embeds(r.graph, q.graph) for q in targets):
                suppressed.add(code)
    return suppressed


def _elapsed_ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000, 3)


def mine(db: Sequence[ConceptualGraph], v: Vocabulary, rules: Sequence[LambdaRule] = (),
         config: MiningConfig = MiningConfig()) -> MiningResult:
    """
    Full pipeline: validation, specialization rules, translation, mining,
    rule jumps, back-translation, signature pruning.

    Records are sorted by CG node count (desc), support (desc) and canonical
    code, then renamed P1, P2, ...
    """
    started = time.perf_counter()
    result = MiningResult()

    violations = validate_database(db, v, rules)
    if violations:
        raise ValidationFailed(violations)

    if rules and not config.rules:
        logger.warning("%d rule(s) supplied but the rules module is off; ignoring them", len(rules))
    active_rules = list(rules) if config.rules else []
    specialization_rules = [rule for rule in active_rules if rule.is_specialization(v)]
    extension_rules = [rule for rule in active_rules if rule.is_extension(v)]

    phase = time.perf_counter()
    translated = translate_database(db, v, specialization_rules, config.translation_options, config.workers)
    result.timings_ms["translate"] = _elapsed_ms(phase)

    phase = time.perf_counter()
    miner = Miner(translated, config, v, extension_rules)
    roots = miner.root_labels()
    if config.workers > 1 and len(roots) > 1:
        with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker, initargs=(miner,)) as pool:
            outcomes = list(pool.map(_explore_root, roots))
    else:
        outcomes = [miner.explore(root) for root in roots]

    patterns: Dict[str, Pattern] = {}
    jumps: List[RuleJump] = []
    structural_count = 0
    for emitted, root_jumps, explored in outcomes:
        structural_count += explored
        jumps.extend(root_jumps)
        for pattern in emitted:
            previous = patterns.get(pattern.canonical)
            if previous is None or (is_rule_provenance(pattern.provenance) and not is_rule_provenance(previous.provenance)):
                patterns[pattern.canonical] = pattern
    suppressed = suppressed_by_jumps(patterns, jumps)
    result.timings_ms["mine"] = _elapsed_ms(phase)

    phase = time.perf_counter()
    records = []
    for code in sorted(patterns):
        if code in suppressed:
            continue
        pattern = patterns[code]
        graph = pattern_to_graph(pattern.graph, v, config.bricks, graph_id="pattern")
        records.append(PatternRecord(graph, pattern.support, pattern.provenance, code))
    records.sort(key=lambda r: (-r.size, -r.support, r.canonical_code))

    signature_pruned = 0
    if config.signatures:
        records, signature_pruned = prune(records, v)
    result.records = [
        replace(record, pattern=replace(record.pattern, id=f"P{k}"),
                compressed=replace(record.compressed, graph=replace(record.compressed.graph, id=f"P{k}"))
                if record.compressed else None)
        for k, record in enumerate(records, start=1)
    ]
    result.timings_ms["postprocess"] = _elapsed_ms(phase)
    result.timings_ms["total"] = _elapsed_ms(started)

    result.pruned_count = len(suppressed) + signature_pruned
    result.counts = {
        "graphs": len(db),
        "minsup": config.minsup,
        "structural": structural_count,
        "frontier": len(patterns),
        "rule_extended": sum(1 for r in result.records if is_rule_provenance(r.provenance)),
        "rule_suppressed": len(suppressed),
        "signature_pruned": signature_pruned,
        "returned": len(result.records),
    }
    logger.info(
        "Mined %d pattern(s) from %d graph(s) at minsup %d (%d structural, %d pruned) in %.1f ms",
        len(result.records), len(db), config.minsup, structural_count, result.pruned_count,
        result.timings_ms["total"],
    )
    return result
