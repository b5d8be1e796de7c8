"""
CGGen: synthetic CG databases with planted seed patterns.

Seeds are copied verbatim into a fixed share of the graphs; the rest of each
graph is noise made of random signature-conforming bricks attached to
existing concept nodes. The manifest records where every seed was planted
so the mining results can be scored against it.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .exceptions import ConfigError, InternalInvariantError
from .models import (
    ConceptNode, ConceptType, ConceptualGraph, Individual, RelationNode, RelationType, Vocabulary,
    validate_graph,
)
from .serializers import graph_from_data

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-6


@dataclass(frozen=True)
class NoiseConfig:
    """
    Fields:
    - specialization_probability: chance a new noise concept is typed below its signature type
    - attach_probability: chance a brick argument reuses an existing compatible concept node
    - isolated_concept_probability: chance a growth step adds a lone concept node instead of a brick
    - marker_probability: chance a new noise concept gets an individual marker
    """
    specialization_probability: float = 0.5
    attach_probability: float = 0.5
    isolated_concept_probability: float = 0.0
    marker_probability: float = 0.0


@dataclass(frozen=True)
class SeedSpec:
    name: str
    pattern: ConceptualGraph
    frequency: float


@dataclass(frozen=True)
class GenConfig:
    """
    Generator parameters.

    size_distribution maps a target graph size (concept + relation nodes)
    to its probability; the label distributions map type names to
    probabilities and default to uniform over the vocabulary.
    """
    graph_count: int
    size_distribution: Mapping[int, float]
    concept_distribution: Mapping[str, float] = field(default_factory=dict)
    relation_distribution: Mapping[str, float] = field(default_factory=dict)
    seeds: Tuple[SeedSpec, ...] = ()
    noise: NoiseConfig = NoiseConfig()
    seed: int = 0

    def __post_init__(self):
        if self.graph_count < 0:
            raise ConfigError(f"graph_count must be >= 0, got {self.graph_count}")
        _check_distribution("size_distribution", self.size_distribution)
        if self.concept_distribution:
            _check_distribution("label_distribution.concepts", self.concept_distribution)
        if self.relation_distribution:
            _check_distribution("label_distribution.relations", self.relation_distribution)
        for spec in self.seeds:
            if not 0 < spec.frequency <= 1:
                raise ConfigError(f"Seed {spec.name!r}: frequency {spec.frequency} is not in (0, 1]")
        for name in ("specialization_probability", "attach_probability",
                     "isolated_concept_probability", "marker_probability"):
            value = getattr(self.noise, name)
            if not 0 <= value <= 1:
                raise ConfigError(f"noise.{name} must be in [0, 1], got {value}")

    def check_vocabulary(self, v: Vocabulary):
        for name in self.concept_distribution:
            if not v.has_concept_type(name):
                raise ConfigError(f"Label distribution names unknown concept type {name!r}")
        for name in self.relation_distribution:
            if name not in {rt.name for rt in v.relation_types}:
                raise ConfigError(f"Label distribution names unknown relation type {name!r}")
        for spec in self.seeds:
            violations = validate_graph(spec.pattern, v)
            if violations:
                raise ConfigError(f"Seed {spec.name!r} does not validate: {violations[0]}")
            if not spec.pattern.relations:
                raise ConfigError(f"Seed {spec.name!r} has no relation node")


def _check_distribution(name: str, distribution: Mapping) -> None:
    if not distribution:
        raise ConfigError(f"{name} is empty")
    weights = list(distribution.values())
    if any(w < 0 for w in weights):
        raise ConfigError(f"{name} has a negative probability")
    total = sum(weights)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise ConfigError(f"{name} is not normalized (sums to {total:.6g})")


def gen_config_from_data(data: Mapping, graph_count: Optional[int] = None, seed: Optional[int] = None) -> GenConfig:
    """Build a GenConfig from validated generator-config data, with optional CLI overrides."""
    labels = data.get("label_distribution") or {}
    noise = data.get("noise") or {}
    seeds = tuple(
        SeedSpec(
            name=item.get("name") or f"seed{k}",
            pattern=graph_from_data(item["pattern"]),
            frequency=item["frequency"],
        )
        for k, item in enumerate(data.get("seeds", []), start=1)
    )
    return GenConfig(
        graph_count=data["graph_count"] if graph_count is None else graph_count,
        size_distribution={int(size): weight for size, weight in data["size_distribution"].items()},
        concept_distribution=dict(labels.get("concepts", {})),
        relation_distribution=dict(labels.get("relations", {})),
        seeds=seeds,
        noise=NoiseConfig(**noise),
        seed=data.get("seed", 0) if seed is None else seed,
    )


class DistributionSampler:
    """Draws graph sizes and labels from the configured distributions."""

    def __init__(self, config: GenConfig, v: Optional[Vocabulary] = None):
        sizes = sorted(config.size_distribution)
        self.sizes = np.array(sizes)
        self.size_weights = np.array([config.size_distribution[s] for s in sizes], dtype=float)

        if config.concept_distribution:
            self.concepts = list(config.concept_distribution)
            self.concept_weights = np.array([config.concept_distribution[c] for c in self.concepts], dtype=float)
        elif v is not None:
            self.concepts = [ct.name for ct in v.concept_types]
            self.concept_weights = np.full(len(self.concepts), 1.0 / len(self.concepts))
        else:
            raise ConfigError("A concept distribution or a vocabulary is needed to draw labels")

        if config.relation_distribution:
            self.relations = list(config.relation_distribution)
            self.relation_weights = np.array([config.relation_distribution[r] for r in self.relations], dtype=float)
        elif v is not None and v.relation_types:
            self.relations = [rt.name for rt in v.relation_types]
            self.relation_weights = np.full(len(self.relations), 1.0 / len(self.relations))
        else:
            self.relations = []
            self.relation_weights = np.array([])

    def draw_size(self, rng: np.random.Generator) -> int:
        return int(self.sizes[rng.choice(len(self.sizes), p=self.size_weights)])

    def draw_concept(self, rng: np.random.Generator, v: Optional[Vocabulary] = None,
                     under: Optional[str] = None) -> str:
        """A concept type; with `under`, restricted to that type and its descendants."""
        names, weights = self.concepts, self.concept_weights
        if under is not None:
            allowed = [k for k, name in enumerate(names) if v.is_generalization(under, name)]
            total = float(self.concept_weights[allowed].sum()) if allowed else 0.0
            if total <= 0:
                return under
            names = [names[k] for k in allowed]
            weights = self.concept_weights[allowed] / total
        return names[int(rng.choice(len(names), p=weights))]

    def draw_relation(self, rng: np.random.Generator) -> str:
        if not self.relations:
            raise ConfigError("No relation type to draw noise bricks from")
        return self.relations[int(rng.choice(len(self.relations), p=self.relation_weights))]


def sample_distributions(config: GenConfig, rng: np.random.Generator,
                         v: Optional[Vocabulary] = None) -> Tuple[int, List[str]]:
    """A graph size and that many concept-type draws."""
    sampler = DistributionSampler(config, v)
    size = sampler.draw_size(rng)
    return size, [sampler.draw_concept(rng) for _ in range(size)]


# ---------------------------------------------------------------------------
# Graph construction
# ---------------------------------------------------------------------------

class _GraphBuilder:
    def __init__(self, graph_id: str, v: Vocabulary, sampler: DistributionSampler, noise: NoiseConfig,
                 rng: np.random.Generator):
        self.graph_id = graph_id
        self.v = v
        self.sampler = sampler
        self.noise = noise
        self.rng = rng
        self.concepts: List[ConceptNode] = []
        self.relations: List[RelationNode] = []

    @property
    def size(self) -> int:
        return len(self.concepts) + len(self.relations)

    def plant(self, index: int, pattern: ConceptualGraph):
        prefix = f"s{index}."
        for c in pattern.concepts:
            self.concepts.append(ConceptNode(id=prefix + c.id, type=c.type, marker=c.marker))
        for r in pattern.relations:
            self.relations.append(RelationNode(
                id=prefix + r.id, type=r.type, args=tuple(prefix + a for a in r.args),
            ))

    def _new_concept(self, under: str) -> ConceptNode:
        concept_type = under
        if self.rng.random() < self.noise.specialization_probability:
            concept_type = self.sampler.draw_concept(self.rng, self.v, under)
        marker = None
        if self.noise.marker_probability and self.rng.random() < self.noise.marker_probability:
            candidates = [ind.marker for ind in self.v.individuals
                          if self.v.is_generalization(concept_type, ind.type)]
            if candidates:
                marker = candidates[int(self.rng.integers(len(candidates)))]
        node = ConceptNode(id=f"n{self.size + 1}", type=concept_type, marker=marker)
        self.concepts.append(node)
        return node

    def add_isolated_concept(self):
        concept_type = self.sampler.draw_concept(self.rng)
        self.concepts.append(ConceptNode(id=f"n{self.size + 1}", type=concept_type))

    def add_brick(self):
        relation = self.sampler.draw_relation(self.rng)
        signature = self.v.signature(relation)
        args = []
        for sig_type in signature:
            node = None
            if self.concepts and self.rng.random() < self.noise.attach_probability:
                candidates = [c for c in self.concepts if self.v.is_generalization(sig_type, c.type)]
                if candidates:
                    node = candidates[int(self.rng.integers(len(candidates)))]
            if node is None:
                node = self._new_concept(sig_type)
            args.append(node.id)
        self.relations.append(RelationNode(id=f"n{self.size + 1}", type=relation, args=tuple(args)))

    def grow(self, target: int):
        while self.size < target:
            if self.rng.random() < self.noise.isolated_concept_probability:
                self.add_isolated_concept()
            else:
                self.add_brick()

    def build(self) -> ConceptualGraph:
        return ConceptualGraph(id=self.graph_id, concepts=tuple(self.concepts), relations=tuple(self.relations),
                               source="cggen")


def _graph_id(index: int) -> str:
    return f"G{index + 1}"


def _build_graph(v: Vocabulary, config: GenConfig, index: int, planted: Sequence[int]) -> ConceptualGraph:
    rng = np.random.default_rng([config.seed, index])
    sampler = DistributionSampler(config, v)
    builder = _GraphBuilder(_graph_id(index), v, sampler, config.noise, rng)
    target = sampler.draw_size(rng)
    for seed_index in planted:
        builder.plant(seed_index, config.seeds[seed_index].pattern)
    if builder.size > target:
        logger.info("Graph %s: size raised from %d to %d to fit planted seeds", builder.graph_id, target, builder.size)
    builder.grow(target)
    graph = builder.build()
    violations = validate_graph(graph, v)
    if violations:
        raise InternalInvariantError(f"Generated graph {graph.id} does not validate: {violations[0]}")
    return graph


_WORKER_CONTEXT = None


def _init_worker(v, config):
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = (v, config)


def _build_job(job):
    index, planted = job
    v, config = _WORKER_CONTEXT
    return _build_graph(v, config, index, planted)


def planting_plan(config: GenConfig) -> List[List[int]]:
    """Seed indexes to plant in each graph; seed k goes into ceil(f_k * n) distinct graphs."""
    rng = np.random.default_rng([config.seed])
    plan: List[List[int]] = [[] for _ in range(config.graph_count)]
    for seed_index, spec in enumerate(config.seeds):
        count = min(config.graph_count, math.ceil(round(spec.frequency * config.graph_count, 9)))
        if count == 0:
            continue
        for graph_index in sorted(int(k) for k in rng.choice(config.graph_count, size=count, replace=False)):
            plan[graph_index].append(seed_index)
    return plan


def _histogram(values) -> Dict[str, int]:
    counts = pd.Series(list(values), dtype=object).value_counts()
    return {str(key): int(counts[key]) for key in sorted(counts.index, key=lambda k: (isinstance(k, str), k))}


def generate(v: Vocabulary, config: GenConfig, workers: int = 1) -> Tuple[List[ConceptualGraph], dict]:
    """
    Generate the database and its manifest.

    Each graph draws from its own random stream seeded by (seed, graph
    index), so the output does not depend on the worker count.
    """
    config.check_vocabulary(v)
    plan = planting_plan(config)
    jobs = list(enumerate(plan))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(v, config)) as pool:
            db = list(pool.map(_build_job, jobs, chunksize=max(1, len(jobs) // (workers * 4))))
    else:
        db = [_build_graph(v, config, index, planted) for index, planted in jobs]

    seeds = []
    if config.graph_count:
        for seed_index, spec in enumerate(config.seeds):
            planted_ids = [_graph_id(index) for index, planted in enumerate(plan) if seed_index in planted]
            seeds.append({
                "name": spec.name,
                "pattern": spec.pattern,
                "frequency": spec.frequency,
                "planted_graphs": planted_ids,
                "planted_count": len(planted_ids),
                "realized_frequency": len(planted_ids) / config.graph_count,
            })
    manifest = {
        "seed": config.seed,
        "graph_count": config.graph_count,
        "seeds": seeds,
        "size_histogram": _histogram(g.node_count for g in db),
        "concept_histogram": _histogram(c.type for g in db for c in g.concepts),
        "relation_histogram": _histogram(r.type for g in db for r in g.relations),
    }
    logger.info("Generated %d graph(s) with %d planted seed(s)", len(db), len(config.seeds))
    return db, manifest


# ---------------------------------------------------------------------------
# Random vocabularies and seeds
# ---------------------------------------------------------------------------

def random_vocabulary(concept_types: int = 50, relation_types: int = 20, max_arity: int = 3,
                      seed: int = 0, individuals: int = 0) -> Vocabulary:
    """
    A random tree vocabulary: "Thing" plus concept_types - 1 types C1, C2, ...
    and relation types R1, R2, ... whose signatures use shallow types so that
    arguments can be specialized below them. R1's signature is all "Thing".
    """
    if concept_types < 1 or relation_types < 0 or max_arity < 1:
        raise ConfigError("random_vocabulary needs at least one concept type and max_arity >= 1")
    rng = np.random.default_rng([seed])
    concepts = [ConceptType("Thing")]
    depth = {"Thing": 0}
    for k in range(1, concept_types):
        shallow = [c.name for c in concepts if depth[c.name] < 3]
        parent = shallow[int(rng.integers(len(shallow)))]
        name = f"C{k}"
        concepts.append(ConceptType(name, parent))
        depth[name] = depth[parent] + 1
    signature_pool = [c.name for c in concepts if depth[c.name] <= 1]

    relations = []
    for k in range(1, relation_types + 1):
        arity = int(rng.integers(min(2, max_arity), max_arity + 1))
        if k == 1:
            signature = ("Thing",) * arity
        else:
            signature = tuple(signature_pool[int(rng.integers(len(signature_pool)))] for _ in range(arity))
        relations.append(RelationType(f"R{k}", arity, signature))

    names = [c.name for c in concepts]
    marked = tuple(
        Individual(f"m{k}", names[int(rng.integers(len(names)))]) for k in range(1, individuals + 1)
    )
    return Vocabulary(concept_types=tuple(concepts), relation_types=tuple(relations), individuals=marked)


def random_seed_pattern(v: Vocabulary, bricks: int, rng: np.random.Generator, name: str = "seed") -> ConceptualGraph:
    """
    A connected seed pattern of `bricks` relations, each new relation sharing
    one concept with the ones before. At least one argument is typed strictly
    below its signature type whenever the vocabulary allows it.
    """
    if bricks < 1 or not v.relation_types:
        raise ConfigError("A seed pattern needs at least one brick and one relation type")
    relation_names = [rt.name for rt in v.relation_types]
    concepts: List[ConceptNode] = []
    relations: List[RelationNode] = []

    def new_concept(sig_type: str) -> str:
        options = (sig_type,) + v.descendants(sig_type)
        node = ConceptNode(id=f"c{len(concepts) + 1}", type=options[int(rng.integers(len(options)))])
        concepts.append(node)
        return node.id

    for k in range(bricks):
        if not relations:
            relation = relation_names[int(rng.integers(len(relation_names)))]
            args = [new_concept(sig) for sig in v.signature(relation)]
        else:
            pairs = [
                (rel, position, c.id)
                for rel in relation_names
                for position, sig in enumerate(v.signature(rel))
                for c in concepts if v.is_generalization(sig, c.type)
            ]
            if not pairs:
                raise ConfigError("No relation type can attach to the seed pattern built so far")
            relation, shared_position, shared = pairs[int(rng.integers(len(pairs)))]
            args = [shared if p == shared_position else new_concept(sig)
                    for p, sig in enumerate(v.signature(relation))]
        relations.append(RelationNode(id=f"r{k + 1}", type=relation, args=tuple(args)))

    pattern = ConceptualGraph(id=name, concepts=tuple(concepts), relations=tuple(relations))
    specialized = any(
        pattern.concept(arg).type != sig
        for rel in relations for arg, sig in zip(rel.args, v.signature(rel.type))
    )
    if not specialized:
        for index, concept in enumerate(concepts):
            children = v.children(concept.type)
            if children:
                concepts[index] = ConceptNode(concept.id, children[0])
                pattern = ConceptualGraph(id=name, concepts=tuple(concepts), relations=tuple(relations))
                break
    return pattern
