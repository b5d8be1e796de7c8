"""
Shared test data: the aircraft vocabulary, the pilot rules and small
random databases.
"""

import random

from cg_app.models import (
    ConceptNode, ConceptType, ConceptualGraph, Connection, Individual, LambdaRule, RelationNode,
    RelationType, Vocabulary,
)

AIRCRAFT_VOCABULARY = {
    "concept_types": [
        {"name": "Thing"},
        {"name": "Vehicle", "parent": "Thing"},
        {"name": "Plane", "parent": "Vehicle"},
        {"name": "Car", "parent": "Vehicle"},
        {"name": "Human", "parent": "Thing"},
        {"name": "Pilot", "parent": "Human"},
        {"name": "Location", "parent": "Thing"},
    ],
    "relation_types": [
        {"name": "fly-in", "arity": 3, "signature": ["Human", "Vehicle", "Location"]},
        {"name": "is-in", "arity": 2, "signature": ["Thing", "Thing"]},
        {"name": "drive", "arity": 2, "signature": ["Human", "Car"]},
    ],
    "individuals": [
        {"marker": "F-DZUX", "type": "Plane"},
    ],
}


def aircraft_vocabulary():
    return Vocabulary(
        concept_types=tuple(ConceptType(c["name"], c.get("parent")) for c in AIRCRAFT_VOCABULARY["concept_types"]),
        relation_types=tuple(
            RelationType(r["name"], r["arity"], tuple(r["signature"])) for r in AIRCRAFT_VOCABULARY["relation_types"]
        ),
        individuals=(Individual("F-DZUX", "Plane"),),
    )


def graph(graph_id, concepts=(), relations=()):
    """
    Build a CG from compact tuples.

    concepts: (id, type) or (id, type, marker) or (id, type, marker, var)
    relations: (id, type, (arg, ...))
    """
    return ConceptualGraph(
        id=graph_id,
        concepts=tuple(ConceptNode(*c) for c in concepts),
        relations=tuple(RelationNode(r[0], r[1], tuple(r[2])) for r in relations),
    )


def flight(graph_id, vehicle="Plane", human="Human", marker=None):
    """fly-in(human, vehicle, Location)"""
    return graph(
        graph_id,
        [("h", human), ("p", vehicle, marker), ("l", "Location")],
        [("r", "fly-in", ("h", "p", "l"))],
    )


def pilot_rule():
    """A Human that is in a Plane is a Pilot (specialization rule)."""
    return LambdaRule(
        name="pilot",
        hypothesis=graph("hyp", [("x", "Human", None, "*x"), ("y", "Plane")], [("r", "is-in", ("x", "y"))]),
        conclusion=graph("concl", [("x", "Pilot", None, "*x")]),
        connections=(Connection("*x", "x", "x"),),
    )


def flying_rule():
    """A Pilot in a Plane flies it somewhere (extension rule)."""
    return LambdaRule(
        name="flying",
        hypothesis=graph(
            "hyp", [("x", "Pilot", None, "*x"), ("y", "Plane", None, "*y")], [("r", "is-in", ("x", "y"))],
        ),
        conclusion=graph(
            "concl",
            [("x", "Pilot", None, "*x"), ("y", "Plane", None, "*y"), ("l", "Location")],
            [("r", "is-in", ("x", "y")), ("f", "fly-in", ("x", "y", "l"))],
        ),
        connections=(Connection("*x", "x", "x"), Connection("*y", "y", "y")),
    )


def pilot_in_plane(graph_id, flies=True):
    """is-in(Pilot, Plane), plus fly-in(Pilot, Plane, Location) when flies."""
    relations = [("r1", "is-in", ("p", "a"))]
    concepts = [("p", "Pilot"), ("a", "Plane")]
    if flies:
        concepts.append(("l", "Location"))
        relations.append(("r2", "fly-in", ("p", "a", "l")))
    return graph(graph_id, concepts, relations)


# ---------------------------------------------------------------------------
# Small random data
# ---------------------------------------------------------------------------

SMALL_VOCABULARY = Vocabulary(
    concept_types=(
        ConceptType("Thing"),
        ConceptType("A", "Thing"),
        ConceptType("A1", "A"),
        ConceptType("B", "Thing"),
        ConceptType("B1", "B"),
    ),
    relation_types=(
        RelationType("link", 2, ("A", "B")),
        RelationType("near", 2, ("Thing", "Thing")),
        RelationType("tag", 1, ("Thing",)),
    ),
)


def random_small_graph(rng: random.Random, graph_id: str, v: Vocabulary = SMALL_VOCABULARY,
                       max_relations: int = 3, max_concepts: int = 3) -> ConceptualGraph:
    """A random valid CG over the small vocabulary; concepts may be shared or isolated."""
    concept_types = [ct.name for ct in v.concept_types]
    concepts = [
        ConceptNode(f"c{k}", rng.choice(concept_types)) for k in range(1, rng.randint(1, max_concepts) + 1)
    ]
    relations = []
    for k in range(1, rng.randint(0, max_relations) + 1):
        rt = rng.choice(v.relation_types)
        args = []
        for sig_type in rt.signature:
            candidates = [c.id for c in concepts if v.is_generalization(sig_type, c.type)]
            if not candidates or rng.random() < 0.3:
                options = (sig_type,) + v.descendants(sig_type)
                node = ConceptNode(f"c{len(concepts) + 1}", rng.choice(options))
                concepts.append(node)
                candidates = [node.id]
            args.append(rng.choice(candidates))
        relations.append(RelationNode(f"r{k}", rt.name, tuple(args)))
    return ConceptualGraph(id=graph_id, concepts=tuple(concepts), relations=tuple(relations))


def random_small_database(seed: int, graphs: int = 4, **kwargs):
    rng = random.Random(seed)
    return [random_small_graph(rng, f"G{k}", **kwargs) for k in range(1, graphs + 1)]
