import itertools
import random

from django.test import SimpleTestCase

from cg_app.dfs import LabeledGraph, canonical_code
from cg_app.evaluation import evaluate
from cg_app.exceptions import ConfigError, ValidationFailed
from cg_app.matching import count_support
from cg_app.miner import (
    MiningConfig, Pattern, apply_extension_rules, collapse_graph, mine, mine_structural, parse_modules,
    resolve_minsup, specialize, support,
)
from cg_app.models import Connection, LambdaRule
from cg_app.serializers import serialize_patterns, serialize_report_data
from cg_app.translator import translate_database, translate_graph

from .fixtures import (
    SMALL_VOCABULARY, aircraft_vocabulary, flight, flying_rule, graph, pilot_in_plane, random_small_database,
)


# ---------------------------------------------------------------------------
# Brute-force reference
# ---------------------------------------------------------------------------

def structural_reference(collapsed, minsup, max_size):
    """Frequent connected subgraphs of the collapsed database, keyed by canonical code."""
    candidates = {}
    for g in collapsed:
        for k in range(1, min(max_size, g.size) + 1):
            for vertices in itertools.combinations(range(g.size), k):
                inside = [index for index, (a, b, _) in enumerate(g.edges) if a in vertices and b in vertices]
                if k == 1:
                    edge_sets = [()]
                else:
                    edge_sets = [chosen for r in range(k - 1, len(inside) + 1)
                                 for chosen in itertools.combinations(inside, r)]
                for chosen in edge_sets:
                    sub = g.induced(vertices, chosen)
                    if sub.is_connected():
                        candidates.setdefault(canonical_code(sub), sub)
    frequent = {}
    for code, sub in candidates.items():
        count, _ = count_support(sub, collapsed)
        if count >= minsup:
            frequent[code] = (sub, count)
    return frequent


def label_pools(db):
    pools = {"relation": set(), "argument": set(), "edge": set()}

    def add(kind, path):
        pools[kind].update(path[:depth] for depth in range(1, len(path) + 1))

    for g in db:
        for relation, arguments, _ in g.labels:
            add("relation", relation)
            for path in arguments:
                add("argument", path)
        for _, _, (_, _, path) in g.edges:
            add("edge", path)
    return pools


def label_slots(g):
    slots = []
    for vertex, (relation, arguments, _) in enumerate(g.labels):
        if relation:
            slots.append(("relation", vertex, 0, relation))
        for position, path in enumerate(arguments):
            if path:
                slots.append(("argument", vertex, position, path))
    for index, (_, _, (_, _, path)) in enumerate(g.edges):
        if path:
            slots.append(("edge", index, 0, path))
    return slots


def relabel(g, slots, paths):
    labels = [[relation, list(arguments), classes] for relation, arguments, classes in g.labels]
    edges = list(g.edges)
    for (kind, index, position, _), path in zip(slots, paths):
        if kind == "relation":
            labels[index][0] = path
        elif kind == "argument":
            labels[index][1][position] = path
        else:
            a, b, (pos_a, pos_b, _) = edges[index]
            edges[index] = (a, b, (pos_a, pos_b, path))
    return LabeledGraph(
        g.graph_id,
        tuple((relation, tuple(arguments), classes) for relation, arguments, classes in labels),
        tuple(edges),
    )


def frontier_reference(structural, db, minsup):
    """(canonical code, support) of every frequent labeling with no frequent one-step specialization."""
    pools = label_pools(db)
    found = set()
    for structure, _ in structural.values():
        slots = label_slots(structure)

        def children(paths):
            for k, (kind, _, _, _) in enumerate(slots):
                for longer in pools[kind]:
                    if len(longer) == len(paths[k]) + 1 and longer[:-1] == paths[k]:
                        yield paths[:k] + (longer,) + paths[k + 1:]

        start = tuple(slot[3] for slot in slots)
        counts = {}
        queue = [start]
        seen = {start}
        while queue:
            paths = queue.pop()
            counts[paths], _ = count_support(relabel(structure, slots, paths), db)
            if counts[paths] < minsup:
                continue
            for child in children(paths):
                if child not in seen:
                    seen.add(child)
                    queue.append(child)
        for paths, count in counts.items():
            if count >= minsup and not any(counts[child] >= minsup for child in children(paths)):
                found.add((canonical_code(relabel(structure, slots, paths)), count))
    return found


class ReferenceComparisonTests(SimpleTestCase):
    def compare(self, seeds, config, graphs):
        for seed in seeds:
            with self.subTest(seed=seed):
                db = random_small_database(seed, graphs=graphs)
                translated = translate_database(db, SMALL_VOCABULARY, (), config.translation_options)
                collapsed = [collapse_graph(g) for g in translated]

                structural = structural_reference(collapsed, config.minsup, config.max_size)
                mined = mine_structural(translated, config)
                self.assertEqual(len(mined), len(structural))
                self.assertEqual({(p.canonical, p.support) for p in mined},
                                 {(code, count) for code, (_, count) in structural.items()})

                result = mine(db, SMALL_VOCABULARY, config=config)
                expected = frontier_reference(structural, translated, config.minsup)
                self.assertEqual(len(result.records), len(expected))
                self.assertEqual({(r.canonical_code, r.support) for r in result.records}, expected)

    def test_raw_nodes(self):
        config = MiningConfig(minsup=2, bricks=False, signatures=False, rules=False, max_size=3)
        self.compare(range(13), config, graphs=4)

    def test_bricks(self):
        config = MiningConfig(minsup=2, bricks=True, signatures=False, rules=False, max_size=2)
        self.compare(range(100, 113), config, graphs=5)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

class ConfigTests(SimpleTestCase):
    def test_resolve_minsup(self):
        self.assertEqual(resolve_minsup("3", 10), 3)
        self.assertEqual(resolve_minsup(3, 10), 3)
        self.assertEqual(resolve_minsup("0.1", 25), 3)
        self.assertEqual(resolve_minsup("10%", 25), 3)
        self.assertEqual(resolve_minsup("0.6", 10), 6)
        self.assertEqual(resolve_minsup("1.0", 0), 1)

    def test_invalid_minsup(self):
        for value in ("0", "-2", "1.5", "0%", "abc"):
            with self.subTest(value=value), self.assertRaises(ConfigError):
                resolve_minsup(value, 10)
        with self.assertRaises(ConfigError):
            MiningConfig(minsup=0)

    def test_parse_modules(self):
        self.assertEqual(parse_modules("all"), {"bricks": True, "signatures": True, "rules": True})
        self.assertEqual(parse_modules("none"), {"bricks": False, "signatures": False, "rules": False})
        self.assertEqual(parse_modules("Bricks, rules"), {"bricks": True, "signatures": False, "rules": True})
        with self.assertRaisesMessage(ConfigError, "Unknown module(s): graphs"):
            parse_modules("bricks,graphs")

    def test_modules_property(self):
        self.assertEqual(MiningConfig(signatures=False).modules, ("bricks", "rules"))


# ---------------------------------------------------------------------------
# Structural step and specialization
# ---------------------------------------------------------------------------

class StructuralTests(SimpleTestCase):
    def setUp(self):
        self.v = aircraft_vocabulary()
        self.db = [translate_graph(flight(f"G{k}"), self.v) for k in range(3)]

    def test_identical_single_brick_graphs(self):
        patterns = mine_structural(self.db, MiningConfig(minsup=2))
        self.assertEqual(len(patterns), 1)
        self.assertEqual(patterns[0].support, 3)
        self.assertEqual(patterns[0].tids, (0, 1, 2))
        self.assertEqual(patterns[0].graph.labels, (collapse_graph(self.db[0]).labels[0],))

    def test_minsup_above_database_size(self):
        self.assertEqual(mine_structural(self.db, MiningConfig(minsup=4)), [])

    def test_support(self):
        self.assertEqual(support(self.db[0], self.db), 3)
        self.assertEqual(support(collapse_graph(self.db[0]), self.db), 3)


class SpecializationTests(SimpleTestCase):
    def setUp(self):
        self.v = aircraft_vocabulary()

    def flights(self, planes, cars):
        return [flight(f"G{k}", vehicle="Plane" if k < planes else "Car") for k in range(planes + cars)]

    def test_even_split_stays_at_the_common_type(self):
        db = self.flights(5, 5)
        minsup = resolve_minsup("60%", len(db))
        result = mine(db, self.v, config=MiningConfig(minsup=minsup, signatures=False, rules=False))
        self.assertEqual(len(result.records), 1)
        record = result.records[0]
        self.assertEqual([c.type for c in record.pattern.concepts], ["Human", "Vehicle", "Location"])
        self.assertEqual(record.support, 10)
        self.assertEqual(record.pattern.id, "P1")

    def test_even_split_is_signature_only(self):
        db = self.flights(5, 5)
        result = mine(db, self.v, config=MiningConfig(minsup=6, rules=False))
        self.assertEqual(result.records, [])
        self.assertEqual(result.pruned_count, 1)
        self.assertEqual(result.counts["signature_pruned"], 1)

    def test_skewed_split_specializes(self):
        db = self.flights(8, 2)
        result = mine(db, self.v, config=MiningConfig(minsup=6, rules=False))
        self.assertEqual(len(result.records), 1)
        record = result.records[0]
        self.assertEqual([c.type for c in record.pattern.concepts], ["Human", "Plane", "Location"])
        self.assertEqual(record.support, 8)
        self.assertIn("Vehicle_Plane", record.canonical_code)
        self.assertIsNone(record.compressed)

    def test_specialize_operation(self):
        db = [translate_graph(g, self.v) for g in self.flights(8, 2)]
        root = collapse_graph(db[0])
        start = Pattern.of(root, 10, range(10))
        frontier = specialize(start, db, MiningConfig(minsup=6))
        self.assertEqual(len(frontier), 1)
        self.assertEqual(frontier[0].graph.labels[0][1][1], ("Vehicle", "Plane"))
        self.assertEqual(frontier[0].support, 8)
        self.assertEqual(len(frontier[0].tids), 8)

    def test_patterns_are_frequent_and_sorted(self):
        db = random_small_database(7, graphs=8)
        result = mine(db, SMALL_VOCABULARY, config=MiningConfig(minsup=3, max_size=3))
        keys = [(-r.size, -r.support, r.canonical_code) for r in result.records]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual([r.pattern.id for r in result.records],
                         [f"P{k}" for k in range(1, len(result.records) + 1)])
        for record in result.records:
            self.assertGreaterEqual(record.support, 3)
            self.assertTrue(all(rel.is_complete for rel in record.pattern.relations))


# ---------------------------------------------------------------------------
# Extension rules
# ---------------------------------------------------------------------------

class ExtensionRuleTests(SimpleTestCase):
    def setUp(self):
        self.v = aircraft_vocabulary()

    def test_rule_jump_replaces_the_hypothesis(self):
        db = [pilot_in_plane(f"G{k}") for k in range(4)]
        result = mine(db, self.v, [flying_rule()], MiningConfig(minsup=4))
        relation_types = [[rel.type for rel in r.pattern.relations] for r in result.records]
        self.assertNotIn(["is-in"], relation_types)
        self.assertIn(["fly-in"], relation_types)
        extended = [r for r in result.records if r.provenance == "rule-extended(flying)"]
        self.assertEqual(len(extended), 1)
        self.assertEqual(sorted(rel.type for rel in extended[0].pattern.relations), ["fly-in", "is-in"])
        self.assertEqual(extended[0].support, 4)
        self.assertEqual(result.records[0], extended[0])
        self.assertEqual(result.counts["rule_suppressed"], 3)

    def test_infrequent_conclusion_keeps_the_hypothesis(self):
        db = [pilot_in_plane("G1"), pilot_in_plane("G2"),
              pilot_in_plane("G3", flies=False), pilot_in_plane("G4", flies=False)]
        result = mine(db, self.v, [flying_rule()], MiningConfig(minsup=3))
        self.assertEqual(len(result.records), 1)
        record = result.records[0]
        self.assertEqual(record.provenance, "mined")
        self.assertEqual([rel.type for rel in record.pattern.relations], ["is-in"])
        self.assertEqual([c.type for c in record.pattern.concepts], ["Pilot", "Plane"])

    def test_apply_extension_rules_operation(self):
        db = [translate_graph(pilot_in_plane(f"G{k}"), self.v) for k in range(3)]
        hypothesis = translate_graph(graph("P", [("p", "Pilot"), ("a", "Plane")], [("r1", "is-in", ("p", "a"))]), self.v)
        extended = apply_extension_rules(Pattern.of(hypothesis, 3, range(3)), [flying_rule()], db, self.v,
                                         MiningConfig(minsup=3))
        self.assertIsNotNone(extended)
        self.assertEqual(extended.size, 2)
        self.assertEqual(extended.support, 3)
        self.assertEqual(extended.provenance, "rule-extended(flying)")
        self.assertIsNone(apply_extension_rules(Pattern.of(hypothesis, 3, range(3)), [], db, self.v,
                                                MiningConfig(minsup=3)))

    def test_rules_ignored_when_module_is_off(self):
        db = [pilot_in_plane(f"G{k}") for k in range(2)]
        with self.assertLogs("cg_app.miner", level="WARNING") as logs:
            result = mine(db, self.v, [flying_rule()], MiningConfig(minsup=2, rules=False))
        self.assertIn("rules module is off", logs.output[0])
        self.assertFalse(any(r.provenance != "mined" for r in result.records))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

class PipelineTests(SimpleTestCase):
    def test_empty_database(self):
        result = mine([], aircraft_vocabulary())
        self.assertEqual(result.records, [])
        self.assertEqual(result.pruned_count, 0)
        self.assertEqual(result.counts["graphs"], 0)

    def test_invalid_graph_is_rejected(self):
        bad = graph("G1", [("l", "Location"), ("p", "Plane"), ("x", "Location")], [("r", "fly-in", ("l", "p", "x"))])
        with self.assertRaises(ValidationFailed) as ctx:
            mine([bad], aircraft_vocabulary())
        self.assertEqual(ctx.exception.violations[0].node_id, "r")

    def test_timings_are_reported(self):
        result = mine([flight("G1")], aircraft_vocabulary(), config=MiningConfig(signatures=False))
        self.assertEqual(set(result.timings_ms), {"translate", "mine", "postprocess", "total"})

    def test_worker_count_does_not_change_the_output(self):
        db = random_small_database(11, graphs=8)
        expected = [graph("E", [("x", "A1"), ("y", "B")], [("r", "link", ("x", "y"))])]
        outputs = []
        for workers in (1, 8):
            result = mine(db, SMALL_VOCABULARY, config=MiningConfig(minsup=2, max_size=2, workers=workers))
            report = evaluate([record.pattern for record in result.records], expected, SMALL_VOCABULARY,
                              pruned_count=result.pruned_count)
            outputs.append((serialize_patterns(result.records), serialize_report_data(report.to_data())))
        self.assertEqual(outputs[0], outputs[1])


# ---------------------------------------------------------------------------
# Anti-monotonicity
# ---------------------------------------------------------------------------

def sub_patterns(g):
    """Connected sub-patterns of g: one vertex or one edge removed, or one label cut back by a segment."""
    for vertex in range(g.size if g.size > 1 else 0):
        sub = g.induced([k for k in range(g.size) if k != vertex])
        if sub.is_connected():
            yield sub
    for index in range(len(g.edges)):
        sub = g.induced(range(g.size), [k for k in range(len(g.edges)) if k != index])
        if sub.is_connected():
            yield sub
    slots = label_slots(g)
    paths = tuple(slot[3] for slot in slots)
    for k, path in enumerate(paths):
        if len(path) > 1:
            yield relabel(g, slots, paths[:k] + (path[:-1],) + paths[k + 1:])


class AntiMonotonicityTests(SimpleTestCase):
    def test_sub_patterns_are_at_least_as_frequent(self):
        config = MiningConfig(minsup=2, bricks=False, signatures=False, rules=False, max_size=3)
        pairs = []
        for seed in range(200, 400):
            db = random_small_database(seed, graphs=6)
            translated = translate_database(db, SMALL_VOCABULARY, (), config.translation_options)
            for structural in mine_structural(translated, config):
                for pattern in specialize(structural, translated, config):
                    pairs.extend((pattern.graph, sub, translated) for sub in sub_patterns(pattern.graph))
            if len(pairs) >= 200:
                break
        self.assertGreaterEqual(len(pairs), 200)
        for pattern, sub, translated in random.Random(0).sample(pairs, 200):
            self.assertGreaterEqual(support(sub, translated), support(pattern, translated))


# ---------------------------------------------------------------------------
# Repeated arguments
# ---------------------------------------------------------------------------

def promotion_rule():
    """A Human in a Plane is a Pilot flying it somewhere."""
    return LambdaRule(
        name="promote",
        hypothesis=graph(
            "hyp", [("x", "Human", None, "*x"), ("y", "Plane", None, "*y")], [("r", "is-in", ("x", "y"))],
        ),
        conclusion=graph(
            "concl",
            [("x", "Pilot", None, "*x"), ("y", "Plane", None, "*y"), ("l", "Location")],
            [("r", "is-in", ("x", "y")), ("f", "fly-in", ("x", "y", "l"))],
        ),
        connections=(Connection("*x", "x", "x"), Connection("*y", "y", "y")),
    )


class RepeatedArgumentTests(SimpleTestCase):
    def setUp(self):
        self.v = aircraft_vocabulary()

    def test_shared_concept_survives_mining(self):
        db = [graph(f"G{k}", [("h", "Human")], [("r", "is-in", ("h", "h"))]) for k in range(3)]
        result = mine(db, self.v, config=MiningConfig(minsup=3, rules=False))
        self.assertEqual(len(result.records), 1)
        pattern = result.records[0].pattern
        self.assertEqual([c.type for c in pattern.concepts], ["Human"])
        self.assertEqual([rel.args for rel in pattern.relations], [("c1", "c1")])

    def test_distinct_arguments_do_not_count_a_repeated_one(self):
        db = [graph(f"G{k}", [("h", "Human")], [("r", "is-in", ("h", "h"))]) for k in range(3)]
        distinct = translate_graph(graph("P", [("a", "Human"), ("b", "Human")], [("r", "is-in", ("a", "b"))]), self.v)
        self.assertEqual(support(distinct, [translate_graph(g, self.v) for g in db]), 0)


class RetypedConnectionTests(SimpleTestCase):
    def test_extension_refreshes_retyped_brick_labels(self):
        v = aircraft_vocabulary()
        db = [translate_graph(pilot_in_plane(f"G{k}"), v) for k in range(3)]
        hypothesis = translate_graph(graph("P", [("h", "Human"), ("a", "Plane")], [("r1", "is-in", ("h", "a"))]), v)
        self.assertEqual(hypothesis.labels[0][1][0], ("Thing", "Human"))
        extended = apply_extension_rules(Pattern.of(hypothesis, 3, range(3)), [promotion_rule()], db, v,
                                         MiningConfig(minsup=3))
        self.assertIsNotNone(extended)
        self.assertEqual(extended.size, 2)
        self.assertEqual(extended.graph.labels[0][1][0], ("Thing", "Human", "Pilot"))
        self.assertEqual(extended.support, 3)
