from dataclasses import replace
from unittest import skipUnless

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from cg_app.cggen import (
    DistributionSampler, GenConfig, NoiseConfig, SeedSpec, gen_config_from_data, generate, planting_plan,
    random_seed_pattern, random_vocabulary, sample_distributions,
)
from cg_app.evaluation import evaluate, recall
from cg_app.exceptions import ConfigError
from cg_app.miner import MiningConfig, mine, support
from cg_app.models import ConceptNode, ConceptualGraph, Connection, LambdaRule, validate_graph
from cg_app.translator import build_brick_graph, translate_database, translate_graph

from .fixtures import SMALL_VOCABULARY, graph

# module flags of each configuration compared in the evaluation table
MODULE_FLAGS = {
    "baseline": {"bricks": False, "signatures": False, "rules": False},
    "bricks": {"bricks": True, "signatures": False, "rules": False},
    "signatures": {"bricks": False, "signatures": True, "rules": False},
    "rules": {"bricks": False, "signatures": False, "rules": True},
    "full": {"bricks": True, "signatures": True, "rules": True},
}


def module_configs(minsup, brick_size, node_size):
    """One MiningConfig per configuration; max_size counts bricks or raw nodes."""
    return {
        name: MiningConfig(minsup=minsup, max_size=brick_size if flags["bricks"] else node_size, **flags)
        for name, flags in MODULE_FLAGS.items()
    }


def chain_seed():
    """link(A1 x, B1 y) and near(y, A z)"""
    return graph(
        "chain",
        [("x", "A1"), ("y", "B1"), ("z", "A")],
        [("r1", "link", ("x", "y")), ("r2", "near", ("y", "z"))],
    )


def tagged_seed():
    """near(B1 x, A1 y) and tag(y)"""
    return graph(
        "tagged",
        [("x", "B1"), ("y", "A1")],
        [("r1", "near", ("x", "y")), ("r2", "tag", ("y",))],
    )


def link_seed():
    return graph("link", [("x", "A1"), ("y", "B1")], [("r1", "link", ("x", "y"))])


def chain_rule():
    """A link(A1, B1) goes on with near(B1, A)."""
    return LambdaRule(
        name="chain",
        hypothesis=graph("hyp", [("x", "A1", None, "*x"), ("y", "B1", None, "*y")], [("r1", "link", ("x", "y"))]),
        conclusion=graph(
            "concl",
            [("x", "A1", None, "*x"), ("y", "B1", None, "*y"), ("z", "A")],
            [("r1", "link", ("x", "y")), ("r2", "near", ("y", "z"))],
        ),
        connections=(Connection("*x", "x", "x"), Connection("*y", "y", "y")),
    )


def seed_rule(seed):
    """Extension rule from the first relation of a seed to the whole seed."""
    first = seed.relations[0]
    connected = sorted(set(first.args))

    def side(graph_id, relations):
        used = {arg for rel in relations for arg in rel.args}
        concepts = tuple(
            replace(c, var=f"*{c.id}" if c.id in connected else None) for c in seed.concepts if c.id in used
        )
        return ConceptualGraph(id=graph_id, concepts=concepts, relations=tuple(relations))

    return LambdaRule(
        name=f"{seed.id}-rule",
        hypothesis=side("hyp", [first]),
        conclusion=side("concl", seed.relations),
        connections=tuple(Connection(f"*{node_id}", node_id, node_id) for node_id in connected),
    )


class GeneratorTests(SimpleTestCase):
    def setUp(self):
        self.v = SMALL_VOCABULARY

    def config(self, **kwargs):
        options = {
            "graph_count": 10,
            "size_distribution": {6: 0.5, 8: 0.5},
            "seeds": (SeedSpec("link", link_seed(), 0.5),),
            "seed": 4,
        }
        options.update(kwargs)
        return GenConfig(**options)

    def test_same_seed_same_output(self):
        first = generate(self.v, self.config())
        second = generate(self.v, self.config())
        self.assertEqual(first, second)

    def test_every_graph_validates(self):
        db, _ = generate(self.v, self.config(noise=NoiseConfig(isolated_concept_probability=0.2)))
        self.assertEqual(len(db), 10)
        for g in db:
            self.assertEqual(validate_graph(g, self.v), [])
            self.assertEqual(g.source, "cggen")

    def test_graph_sizes_reach_their_target(self):
        db, manifest = generate(self.v, self.config())
        self.assertTrue(all(g.node_count >= 6 for g in db))
        self.assertEqual(sum(manifest["size_histogram"].values()), 10)

    def test_no_graphs(self):
        db, manifest = generate(self.v, self.config(graph_count=0))
        self.assertEqual(db, [])
        self.assertEqual(manifest["seeds"], [])
        self.assertEqual(manifest["graph_count"], 0)

    def test_seed_alone_fills_the_graph(self):
        config = self.config(size_distribution={3: 1.0}, seeds=(SeedSpec("link", link_seed(), 1.0),))
        db, manifest = generate(self.v, config)
        for g in db:
            self.assertEqual(g.concepts, (ConceptNode("s0.x", "A1"), ConceptNode("s0.y", "B1")))
            self.assertEqual([(r.id, r.args) for r in g.relations], [("s0.r1", ("s0.x", "s0.y"))])
        self.assertEqual(manifest["seeds"][0]["planted_count"], 10)
        self.assertEqual(manifest["seeds"][0]["realized_frequency"], 1.0)

    def test_planting_count_rounds_up(self):
        config = self.config(seeds=(SeedSpec("link", link_seed(), 0.25),))
        db, manifest = generate(self.v, config)
        seed = manifest["seeds"][0]
        self.assertEqual(seed["planted_count"], 3)
        self.assertEqual(len(seed["planted_graphs"]), 3)
        self.assertAlmostEqual(seed["realized_frequency"], 0.3)
        for g in db:
            planted = any(c.id.startswith("s0.") for c in g.concepts)
            self.assertEqual(planted, g.id in seed["planted_graphs"])
        self.assertEqual(sum(len(graphs) for graphs in planting_plan(config)), 3)

    def test_worker_count_does_not_change_the_output(self):
        self.assertEqual(generate(self.v, self.config(), workers=1), generate(self.v, self.config(), workers=2))

    def test_invalid_configs(self):
        with self.assertRaisesMessage(ConfigError, "not normalized"):
            self.config(size_distribution={5: 0.5})
        with self.assertRaises(ConfigError):
            self.config(seeds=(SeedSpec("link", link_seed(), 0.0),))
        with self.assertRaises(ConfigError):
            self.config(graph_count=-1)
        with self.assertRaisesMessage(ConfigError, "has no relation node"):
            generate(self.v, self.config(seeds=(SeedSpec("empty", graph("e", [("x", "A")]), 0.5),)))
        bad = graph("bad", [("x", "B"), ("y", "B")], [("r1", "link", ("x", "y"))])
        with self.assertRaisesMessage(ConfigError, "does not validate"):
            generate(self.v, self.config(seeds=(SeedSpec("bad", bad, 0.5),)))

    def test_config_from_data(self):
        data = {
            "graph_count": 5,
            "size_distribution": {"4": 1.0},
            "seeds": [{"pattern": {"id": "p", "concepts": [{"id": "x", "type": "A"}, {"id": "y", "type": "B"}],
                                   "relations": [{"id": "r", "type": "link", "args": ["x", "y"]}]},
                       "frequency": 0.4}],
            "noise": {"attach_probability": 0.9},
        }
        config = gen_config_from_data(data, graph_count=7, seed=2)
        self.assertEqual(config.graph_count, 7)
        self.assertEqual(config.seed, 2)
        self.assertEqual(config.size_distribution, {4: 1.0})
        self.assertEqual(config.seeds[0].name, "seed1")
        self.assertEqual(config.noise.attach_probability, 0.9)
        self.assertEqual(gen_config_from_data(data).graph_count, 5)


class DistributionTests(SimpleTestCase):
    def test_point_mass(self):
        config = GenConfig(graph_count=1, size_distribution={7: 1.0})
        sampler = DistributionSampler(config, SMALL_VOCABULARY)
        rng = np.random.default_rng(0)
        self.assertEqual({sampler.draw_size(rng) for _ in range(50)}, {7})

    def test_uniform_sizes_average_out(self):
        config = GenConfig(graph_count=1, size_distribution={size: 0.2 for size in range(28, 33)})
        sampler = DistributionSampler(config, SMALL_VOCABULARY)
        rng = np.random.default_rng(1)
        sizes = [sampler.draw_size(rng) for _ in range(2000)]
        self.assertEqual(set(sizes), set(range(28, 33)))
        self.assertAlmostEqual(float(np.mean(sizes)), 30.0, delta=0.2)

    def test_label_distribution(self):
        config = GenConfig(graph_count=1, size_distribution={4: 1.0}, concept_distribution={"A1": 1.0})
        size, labels = sample_distributions(config, np.random.default_rng(0), SMALL_VOCABULARY)
        self.assertEqual(size, 4)
        self.assertEqual(labels, ["A1"] * 4)

    def test_restricted_draw_falls_back_to_the_signature_type(self):
        config = GenConfig(graph_count=1, size_distribution={4: 1.0}, concept_distribution={"A1": 1.0})
        sampler = DistributionSampler(config, SMALL_VOCABULARY)
        rng = np.random.default_rng(0)
        self.assertEqual(sampler.draw_concept(rng, SMALL_VOCABULARY, under="B"), "B")
        self.assertEqual(sampler.draw_concept(rng, SMALL_VOCABULARY, under="A"), "A1")


class RandomVocabularyTests(SimpleTestCase):
    def test_shape(self):
        v = random_vocabulary(seed=3)
        self.assertEqual(len(v.concept_types), 50)
        self.assertEqual(len(v.relation_types), 20)
        self.assertEqual(v.signature("R1"), ("Thing",) * v.arity("R1"))
        self.assertTrue(all(2 <= rt.arity <= 3 for rt in v.relation_types))
        self.assertEqual(random_vocabulary(seed=3), v)

    def test_random_seed_pattern(self):
        v = random_vocabulary(seed=5)
        rng = np.random.default_rng(0)
        for _ in range(10):
            p = random_seed_pattern(v, 3, rng)
            self.assertEqual(len(p.relations), 3)
            self.assertEqual(validate_graph(p, v), [])
            self.assertTrue(build_brick_graph(p, v).to_labeled_graph().is_connected())
            specialized = any(
                p.concept(arg).type != sig
                for rel in p.relations for arg, sig in zip(rel.args, v.signature(rel.type))
            )
            self.assertTrue(specialized or not any(v.children(c.type) for c in p.concepts))

    def test_generated_database_covers_the_vocabulary(self):
        v = random_vocabulary(50, 20, seed=11)
        config = GenConfig(
            graph_count=1000,
            size_distribution={10: 1.0},
            noise=NoiseConfig(isolated_concept_probability=0.2),
            seed=11,
        )
        db, manifest = generate(v, config)
        self.assertEqual(len(db), 1000)
        self.assertGreaterEqual(len(manifest["concept_histogram"]), 45)
        self.assertTrue(set(manifest["concept_histogram"]) <= {ct.name for ct in v.concept_types})


class PlantedSeedRecallTests(SimpleTestCase):
    def setUp(self):
        self.v = SMALL_VOCABULARY
        self.seeds = [chain_seed(), tagged_seed()]
        config = GenConfig(
            graph_count=24,
            size_distribution={10: 0.5, 12: 0.5},
            seeds=tuple(SeedSpec(seed.id, seed, 0.75) for seed in self.seeds),
            seed=21,
        )
        self.db, self.manifest = generate(self.v, config)
        self.minsup = 9

    def test_seed_support_is_at_least_the_planting_count(self):
        translated = translate_database(self.db, self.v)
        for spec, seed in zip(self.manifest["seeds"], self.seeds):
            self.assertEqual(spec["planted_count"], 18)
            self.assertGreaterEqual(spec["planted_count"], 2 * self.minsup)
            self.assertGreaterEqual(support(translate_graph(seed, self.v), translated), spec["planted_count"])

    def test_every_configuration_recovers_every_seed(self):
        for name, config in module_configs(self.minsup, brick_size=2, node_size=5).items():
            with self.subTest(config=name):
                result = mine(self.db, self.v, [chain_rule()] if config.rules else [], config)
                returned = [record.pattern for record in result.records]
                self.assertEqual(recall(returned, self.seeds, self.v), 1.0)


@skipUnless(settings.CGSPAN_SLOW_TESTS, "set CGSPAN_SLOW_TESTS=True to run the full-size recall test")
class FullSizeRecallTests(SimpleTestCase):
    def test_every_configuration_recovers_every_seed(self):
        v = random_vocabulary(50, 20, seed=7)
        rng = np.random.default_rng(7)
        seeds = [random_seed_pattern(v, 2, rng, name=f"seed{k}") for k in range(1, 5)]
        config = GenConfig(
            graph_count=200,
            size_distribution={size: 0.2 for size in range(28, 33)},
            seeds=tuple(SeedSpec(seed.id, seed, 0.2) for seed in seeds),
            seed=7,
        )
        db, manifest = generate(v, config)
        minsup = 20
        self.assertTrue(all(spec["planted_count"] >= 2 * minsup for spec in manifest["seeds"]))

        reports = {}
        node_size = max(seed.node_count for seed in seeds)
        for name, mining in module_configs(minsup, brick_size=2, node_size=node_size).items():
            with self.subTest(config=name):
                result = mine(db, v, [seed_rule(seeds[0])] if mining.rules else [], mining)
                returned = [record.pattern for record in result.records]
                self.assertEqual(recall(returned, seeds, v), 1.0)
                reports[name] = evaluate(returned, seeds, v, label=name)
        self.assertGreaterEqual(reports["full"].precision, reports["baseline"].precision)
