#!/usr/bin/env python
"""
Development setup script for cgSpan
Writes a small aircraft vocabulary, database, rule file and generator config
to samples/ so every management command can be tried right away.
"""

import json
import os
import sys
from pathlib import Path
from random import Random

import django

# Add the parent directory to Python path
ROOT = Path(__file__).resolve().parent.parent
sys.path.append(str(ROOT))

# Setup Django
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cgspan_backend.settings')
django.setup()

from cg_app.models import (  # noqa: E402
    ConceptNode, ConceptType, ConceptualGraph, Connection, Individual, LambdaRule, RelationNode, RelationType,
    Vocabulary,
)
from cg_app.serializers import (  # noqa: E402
    graph_to_data, serialize_database, serialize_rules, serialize_vocabulary,
)

SAMPLES = ROOT / 'samples'


def aircraft_vocabulary():
    return Vocabulary(
        concept_types=(
            ConceptType('Thing'),
            ConceptType('Vehicle', 'Thing'),
            ConceptType('Plane', 'Vehicle'),
            ConceptType('Car', 'Vehicle'),
            ConceptType('Human', 'Thing'),
            ConceptType('Pilot', 'Human'),
            ConceptType('Location', 'Thing'),
            ConceptType('Airport', 'Location'),
        ),
        relation_types=(
            RelationType('fly-in', 3, ('Human', 'Vehicle', 'Location')),
            RelationType('is-in', 2, ('Thing', 'Thing')),
            RelationType('drive', 2, ('Human', 'Car')),
            RelationType('leave', 2, ('Vehicle', 'Location')),
        ),
        individuals=(
            Individual('F-DZUX', 'Plane'),
            Individual('F-GKXA', 'Plane'),
            Individual('Orly', 'Airport'),
        ),
    )


def create_sample_database(rng):
    """Flights, drives and departures; most flights sit in a Plane."""
    print("Creating sample database...")
    db = []
    for index in range(1, 21):
        concepts = [ConceptNode('h', rng.choice(['Human', 'Pilot'])), ConceptNode('l', 'Location')]
        relations = []
        if rng.random() < 0.75:
            marker = rng.choice([None, 'F-DZUX', 'F-GKXA'])
            concepts.append(ConceptNode('v', 'Plane', marker))
            relations.append(RelationNode('r1', 'fly-in', ('h', 'v', 'l')))
            relations.append(RelationNode('r2', 'is-in', ('h', 'v')))
        else:
            concepts.append(ConceptNode('v', 'Car'))
            relations.append(RelationNode('r1', 'drive', ('h', 'v')))
        if rng.random() < 0.5:
            concepts.append(ConceptNode('a', 'Airport', 'Orly'))
            relations.append(RelationNode('r3', 'leave', ('v', 'a')))
        db.append(ConceptualGraph(id=f'G{index}', concepts=tuple(concepts), relations=tuple(relations)))
    print(f"✓ Created {len(db)} graphs")
    return db


def create_sample_rules():
    print("\nCreating sample rules...")
    pilot = LambdaRule(
        name='pilot',
        hypothesis=ConceptualGraph(
            id='hyp',
            concepts=(ConceptNode('x', 'Human', None, '*x'), ConceptNode('y', 'Plane')),
            relations=(RelationNode('r', 'is-in', ('x', 'y')),),
        ),
        conclusion=ConceptualGraph(id='concl', concepts=(ConceptNode('x', 'Pilot', None, '*x'),)),
        connections=(Connection('*x', 'x', 'x'),),
    )
    flying = LambdaRule(
        name='flying',
        hypothesis=ConceptualGraph(
            id='hyp',
            concepts=(ConceptNode('x', 'Pilot', None, '*x'), ConceptNode('y', 'Plane', None, '*y')),
            relations=(RelationNode('r', 'is-in', ('x', 'y')),),
        ),
        conclusion=ConceptualGraph(
            id='concl',
            concepts=(
                ConceptNode('x', 'Pilot', None, '*x'),
                ConceptNode('y', 'Plane', None, '*y'),
                ConceptNode('l', 'Location'),
            ),
            relations=(RelationNode('r', 'is-in', ('x', 'y')), RelationNode('f', 'fly-in', ('x', 'y', 'l'))),
        ),
        connections=(Connection('*x', 'x', 'x'), Connection('*y', 'y', 'y')),
    )
    print("✓ Created rules: pilot (specialization), flying (extension)")
    return [pilot, flying]


def create_sample_gen_config():
    print("\nCreating sample generator config...")
    seed = ConceptualGraph(
        id='departure',
        concepts=(ConceptNode('h', 'Pilot'), ConceptNode('v', 'Plane'), ConceptNode('a', 'Airport')),
        relations=(RelationNode('r1', 'fly-in', ('h', 'v', 'a')), RelationNode('r2', 'leave', ('v', 'a'))),
    )
    config = {
        'graph_count': 200,
        'size_distribution': {str(size): 0.2 for size in range(8, 13)},
        'seeds': [{'name': 'departure', 'pattern': graph_to_data(seed), 'frequency': 0.3}],
        'noise': {'attach_probability': 0.8, 'isolated_concept_probability': 0.05},
        'seed': 7,
    }
    print("✓ Created generator config with 1 seed pattern")
    return config


def write(name, text):
    path = SAMPLES / name
    path.write_text(text, encoding='utf-8')
    print(f"  • {path.relative_to(ROOT)}")


def main():
    """Main setup function"""
    print("cgSpan - Development Setup")
    print("=" * 50)

    try:
        SAMPLES.mkdir(exist_ok=True)
        rng = Random(7)
        v = aircraft_vocabulary()
        db = create_sample_database(rng)
        rules = create_sample_rules()
        config = create_sample_gen_config()

        print("\nWriting files:")
        write('vocab.json', serialize_vocabulary(v))
        write('db.json', serialize_database(db))
        write('rules.json', serialize_rules(rules))
        write('gen.json', json.dumps(config, indent=2) + '\n')

        print("\n" + "=" * 50)
        print("✅ Development setup completed successfully!")
        print("\nYou can now:")
        print("1. python manage.py validate --vocab samples/vocab.json --db samples/db.json --rules samples/rules.json")
        print("2. python manage.py mine --vocab samples/vocab.json --db samples/db.json "
              "--rules samples/rules.json --minsup 0.3 --out runs/patterns.json")
        print("3. python manage.py generate --vocab samples/vocab.json --config samples/gen.json "
              "--out-db runs/gen.db.json --out-manifest runs/gen.manifest.json")

    except Exception as e:
        print(f"❌ Error during setup: {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
