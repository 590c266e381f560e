import numpy as np
import pytest

from ventureval import schema


@pytest.fixture(scope="session")
def taxonomy():
    return schema.bundled_taxonomy()


@pytest.fixture(scope="session")
def mini_taxonomy():
    return schema.taxonomy_from_dict(
        {
            "name": "mini",
            "layers": [
                {
                    "name": "What",
                    "sublayers": [
                        {
                            "name": "Offer",
                            "dimensions": [
                                {
                                    "name": "Form",
                                    "cardinality": "multi",
                                    "characteristics": ["Goods", "Services"],
                                },
                                {
                                    "name": "Strategy",
                                    "cardinality": "single",
                                    "characteristics": ["Cheap", "Premium", "Niche"],
                                },
                            ],
                        }
                    ],
                },
                {
                    "name": "Why",
                    "sublayers": [
                        {
                            "name": "Money",
                            "dimensions": [
                                {
                                    "name": "Revenue Model",
                                    "cardinality": "multi",
                                    "characteristics": ["One-Time", "Subscription"],
                                }
                            ],
                        }
                    ],
                },
            ],
        }
    )


@pytest.fixture
def mini_model():
    return schema.BusinessModel(
        venture_id="acme",
        choices={
            "Form": {"Goods", "Services"},
            "Strategy": {"Premium"},
            "Revenue Model": {"Subscription"},
        },
    )


def random_valid_model(taxonomy, rng, venture_id="v"):
    choices = {}
    for d in taxonomy.dimensions:
        if d.multi:
            n = int(rng.integers(1, len(d.characteristics) + 1))
            picks = rng.choice(len(d.characteristics), size=n, replace=False)
            choices[d.name] = {d.characteristics[int(p)] for p in picks}
        else:
            choices[d.name] = {
                d.characteristics[int(rng.integers(len(d.characteristics)))]
            }
    return schema.BusinessModel(venture_id=venture_id, choices=choices)


@pytest.fixture(scope="session")
def demo_models(taxonomy):
    from importlib import resources

    text = (
        resources.files("ventureval.data")
        .joinpath("fixtures/demo_ventures.csv")
        .read_text(encoding="utf-8")
    )
    return schema.parse_ventures_csv(taxonomy, text)
