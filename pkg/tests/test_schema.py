import numpy as np
import pytest

from tests.conftest import random_valid_model
from ventureval import schema


def test_bundled_taxonomy_shape(taxonomy):
    assert taxonomy.feature_width == 108
    assert len(taxonomy.layer_names) == 4
    assert len(taxonomy.sublayer_names) == 9
    # component block sizes follow the sub-layer enumeration
    sizes = {name: len(cols) for name, cols in taxonomy.component_blocks().items()}
    assert sizes == {
        "Solution": 13,
        "Ecosystem": 17,
        "Market": 11,
        "Customer Relation": 7,
        "Resources": 13,
        "Partners": 18,
        "Activities": 18,
        "Revenues": 8,
        "Costs": 3,
    }


def test_minimal_taxonomy():
    t = schema.taxonomy_from_dict(
        {
            "layers": [
                {
                    "name": "Only",
                    "sublayers": [
                        {
                            "name": "Sub",
                            "dimensions": [
                                {
                                    "name": "Dim",
                                    "characteristics": ["A", "B"],
                                }
                            ],
                        }
                    ],
                }
            ]
        }
    )
    assert t.feature_width == 2
    assert not t.dimension("Dim").multi


def test_duplicate_characteristic_rejected():
    with pytest.raises(schema.TaxonomyError) as err:
        schema.taxonomy_from_dict(
            {
                "layers": [
                    {
                        "name": "L",
                        "sublayers": [
                            {
                                "name": "S",
                                "dimensions": [
                                    {
                                        "name": "D",
                                        "characteristics": ["Goods", "Goods"],
                                    }
                                ],
                            }
                        ],
                    }
                ]
            }
        )
    assert "Goods" in str(err.value)
    assert "L/S/D" in str(err.value)


def test_width_mismatch_rejected():
    with pytest.raises(schema.TaxonomyError):
        schema.taxonomy_from_dict(
            {
                "feature_width": 99,
                "layers": [
                    {
                        "name": "L",
                        "sublayers": [
                            {
                                "name": "S",
                                "dimensions": [
                                    {"name": "D", "characteristics": ["A", "B"]}
                                ],
                            }
                        ],
                    }
                ],
            }
        )


def test_single_characteristic_dimension_rejected():
    with pytest.raises(schema.TaxonomyError):
        schema.taxonomy_from_dict(
            {
                "layers": [
                    {
                        "name": "L",
                        "sublayers": [
                            {
                                "name": "S",
                                "dimensions": [
                                    {"name": "D", "characteristics": ["A"]}
                                ],
                            }
                        ],
                    }
                ]
            }
        )


def test_validate_clean_model(mini_taxonomy, mini_model):
    assert schema.validate_model(mini_taxonomy, mini_model).ok


def test_validate_unknown_characteristic(mini_taxonomy, mini_model):
    mini_model.choices["Revenue Model"] = {"Blockchain"}
    report = schema.validate_model(mini_taxonomy, mini_model)
    assert any(
        f.code == "unknown_characteristic" and f.dimension == "Revenue Model"
        for f in report.findings
    )


def test_validate_missing_dimension(mini_taxonomy, mini_model):
    del mini_model.choices["Strategy"]
    report = schema.validate_model(mini_taxonomy, mini_model)
    assert any(f.code == "missing_dimension" for f in report.findings)


def test_validate_cardinality(mini_taxonomy, mini_model):
    mini_model.choices["Strategy"] = {"Cheap", "Premium"}
    report = schema.validate_model(mini_taxonomy, mini_model)
    assert any(f.code == "cardinality" for f in report.findings)


def test_encode_popcount(mini_taxonomy, mini_model):
    row = schema.encode_one_hot(mini_taxonomy, mini_model)
    assert row.bits.sum() == sum(len(v) for v in mini_model.choices.values())
    assert row.bits.shape == (mini_taxonomy.feature_width,)


def test_encode_invalid_raises(mini_taxonomy, mini_model):
    mini_model.choices["Strategy"] = set()
    with pytest.raises(schema.ModelValidationError) as err:
        schema.encode_one_hot(mini_taxonomy, mini_model)
    assert err.value.report.findings


def test_single_choice_swap_hamming_two(mini_taxonomy, mini_model):
    row_a = schema.encode_one_hot(mini_taxonomy, mini_model)
    other = schema.BusinessModel(
        venture_id="acme",
        choices={**mini_model.choices, "Strategy": {"Cheap"}},
    )
    row_b = schema.encode_one_hot(mini_taxonomy, other)
    assert int((row_a.bits != row_b.bits).sum()) == 2


def test_round_trip(mini_taxonomy, mini_model):
    row = schema.encode_one_hot(mini_taxonomy, mini_model)
    back = schema.decode(mini_taxonomy, row)
    assert back.venture_id == mini_model.venture_id
    assert back.choices == mini_model.choices


def test_round_trip_random_models(taxonomy):
    rng = np.random.default_rng(7)
    for i in range(25):
        model = random_valid_model(taxonomy, rng, f"v{i}")
        row = schema.encode_one_hot(taxonomy, model)
        assert row.bits.shape == (108,)
        back = schema.decode(taxonomy, row)
        assert back.choices == model.choices


def test_decode_all_zero_errors(mini_taxonomy):
    row = schema.FeatureRow(
        venture_id="x", bits=np.zeros(mini_taxonomy.feature_width, dtype=np.uint8)
    )
    with pytest.raises(schema.DecodeError):
        schema.decode(mini_taxonomy, row)


def test_decode_double_single_choice_errors(mini_taxonomy, mini_model):
    row = schema.encode_one_hot(mini_taxonomy, mini_model)
    bits = row.bits.copy()
    sl = mini_taxonomy.dimension_slices()["Strategy"]
    bits[sl] = 1
    with pytest.raises(schema.DecodeError) as err:
        schema.decode(mini_taxonomy, schema.FeatureRow(venture_id="x", bits=bits))
    assert "Strategy" in str(err.value)


def test_encode_succeeds_iff_valid(mini_taxonomy, mini_model):
    assert schema.validate_model(mini_taxonomy, mini_model).ok
    schema.encode_one_hot(mini_taxonomy, mini_model)  # must not raise
    mini_model.choices["Form"] = set()
    assert not schema.validate_model(mini_taxonomy, mini_model).ok
    with pytest.raises(schema.ModelValidationError):
        schema.encode_one_hot(mini_taxonomy, mini_model)


def test_csv_round_trip(taxonomy, demo_models):
    text = schema.ventures_to_csv(taxonomy, demo_models)
    back = schema.parse_ventures_csv(taxonomy, text)
    assert len(back) == len(demo_models)
    for a, b in zip(demo_models, back):
        assert a.venture_id == b.venture_id
        assert a.choices == b.choices
        assert a.label == b.label


def test_csv_unknown_column(taxonomy):
    with pytest.raises(ValueError):
        schema.parse_ventures_csv(taxonomy, "venture_id,Bogus\na,b\n")


def test_demo_fixture_valid(taxonomy, demo_models):
    assert len(demo_models) == 40
    assert all(schema.validate_model(taxonomy, m).ok for m in demo_models)
    labels = {m.label for m in demo_models}
    assert labels == {0, 1}
