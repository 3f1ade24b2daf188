import pytest

from guidesim.values import (
    NONE_VALUE,
    boolean,
    compare,
    from_json,
    label,
    number,
    text,
    to_json,
    values_equal,
)


def test_cross_variant_comparison_is_never_equal():
    assert not values_equal(boolean(True), number(1.0))
    assert not values_equal(label("1"), text("1"))
    assert not values_equal(NONE_VALUE, boolean(False))
    assert compare("ne", label("x"), number(2.0))


def test_same_variant_equality():
    assert values_equal(label("kitchen"), label("kitchen"))
    assert not values_equal(label("kitchen"), label("hall"))
    assert values_equal(number(2), number(2.0))
    assert values_equal(NONE_VALUE, NONE_VALUE)


def test_numeric_ordering_ops():
    assert compare("le", number(3.2), number(5.0))
    assert compare("ge", number(5.0), number(5.0))
    assert not compare("le", label("3"), number(5.0))  # non-numbers never order


def test_json_round_trip():
    for raw in (True, False, 2.5, 7, "kitchen", None):
        value = from_json(raw)
        back = to_json(value)
        if isinstance(raw, bool):
            assert back is raw
        elif raw is None:
            assert back is None
        elif isinstance(raw, (int, float)):
            assert back == float(raw)
        else:
            assert back == raw


def test_labels_must_be_non_empty():
    with pytest.raises(ValueError):
        label("")


def test_unknown_op_rejected():
    with pytest.raises(ValueError):
        compare("gt", number(1), number(2))
