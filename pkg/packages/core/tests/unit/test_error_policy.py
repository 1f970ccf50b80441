import pytest

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from rainbow_ttd.error_policy import (
    build_config_error,
    check_invariant,
    classify_config_failure,
    config_error_from_validation,
    raise_config_error,
)
from rainbow_ttd.exceptions import ConfigurationError, InvariantViolation


class _Inner(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = Field(1, ge=1)


class _Outer(BaseModel):
    model_config = ConfigDict(extra="forbid")

    inner: _Inner = _Inner()


@pytest.mark.unit
@pytest.mark.parametrize(
    ("error_type", "expected"),
    [
        ("greater_than_equal", "range"),
        ("extra_forbidden", "unknown_key"),
        ("value_error", "consistency"),
        ("json_invalid", "parse"),
        ("int_parsing", "parse"),
        ("bool_type", "parse"),
        ("missing", "unknown"),
        (None, "unknown"),
    ],
)
def test_classify_config_failure(error_type: str | None, expected: str) -> None:
    assert classify_config_failure(error_type) == expected


@pytest.mark.unit
def test_explicit_category_wins() -> None:
    category = classify_config_failure("greater_than", category="unknown_experiment")

    assert category == "unknown_experiment"


@pytest.mark.unit
def test_build_config_error_fields() -> None:
    err = build_config_error(
        "n_rx too small",
        key="arrays.n_rx",
        value=1,
        error_type="greater_than_equal",
    )

    assert err.detail == "n_rx too small"
    assert err.key == "arrays.n_rx"
    assert err.value == 1
    assert err.category == "range"
    assert str(err) == "n_rx too small"


@pytest.mark.unit
def test_raise_config_error_keeps_cause() -> None:
    cause = OSError("missing")

    with pytest.raises(ConfigurationError) as exc_info:
        raise_config_error("Cannot read", category="parse", cause=cause)

    assert exc_info.value.cause is cause
    assert exc_info.value.category == "parse"


@pytest.mark.unit
def test_validation_error_keyed_by_dotted_path() -> None:
    with pytest.raises(ValidationError) as exc_info:
        _Outer.model_validate({"inner": {"count": 0}})

    err = config_error_from_validation(exc_info.value, source="demo.json")

    assert err.key == "inner.count"
    assert err.category == "range"
    assert err.value == 0
    assert str(err).startswith("demo.json: ")
    assert str(err).endswith("(at inner.count)")


@pytest.mark.unit
def test_validation_error_for_unknown_key() -> None:
    with pytest.raises(ValidationError) as exc_info:
        _Outer.model_validate({"inner": {"bogus": 1}})

    err = config_error_from_validation(exc_info.value, source="demo.json")

    assert err.key == "inner.bogus"
    assert err.category == "unknown_key"


@pytest.mark.unit
def test_check_invariant_passes_silently() -> None:
    check_invariant(True, "fine", invariant="always")


@pytest.mark.unit
def test_check_invariant_raises_with_context() -> None:
    with pytest.raises(InvariantViolation) as exc_info:
        check_invariant(
            False,
            "gap too small",
            invariant="papr-sparse-lower",
            observed=0.2,
            expected=">= 1.0",
        )

    err = exc_info.value
    assert err.invariant == "papr-sparse-lower"
    assert err.observed == 0.2
    assert err.expected == ">= 1.0"
    assert str(err) == "gap too small"
