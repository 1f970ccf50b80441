from typing import Any, Never

from pydantic import ValidationError

from rainbow_ttd.exceptions import ConfigurationError, InvariantViolation


# pydantic error types that mean "value outside its allowed range"
_RANGE_ERRORS = frozenset(
    {
        "greater_than",
        "greater_than_equal",
        "less_than",
        "less_than_equal",
        "too_short",
        "too_long",
        "multiple_of",
        "finite_number",
    }
)


def classify_config_failure(
    error_type: str | None = None,
    *,
    category: str | None = None,
) -> str:
    if category:
        return category

    if error_type is None:
        return "unknown"
    if error_type in _RANGE_ERRORS:
        return "range"
    if error_type == "extra_forbidden":
        return "unknown_key"
    if error_type in {"value_error", "assertion_error"}:
        return "consistency"
    if error_type in {"json_invalid", "json_type"}:
        return "parse"
    return "parse" if error_type.endswith(("_parsing", "_type")) else "unknown"


def build_config_error(
    detail: str,
    *,
    key: str | None = None,
    value: Any = None,
    error_type: str | None = None,
    category: str | None = None,
    cause: Exception | None = None,
) -> ConfigurationError:
    return ConfigurationError(
        detail,
        key=key,
        value=value,
        category=classify_config_failure(error_type, category=category),
        cause=cause,
    )


def raise_config_error(
    detail: str,
    *,
    key: str | None = None,
    value: Any = None,
    error_type: str | None = None,
    category: str | None = None,
    cause: Exception | None = None,
) -> Never:
    raise build_config_error(
        detail,
        key=key,
        value=value,
        error_type=error_type,
        category=category,
        cause=cause,
    )


def config_error_from_validation(
    error: ValidationError, *, source: str
) -> ConfigurationError:
    """Reduce a pydantic ValidationError to its first failure, keyed by dotted path."""
    first = error.errors()[0]
    key = ".".join(str(part) for part in first.get("loc", ())) or None
    detail = f"{source}: {first.get('msg', 'invalid configuration')}"
    if key:
        detail = f"{detail} (at {key})"
    return build_config_error(
        detail,
        key=key,
        value=first.get("input"),
        error_type=first.get("type"),
        cause=error,
    )


def check_invariant(
    condition: bool,
    detail: str,
    *,
    invariant: str,
    observed: Any = None,
    expected: Any = None,
) -> None:
    if condition:
        return

    raise InvariantViolation(
        detail,
        invariant=invariant,
        observed=observed,
        expected=expected,
    )
