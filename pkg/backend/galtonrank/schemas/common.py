"""
Shared schema types: exact fractions on the wire as "p/q".
"""
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BeforeValidator, PlainSerializer, WithJsonSchema


def _parse_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not fractions")
    if isinstance(value, (int, float)):
        return Fraction(str(value)) if isinstance(value, float) else Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a fraction: {value!r}") from exc
    raise ValueError(f"not a fraction: {value!r}")


def _dump_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


FractionField = Annotated[
    Fraction,
    BeforeValidator(_parse_fraction),
    PlainSerializer(_dump_fraction, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]
