"""Scenario files: line-oriented `key = value` parameter sets.

UTF-8 text, one assignment per line, '#' starts a comment. Values carry
units where the key is physical ('mass = 1e-6 g', 'density = 2 g/cm3');
bare numbers are SI. Unknown keys, duplicate keys and unit mismatches are
rejected with the offending key named, and defaults for omitted keys are
applied by the caller so the manifest can echo the fully resolved set.
"""

from __future__ import annotations

from pathlib import Path

from .constants import Dim, parse_quantity

__all__ = ["ScenarioError", "FieldSpec", "load_scenario"]


class ScenarioError(ValueError):
    """Malformed scenario file or value."""


class FieldSpec:
    """One allowed key: its dimension (or plain type) and default.

    kind is a Dim for unit-tagged physical values, or one of 'int',
    'float', 'str'. default=None marks the key as required.
    """

    def __init__(self, kind, default=None, required: bool = False):
        self.kind = kind
        self.default = default
        self.required = required

    def parse(self, key: str, raw: str):
        try:
            if isinstance(self.kind, Dim):
                return parse_quantity(raw, self.kind).value
            if self.kind == "int":
                return int(raw)
            if self.kind == "float":
                return float(raw)
            return str(raw)
        except ValueError as exc:
            raise ScenarioError(f"key '{key}': {exc}") from None


def load_scenario(path, schema: dict[str, FieldSpec]) -> dict:
    """Parse and validate one scenario file against a schema.

    Returns the fully resolved mapping with defaults filled in.
    """
    p = Path(path)
    if not p.is_file():
        raise ScenarioError(f"scenario file not found: {p}")
    values: dict = {}
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in schema:
            raise ScenarioError(f"unknown key '{key}'")
        if key in values:
            raise ScenarioError(f"duplicate key '{key}'")
        values[key] = schema[key].parse(key, raw)
    for key, spec in schema.items():
        if key not in values:
            if spec.required:
                raise ScenarioError(f"missing required key '{key}'")
            values[key] = spec.default
    return values
