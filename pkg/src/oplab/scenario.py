"""Scenario files (JSON in, JSON out).

See ``docs/format.md`` for the schema.  Rationals travel as ``"p/q"``
strings so weights survive a round trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ValidationError
from .grid import BUILTIN_FUNCTIONS, AffineMap, GridDomain, GridFunction, builtin_function
from .measure import AtomicMeasureSpace, AtomMap, to_fraction
from .orlicz import ExpMinus, OrliczFunction, Power, PowerLog

SCHEMA = 1


class ScenarioError(ValidationError):
    """A scenario file that cannot be read, with the offending location."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def rational_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    carrier: AtomicMeasureSpace | GridDomain
    transformation: AtomMap | AffineMap | None = None
    orlicz: OrliczFunction | None = None
    function: dict | None = None  # {"builtin": tag} or {"table": [...]}

    @property
    def is_atomic(self) -> bool:
        return isinstance(self.carrier, AtomicMeasureSpace)

    def function_values(self):
        """The scenario function as an array (atomic) or a GridFunction (grid)."""
        if self.function is None:
            raise ScenarioError("function", "scenario has no function")
        if self.is_atomic:
            if "builtin" in self.function:
                if self.function["builtin"] != "zero":
                    raise ScenarioError("function.builtin", "atomic carriers only know the 'zero' builtin")
                return np.zeros(len(self.carrier))
            return np.array(self.function["table"], dtype=float)
        if "builtin" in self.function:
            return builtin_function(self.function["builtin"], self.carrier)
        return GridFunction(self.carrier, np.array(self.function["table"], dtype=float))

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"schema": SCHEMA, "name": self.name}
        c = self.carrier
        if self.is_atomic:
            d["carrier"] = {
                "type": "atomic",
                "atoms": list(c.atoms),
                "weights": [rational_str(w) for w in c.weights],
            }
        else:
            d["carrier"] = {"type": "grid", **c.to_dict()}
        T = self.transformation
        if isinstance(T, AtomMap):
            d["transformation"] = {
                "type": "atomic",
                "mapping": {str(c.atoms[i]): c.atoms[j] for i, j in enumerate(T.mapping)},
            }
        elif isinstance(T, AffineMap):
            d["transformation"] = {"type": "affine", **T.to_dict()}
        if self.orlicz is not None:
            d["orlicz"] = self.orlicz.to_dict()
        if self.function is not None:
            d["function"] = dict(self.function)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _get(d: dict, key: str, where: str, kind=None, required: bool = True):
    if not isinstance(d, dict):
        raise ScenarioError(where, "expected an object")
    if key not in d:
        if required:
            raise ScenarioError(f"{where}.{key}" if where else key, "missing field")
        return None
    value = d[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{where}.{key}" if where else key, f"expected {getattr(kind, '__name__', kind)}")
    return value


def _parse_carrier(d: dict):
    kind = _get(d, "type", "carrier", str)
    if kind == "atomic":
        atoms = _get(d, "atoms", "carrier", list)
        weights = _get(d, "weights", "carrier", list)
        for i, a in enumerate(atoms):
            if not isinstance(a, (str, int)) or isinstance(a, bool):
                raise ScenarioError(f"carrier.atoms[{i}]", "atom identifiers are strings or integers")
        parsed = []
        for i, w in enumerate(weights):
            if isinstance(w, float):
                raise ScenarioError(f"carrier.weights[{i}]", "weights must be integers or 'p/q' strings, not floats")
            try:
                parsed.append(to_fraction(w))
            except ValidationError as exc:
                raise ScenarioError(f"carrier.weights[{i}]", str(exc)) from None
        try:
            return AtomicMeasureSpace(atoms, parsed)
        except ValidationError as exc:
            raise ScenarioError("carrier", str(exc)) from None
    if kind == "grid":
        bounds = _get(d, "bounds", "carrier", list)
        resolution = _get(d, "resolution", "carrier", (list, int))
        n = _get(d, "n", "carrier", int, required=False)
        if n is not None and n != len(bounds):
            raise ScenarioError("carrier.n", f"n = {n} but {len(bounds)} bounds given")
        try:
            return GridDomain(bounds, resolution)
        except (ValidationError, TypeError, ValueError) as exc:
            raise ScenarioError("carrier", str(exc)) from None
    raise ScenarioError("carrier.type", f"unknown carrier type {kind!r} (atomic | grid)")


def _parse_transformation(d: dict, carrier):
    kind = _get(d, "type", "transformation", str)
    if kind == "atomic":
        if not isinstance(carrier, AtomicMeasureSpace):
            raise ScenarioError("transformation.type", "atomic map on a grid carrier")
        mapping = _get(d, "mapping", "transformation", (dict, list))
        try:
            if isinstance(mapping, list):
                if len(mapping) != len(carrier):
                    raise ValidationError(f"{len(mapping)} images for {len(carrier)} atoms")
                return AtomMap(carrier.index(a) for a in mapping)
            by_key = {str(a): a for a in carrier.atoms}
            table = {}
            for key, image in mapping.items():
                if key not in by_key:
                    raise ValidationError(f"unknown atom {key!r}")
                table[by_key[key]] = image
            return AtomMap.from_table(carrier, table)
        except ValueError as exc:
            raise ScenarioError("transformation.mapping", str(exc)) from None
    if kind == "affine":
        if not isinstance(carrier, GridDomain):
            raise ScenarioError("transformation.type", "affine map on an atomic carrier")
        try:
            T = AffineMap(_get(d, "A", "transformation", list), _get(d, "b", "transformation", list))
        except (ValidationError, TypeError, ValueError) as exc:
            raise ScenarioError("transformation", str(exc)) from None
        if T.n != carrier.n:
            raise ScenarioError("transformation.A", f"map acts on R^{T.n}, carrier is {carrier.n}-d")
        return T
    raise ScenarioError("transformation.type", f"unknown transformation type {kind!r} (atomic | affine)")


def _parse_orlicz(d: dict) -> OrliczFunction:
    family = _get(d, "family", "orlicz", str)
    try:
        if family == "power":
            return Power(_get(d, "p", "orlicz", (int, float)))
        if family == "powerlog":
            return PowerLog(_get(d, "p", "orlicz", (int, float)))
        if family == "expminus":
            return ExpMinus()
    except ValidationError as exc:
        raise ScenarioError("orlicz", str(exc)) from None
    raise ScenarioError("orlicz.family", f"unknown family {family!r} (power | powerlog | expminus)")


def _parse_function(d: dict, carrier) -> dict:
    if "builtin" in d:
        tag = _get(d, "builtin", "function", str)
        if tag not in BUILTIN_FUNCTIONS:
            raise ScenarioError("function.builtin", f"unknown builtin {tag!r}; choose from {sorted(BUILTIN_FUNCTIONS)}")
        return {"builtin": tag}
    table = _get(d, "table", "function", list)
    expected = len(carrier) if isinstance(carrier, AtomicMeasureSpace) else int(np.prod(carrier.shape))
    flat = np.array(table, dtype=object).ravel().tolist() if table and isinstance(table[0], list) else table
    if len(flat) != expected:
        raise ScenarioError("function.table", f"{len(flat)} values for {expected} atoms/cells")
    for i, v in enumerate(flat):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioError(f"function.table[{i}]", "values must be numbers")
        if v != v or v in (float("inf"), float("-inf")):
            raise ScenarioError(f"function.table[{i}]", "values must be finite")
    return {"table": [float(v) for v in flat]}


def from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("<root>", "expected a JSON object")
    schema = d.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ScenarioError("schema", f"unsupported schema {schema!r}; this build reads schema {SCHEMA}")
    name = _get(d, "name", "", str, required=False) or "scenario"
    carrier = _parse_carrier(_get(d, "carrier", "", dict))
    T = d.get("transformation")
    T = None if T is None else _parse_transformation(T, carrier)
    phi = d.get("orlicz")
    phi = None if phi is None else _parse_orlicz(phi)
    fn = d.get("function")
    fn = None if fn is None else _parse_function(fn, carrier)
    unknown = sorted(set(d) - {"schema", "name", "carrier", "transformation", "orlicz", "function"})
    if unknown:
        raise ScenarioError(unknown[0], "unknown top-level field")
    return Scenario(name, carrier, T, phi, fn)


def loads(text: str, source: str = "<string>") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return from_dict(data)


def load(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), exc.strerror or "cannot read file") from None
    return loads(text, str(path))
