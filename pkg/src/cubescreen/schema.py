"""Dataset schema: typed categorical attributes over dated event records."""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigError, SchemaMismatch

UNKNOWN = "UNKNOWN"

CATEGORICAL = "categorical"
INTEGER_BINNED = "integer_binned"

# Default age bins; only the 12-14 bin is load-bearing for the shipped
# screening configs, the rest are configurable.
DEFAULT_AGE_BIN_EDGES = (0, 5, 12, 15, 18, 26, 36, 46, 56)


def bin_labels(edges: Sequence[int]) -> tuple[str, ...]:
    """Half-open bin labels from left edges; the last bin is open-ended."""
    labels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        labels.append(f"{lo}-{hi - 1}")
    labels.append(f"{edges[-1]}+")
    return tuple(labels)


def bin_value(value: int, edges: Sequence[int]) -> str:
    """Map an integer to its bin label. Values beyond the last edge land
    in the final open-ended bin."""
    if value < edges[0]:
        raise ValueError(f"{value} below the first bin edge {edges[0]}")
    labels = bin_labels(edges)
    for i in range(len(edges) - 1):
        if value < edges[i + 1]:
            return labels[i]
    return labels[-1]


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str  # CATEGORICAL or INTEGER_BINNED
    domain: tuple[str, ...] = ()
    bin_edges: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, INTEGER_BINNED):
            raise ConfigError(f"unknown attribute kind {self.kind!r}")
        if self.kind == INTEGER_BINNED:
            edges = self.bin_edges
            if not edges or any(x >= y for x, y in zip(edges, edges[1:])):
                raise ConfigError(
                    f"bin edges for {self.name!r} must be strictly increasing")
            object.__setattr__(self, "domain", bin_labels(edges))
        else:
            if not self.domain:
                raise ConfigError(f"empty domain for {self.name!r}")
            if len(set(self.domain)) != len(self.domain):
                raise ConfigError(f"duplicate labels in {self.name!r} domain")

    @property
    def labels(self) -> tuple[str, ...]:
        """Domain plus the reserved UNKNOWN label."""
        if UNKNOWN in self.domain:
            return self.domain
        return self.domain + (UNKNOWN,)


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeSpec, ...]
    age_attribute: Optional[str] = "age"

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate attribute names")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def __getitem__(self, name: str) -> AttributeSpec:
        for a in self.attributes:
            if a.name == name:
                return a
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(a.name == name for a in self.attributes)

    def to_json(self) -> str:
        return json.dumps({
            "attributes": [
                {"name": a.name, "kind": a.kind,
                 **({"bin_edges": list(a.bin_edges)} if a.kind == INTEGER_BINNED
                    else {"domain": list(a.domain)})}
                for a in self.attributes
            ],
            "age_attribute": self.age_attribute,
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Schema":
        obj = json.loads(text)
        attrs = []
        for spec in obj["attributes"]:
            if spec["kind"] == INTEGER_BINNED:
                attrs.append(AttributeSpec(spec["name"], INTEGER_BINNED,
                                           bin_edges=tuple(spec["bin_edges"])))
            else:
                attrs.append(AttributeSpec(spec["name"], CATEGORICAL,
                                           domain=tuple(spec["domain"])))
        return cls(tuple(attrs), age_attribute=obj.get("age_attribute"))


@dataclass(frozen=True)
class EventRecord:
    date: dt.date
    values: Mapping[str, str]  # attribute name -> label (post-binning)
    raw_age: Optional[int] = None  # kept for summary statistics


def canonical_schema(domains: Mapping[str, Iterable[str]],
                     age_bin_edges: Sequence[int] = DEFAULT_AGE_BIN_EDGES) -> Schema:
    """Schema for the canonical CSV layout
    (date,age,gender,state,municipality,scene,perpetrator).

    `domains` supplies the category labels for the non-age attributes.
    """
    attrs = [AttributeSpec("age", INTEGER_BINNED, bin_edges=tuple(age_bin_edges))]
    for name in ("gender", "state", "municipality", "scene", "perpetrator"):
        if name not in domains:
            raise SchemaMismatch(f"missing domain for {name!r}")
        attrs.append(AttributeSpec(name, CATEGORICAL,
                                   domain=tuple(domains[name])))
    return Schema(tuple(attrs))
