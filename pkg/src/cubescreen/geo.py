"""Centroid tables and admissible multi-location aggregates."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence, TextIO, Union

from .errors import ConfigError

EARTH_RADIUS_KM = 6371.0088

SEED_RULE = "seed"
PAIRWISE_RULE = "pairwise"


def geodesic_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in kilometers between (lat, lon) points on a
    spherical Earth, via the haversine formula."""
    lat1, lon1, lat2, lon2 = map(math.radians, (*a, *b))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = (math.sin(dlat / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2)
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


@dataclass(frozen=True)
class CentroidTable:
    entries: Mapping[str, tuple[float, float]]  # label -> (lat, lon)

    def __post_init__(self):
        for label, (lat, lon) in self.entries.items():
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise ConfigError(f"coordinates out of range for {label!r}")

    def distance(self, a: str, b: str) -> float:
        try:
            return geodesic_distance(self.entries[a], self.entries[b])
        except KeyError as e:
            raise ConfigError(f"no centroid for location {e.args[0]!r}") from e

    @classmethod
    def from_csv(cls, source: Union[str, TextIO]) -> "CentroidTable":
        """Load `location,lat,lon` rows (header required)."""
        if isinstance(source, str):
            source = io.StringIO(source)
        reader = csv.DictReader(source)
        entries = {}
        for row in reader:
            entries[row["location"].strip()] = (float(row["lat"]),
                                                float(row["lon"]))
        return cls(entries)


def default_centroids() -> CentroidTable:
    """Packaged centroid table for El Salvador's 14 departments (public
    geodata)."""
    text = resources.files("cubescreen.data").joinpath(
        "el_salvador_departments.csv").read_text()
    return CentroidTable.from_csv(text)


@dataclass(frozen=True)
class RegionSet:
    members: frozenset
    seed: str  # member whose centroid anchors the distance rule

    def __post_init__(self):
        if self.seed not in self.members:
            raise ConfigError("seed must be a member")

    @property
    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))

    def __str__(self):
        return "{" + ", ".join(self.sorted_members) + "}"


def enumerate_region_sets(centroids: CentroidTable, k_max: int = 5,
                          d_max: float = 50.0,
                          locations: Sequence[str] = None,
                          rule: str = SEED_RULE) -> list[RegionSet]:
    """All admissible location aggregates of size <= k_max.

    Under the seed rule a set is admissible iff some member has every other
    member's centroid within d_max of its own. The pairwise rule instead
    requires every pair to be within d_max (a strict subset of the seed
    rule's output). Result is deduplicated by member set and ordered
    lexicographically by sorted members.
    """
    if k_max < 1:
        raise ConfigError("k_max must be >= 1")
    if d_max < 0:
        raise ConfigError("d_max must be >= 0")
    if rule not in (SEED_RULE, PAIRWISE_RULE):
        raise ConfigError(f"unknown aggregation rule {rule!r}")
    locs = sorted(locations if locations is not None else centroids.entries)
    for loc in locs:
        if loc not in centroids.entries:
            raise ConfigError(f"no centroid for location {loc!r}")

    found: dict[frozenset, RegionSet] = {}
    for seed in locs:
        neighbors = [l for l in locs
                     if l != seed and centroids.distance(seed, l) <= d_max]
        for size in range(0, min(k_max - 1, len(neighbors)) + 1):
            for combo in itertools.combinations(neighbors, size):
                members = frozenset((seed,) + combo)
                if rule == PAIRWISE_RULE and not _all_pairs_within(
                        centroids, members, d_max):
                    continue
                if members not in found:
                    found[members] = RegionSet(members=members, seed=seed)
    return sorted(found.values(), key=lambda r: r.sorted_members)


def _all_pairs_within(centroids: CentroidTable, members: Iterable[str],
                      d_max: float) -> bool:
    return all(centroids.distance(a, b) <= d_max
               for a, b in itertools.combinations(sorted(members), 2))
