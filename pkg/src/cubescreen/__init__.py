"""cubescreen: count-cube indexing and massive screening of spatiotemporal
anomalies in timestamped categorical event data."""

from .cube import Conjunction, CountCube, DateWindow, MaterializationPolicy, build_cube
from .errors import (BuildError, ConfigError, CubescreenError, EmptyScreen,
                     QueryError, SchemaMismatch, StatError)
from .geo import CentroidTable, RegionSet, default_centroids, enumerate_region_sets, geodesic_distance
from .ingest import (DatasetSummary, RowError, bin_age, infer_schema,
                     parse_events, serialize_events, summarize)
from .pivot import PivotTable, pivot, row_argmax
from .schema import AttributeSpec, EventRecord, Schema, canonical_schema
from .screen import (AnomalyReport, ScreenOutcome, ScreeningConfig,
                     ScreeningQuery, enumerate_queries, massive_screen,
                     prospective_screen, pvalue_timeline, score_query)
from .stats import (ContingencyTable, TestResult, chi_square_p,
                    expected_count, fisher_exact_p, select_test, evaluate_table)
from .synth import (Injection, StratumRate, SyntheticConfig,
                    generate_synthetic, load_synthetic_config, uniform_strata)

__version__ = "0.1.0"
