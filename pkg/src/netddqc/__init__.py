"""Degree-distribution feature extraction and comparison for complex networks."""
from .baselines import (
    PercentileFeatures,
    PowerLawFit,
    fit_power_law,
    ks_distance,
    percentile_distance,
    percentile_features,
    powerlaw_distance,
)
from .ddqc import DdqcFeatures, RegionPartition, build_regions, ddqc_distance, extract_features, interval_degree_probability, quantify
from .errors import ConfigError, DomainError, FitError, GraphFormatError, NetDDQCError, UndefinedFeatureError
from .graph_core import DegreeDistribution, Graph, cdf_at, degree_distribution, read_edge_list, write_edge_list

__version__ = "0.1.0"
