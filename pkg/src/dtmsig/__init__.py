"""Compare metric-measure spaces through their distance-to-measure signatures."""

__version__ = "0.1.0"

from .analytic import (UniformShape, dilation_distance, dtm_min, epsilon_m,
                       standardness_constant, uniform_volume_lower_bound)
from .dtm import DTMField, dtm_at, dtm_field, pseudo_distance_at
from .estimators import DTMIsomorphismTest, DTMSignature, DTMTransformer
from .isomorphism_test import (TestParams, TestReport, bootstrap_distribution,
                               estimate_level_power, ks_baseline, recommend_subsample,
                               run_test, test_statistic)
from .measure_space import (FiniteMeasureSpace, MeasureSpaceError, SubsampleIndex,
                            load_distance_matrix, load_point_cloud, pairwise_distance)
from .signature import Signature1D, signature_full, signature_subsample
from .synth import GeneratorSpec, graph_pair, sample
from .wasserstein1d import Discrete1D, quantile, transport_lp_oracle, w1

__all__ = [
    "DTMField", "DTMIsomorphismTest", "DTMSignature", "DTMTransformer", "Discrete1D",
    "FiniteMeasureSpace", "GeneratorSpec", "MeasureSpaceError", "Signature1D",
    "SubsampleIndex", "TestParams", "TestReport", "UniformShape", "bootstrap_distribution",
    "dilation_distance", "dtm_at", "dtm_field", "dtm_min", "epsilon_m", "estimate_level_power",
    "graph_pair", "ks_baseline", "load_distance_matrix", "load_point_cloud", "pairwise_distance",
    "pseudo_distance_at", "quantile", "recommend_subsample", "run_test", "sample",
    "signature_full", "signature_subsample", "standardness_constant", "test_statistic",
    "transport_lp_oracle", "uniform_volume_lower_bound", "w1",
]
