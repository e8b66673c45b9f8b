"""Exact finite experiments around the Urysohn sphere and its grid-valued relatives."""
from .core_metric import FiniteMetricSpace, find_embeddings, is_metric, restrict, validate
from .katetov import KatetovMap, claim_map, enumerate_katetov, is_katetov
from .distance_sets import check_four_values, classify, similar
from .builder import build_approx, check_extension, kuratowski_embed
from .hedgehog import build_Z, classify_cycles, path_metric

__version__ = "0.1.0"
