"""Node embeddings from sampled sub-networks, evolved unit models and ensembling."""

from .autoencoder import LayerSpec, TrainConfig
from .config import RunConfig
from .ensemble import EmbeddingTable
from .estimator import SEGEN, check_graph
from .evolution import EvolutionConfig
from .graph import Graph, SubNetwork, load_edge_list
from .sampling import SamplerConfig, SamplePool, build_pool

__version__ = "0.1.0"

__all__ = [
    "SEGEN",
    "check_graph",
    "Graph",
    "SubNetwork",
    "load_edge_list",
    "SamplerConfig",
    "SamplePool",
    "build_pool",
    "LayerSpec",
    "TrainConfig",
    "EvolutionConfig",
    "EmbeddingTable",
    "RunConfig",
]
