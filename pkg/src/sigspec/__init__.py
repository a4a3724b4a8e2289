"""Signal spectrum network models: generation, node projection and community detection."""

from .graph import Graph, DistanceReport, load_edge_list, save_edge_list, degrees, \
    connected_components, distance_metrics, karate_club
from .bssm import BinarySpectrum, CliqueCover, generate_spectrum, induce_network, \
    clique_cover, cover_to_spectrum, verify_representation
from .netstats import DegreeFit, EnsembleStats, rank_degree_fit, ensemble_experiment
from .wssm import SpectrumWeights, FitReport, IntegerModel, reconstruct, fit_symmetric, \
    fit_directed, offdiag_residual, threshold_classify, fit_wiassm, hub_scores
from .community import ModularityScores, Partition, modularity_scores, modularity, \
    project_modularity, sign_bipartition, cluster_projection, detect

__version__ = "0.1.0"
