"""Active preference estimation from paired comparisons.

Find a user's ideal point in a low-dimensional item embedding by asking
"which of these two?" questions, choosing each query to be maximally
informative about the Bayesian posterior over the point.
"""

__version__ = "0.1.0"

from .embedding import (Embedding, Triplet, fit_k0, load_embedding, load_triplets,
                        prepare_embedding, triplet_error_fraction)
from .response_model import (NoiseSchemeConfig, OracleConfig, PairQuery, hyperplane_pair,
                             make_pair, response_probability, simulate_response)
from .posterior import (PosteriorBatch, ResponseHistory, log_posterior,
                        posterior_entropy_estimate, sample_posterior)
from .strategies import (QueryPool, SearchSession, SelectionState, StrategyConfig,
                         continuous_epmv_query, epmv_utility, info_gain_utility,
                         mcmv_utility, run_step, select_query)
from .baselines import (GaussCloudState, Polytope, actrank_select, actrank_update,
                        chebyshev_center, gausscloud_select)
from .metrics import kendall_tau_normalized, mse, ranking_metric
from .bounds import (binary_entropy, lemma1_bounds, mse_lower_bound, prop1_lower,
                     prop2_bounds, theorem3_bounds)

__all__ = [
    "__version__",
    "Embedding", "Triplet", "fit_k0", "load_embedding", "load_triplets",
    "prepare_embedding", "triplet_error_fraction",
    "NoiseSchemeConfig", "OracleConfig", "PairQuery", "hyperplane_pair", "make_pair",
    "response_probability", "simulate_response",
    "PosteriorBatch", "ResponseHistory", "log_posterior", "posterior_entropy_estimate",
    "sample_posterior",
    "QueryPool", "SearchSession", "SelectionState", "StrategyConfig",
    "continuous_epmv_query", "epmv_utility", "info_gain_utility", "mcmv_utility",
    "run_step", "select_query",
    "GaussCloudState", "Polytope", "actrank_select", "actrank_update",
    "chebyshev_center", "gausscloud_select",
    "kendall_tau_normalized", "mse", "ranking_metric",
    "binary_entropy", "lemma1_bounds", "mse_lower_bound", "prop1_lower",
    "prop2_bounds", "theorem3_bounds",
]
