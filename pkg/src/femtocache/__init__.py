"""BER-optimal caching placement for wireless femto-caching clusters under Rayleigh fading."""

__version__ = "0.1.0"

from .ber_model import ChannelParams, cellular_ber, cluster_ber, delta_p, file_ber, q_function
from .greedy import GreedyTrace, HelperAssignment, greedy_place, m_round_greedy
from .oracle import BudgetExceeded, SearchReport, exhaustive_optimal
from .placement import Placement, average_ber, doubly_placement, even_placement, single_file_placement
from .popularity import Popularity, zipf
from .regimes import Regime, RegimeClassification, classify, gamma0, gamma0_prime, gamma1, gamma2, gamma3

__all__ = [
    "ChannelParams",
    "q_function",
    "cellular_ber",
    "cluster_ber",
    "file_ber",
    "delta_p",
    "Popularity",
    "zipf",
    "Placement",
    "average_ber",
    "even_placement",
    "single_file_placement",
    "doubly_placement",
    "GreedyTrace",
    "HelperAssignment",
    "greedy_place",
    "m_round_greedy",
    "Regime",
    "RegimeClassification",
    "classify",
    "gamma0",
    "gamma0_prime",
    "gamma1",
    "gamma2",
    "gamma3",
    "BudgetExceeded",
    "SearchReport",
    "exhaustive_optimal",
]
