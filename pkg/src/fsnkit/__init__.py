"""Data-driven neighbor selection for directed leader-follower networks."""

from .dynamics import Trajectory, simulate_clfn, simulate_dlfn
from .fsn import FsnResult, build_fsn, clfn_fsn, dlfn_fsn, verify_lf_reachability
from .graph import (
    DirectedNetwork,
    LeaderProfile,
    LeaderSchedule,
    NetworkError,
    is_strongly_connected,
    load_network,
    random_strongly_connected,
    reachable_set,
    save_network,
)
from .spantree import build_spanning_tree, verify_spanning_tree
from .spectral import ConvergenceError, perron_max_stochastic, perron_min_laplacian
from .tempo import run_distributed_selection

__version__ = "0.1.0"
