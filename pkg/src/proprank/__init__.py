"""Proportional rank aggregation in exact rational arithmetic."""

from proprank.axioms import (
    AxiomReport,
    BoundCurve,
    check_pareto,
    check_spjr,
    check_ujr,
    check_upjr,
    verify_pair_priceability,
    verify_pair_scheme,
    verify_rank_priceability,
    verify_rank_scheme,
    worst_group_margin,
)
from proprank.baselines import (
    SwfResult,
    chamberlin_courant,
    kemeny,
    sequential_borda,
    squared_kemeny,
)
from proprank.core import (
    Profile,
    Ranking,
    Subprofile,
    borda_total,
    pair_set,
    positional_utility,
    swap_distance,
    utility,
)
from proprank.errors import (
    CapacityError,
    InconsistencyError,
    InvalidInputError,
    ProfileParseError,
    ProprankError,
)
from proprank.flow import FlowNetwork, max_flow, min_cut, min_ratio_max_flow
from proprank.profile_io import gen_profile, parse_profile, render_profile
from proprank.rules import BudgetTrace, RoundRecord, run_fb, run_psb, run_rmes, solve_rmes_price

__version__ = "0.1.0"
