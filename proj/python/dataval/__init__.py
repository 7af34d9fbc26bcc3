"""Shapley valuation of pooled spatio-temporal demand datasets."""

from ._core import (
    AdditiveGame,
    ConfigError,
    ContractError,
    DataError,
    ForecastValueGame,
    FunctionGame,
    Game,
    InfeasibleError,
    OutOfRangeError,
    Panel,
    SaturatingGame,
    TableGame,
    UnanimityGame,
    accuracy_probability_curve,
    coalition_bits,
    coefficient_of_determination,
    complementary_pair_game,
    complementary_pair_panel,
    cooperation_benefit,
    cosine_similarity,
    dtw_distance,
    estimate_shapley,
    evaluate_approximator,
    exact_shapley,
    latin_square,
    leave_one_out,
    load_panel,
    mc_shapley,
    night_coverage_panel,
    normalized_shares,
    numerical_similarity,
    pims_select,
    relative_dtw,
    rs_plan,
    run_cli,
    run_plan,
    scaled_copies_panel,
    seasonal_profile_forecast,
    similarity,
    ss_plan,
    volume_shares,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
