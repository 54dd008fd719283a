"""Quantum strategies: strategy fidelity and norm SDPs, supermap monotonicity and
cheating bounds for two-party protocols."""

from importlib import resources

from .crypto import CheatReport, cheat_bounds, cheat_demo, tradeoff_constant
from .fidelity import (FidelityResult, fvdg_check, inner_min_over_B, joint_concavity_check,
                       strategy_fidelity, strategy_fidelity_oracle, uhlmann_channel)
from .norm import NormResult, distinguish_bias, strategy_distance, strategy_norm
from .registers import RoundShape
from .strategies import (PureCoStrategy, PureStrategy, Purification, costrategy_choi,
                         random_pure_costrategy, random_pure_strategy, strategy_choi,
                         validate_costrategy, validate_strategy)
from .supermaps import Channel, Supermap, from_channel_composition

__version__ = "0.1.0"


def data_path(name: str) -> str:
    """Path of a shipped example file, e.g. ``data_path("identity.json")``."""
    return str(resources.files(__name__).joinpath("data", name))
