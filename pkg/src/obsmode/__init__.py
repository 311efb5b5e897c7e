"""Optimal control and observation-mode scheduling for non-deterministic
transition systems under co-safe LTL objectives."""

from .model import ModelError, NtsModel, ObservationMode, run_cost, validate_model
from .scltl import FormulaSyntaxError, compile_to_dfa, holds_strong, parse_formula
from .product import SOURCE, TARGET, build_product, product_stats
from .belief import build_belief, belief_stats
from .synthesis import (Infeasible, Strategy, synth_bounded, synth_unbounded,
                        wtg_profile)
from .runtime import feed_observation, next_command, replay, start_session
from .oracle import (backward_induction_value, random_instance, verify_strategy)
from .formats import InputError, load_model, load_strategy, save_model, save_strategy
from .casestudy import generate_grid_casestudy, running_example

__all__ = [
    "ModelError", "NtsModel", "ObservationMode", "run_cost", "validate_model",
    "FormulaSyntaxError", "compile_to_dfa", "holds_strong", "parse_formula",
    "SOURCE", "TARGET", "build_product", "product_stats",
    "build_belief", "belief_stats",
    "Infeasible", "Strategy", "synth_bounded", "synth_unbounded", "wtg_profile",
    "feed_observation", "next_command", "replay", "start_session",
    "backward_induction_value", "random_instance", "verify_strategy",
    "InputError", "load_model", "load_strategy", "save_model", "save_strategy",
    "generate_grid_casestudy", "running_example",
]
