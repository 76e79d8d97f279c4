from .discrete import DISCRETE_ALGOS, DiscreteAgent, DiscreteConfig, argmax_sampled_action, run_discrete
from .td3 import TD3_ALGOS, Td3Agent, Td3Config, run_td3

ALGO_NAMES = DISCRETE_ALGOS + TD3_ALGOS

__all__ = [
    "ALGO_NAMES",
    "DISCRETE_ALGOS",
    "DiscreteAgent",
    "DiscreteConfig",
    "TD3_ALGOS",
    "Td3Agent",
    "Td3Config",
    "argmax_sampled_action",
    "run_discrete",
    "run_td3",
]
