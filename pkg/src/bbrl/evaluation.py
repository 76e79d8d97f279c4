"""Evaluation protocol and the records emitted during training runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EvalRecord:
    """One evaluation point; bandit fields stay None for modes without a bandit."""

    env_step: int
    episode: int
    mean_return: float
    bandit_choice: int | None
    epsilon: float | None
    seed: int


@dataclass
class RunResult:
    """Everything one seeded training run produces."""

    seed: int
    algo: str
    env_name: str
    eval_records: list[EvalRecord]
    episode_returns: np.ndarray
    episode_choices: np.ndarray | None = None   # per-episode arm, BE/heuristic modes only
    episode_epsilons: np.ndarray | None = None


def evaluate_policy(agent, env, n_episodes: int, rng: np.random.Generator) -> float:
    """Mean undiscounted return of the greedy policy over noise-free rollouts."""
    total = 0.0
    for _ in range(n_episodes):
        state = env.reset()
        ep_return = 0.0
        for _ in range(env.spec.max_episode_steps):
            action = agent.policy_action(state, rng)
            res = env.step(action)
            ep_return += res.reward
            if res.done:
                break
            state = res.next_state
        total += ep_return
    return total / n_episodes
