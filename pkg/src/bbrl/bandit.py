"""Two-armed bandit that picks the critic-update bias once per episode.

Arm 0 stands for the conservative (min) target rule, arm 1 for the optimistic
(max) rule.  Arm values are tracked with a constant step size so the bandit
can follow a non-stationary payoff; exploration decays exponentially and is
restored either by a hard reset every ``reset_period`` episodes or by the
soft, episode-length-scaled schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError

BANDIT_MODES = ("learned", "heuristic-max", "heuristic-min", "fixed-min", "fixed-max")
SCHEDULES = ("hard", "soft")

EPSILON_INIT = 0.9


@dataclass
class BiasBandit:
    """Tabular two-arm value learner with epsilon-greedy arm choice.

    ``mode`` variants:
      learned        greedy arm is argmax of the learned values
      heuristic-max  epsilon-greedy, but the greedy arm is always 1
      heuristic-min  epsilon-greedy, but the greedy arm is always 0
      fixed-max      always arm 1, no exploration, values unused
      fixed-min      always arm 0, no exploration, values unused
    """

    alpha: float = 0.25
    eps_decay: float = 0.99
    reset_period: int = 1500
    schedule: str = "hard"
    k_eps: int | None = None
    mode: str = "learned"
    q_values: np.ndarray = field(default_factory=lambda: np.zeros(2))
    epsilon: float = EPSILON_INIT
    episode_count: int = 0

    def __post_init__(self):
        self.q_values = np.asarray(self.q_values, dtype=np.float64)
        if self.q_values.shape != (2,):
            raise ConfigError("q_values must have exactly two entries")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha must be in (0, 1]")
        if not 0.0 < self.eps_decay < 1.0:
            raise ConfigError("eps_decay must be in (0, 1)")
        if self.reset_period < 1:
            raise ConfigError("reset_period must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ConfigError(f"unknown schedule {self.schedule!r}")
        if self.schedule == "soft" and (self.k_eps is None or self.k_eps < 1):
            raise ConfigError("soft schedule requires k_eps >= 1")
        if self.mode not in BANDIT_MODES:
            raise ConfigError(f"unknown bandit mode {self.mode!r}")
        if not 0.0 <= self.epsilon <= EPSILON_INIT:
            raise ConfigError(f"epsilon must be in [0, {EPSILON_INIT}]")

    @property
    def is_fixed(self) -> bool:
        return self.mode in ("fixed-min", "fixed-max")

    def _greedy_arm(self, rng: np.random.Generator) -> int:
        if self.mode == "heuristic-max":
            return 1
        if self.mode == "heuristic-min":
            return 0
        if self.q_values[0] == self.q_values[1]:
            return int(rng.integers(0, 2))  # uniform tie-break
        return int(np.argmax(self.q_values))

    def choose(self, rng: np.random.Generator) -> int:
        """Pick an arm: uniform with probability epsilon, otherwise greedy."""
        if self.mode == "fixed-min":
            return 0
        if self.mode == "fixed-max":
            return 1
        if rng.random() < self.epsilon:
            return int(rng.integers(0, 2))
        return self._greedy_arm(rng)

    def update(self, arm: int, episode_return: float) -> None:
        """Move the chosen arm's value toward the undiscounted episode return."""
        if arm not in (0, 1):
            raise ConfigError("arm must be 0 or 1")
        if not np.isfinite(episode_return):
            raise NumericalError("episode return must be finite")
        if self.is_fixed:
            return
        self.q_values[arm] += self.alpha * (episode_return - self.q_values[arm])

    def advance_epsilon_hard(self) -> None:
        """Decay epsilon, restoring it to the initial value every reset_period episodes."""
        self.episode_count += 1
        if self.episode_count % self.reset_period == 0:
            self.epsilon = EPSILON_INIT
        else:
            self.epsilon *= self.eps_decay

    def advance_epsilon_soft(self, episode_length: int) -> None:
        """Scale the decay by max(k_eps/k, 1), capped at the initial epsilon.

        Short episodes slow or undo the decay; episodes of at least k_eps
        steps decay exactly as the hard schedule does between resets.
        """
        if episode_length < 1:
            raise ConfigError("episode_length must be >= 1")
        self.episode_count += 1
        boost = max(self.k_eps / episode_length, 1.0)
        self.epsilon = min(self.epsilon * self.eps_decay * boost, EPSILON_INIT)

    def end_episode(self, episode_length: int) -> None:
        """Advance the exploration schedule once per completed episode."""
        if self.schedule == "soft":
            self.advance_epsilon_soft(episode_length)
        else:
            self.advance_epsilon_hard()
