"""Seeded stepwise environments: a 4-state decision MDP and a pendulum swing-up.

Both tasks share the same interface: ``reset(seed=None) -> state`` and
``step(action) -> StepResult``.  Each instance owns its RNG, so independent
instances can run concurrently without sharing state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError

ENV_NAMES = ("synthetic-mdp", "pendulum")


@dataclass(frozen=True)
class EnvSpec:
    state_dim: int
    action_dim: int
    action_low: np.ndarray
    action_high: np.ndarray
    max_episode_steps: int

    def __post_init__(self):
        if not np.all(np.asarray(self.action_low) < np.asarray(self.action_high)):
            raise ConfigError("action_low must be < action_high componentwise")


@dataclass
class StepResult:
    next_state: np.ndarray
    reward: float
    done: bool  # true terminal transition, not a time limit


@dataclass(frozen=True)
class SyntheticMdpConfig:
    """Terminal-reward law: r ~ mu + U(-sigma, +sigma) on the rewarding transition."""

    mu: float = 1.0
    sigma: float = 5.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")


class SyntheticMdp:
    """Two-decision chain with one noisy terminal reward.

    States: start, middle, and two terminals.  From the start state an action
    a < 0 terminates immediately with reward 0; a >= 0 moves to the middle
    state.  From the middle state every action terminates, paying
    mu + U(-sigma, sigma).  Non-terminal states are one-hot encoded:
    start = (1, 0), middle = (0, 1).
    """

    START = np.array([1.0, 0.0])
    MIDDLE = np.array([0.0, 1.0])
    TERMINAL = np.array([0.0, 0.0])  # sentinel; always masked by done

    def __init__(self, config: SyntheticMdpConfig = SyntheticMdpConfig(),
                 rng: np.random.Generator | int | None = None):
        self.config = config
        self.spec = EnvSpec(state_dim=2, action_dim=1,
                            action_low=np.array([-1.0]), action_high=np.array([1.0]),
                            max_episode_steps=2)
        self._rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self._state: np.ndarray | None = None

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._state = self.START
        return self._state.copy()

    def step(self, action) -> StepResult:
        if self._state is None:
            raise ContractError("step() called on a terminal or unreset environment")
        a = float(np.clip(np.asarray(action, dtype=np.float64).reshape(-1)[0], -1.0, 1.0))
        if self._state is self.START:
            if a < 0.0:
                self._state = None
                return StepResult(self.TERMINAL.copy(), 0.0, True)
            self._state = self.MIDDLE
            return StepResult(self._state.copy(), 0.0, False)
        reward = self.config.mu + self._rng.uniform(-self.config.sigma, self.config.sigma)
        self._state = None
        return StepResult(self.TERMINAL.copy(), reward, True)


@dataclass(frozen=True)
class PendulumConfig:
    dt: float = 0.05
    gravity: float = 10.0
    mass: float = 1.0
    length: float = 1.0
    max_torque: float = 2.0
    max_speed: float = 8.0
    max_episode_steps: int = 200


def _angle_normalize(theta: float) -> float:
    return ((theta + math.pi) % (2.0 * math.pi)) - math.pi


class Pendulum:
    """Frictionless pendulum swing-up with torque control.

    Angle 0 is upright.  Semi-implicit Euler integration; the angular velocity
    is clipped to +-max_speed.  The per-step reward is
    -(theta_norm^2 + 0.1 * thetadot^2 + 0.001 * torque^2), computed from the
    pre-step state and the applied torque, so it is always <= 0.  Episodes end
    by time limit only (the done flag is never set).
    """

    def __init__(self, config: PendulumConfig = PendulumConfig(),
                 rng: np.random.Generator | int | None = None):
        self.config = config
        self.spec = EnvSpec(state_dim=3, action_dim=1,
                            action_low=np.array([-config.max_torque]),
                            action_high=np.array([config.max_torque]),
                            max_episode_steps=config.max_episode_steps)
        self._rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self._theta = 0.0
        self._thetadot = 0.0

    def _obs(self) -> np.ndarray:
        return np.array([math.cos(self._theta), math.sin(self._theta), self._thetadot])

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._theta = self._rng.uniform(-math.pi, math.pi)
        self._thetadot = self._rng.uniform(-1.0, 1.0)
        return self._obs()

    def set_state(self, theta: float, thetadot: float) -> np.ndarray:
        self._theta = float(theta)
        self._thetadot = float(thetadot)
        return self._obs()

    def step(self, action) -> StepResult:
        cfg = self.config
        u = float(np.clip(np.asarray(action, dtype=np.float64).reshape(-1)[0],
                          -cfg.max_torque, cfg.max_torque))
        th, thdot = self._theta, self._thetadot

        cost = _angle_normalize(th) ** 2 + 0.1 * thdot**2 + 0.001 * u**2

        acc = (3.0 * cfg.gravity / (2.0 * cfg.length) * math.sin(th)
               + 3.0 / (cfg.mass * cfg.length**2) * u)
        thdot = thdot + acc * cfg.dt
        thdot = min(max(thdot, -cfg.max_speed), cfg.max_speed)
        th = th + thdot * cfg.dt

        self._theta, self._thetadot = th, thdot
        return StepResult(self._obs(), -cost, False)


def make_env(name: str, *, mdp_config: SyntheticMdpConfig | None = None,
             pendulum_config: PendulumConfig | None = None,
             rng: np.random.Generator | int | None = None):
    """Build an environment by its config name."""
    if name == "synthetic-mdp":
        return SyntheticMdp(mdp_config or SyntheticMdpConfig(), rng)
    if name == "pendulum":
        return Pendulum(pendulum_config or PendulumConfig(), rng)
    raise ConfigError(f"unknown environment {name!r}; expected one of {ENV_NAMES}")
