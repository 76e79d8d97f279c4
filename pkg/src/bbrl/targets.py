"""Bootstrap target rules for twin critics, target smoothing, and EMA tracking.

The four aggregation rules differ only in how the two critic estimates are
combined: "min" is conservative, "max" optimistic, "avg" neutral, and
"random" uses one critic per episode chosen by a binary mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .nets import MlpParams

RULE_NAMES = ("min", "max", "avg", "random")


@dataclass
class TargetRule:
    variant: str
    beta: int = 1  # only used by "random"; resampled once per episode

    def __post_init__(self):
        if self.variant not in RULE_NAMES:
            raise ConfigError(f"unknown target rule {self.variant!r}; expected one of {RULE_NAMES}")
        if self.beta not in (0, 1):
            raise ConfigError("beta must be 0 or 1")

    def resample_mask(self, rng: np.random.Generator) -> None:
        self.beta = int(rng.integers(0, 2))


def compute_target(rule: TargetRule, r, done, gamma: float, q1, q2):
    """One-step bootstrap target; exactly ``r`` on terminal transitions.

    Accepts scalars or aligned arrays.  The two critic estimates are combined
    per the rule, discounted, and added to the reward.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must be in [0, 1], got {gamma}")
    r = np.asarray(r, dtype=np.float64)
    q1 = np.asarray(q1, dtype=np.float64)
    q2 = np.asarray(q2, dtype=np.float64)
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(q1)) and np.all(np.isfinite(q2))):
        raise NumericalError("non-finite input to compute_target")

    if rule.variant == "min":
        boot = np.minimum(q1, q2)
    elif rule.variant == "max":
        boot = np.maximum(q1, q2)
    elif rule.variant == "avg":
        boot = (q1 + q2) / 2.0
    else:
        boot = q1 if rule.beta == 1 else q2

    y = np.where(np.asarray(done, dtype=bool), r, r + gamma * boot)
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class SmoothingConfig:
    """Clipped-Gaussian smoothing of the target policy's action."""

    sigma_tilde: float = 0.2
    clip: float = 0.5
    action_low: np.ndarray | float = -1.0
    action_high: np.ndarray | float = 1.0

    def __post_init__(self):
        if self.sigma_tilde < 0 or self.clip < 0:
            raise ConfigError("sigma_tilde and clip must be >= 0")


def smooth_target_action(policy, next_states: np.ndarray, cfg: SmoothingConfig,
                         rng: np.random.Generator) -> np.ndarray:
    """Target-policy action plus clipped Gaussian noise, clipped to bounds.

    ``policy`` maps a batch of states to in-bounds actions.
    """
    actions = policy(next_states)
    noise = rng.normal(0.0, cfg.sigma_tilde, size=actions.shape)
    noise = np.clip(noise, -cfg.clip, cfg.clip)
    return np.clip(actions + noise, cfg.action_low, cfg.action_high)


def ema_update(target_params: MlpParams, live_params: MlpParams, tau: float) -> None:
    """In place: each target parameter <- tau*live + (1-tau)*target."""
    if not 0.0 < tau <= 1.0:
        raise ConfigError(f"tau must be in (0, 1], got {tau}")
    t_arrays = target_params.arrays()
    l_arrays = live_params.arrays()
    if len(t_arrays) != len(l_arrays):
        raise ConfigError("target/live parameter structures differ")
    for t, l in zip(t_arrays, l_arrays):
        if t.shape != l.shape:
            raise ConfigError(f"target/live shape mismatch: {t.shape} vs {l.shape}")
        t *= 1.0 - tau
        t += tau * l
