"""Twin-critic deterministic-policy-gradient agents with selectable target bias.

One training loop covers the whole family; variants differ only in how the
per-episode target rule is picked:

  td3       always the conservative (min) rule
  td3-max   always the optimistic (max) rule
  td3-avg   always the average rule
  td3-rand  one critic per episode, chosen by a fresh binary mask
  be-td3    min/max chosen per episode by the learned two-armed bandit
  td3-hm    epsilon-greedy bandit whose greedy arm is pinned to max
  td3-hmin  epsilon-greedy bandit whose greedy arm is pinned to min

Critics are updated every environment step from a replay minibatch; the actor
and the EMA target copies update every ``policy_delay`` critic steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..bandit import BANDIT_MODES, BiasBandit
from ..envs import EnvSpec, PendulumConfig, SyntheticMdpConfig, make_env
from ..errors import ConfigError
from ..evaluation import EvalRecord, RunResult, evaluate_policy
from ..nets import Mlp, MlpSpec, forward
from ..replay import Batch, ReplayBuffer, Transition
from ..rng import split_streams
from ..targets import SmoothingConfig, TargetRule, compute_target, ema_update, smooth_target_action

TD3_ALGOS = ("td3", "td3-max", "td3-avg", "td3-rand", "be-td3", "td3-hm", "td3-hmin")

_FIXED_RULES = {"td3": "min", "td3-max": "max", "td3-avg": "avg"}
_ALGO_BANDIT_MODES = {"be-td3": None, "td3-hm": "heuristic-max", "td3-hmin": "heuristic-min"}


@dataclass
class Td3Config:
    algo: str = "td3"
    max_env_steps: int = 100_000
    eval_every: int = 5000
    eval_episodes: int = 10
    hidden_sizes: tuple[int, ...] = (256, 256)
    critic_lr: float = 3e-4
    actor_lr: float = 3e-4
    batch_size: int = 256
    gamma: float = 0.99
    tau: float = 0.005
    policy_delay: int = 2
    explore_sigma: float = 0.2
    smooth_sigma: float = 0.2
    smooth_clip: float = 0.5
    warmup_steps: int = 1000
    buffer_capacity: int = 1_000_000
    explore_with_target_actor: bool = False  # pseudo-code acts from the EMA copy; default live
    bandit_mode: str = "learned"             # only used by be-td3
    bandit_alpha: float = 0.25
    bandit_eps_decay: float = 0.99
    bandit_reset_period: int = 1500
    bandit_schedule: str = "hard"
    bandit_k_eps: int | None = None

    def __post_init__(self):
        if self.algo not in TD3_ALGOS:
            raise ConfigError(f"unknown td3-family algorithm {self.algo!r}")
        if self.bandit_mode not in BANDIT_MODES:
            raise ConfigError(f"unknown bandit mode {self.bandit_mode!r}")
        if self.policy_delay < 1:
            raise ConfigError("policy_delay must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")


class Td3Agent:
    """Twin critics, deterministic actor, EMA target copies, Adam throughout."""

    def __init__(self, env_spec: EnvSpec, cfg: Td3Config, rng_init: np.random.Generator):
        self.cfg = cfg
        self.state_dim = env_spec.state_dim
        self.action_dim = env_spec.action_dim
        self.action_low = np.asarray(env_spec.action_low, dtype=np.float64)
        self.action_high = np.asarray(env_spec.action_high, dtype=np.float64)
        self.action_scale = (self.action_high - self.action_low) / 2.0
        self.action_offset = (self.action_high + self.action_low) / 2.0

        critic_spec = MlpSpec((self.state_dim + self.action_dim, *cfg.hidden_sizes, 1),
                              "relu", "identity")
        actor_spec = MlpSpec((self.state_dim, *cfg.hidden_sizes, self.action_dim),
                             "relu", "tanh")
        self.q1 = Mlp(critic_spec, rng_init, cfg.critic_lr)
        self.q2 = Mlp(critic_spec, rng_init, cfg.critic_lr)
        self.actor = Mlp(actor_spec, rng_init, cfg.actor_lr)
        self.q1_target = self.q1.clone_params()
        self.q2_target = self.q2.clone_params()
        self.actor_target = self.actor.clone_params()

        self.smoothing = SmoothingConfig(sigma_tilde=cfg.smooth_sigma, clip=cfg.smooth_clip,
                                         action_low=self.action_low, action_high=self.action_high)
        self.critic_updates = 0
        self.actor_updates = 0

    def _actor_action(self, params, states: np.ndarray) -> np.ndarray:
        raw = forward(params, self.actor.spec, states)
        return self.action_offset + self.action_scale * raw

    def policy_action(self, state: np.ndarray, rng=None) -> np.ndarray:
        """Greedy action from the live actor (evaluation protocol)."""
        return self._actor_action(self.actor.params, state)

    def explore_action(self, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        params = self.actor_target if self.cfg.explore_with_target_actor else self.actor.params
        noisy = self._actor_action(params, state) + rng.normal(0.0, self.cfg.explore_sigma,
                                                               size=self.action_dim)
        return np.clip(noisy, self.action_low, self.action_high)

    def train_step(self, batch: Batch, rule: TargetRule, rng: np.random.Generator) -> None:
        """One critic update for both nets; delayed actor + EMA updates."""
        cfg = self.cfg
        a_smooth = smooth_target_action(
            lambda s: self._actor_action(self.actor_target, s),
            batch.next_states, self.smoothing, rng)
        x_next = np.concatenate([batch.next_states, a_smooth], axis=1)
        q1_next = forward(self.q1_target, self.q1.spec, x_next)[:, 0]
        q2_next = forward(self.q2_target, self.q2.spec, x_next)[:, 0]
        # one shared regression target per sample for both critics
        y = compute_target(rule, batch.rewards, batch.dones, cfg.gamma, q1_next, q2_next)

        x = np.concatenate([batch.states, batch.actions], axis=1)
        n = len(batch)
        for net in (self.q1, self.q2):
            pred = net.forward(x)
            grad, _ = net.backprop(x, 2.0 * (pred - y[:, None]) / n)
            net.step(grad)
        self.critic_updates += 1

        if self.critic_updates % cfg.policy_delay == 0:
            self._actor_step(batch.states)
            ema_update(self.q1_target, self.q1.params, cfg.tau)
            ema_update(self.q2_target, self.q2.params, cfg.tau)
            ema_update(self.actor_target, self.actor.params, cfg.tau)
            self.actor_updates += 1

    def _actor_step(self, states: np.ndarray) -> None:
        """Ascend mean Q1(s, actor(s)) through the action input of the critic."""
        n = len(states)
        actions = self._actor_action(self.actor.params, states)
        x = np.concatenate([states, actions], axis=1)
        _, dx = self.q1.backprop(x, np.full((n, 1), -1.0 / n))
        upstream = dx[:, self.state_dim:] * self.action_scale
        grad, _ = self.actor.backprop(states, upstream)
        self.actor.step(grad)


def _resolve_selection(cfg: Td3Config) -> tuple[TargetRule, BiasBandit | None, bool]:
    """Map an algorithm name to (initial rule, bandit, per-episode mask resampling)."""
    algo = cfg.algo
    if algo in _FIXED_RULES:
        return TargetRule(_FIXED_RULES[algo]), None, False
    if algo == "td3-rand":
        return TargetRule("random"), None, True
    mode = _ALGO_BANDIT_MODES[algo] or cfg.bandit_mode
    if mode == "fixed-min":
        return TargetRule("min"), None, False
    if mode == "fixed-max":
        return TargetRule("max"), None, False
    bandit = BiasBandit(alpha=cfg.bandit_alpha, eps_decay=cfg.bandit_eps_decay,
                        reset_period=cfg.bandit_reset_period, schedule=cfg.bandit_schedule,
                        k_eps=cfg.bandit_k_eps, mode=mode)
    return TargetRule("min"), bandit, False


def run_td3(cfg: Td3Config, env_name: str, seed: int,
            mdp_cfg: SyntheticMdpConfig | None = None,
            pendulum_cfg: PendulumConfig | None = None,
            step_callback=None) -> RunResult:
    """Seeded training run of any family member, with periodic evaluation.

    ``step_callback(t, agent)``, when given, runs after every environment step
    (used for trajectory comparisons).
    """
    streams = split_streams(seed)
    env = make_env(env_name, mdp_config=mdp_cfg, pendulum_config=pendulum_cfg,
                   rng=streams["env"])
    eval_env = make_env(env_name, mdp_config=mdp_cfg, pendulum_config=pendulum_cfg,
                        rng=streams["eval"])
    agent = Td3Agent(env.spec, cfg, streams["init"])
    buffer = ReplayBuffer(cfg.buffer_capacity)

    rule, bandit, resample_mask = _resolve_selection(cfg)
    has_bandit = bandit is not None

    def begin_episode() -> int | None:
        if has_bandit:
            arm = bandit.choose(streams["bandit"])
            rule.variant = "max" if arm == 1 else "min"
            return arm
        if resample_mask:
            rule.resample_mask(streams["bandit"])
        return None

    records: list[EvalRecord] = []
    episode_returns: list[float] = []
    episode_choices: list[int] = []
    episode_epsilons: list[float] = []

    state = env.reset()
    arm = begin_episode()
    ep_return, ep_len = 0.0, 0

    for t in range(1, cfg.max_env_steps + 1):
        if t <= cfg.warmup_steps:
            action = streams["explore"].uniform(agent.action_low, agent.action_high)
        else:
            action = agent.explore_action(state, streams["explore"])
        res = env.step(action)
        buffer.push(Transition(state, action, res.reward, res.next_state, res.done))
        ep_return += res.reward
        ep_len += 1

        if t > cfg.warmup_steps:
            batch = buffer.sample(cfg.batch_size, streams["batch"])
            agent.train_step(batch, rule, streams["batch"])

        if res.done or ep_len >= env.spec.max_episode_steps:
            if has_bandit:
                bandit.update(arm, ep_return)
                bandit.end_episode(ep_len)
                episode_choices.append(arm)
                episode_epsilons.append(bandit.epsilon)
            episode_returns.append(ep_return)
            state = env.reset()
            arm = begin_episode()
            ep_return, ep_len = 0.0, 0
        else:
            state = res.next_state

        if t % cfg.eval_every == 0:
            mean_ret = evaluate_policy(agent, eval_env, cfg.eval_episodes, streams["eval"])
            records.append(EvalRecord(
                env_step=t, episode=len(episode_returns), mean_return=mean_ret,
                bandit_choice=arm if has_bandit else None,
                epsilon=bandit.epsilon if has_bandit else None, seed=seed))

        if step_callback is not None:
            step_callback(t, agent)

    return RunResult(
        seed=seed, algo=cfg.algo, env_name=env_name, eval_records=records,
        episode_returns=np.asarray(episode_returns),
        episode_choices=np.asarray(episode_choices, dtype=int) if has_bandit else None,
        episode_epsilons=np.asarray(episode_epsilons) if has_bandit else None)
