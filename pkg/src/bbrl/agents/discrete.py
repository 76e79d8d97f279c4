"""Per-state critic agents for the two-decision MDP.

Each non-terminal state gets its own small action-value net (a twin pair for
the clipped variants).  There is no learned actor: the greedy policy samples
``m_samples`` candidate actions and takes the one the first critic scores
highest.  Networks take one minibatch gradient step per finished episode.

Algorithms:
  qlearning  single critic, bootstrap = sampled max over next-state values
  cdq        twin critics, bootstrap = min of the pair at the greedy action
  cdq-max    twin critics, bootstrap = max of the pair at the greedy action
  be-cdq     twin critics, min/max picked per episode by a two-armed bandit
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bandit import BiasBandit
from ..envs import SyntheticMdp, SyntheticMdpConfig
from ..errors import ConfigError
from ..evaluation import EvalRecord, RunResult, evaluate_policy
from ..nets import Mlp, MlpSpec
from ..replay import ReplayBuffer, Transition
from ..rng import split_streams

DISCRETE_ALGOS = ("qlearning", "cdq", "cdq-max", "be-cdq")


@dataclass
class DiscreteConfig:
    algo: str = "cdq"
    n_episodes: int = 1000
    eval_every: int = 50
    eval_episodes: int = 10
    hidden_size: int = 64
    learning_rate: float = 3e-3
    batch_size: int = 64
    gamma: float = 0.99
    m_samples: int = 64
    explore_eps: float = 0.1
    bandit_alpha: float = 0.25
    bandit_eps_decay: float = 0.99
    bandit_reset_period: int = 1500
    bandit_schedule: str = "hard"
    bandit_k_eps: int | None = None

    def __post_init__(self):
        if self.algo not in DISCRETE_ALGOS:
            raise ConfigError(f"unknown discrete algorithm {self.algo!r}")
        if self.m_samples < 1:
            raise ConfigError("m_samples must be >= 1")


def argmax_sampled_action(critic: Mlp, m_samples: int, rng: np.random.Generator,
                          low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Best of m uniformly sampled actions under the critic; ties go to the
    earliest sample."""
    candidates = rng.uniform(low, high, size=(m_samples, 1))
    values = critic.forward(candidates)[:, 0]
    return candidates[int(np.argmax(values))]


class DiscreteAgent:
    """Critic bank plus replay storage for the two non-terminal MDP states."""

    N_STATES = 2

    def __init__(self, cfg: DiscreteConfig, rng_init: np.random.Generator,
                 buffer_capacity: int | None = None):
        self.cfg = cfg
        self.twin = cfg.algo != "qlearning"
        spec = MlpSpec((1, cfg.hidden_size, 1), "tanh", "identity")
        self.q1 = [Mlp(spec, rng_init, cfg.learning_rate) for _ in range(self.N_STATES)]
        self.q2 = ([Mlp(spec, rng_init, cfg.learning_rate) for _ in range(self.N_STATES)]
                   if self.twin else None)
        capacity = buffer_capacity or max(2 * cfg.n_episodes, 1)
        self.buffers = [ReplayBuffer(capacity) for _ in range(self.N_STATES)]

    @staticmethod
    def state_index(state: np.ndarray) -> int:
        return int(np.argmax(state))

    def policy_action(self, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return argmax_sampled_action(self.q1[self.state_index(state)],
                                     self.cfg.m_samples, rng)

    def explore_action(self, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if rng.random() < self.cfg.explore_eps:
            return rng.uniform(-1.0, 1.0, size=1)
        return self.policy_action(state, rng)

    def _bootstrap_values(self, next_states: np.ndarray, variant: str | None,
                          rng: np.random.Generator) -> np.ndarray:
        """Next-state values for non-terminal rows, m fresh action samples per row."""
        n = len(next_states)
        m = self.cfg.m_samples
        out = np.empty(n)
        next_idx = np.argmax(next_states, axis=1)
        for si in np.unique(next_idx):
            rows = np.flatnonzero(next_idx == si)
            samples = rng.uniform(-1.0, 1.0, size=(rows.size * m, 1))
            v1 = self.q1[si].forward(samples)[:, 0].reshape(rows.size, m)
            if variant is None:  # plain Q-learning: sampled max over values
                out[rows] = v1.max(axis=1)
                continue
            best = samples.reshape(rows.size, m, 1)[np.arange(rows.size), v1.argmax(axis=1)]
            a1 = self.q1[si].forward(best)[:, 0]
            a2 = self.q2[si].forward(best)[:, 0]
            out[rows] = np.minimum(a1, a2) if variant == "min" else np.maximum(a1, a2)
        return out

    def update(self, variant: str | None, rng: np.random.Generator) -> None:
        """One minibatch gradient step per network, all targets computed first."""
        cfg = self.cfg
        staged = []
        for si in range(self.N_STATES):
            buf = self.buffers[si]
            if len(buf) == 0:
                continue
            batch = buf.sample(cfg.batch_size, rng)
            y = batch.rewards.copy()
            boot = batch.dones == 0.0
            if np.any(boot):
                y[boot] += cfg.gamma * self._bootstrap_values(batch.next_states[boot],
                                                              variant, rng)
            staged.append((si, batch.actions, y))
        for si, actions, y in staged:
            nets = [self.q1[si]] + ([self.q2[si]] if self.twin else [])
            for net in nets:
                pred = net.forward(actions)
                upstream = 2.0 * (pred - y[:, None]) / len(y)
                grad, _ = net.backprop(actions, upstream)
                net.step(grad)

    def play_episode(self, env: SyntheticMdp, rng_explore: np.random.Generator) -> tuple[float, int]:
        """Roll one exploratory episode into the replay storage."""
        state = env.reset()
        ep_return = 0.0
        steps = 0
        while True:
            action = self.explore_action(state, rng_explore)
            res = env.step(action)
            self.buffers[self.state_index(state)].push(
                Transition(state, action, res.reward, res.next_state, res.done))
            ep_return += res.reward
            steps += 1
            if res.done:
                return ep_return, steps
            state = res.next_state

    def train_episode(self, env: SyntheticMdp, rng_explore, rng_batch,
                      bandit: BiasBandit | None = None,
                      rng_bandit: np.random.Generator | None = None) -> "EpisodeOutcome":
        """Play one episode, then apply the per-episode gradient updates.

        For be-cdq the bandit picks min/max before the episode and is paid the
        undiscounted return afterwards.
        """
        algo = self.cfg.algo
        arm = None
        if algo == "be-cdq":
            arm = bandit.choose(rng_bandit)
            variant = "max" if arm == 1 else "min"
        elif algo == "cdq":
            variant = "min"
        elif algo == "cdq-max":
            variant = "max"
        else:
            variant = None
        ep_return, steps = self.play_episode(env, rng_explore)
        self.update(variant, rng_batch)
        if arm is not None:
            bandit.update(arm, ep_return)
            bandit.end_episode(steps)
        return EpisodeOutcome(ep_return, steps, arm, variant)


@dataclass
class EpisodeOutcome:
    ep_return: float
    steps: int
    arm: int | None
    variant: str | None  # target rule actually applied this episode


def run_discrete(cfg: DiscreteConfig, mdp_cfg: SyntheticMdpConfig, seed: int) -> RunResult:
    """Full seeded training run on the synthetic MDP with periodic evaluation."""
    streams = split_streams(seed)
    env = SyntheticMdp(mdp_cfg, streams["env"])
    eval_env = SyntheticMdp(mdp_cfg, streams["eval"])
    agent = DiscreteAgent(cfg, streams["init"])
    is_bandit = cfg.algo == "be-cdq"
    bandit = BiasBandit(alpha=cfg.bandit_alpha, eps_decay=cfg.bandit_eps_decay,
                        reset_period=cfg.bandit_reset_period,
                        schedule=cfg.bandit_schedule, k_eps=cfg.bandit_k_eps) if is_bandit else None

    records: list[EvalRecord] = []
    returns = np.empty(cfg.n_episodes)
    choices = np.empty(cfg.n_episodes, dtype=int) if is_bandit else None
    epsilons = np.empty(cfg.n_episodes) if is_bandit else None
    env_steps = 0
    last_arm = None

    for ep in range(1, cfg.n_episodes + 1):
        outcome = agent.train_episode(env, streams["explore"], streams["batch"],
                                      bandit, streams["bandit"])
        returns[ep - 1] = outcome.ep_return
        env_steps += outcome.steps
        last_arm = outcome.arm
        if is_bandit:
            choices[ep - 1] = outcome.arm
            epsilons[ep - 1] = bandit.epsilon
        if ep % cfg.eval_every == 0:
            mean_ret = evaluate_policy(agent, eval_env, cfg.eval_episodes, streams["eval"])
            records.append(EvalRecord(
                env_step=env_steps, episode=ep, mean_return=mean_ret,
                bandit_choice=last_arm,
                epsilon=bandit.epsilon if is_bandit else None, seed=seed))

    return RunResult(seed=seed, algo=cfg.algo, env_name="synthetic-mdp",
                     eval_records=records, episode_returns=returns,
                     episode_choices=choices, episode_epsilons=epsilons)
