"""Environment contracts: MDP transition table, reward law, pendulum dynamics."""

import math

import numpy as np
import pytest

from bbrl.envs import (
    Pendulum,
    PendulumConfig,
    StepResult,
    SyntheticMdp,
    SyntheticMdpConfig,
    make_env,
)
from bbrl.errors import ConfigError, ContractError


class TestSyntheticMdp:
    def test_reset_returns_start_encoding(self):
        env = SyntheticMdp(rng=0)
        np.testing.assert_array_equal(env.reset(), [1.0, 0.0])

    def test_negative_action_terminates_with_zero_reward(self):
        env = SyntheticMdp(rng=0)
        env.reset()
        res = env.step(-0.3)
        assert res.done and res.reward == 0.0

    def test_nonnegative_action_moves_to_middle(self):
        env = SyntheticMdp(rng=0)
        env.reset()
        res = env.step(0.0)
        assert not res.done
        assert res.reward == 0.0
        np.testing.assert_array_equal(res.next_state, [0.0, 1.0])

    def test_middle_state_pays_exact_mu_when_noise_free(self):
        env = SyntheticMdp(SyntheticMdpConfig(mu=-1.0, sigma=0.0), rng=3)
        env.reset()
        env.step(1.0)
        res = env.step(-0.5)
        assert res.done
        assert res.reward == -1.0

    def test_reward_law_monte_carlo(self):
        # r ~ mu + U(-sigma, sigma): bounded support, empirical mean near mu.
        env = SyntheticMdp(SyntheticMdpConfig(mu=1.0, sigma=5.0), rng=42)
        rewards = np.empty(100_000)
        for i in range(rewards.size):
            env.reset()
            env.step(0.5)
            rewards[i] = env.step(0.0).reward
        assert rewards.min() >= -4.0 and rewards.max() <= 6.0
        assert abs(rewards.mean() - 1.0) < 0.05

    def test_same_seed_gives_identical_reward_streams(self):
        def stream(seed):
            env = SyntheticMdp(SyntheticMdpConfig(mu=0.0, sigma=2.0), rng=seed)
            out = []
            for _ in range(50):
                env.reset()
                env.step(1.0)
                out.append(env.step(0.0).reward)
            return out

        assert stream(7) == stream(7)

    def test_reset_after_terminal_returns_start(self):
        env = SyntheticMdp(rng=1)
        env.reset()
        env.step(-1.0)
        np.testing.assert_array_equal(env.reset(), [1.0, 0.0])

    def test_step_on_terminal_raises(self):
        env = SyntheticMdp(rng=1)
        env.reset()
        env.step(-1.0)
        with pytest.raises(ContractError):
            env.step(0.0)

    def test_actions_outside_bounds_are_clipped(self):
        env = SyntheticMdp(rng=0)
        env.reset()
        res = env.step(37.0)  # clips to 1.0 -> middle state
        np.testing.assert_array_equal(res.next_state, [0.0, 1.0])

    def test_episodes_terminate_within_two_steps(self):
        env = SyntheticMdp(SyntheticMdpConfig(mu=1.0, sigma=5.0), rng=9)
        rng = np.random.default_rng(0)
        for _ in range(200):
            env.reset()
            steps = 0
            done = False
            while not done:
                res = env.step(rng.uniform(-1, 1))
                done = res.done
                steps += 1
                if res.reward != 0.0:
                    assert done  # reward only on the final middle->terminal move
            assert steps <= 2

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigError):
            SyntheticMdpConfig(mu=0.0, sigma=-1.0)


def reference_pendulum_step(theta, thetadot, u, cfg: PendulumConfig):
    """Straight-line duplicate of the integrator for cross-checking."""
    u = min(max(u, -cfg.max_torque), cfg.max_torque)
    th_norm = ((theta + math.pi) % (2 * math.pi)) - math.pi
    cost = th_norm * th_norm + 0.1 * thetadot * thetadot + 0.001 * u * u
    new_thdot = thetadot + (1.5 * cfg.gravity / cfg.length * math.sin(theta)
                            + 3.0 * u / (cfg.mass * cfg.length * cfg.length)) * cfg.dt
    new_thdot = min(max(new_thdot, -cfg.max_speed), cfg.max_speed)
    new_th = theta + new_thdot * cfg.dt
    return new_th, new_thdot, -cost


class TestPendulum:
    def test_upright_rest_is_fixed_point_with_zero_reward(self):
        env = Pendulum(rng=0)
        env.set_state(0.0, 0.0)
        res = env.step(0.0)
        assert res.reward == 0.0
        np.testing.assert_allclose(res.next_state, [1.0, 0.0, 0.0], atol=0)

    def test_hanging_rest_reward_is_minus_pi_squared(self):
        env = Pendulum(rng=0)
        env.set_state(math.pi, 0.0)
        res = env.step(0.0)
        assert res.reward == pytest.approx(-math.pi**2, abs=1e-12)

    def test_matches_duplicate_integrator(self):
        cfg = PendulumConfig()
        env = Pendulum(cfg, rng=5)
        rng = np.random.default_rng(17)
        env.reset()
        theta, thetadot = env._theta, env._thetadot
        for _ in range(300):
            u = rng.uniform(-3, 3)  # sometimes beyond bounds on purpose
            res = env.step(u)
            theta, thetadot, reward = reference_pendulum_step(theta, thetadot, u, cfg)
            assert res.reward == pytest.approx(reward, abs=1e-12)
            np.testing.assert_allclose(
                res.next_state, [math.cos(theta), math.sin(theta), thetadot], atol=1e-12)

    def test_rewards_nonpositive_and_obs_on_unit_circle(self):
        env = Pendulum(rng=11)
        rng = np.random.default_rng(2)
        env.reset()
        for _ in range(500):
            res = env.step(rng.uniform(-2, 2))
            assert res.reward <= 0.0
            assert not res.done
            c, s, _ = res.next_state
            assert abs(c * c + s * s - 1.0) < 1e-9

    def test_speed_stays_clipped(self):
        env = Pendulum(rng=4)
        env.reset()
        for _ in range(1000):
            res = env.step(2.0)
            assert abs(res.next_state[2]) <= 8.0 + 1e-12

    def test_reset_seeding_is_reproducible(self):
        env = Pendulum(rng=0)
        a = env.reset(seed=123)
        b = env.reset(seed=123)
        np.testing.assert_array_equal(a, b)


class TestMakeEnv:
    def test_builds_by_name(self):
        assert isinstance(make_env("synthetic-mdp", rng=0), SyntheticMdp)
        assert isinstance(make_env("pendulum", rng=0), Pendulum)

    def test_unknown_name_raises(self):
        with pytest.raises(ConfigError):
            make_env("mujoco")

    def test_step_result_shape_matches_spec(self):
        for name in ("synthetic-mdp", "pendulum"):
            env = make_env(name, rng=0)
            env.reset()
            res = env.step(0.1)
            assert isinstance(res, StepResult)
            assert res.next_state.shape == (env.spec.state_dim,)
