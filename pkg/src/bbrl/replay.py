"""Fixed-capacity FIFO transition store with uniform with-replacement sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool


@dataclass
class Batch:
    """Column-major minibatch view (copies, never aliases buffer storage)."""

    states: np.ndarray       # (n, state_dim)
    actions: np.ndarray      # (n, action_dim)
    rewards: np.ndarray      # (n,)
    next_states: np.ndarray  # (n, state_dim)
    dones: np.ndarray        # (n,) float 0/1

    def __len__(self) -> int:
        return len(self.rewards)


class ReplayBuffer:
    """Ring buffer over preallocated float64 arrays.

    Storage dimensions are fixed by the first pushed transition; later pushes
    must match.  Oldest entries are overwritten once capacity is reached.
    """

    def __init__(self, capacity: int = 1_000_000):
        if capacity < 1:
            raise ConfigError("capacity must be >= 1")
        self.capacity = int(capacity)
        self._pos = 0
        self._size = 0
        self._states = None
        self._actions = None
        self._rewards = None
        self._next_states = None
        self._dones = None

    def __len__(self) -> int:
        return self._size

    def _allocate(self, state_dim: int, action_dim: int) -> None:
        self._states = np.zeros((self.capacity, state_dim))
        self._actions = np.zeros((self.capacity, action_dim))
        self._rewards = np.zeros(self.capacity)
        self._next_states = np.zeros((self.capacity, state_dim))
        self._dones = np.zeros(self.capacity)

    def push(self, t: Transition) -> None:
        state = np.asarray(t.state, dtype=np.float64).reshape(-1)
        action = np.asarray(t.action, dtype=np.float64).reshape(-1)
        next_state = np.asarray(t.next_state, dtype=np.float64).reshape(-1)
        if not np.isfinite(t.reward):
            raise ConfigError("reward must be finite")
        if self._states is None:
            self._allocate(state.size, action.size)
        if state.size != self._states.shape[1] or action.size != self._actions.shape[1] \
                or next_state.size != self._next_states.shape[1]:
            raise ConfigError("transition dimensions do not match first stored transition")
        i = self._pos
        self._states[i] = state
        self._actions[i] = action
        self._rewards[i] = t.reward
        self._next_states[i] = next_state
        self._dones[i] = float(t.done)
        self._pos = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, n: int, rng: np.random.Generator) -> Batch:
        """n uniform draws with replacement; deterministic given the rng state."""
        if self._size == 0:
            raise ConfigError("cannot sample from an empty buffer")
        if n < 1:
            raise ConfigError("sample size must be >= 1")
        idx = rng.integers(0, self._size, size=n)
        # fancy indexing copies, so batches never alias buffer storage
        return Batch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            dones=self._dones[idx],
        )
