"""Tabular SARSA baseline and the dual-memory agent."""

from __future__ import annotations

import math
from typing import Hashable

import numpy as np

from .equivalence import RawState, SymmetryGroup, canonical_element, remap_action
from .memory import (
    HyperParams,
    LongTermMemory,
    ShortTermMemory,
    msize_dual,
    stage,
    staging_indicator,
)


class NumericDomainError(ValueError):
    """Raised when a TD update receives a non-finite input."""


def sarsa_update(q_row, a: int, r: float, q_next: float, hp: HyperParams) -> np.ndarray:
    q_row = np.array(q_row, dtype=float)
    if not (0 <= a < hp.action_count and len(q_row) == hp.action_count):
        raise IndexError(f"action {a} out of range for {hp.action_count} actions")
    if not (np.all(np.isfinite(q_row)) and math.isfinite(r) and math.isfinite(q_next)):
        raise NumericDomainError("sarsa_update received a non-finite value")
    q_row[a] += hp.alpha * (r + hp.gamma * q_next - q_row[a])
    return q_row


def _make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class SarsaAgent:
    """Epsilon-greedy SARSA over a raw-state table.

    The table grows by one zero row the first time a state is acted on, so
    its key count is the number of distinct states encountered.
    """

    kind = "sarsa"

    def __init__(self, hp: HyperParams, seed=0):
        self.hp = hp
        self.rng = _make_rng(seed)
        self.table: dict[Hashable, np.ndarray] = {}

    def _row(self, s) -> np.ndarray:
        row = self.table.get(s)
        if row is None:
            row = self.table[s] = np.zeros(self.hp.action_count)
        return row

    def reset(self, s) -> None:
        self._row(s)

    def act(self, s) -> int:
        row = self._row(s)
        eps = self.hp.epsilon
        if eps > 0 and self.rng.random() < eps:
            return int(self.rng.integers(self.hp.action_count))
        return int(np.argmax(row))

    def learn(self, s, a: int, r: float, s2, a2: int) -> None:
        nxt = self.table.get(s2)
        q_next = 0.0 if nxt is None else float(nxt[a2])
        self.table[s] = sarsa_update(self._row(s), a, r, q_next, self.hp)

    @property
    def m_q(self) -> int:
        return len(self.table)

    def size_counts(self) -> tuple[int, int, int]:
        return 0, 0, self.m_q


class DualMemoryAgent:
    """SARSA agent backed by a short-term / long-term memory pair.

    Observations are canonicalized under ``group`` and actions are stored in
    the canonical frame; :meth:`act` maps them back to the caller's frame.

    The step loop is ``reset(s0)``, then per step ``a = act(s)``,
    environment step, ``a2 = act(s2)``, ``learn(s, a, r, s2, a2)``. The STM
    observation of ``s2`` happens in :meth:`learn`, after any staging, so a
    staging at step ``t`` consolidates exactly the states seen in the
    previous ``t_stage`` steps.
    """

    kind = "dual"

    def __init__(self, hp: HyperParams, group: SymmetryGroup, seed=0):
        self.hp = hp
        self.group = group
        self.rng = _make_rng(seed)
        self.stm = ShortTermMemory(hp.action_count)
        self.ltm = LongTermMemory()
        self.step_counter = 0
        self.stagings = 0

    def reset(self, s: RawState) -> None:
        c, _ = canonical_element(s, self.group)
        self.stm.observe(c, self.step_counter)

    def act(self, s: RawState) -> int:
        c, e = canonical_element(s, self.group)
        back = self.group.inverse(e)
        eps = self.hp.epsilon
        if eps > 0 and self.rng.random() < eps:
            return remap_action(int(self.rng.integers(self.hp.action_count)), back)
        stored = self.ltm.get(c)
        if stored is not None:
            return remap_action(stored[0], back)
        entry = self.stm.entries.get(c)
        a = 0 if entry is None else int(np.argmax(entry.q_row))
        return remap_action(a, back)

    def _q_next(self, c2, a2: int) -> float:
        entry = self.stm.entries.get(c2)
        if entry is not None:
            return float(entry.q_row[a2])
        stored = self.ltm.get(c2)
        if stored is not None:
            return stored[1]
        return 0.0

    def learn(self, s: RawState, a: int, r: float, s2: RawState, a2: int) -> None:
        c, e = canonical_element(s, self.group)
        c2, e2 = canonical_element(s2, self.group)
        a_c = remap_action(a, e)
        a2_c = remap_action(a2, e2)
        q_next = self._q_next(c2, a2_c)
        entry = self.stm.entries.get(c)
        if entry is None:
            entry = self.stm.observe(c, self.step_counter)
        entry.q_row = sarsa_update(entry.q_row, a_c, r, q_next, self.hp)

        self.step_counter += 1
        if staging_indicator(self.step_counter, self.hp.t_stage):
            stage(self.stm, self.ltm, self.hp.kappa, c2, self.step_counter)
            self.stagings += 1
        else:
            self.stm.observe(c2, self.step_counter)

    @property
    def msize(self) -> int:
        return msize_dual(self.ltm, self.stm, self.hp.action_count)

    def size_counts(self) -> tuple[int, int, int]:
        return len(self.stm), len(self.ltm), 0
