"""Short-term / long-term memory tables and their size accounting.

The short-term memory (STM) holds a full action-value row per canonical state
between staging events. Every ``t_stage`` steps a ``kappa`` fraction of the STM
is consolidated into the long-term memory (LTM) as ``(state, action, q)``
triples, and the STM is cleared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

import numpy as np

State = Hashable


@dataclass(frozen=True)
class HyperParams:
    action_count: int
    kappa: Fraction = Fraction(1)
    t_stage: int = 10
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        if self.action_count < 1:
            raise ValueError(f"action_count must be >= 1, got {self.action_count}")
        if self.t_stage < 1:
            raise ValueError(f"t_stage must be >= 1, got {self.t_stage}")
        if not 0 < self.kappa <= 1:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass
class StmEntry:
    q_row: np.ndarray
    visits: int = 1
    last_seen: int = 0


class ShortTermMemory:
    """Insertion-ordered map of canonical state -> :class:`StmEntry`."""

    def __init__(self, action_count: int):
        self.action_count = action_count
        self.entries: dict[State, StmEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, state: State) -> bool:
        return state in self.entries

    def __getitem__(self, state: State) -> StmEntry:
        return self.entries[state]

    def observe(self, state: State, t: int) -> StmEntry:
        entry = self.entries.get(state)
        if entry is None:
            entry = StmEntry(np.zeros(self.action_count), visits=1, last_seen=t)
            self.entries[state] = entry
        else:
            entry.visits += 1
            entry.last_seen = t
        return entry

    def clear(self) -> None:
        self.entries.clear()


@dataclass
class LongTermMemory:
    """Consolidated ``state -> (action, q)`` store. Never shrinks."""

    entries: dict[State, tuple[int, float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, state: State) -> bool:
        return state in self.entries

    def get(self, state: State) -> tuple[int, float] | None:
        return self.entries.get(state)

    def upsert(self, state: State, action: int, q: float) -> bool:
        """Store ``(action, q)``; an existing entry is replaced only by a larger q.

        Returns True when ``state`` was not present before.
        """
        old = self.entries.get(state)
        if old is None:
            self.entries[state] = (action, q)
            return True
        if q > old[1]:
            self.entries[state] = (action, q)
        return False


def staging_indicator(t: int, t_stage: int) -> int:
    return int(t != 0 and t % t_stage == 0)


def stm_observe(stm: ShortTermMemory, state: State, t: int) -> ShortTermMemory:
    stm.observe(state, t)
    return stm


def _stage_key(item):
    state, entry = item
    return (-entry.visits, -entry.last_seen, state)


def stage(
    stm: ShortTermMemory,
    ltm: LongTermMemory,
    kappa: Fraction,
    current: State,
    t: int = 0,
) -> tuple[ShortTermMemory, LongTermMemory, int]:
    """Consolidate ``floor(kappa * m_s)`` STM states into the LTM.

    States are ranked by visit count, then recency, then state order. Each
    selected row contributes its greedy ``(argmax, max)`` pair. The STM is
    cleared afterwards and ``current`` inserted fresh, so ``len(stm) == 1``
    on return.
    """
    count = math.floor(Fraction(kappa) * len(stm))
    if count:
        ranked = sorted(stm.entries.items(), key=_stage_key)
        for state, entry in ranked[:count]:
            a = int(np.argmax(entry.q_row))
            ltm.upsert(state, a, float(entry.q_row[a]))
    stm.clear()
    stm.observe(current, t)
    return stm, ltm, count


def msize_dual(ltm: LongTermMemory, stm: ShortTermMemory, action_count: int) -> int:
    return 3 * len(ltm) + action_count * len(stm)


@dataclass(frozen=True)
class SizeSample:
    """Memory footprint at one time step.

    ``zeta`` is ``msize_q / msize_dual`` as an exact fraction, or None when
    the dual memory is empty.
    """

    t: int
    m_s: int | Fraction
    m_L: int | Fraction
    m_q: int | Fraction
    msize_dual: int | Fraction
    msize_q: int | Fraction
    intersection_id: int | str = 0

    @property
    def zeta(self) -> Fraction | None:
        if self.msize_dual == 0:
            return None
        return Fraction(self.msize_q) / Fraction(self.msize_dual)

    @classmethod
    def from_counts(cls, t, m_s, m_L, m_q, action_count, intersection_id=0):
        return cls(
            t=t,
            m_s=m_s,
            m_L=m_L,
            m_q=m_q,
            msize_dual=3 * m_L + action_count * m_s,
            msize_q=action_count * m_q,
            intersection_id=intersection_id,
        )
