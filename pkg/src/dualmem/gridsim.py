"""Discrete-time queueing model of an R x C grid of signalized intersections.

Each intersection keeps one queue per approach (N, E, S, W). Vehicles only
travel straight: a vehicle discharged from the N approach heads south and
joins the N approach of the intersection below, and so on. Vehicles leaving
the grid are counted as departures; new vehicles arrive only on approaches
that face the grid boundary.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .equivalence import APPROACHES, RawState
from .memory import SizeSample

# downstream (d_row, d_col) for vehicles queued on each approach
_FLOW = {0: (1, 0), 1: (0, -1), 2: (-1, 0), 3: (0, 1)}

DEFAULT_PHASES = ("N", "E", "S", "W")


def parse_phase(spec: str) -> frozenset[int]:
    """``"NS"`` -> ``{0, 2}``; ``""`` or ``"-"`` is an all-red phase."""
    spec = spec.strip().upper()
    if spec in ("", "-"):
        return frozenset()
    try:
        return frozenset(APPROACHES.index(ch) for ch in spec)
    except ValueError:
        raise ValueError(f"bad phase {spec!r}: use letters from {''.join(APPROACHES)}") from None


@dataclass(frozen=True)
class ActionSpace:
    names: tuple[str, ...]
    served: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.served) < 4:
            raise ValueError(f"need at least 4 phases, got {len(self.served)}")
        if len(set(self.served)) != len(self.served):
            raise ValueError("duplicate phase definitions")

    @classmethod
    def from_names(cls, names: Sequence[str] = DEFAULT_PHASES) -> ActionSpace:
        return cls(tuple(names), tuple(parse_phase(n) for n in names))

    @property
    def count(self) -> int:
        return len(self.served)


@dataclass
class GridNetwork:
    rows: int
    cols: int
    actions: ActionSpace = field(default_factory=ActionSpace.from_names)
    arrival_rate: float = 0.3
    discharge: int = 2
    bins: tuple[int, ...] = (2, 5)
    queues: np.ndarray = None
    phases: np.ndarray = None
    arrived: int = 0
    departed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.rows}x{self.cols}")
        if not 0 <= self.arrival_rate <= 1:
            raise ValueError(f"arrival_rate must lie in [0, 1], got {self.arrival_rate}")
        if self.discharge < 1:
            raise ValueError(f"discharge must be positive, got {self.discharge}")
        self.bins = tuple(self.bins)
        if any(b >= c for b, c in zip(self.bins, self.bins[1:])):
            raise ValueError(f"bins must be strictly increasing, got {self.bins}")
        n = self.rows * self.cols
        if self.queues is None:
            self.queues = np.zeros((n, 4), dtype=np.int64)
        if self.phases is None:
            self.phases = np.zeros(n, dtype=np.int64)
        self._boundary = np.array(
            [
                [r == 0, c == self.cols - 1, r == self.rows - 1, c == 0]
                for r in range(self.rows)
                for c in range(self.cols)
            ]
        )

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def boundary_mask(self) -> np.ndarray:
        return self._boundary

    def state(self, i: int) -> RawState:
        return encode_state(self.queues[i], self.phases[i], self.bins)

    def states(self) -> list[RawState]:
        return [self.state(i) for i in range(self.size)]

    def total_queued(self) -> int:
        return int(self.queues.sum())


def encode_state(queues, phase: int, bins: Sequence[int]) -> RawState:
    return RawState(tuple(bisect_left(bins, int(q)) for q in queues), int(phase))


def step(net: GridNetwork, actions: Sequence[int], rng: np.random.Generator):
    """Advance every intersection one tick; returns ``(net, rewards)``.

    Discharges are computed from the queues at the start of the tick, so the
    update does not depend on the order intersections are visited in.
    """
    if len(actions) != net.size:
        raise ValueError(f"expected {net.size} actions, got {len(actions)}")
    incoming = np.zeros_like(net.queues)
    for i, a in enumerate(actions):
        if not 0 <= a < net.actions.count:
            raise ValueError(f"action {a} out of range at intersection {i}")
        net.phases[i] = a
        r, c = divmod(i, net.cols)
        for k in net.actions.served[a]:
            d = min(net.discharge, int(net.queues[i, k]))
            if not d:
                continue
            net.queues[i, k] -= d
            dr, dc = _FLOW[k]
            rr, cc = r + dr, c + dc
            if 0 <= rr < net.rows and 0 <= cc < net.cols:
                incoming[rr * net.cols + cc, k] += d
            else:
                net.departed += d
    net.queues += incoming

    mask = net.boundary_mask
    draws = rng.random(int(mask.sum())) < net.arrival_rate
    new = np.zeros_like(net.queues)
    new[mask] = draws
    net.queues += new
    net.arrived += int(draws.sum())

    rewards = [-float(q) for q in net.queues.sum(axis=1)]
    return net, rewards


class MemoryMeter:
    """Records one :class:`SizeSample` per intersection per step.

    For agents without a replay table the meter tracks the distinct raw
    states seen along the trajectory, i.e. the size a replay table would have
    reached on the same run.
    """

    def __init__(self, n: int, action_count: int):
        self.action_count = action_count
        self.series: list[list[SizeSample]] = [[] for _ in range(n)]
        self._seen: list[set] = [set() for _ in range(n)]

    def record(self, t: int, agents, states: Sequence[RawState]) -> None:
        for i, (agent, s) in enumerate(zip(agents, states)):
            self._seen[i].add(s)
            m_s, m_L, m_q = agent.size_counts()
            if agent.kind != "sarsa":
                m_q = len(self._seen[i])
            self.series[i].append(
                SizeSample.from_counts(t, m_s, m_L, m_q, self.action_count, intersection_id=i)
            )

    def unique_states(self, i: int) -> int:
        return len(self._seen[i])

    def mean_series(self) -> list[SizeSample]:
        n = len(self.series)
        out = []
        for samples in zip(*self.series):
            avg = {
                f: Fraction(sum(getattr(s, f) for s in samples), n)
                for f in ("m_s", "m_L", "m_q", "msize_dual", "msize_q")
            }
            out.append(SizeSample(t=samples[0].t, intersection_id="mean", **avg))
        return out


def run_experiment(net: GridNetwork, agents, steps: int, rng, meter: MemoryMeter | None = None):
    """Observe -> act -> step -> learn for ``steps`` ticks.

    Returns the meter, holding ``steps + 1`` samples per intersection
    (the first at ``t = 0``).
    """
    if len(agents) != net.size:
        raise ValueError(f"expected {net.size} agents, got {len(agents)}")
    if meter is None:
        meter = MemoryMeter(net.size, net.actions.count)
    states = net.states()
    for agent, s in zip(agents, states):
        agent.reset(s)
    actions = [agent.act(s) for agent, s in zip(agents, states)]
    meter.record(0, agents, states)
    for t in range(1, steps + 1):
        _, rewards = step(net, actions, rng)
        nxt = net.states()
        nxt_actions = [agent.act(s2) for agent, s2 in zip(agents, nxt)]
        for agent, s, a, r, s2, a2 in zip(agents, states, actions, rewards, nxt, nxt_actions):
            agent.learn(s, a, r, s2, a2)
        meter.record(t, agents, nxt)
        states, actions = nxt, nxt_actions
    return meter
