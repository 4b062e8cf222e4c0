"""Closed-form memory-growth ratios and a step-by-step trace to check them.

``zeta`` is the ratio of the replay-table size to the dual-memory size.
``zeta1`` is its value on a staging step, ``zeta2`` on the step before one.
Everything here is exact :class:`~fractions.Fraction` arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Iterable, Sequence

from .memory import LongTermMemory, ShortTermMemory, SizeSample, stage, staging_indicator


def zeta_worst(n: int, action_count: int, t_stage: int, kappa) -> tuple[Fraction, Fraction]:
    """Ratios for a stream of all-distinct states, around the n-th staging."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    A, T, k = action_count, t_stage, Fraction(kappa)
    zeta1 = Fraction((n * T + 1) * A) / (A + 3 * n * k * T)
    zeta2 = Fraction(n * T * A) / (T * A + 3 * (n - 1) * k * T)
    return zeta1, zeta2


def zeta_best(m_unique: int, action_count: int, t_stage: int) -> tuple[Fraction, Fraction]:
    """Ratios once all ``m_unique`` states sit in long-term memory."""
    if m_unique < 1:
        raise ValueError(f"m_unique must be >= 1, got {m_unique}")
    M, A, T = m_unique, action_count, t_stage
    return Fraction(M * A, A + 3 * M), Fraction(M * A, T * A + 3 * M)


def m_bound(action_count: int, t_stage: int) -> Fraction | None:
    """Smallest unique-state count for which the dual memory is never larger.

    None when ``action_count <= 3`` (no finite bound exists).
    """
    if action_count <= 3:
        return None
    return Fraction(t_stage * action_count, action_count - 3)


@dataclass(frozen=True)
class Constraint:
    name: str
    satisfied: bool
    margin: Fraction | None


@dataclass(frozen=True)
class BoundReport:
    constraints: tuple[Constraint, ...]
    zeta1: Fraction | None = None
    zeta2: Fraction | None = None

    @property
    def ok(self) -> bool:
        return all(c.satisfied for c in self.constraints)

    def __getitem__(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)


def check_constraints(action_count: int, kappa, t_stage: int, m_unique: int | None = None) -> BoundReport:
    """Evaluate the hyperparameter/environment conditions for a compact dual memory.

    Margins are signed: non-negative (strictly positive for the strict
    inequalities) when the condition holds.
    """
    A, k, T = action_count, Fraction(kappa), t_stage
    checks = [
        Constraint("action_space", A > 3, Fraction(A - 3)),
        Constraint("kappa", k <= Fraction(A, 3), Fraction(A, 3) - k),
        Constraint("t_stage", T > 2, Fraction(T - 2)),
    ]
    zeta1 = zeta2 = None
    if m_unique is not None:
        bound = m_bound(A, T)
        if bound is None:
            checks.append(Constraint("unique_states", False, None))
        else:
            checks.append(Constraint("unique_states", m_unique >= bound, m_unique - bound))
        zeta1, zeta2 = zeta_best(m_unique, A, T)
    return BoundReport(tuple(checks), zeta1, zeta2)


@dataclass(frozen=True)
class ScenarioSpec:
    """Synthetic state stream fed straight into the memory tables.

    ``worst``: every step brings a new state. ``best``: ``m_unique`` fresh
    states on steps ``0 .. m_unique-1``, then the same states cyclically.
    ``replay``: the given ``states``, one per step.
    """

    kind: str
    action_count: int
    t_stage: int
    kappa: Fraction = Fraction(1)
    horizon: int | None = None
    m_unique: int | None = None
    tau: int | None = None
    states: Sequence[Hashable] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        if self.kind not in ("worst", "best", "replay"):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.action_count < 1 or self.t_stage < 1 or self.kappa <= 0:
            raise ValueError("action_count, t_stage and kappa must be positive")
        if self.kind == "best":
            if not self.m_unique or self.m_unique < 1:
                raise ValueError("best scenario needs m_unique >= 1")
            if self.tau is None:
                object.__setattr__(self, "tau", self.m_unique - 1)
            elif self.tau < self.m_unique - 1:
                raise ValueError(f"tau={self.tau} precedes the last fresh state at {self.m_unique - 1}")
        if self.kind == "replay":
            if self.states is None:
                raise ValueError("replay scenario needs a state stream")
            if self.horizon is None:
                object.__setattr__(self, "horizon", len(self.states) - 1)
            elif self.horizon >= len(self.states):
                raise ValueError(f"horizon {self.horizon} exceeds the {len(self.states)}-state stream")
        if self.horizon is None:
            raise ValueError("horizon is required")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if self.kind == "best" and self.horizon < self.tau:
            raise ValueError(f"horizon {self.horizon} ends before tau={self.tau}")

    def state_at(self, t: int) -> Hashable:
        if self.kind == "worst":
            return t
        if self.kind == "best":
            return t % self.m_unique
        return self.states[t]


def trace_synthetic(spec: ScenarioSpec) -> list[SizeSample]:
    """Step the memory tables over ``spec``'s stream; one sample per step ``0..horizon``.

    The replay-table column counts distinct states seen so far.
    """
    stm = ShortTermMemory(spec.action_count)
    ltm = LongTermMemory()
    seen = set()
    out = []
    for t in range(spec.horizon + 1):
        s = spec.state_at(t)
        seen.add(s)
        if staging_indicator(t, spec.t_stage):
            stage(stm, ltm, spec.kappa, s, t)
        else:
            stm.observe(s, t)
        out.append(SizeSample.from_counts(t, len(stm), len(ltm), len(seen), spec.action_count))
    return out


def full_staging_step(m_unique: int, t_stage: int) -> int:
    """First staging step at which a best-case stream has all states in LTM (kappa = 1).

    The last fresh state arrives at ``m_unique - 1`` and is consolidated at
    the next multiple of ``t_stage``.
    """
    return t_stage * math.ceil(m_unique / t_stage)


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    action_count: int
    kappa: Fraction
    t_stage: int
    n_or_m: int
    zeta1: Fraction
    zeta2: Fraction
    report: BoundReport

    @property
    def shaded(self) -> bool:
        return self.zeta2 < 1

    def csv_fields(self) -> list:
        return [
            self.scenario,
            self.action_count,
            self.kappa.numerator,
            self.kappa.denominator,
            self.t_stage,
            self.n_or_m,
            self.zeta1.numerator,
            self.zeta1.denominator,
            self.zeta2.numerator,
            self.zeta2.denominator,
            int(self.shaded),
        ]


SWEEP_COLUMNS = [
    "scenario",
    "action_count",
    "kappa_num",
    "kappa_den",
    "t_stage",
    "n_or_M",
    "zeta1_num",
    "zeta1_den",
    "zeta2_num",
    "zeta2_den",
    "shaded",
]


def sweep(
    action_counts: Iterable[int],
    kappas: Iterable,
    t_stages: Iterable[int],
    points: Iterable[int],
    kinds: Iterable[str] = ("worst",),
) -> list[SweepRow]:
    """Evaluate the closed forms over a parameter grid, in grid order.

    ``points`` are staging indices ``n`` for the worst case and unique-state
    counts ``M`` for the best case. Best-case rows ignore ``kappa`` beyond
    reporting it.
    """
    action_counts, kappas = list(action_counts), [Fraction(k) for k in kappas]
    t_stages, points, kinds = list(t_stages), list(points), list(kinds)
    if not (action_counts and kappas and t_stages and points and kinds):
        raise ValueError("sweep grid must be non-empty")
    rows = []
    for kind, A, k, T, x in product(kinds, action_counts, kappas, t_stages, points):
        if kind == "worst":
            z1, z2 = zeta_worst(x, A, T, k)
            report = check_constraints(A, k, T)
        elif kind == "best":
            z1, z2 = zeta_best(x, A, T)
            report = check_constraints(A, k, T, m_unique=x)
        else:
            raise ValueError(f"unknown scenario kind {kind!r}")
        rows.append(SweepRow(kind, A, k, T, x, z1, z2, report))
    return rows


def sweep_curves(rows: Sequence[SweepRow]) -> dict[tuple, list[SweepRow]]:
    """Group sweep rows into curves keyed by ``(scenario, |A|, kappa, T)``."""
    curves: dict[tuple, list[SweepRow]] = {}
    for row in rows:
        curves.setdefault((row.scenario, row.action_count, row.kappa, row.t_stage), []).append(row)
    return curves
