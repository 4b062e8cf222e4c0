"""Dual short-term/long-term memory for tabular reinforcement learning.

Includes a SARSA replay-table baseline, symmetry canonicalization of
intersection states, a grid traffic simulator and exact memory-growth
ratio analysis.
"""

from .agents import DualMemoryAgent, NumericDomainError, SarsaAgent, sarsa_update
from .analysis import (
    BoundReport,
    ScenarioSpec,
    check_constraints,
    m_bound,
    sweep,
    trace_synthetic,
    zeta_best,
    zeta_worst,
)
from .equivalence import CanonicalState, RawState, SymmetryGroup, canonicalize, orbit, remap_action
from .memory import (
    HyperParams,
    LongTermMemory,
    ShortTermMemory,
    SizeSample,
    msize_dual,
    stage,
    staging_indicator,
    stm_observe,
)

__version__ = "0.1.0"
