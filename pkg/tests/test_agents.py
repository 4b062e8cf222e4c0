import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualmem.agents import DualMemoryAgent, NumericDomainError, SarsaAgent, sarsa_update
from dualmem.equivalence import RawState, SymmetryGroup, canonical_element, orbit, remap_action
from dualmem.gridsim import ActionSpace
from dualmem.memory import HyperParams

from oracles import count_recurrence

SPLIT = ActionSpace.from_names(["N", "E", "S", "W"])


def hp(**kw):
    base = dict(action_count=4, kappa=Fraction(1), t_stage=10, alpha=0.1, gamma=0.9, epsilon=0.0)
    base.update(kw)
    return HyperParams(**base)


class TestSarsaUpdate:
    def test_full_step_myopic(self):
        out = sarsa_update([0, 0, 0, 0], 2, 1.0, 0.0, hp(alpha=1.0, gamma=0.0))
        assert out.tolist() == [0, 0, 1, 0]

    def test_zero_alpha_is_noop(self):
        h = hp(alpha=0.0, gamma=0.5)
        row = [1.0, -2.0, 3.0, 0.5]
        assert sarsa_update(row, 1, 10.0, 4.0, h).tolist() == row

    def test_half_step(self):
        out = sarsa_update([0, 0, 0, 0], 0, 1.0, 0.0, hp(alpha=0.5, gamma=0.9))
        assert out[0] == 0.5

    def test_input_not_mutated(self):
        row = np.zeros(4)
        sarsa_update(row, 0, 1.0, 0.0, hp(alpha=1.0))
        assert row.tolist() == [0, 0, 0, 0]

    @pytest.mark.parametrize(
        "row, r, q_next",
        [([0, 0, 0, 0], math.nan, 0.0), ([0, 0, 0, 0], 1.0, math.inf), ([0, math.inf, 0, 0], 1.0, 0.0)],
    )
    def test_rejects_non_finite(self, row, r, q_next):
        with pytest.raises(NumericDomainError):
            sarsa_update(row, 0, r, q_next, hp())


class TestSarsaAgent:
    def test_greedy_argmax(self):
        agent = SarsaAgent(hp(action_count=3))
        agent.table["s"] = np.array([0.0, 3.0, 1.0])
        assert agent.act("s") == 1

    def test_fresh_state_ties_to_zero(self):
        agent = SarsaAgent(hp())
        assert agent.act("new") == 0
        assert agent.m_q == 1

    def test_uniform_exploration_reproducible(self):
        draws = []
        for _ in range(2):
            agent = SarsaAgent(hp(epsilon=1.0), seed=42)
            draws.append([agent.act(i % 3) for i in range(200)])
        assert draws[0] == draws[1]
        assert set(draws[0]) == {0, 1, 2, 3}

    @given(st.lists(st.integers(0, 50), min_size=1, max_size=300), st.integers(0, 2**16))
    @settings(max_examples=50)
    def test_table_size_counts_distinct_states(self, stream, seed):
        agent = SarsaAgent(hp(epsilon=0.3), seed=seed)
        seen = set()
        s = stream[0]
        agent.reset(s)
        seen.add(s)
        a = agent.act(s)
        for s2 in stream[1:]:
            a2 = agent.act(s2)
            seen.add(s2)
            agent.learn(s, a, -1.0, s2, a2)
            s, a = s2, a2
        assert set(agent.table) == seen
        assert agent.m_q == len(seen)

    def test_two_state_chain_converges(self):
        h = hp(action_count=1, alpha=0.1, gamma=0.9)
        agent = SarsaAgent(h)
        rewards = {0: 1.0, 1: -0.5}
        s = 0
        for _ in range(10_000):
            s2 = 1 - s
            agent.learn(s, 0, rewards[s], s2, 0)
            s = s2
        g = 0.9
        q0 = (rewards[0] + g * rewards[1]) / (1 - g * g)
        q1 = rewards[1] + g * q0
        assert abs(agent.table[0][0] - q0) <= 1e-3
        assert abs(agent.table[1][0] - q1) <= 1e-3


def _dihedral():
    return SymmetryGroup.dihedral(SPLIT.served)


class TestDualAct:
    def test_ltm_hit_identity(self):
        agent = DualMemoryAgent(hp(), SymmetryGroup.identity_group(4))
        s = RawState((1, 0, 2, 0), 1)
        agent.ltm.upsert(s, 3, 5.0)
        assert agent.act(s) == 3

    def test_unknown_state_ties_to_zero(self):
        agent = DualMemoryAgent(hp(), SymmetryGroup.identity_group(4))
        assert agent.act(RawState((0, 1, 0, 0), 0)) == 0

    def test_ltm_hit_is_remapped_through_orbit(self):
        g = _dihedral()
        agent = DualMemoryAgent(hp(), g)
        s = RawState((2, 1, 0, 0), 0)  # trivial stabilizer
        assert len(orbit(s, g)) == 8
        c, _ = canonical_element(s, g)
        agent.ltm.upsert(c, 1, 1.0)
        base = agent.act(s)
        for e in g:
            assert agent.act(e.apply(s)) == remap_action(base, e)

    def test_act_does_not_touch_stm(self):
        agent = DualMemoryAgent(hp(), _dihedral())
        agent.act(RawState((0, 0, 1, 0), 2))
        assert len(agent.stm) == 0


def _unique_state(t):
    return RawState((t, 0, 0, 0), 0)


class TestDualStepEnd:
    def _drive(self, agent, stream):
        s = stream[0]
        agent.reset(s)
        a = agent.act(s)
        counts = [(len(agent.stm), len(agent.ltm))]
        for s2 in stream[1:]:
            a2 = agent.act(s2)
            agent.learn(s, a, -1.0, s2, a2)
            counts.append((len(agent.stm), len(agent.ltm)))
            s, a = s2, a2
        return counts

    def test_stage_once_at_t_stage(self):
        agent = DualMemoryAgent(hp(t_stage=10), SymmetryGroup.identity_group(4))
        self._drive(agent, [_unique_state(t) for t in range(10)])
        assert agent.stagings == 0
        self._drive(agent, [_unique_state(9), _unique_state(10)])
        assert agent.stagings == 1
        assert agent.step_counter == 10

    def test_three_stagings_in_35_steps(self):
        agent = DualMemoryAgent(hp(t_stage=10), SymmetryGroup.identity_group(4))
        self._drive(agent, [_unique_state(t) for t in range(36)])
        assert agent.step_counter == 35
        assert agent.stagings == 3

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_ltm_after_n_stagings(self, n):
        agent = DualMemoryAgent(hp(t_stage=10), SymmetryGroup.identity_group(4))
        self._drive(agent, [_unique_state(t) for t in range(n * 10 + 1)])
        assert len(agent.ltm) == n * 10

    @pytest.mark.parametrize("t_stage, kappa", [(4, Fraction(1, 4)), (10, Fraction(1, 2)), (8, Fraction(1))])
    def test_worst_stream_follows_recurrence(self, t_stage, kappa):
        agent = DualMemoryAgent(hp(t_stage=t_stage, kappa=kappa, epsilon=0.2), SymmetryGroup.identity_group(4))
        horizon = 12 * t_stage
        counts = self._drive(agent, [_unique_state(t) for t in range(horizon + 1)])
        expected = count_recurrence(horizon, 4, t_stage, kappa)
        assert counts == [(m_s, m_L) for _, m_s, m_L, _ in expected]

    def test_td_update_uses_canonical_frame(self):
        g = _dihedral()
        agent = DualMemoryAgent(hp(alpha=1.0, gamma=0.0), g)
        s = RawState((2, 1, 0, 0), 0)
        c, e = canonical_element(s, g)
        agent.reset(s)
        agent.learn(s, 1, 5.0, s, 0)
        assert agent.stm[c].q_row[remap_action(1, e)] == 5.0


def _trivial_stabilizer_states(g, n_bins, rng, count):
    out = []
    while len(out) < count:
        s = RawState(tuple(rng.randrange(n_bins) for _ in range(4)), rng.randrange(4))
        if len(orbit(s, g)) == len(g):
            out.append(s)
    return out


@pytest.mark.parametrize("seed", range(5))
def test_policy_equivariance(seed):
    g = _dihedral()
    rng = random.Random(seed)
    stream = _trivial_stabilizer_states(g, 4, rng, 300)
    rewards = [rng.uniform(-5, 0) for _ in stream]
    h = hp(t_stage=7, kappa=Fraction(1, 2), epsilon=0.3)
    for e in g:
        runs = []
        for states in (stream, [e.apply(s) for s in stream]):
            agent = DualMemoryAgent(h, g, seed=seed)
            agent.reset(states[0])
            a = agent.act(states[0])
            actions = [a]
            for s, s2, r in zip(states, states[1:], rewards):
                a2 = agent.act(s2)
                agent.learn(s, a, r, s2, a2)
                actions.append(a2)
                a = a2
            runs.append(actions)
        assert runs[1] == [remap_action(a, e) for a in runs[0]]
