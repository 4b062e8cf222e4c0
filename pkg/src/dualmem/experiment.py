"""Build a grid, agents and generators from a :class:`RunConfig` and run it."""

from __future__ import annotations

import numpy as np

from .agents import DualMemoryAgent, SarsaAgent
from .config import RunConfig
from .equivalence import SymmetryGroup
from .gridsim import ActionSpace, GridNetwork, MemoryMeter, run_experiment
from .memory import HyperParams


def hyperparams(cfg: RunConfig, action_count: int) -> HyperParams:
    return HyperParams(
        action_count=action_count,
        kappa=cfg.kappa,
        t_stage=cfg.memory.t_stage,
        alpha=cfg.agent.alpha,
        gamma=cfg.agent.gamma,
        epsilon=cfg.agent.epsilon,
    )


def build_network(cfg: RunConfig) -> GridNetwork:
    g = cfg.grid
    return GridNetwork(
        rows=g.rows,
        cols=g.cols,
        actions=ActionSpace.from_names(g.phases),
        arrival_rate=g.arrival_rate,
        discharge=g.discharge,
        bins=g.bins,
    )


def simulate(cfg: RunConfig, kind: str | None = None, steps: int | None = None, seed: int | None = None):
    """Run one seeded simulation; returns ``(meter, network)``.

    The environment and each agent draw from independent child streams of
    ``SeedSequence(seed)``, so results depend only on the config and seed.
    """
    kind = kind or cfg.agent.kind
    steps = cfg.grid.steps if steps is None else steps
    seed = cfg.grid.seed if seed is None else seed
    net = build_network(cfg)
    hp = hyperparams(cfg, net.actions.count)
    children = np.random.SeedSequence(seed).spawn(net.size + 1)
    env_rng = np.random.default_rng(children[0])
    if kind == "dual":
        group = SymmetryGroup.by_name(cfg.agent.symmetry, net.actions.served)
        agents = [DualMemoryAgent(hp, group, np.random.default_rng(c)) for c in children[1:]]
    elif kind == "sarsa":
        agents = [SarsaAgent(hp, np.random.default_rng(c)) for c in children[1:]]
    else:
        raise ValueError(f"unknown agent kind {kind!r}")
    meter = MemoryMeter(net.size, net.actions.count)
    run_experiment(net, agents, steps, env_rng, meter)
    return meter, net
