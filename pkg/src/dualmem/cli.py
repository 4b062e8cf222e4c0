"""``dualmem`` command line: analyze, trace, simulate, report.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data/schema error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import config as config_mod
from .analysis import (
    SWEEP_COLUMNS,
    ScenarioSpec,
    check_constraints,
    m_bound,
    sweep,
    sweep_curves,
    trace_synthetic,
)
from .series import DataError, SchemaError, format_series, read_series
from .svg import PALETTE, Chart, Line, render

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_list(text: str, kind=int) -> list:
    """``"4,8,16"`` or ranges ``"1:50"`` / ``"4:16:4"`` (inclusive)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part and kind is int:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                raise ValueError(f"bad range {part!r}")
            out.extend(range(bits[0], bits[1] + 1, bits[2] if len(bits) == 3 else 1))
        else:
            out.append(kind(part))
    if not out:
        raise ValueError(f"empty list {text!r}")
    return out


def _int_list(text):
    try:
        return parse_list(text, int)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _frac_list(text):
    try:
        return parse_list(text, Fraction)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _constraint_lines(report) -> list[str]:
    lines = []
    for c in report.constraints:
        margin = "undefined" if c.margin is None else str(c.margin)
        lines.append(f"  {c.name:<14} {'ok' if c.satisfied else 'VIOLATED':<9} margin={margin}")
    return lines


# -- analyze -----------------------------------------------------------------


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def sweep_chart(rows) -> Chart:
    scenario = rows[0].scenario
    xlabel = "staging index n" if scenario == "worst" else "unique states M"
    chart = Chart(f"Memory size ratio ({scenario} case)", xlabel, "zeta", hline=1.0)
    for i, ((_, A, k, T), curve) in enumerate(sweep_curves(rows).items()):
        color = PALETTE[i % len(PALETTE)]
        xs = [r.n_or_m for r in curve]
        tag = f"|A|={A} k={k} T={T}"
        chart.lines.append(Line(f"z1 {tag}", xs, [float(r.zeta1) for r in curve], color))
        chart.lines.append(Line(f"z2 {tag}", xs, [float(r.zeta2) for r in curve], color, dashed=True))
        chart.bands.extend(_shaded_spans(curve))
    return chart


def _shaded_spans(curve):
    spans, start, prev = [], None, None
    for r in curve:
        if r.shaded and start is None:
            start = r.n_or_m
        if not r.shaded and start is not None:
            spans.append((start, prev))
            start = None
        prev = r.n_or_m
    if start is not None:
        spans.append((start, prev))
    return spans


def cmd_analyze(args) -> int:
    if args.scenario == "worst":
        if args.n_max is None:
            raise UsageError("worst scenario needs --n-max")
        points = list(range(1, args.n_max + 1))
    else:
        if args.m is None:
            raise UsageError("best scenario needs --m")
        points = args.m
    if min(points) < 1:
        raise UsageError("--n-max / --m values must be >= 1")
    rows = sweep(args.action_size, args.kappa, args.t_stage, points, kinds=[args.scenario])
    for (_, A, k, T), curve in sweep_curves(rows).items():
        base = check_constraints(A, k, T)
        low = [r.n_or_m for r in curve if r.scenario == "best" and not r.report["unique_states"].satisfied]
        if base.ok and not low:
            continue
        print(f"constraints |A|={A} kappa={k} T={T}:", file=sys.stderr)
        print("\n".join(_constraint_lines(base)), file=sys.stderr)
        if low:
            bound = m_bound(A, T)
            shown = "undefined" if bound is None else str(bound)
            print(f"  unique_states  VIOLATED for M={low} (bound {shown})", file=sys.stderr)
    _emit(sweep_csv(rows), args.out)
    if args.svg:
        Path(args.svg).write_text(render(sweep_chart(rows)), encoding="utf-8")
    return EXIT_OK


# -- trace -------------------------------------------------------------------

_PARAM_KEYS = {"action_size", "kappa", "t_stage", "m", "tau"}


def _parse_params(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _PARAM_KEYS:
            raise UsageError(f"bad --params entry {item!r}; keys: {', '.join(sorted(_PARAM_KEYS))}")
        try:
            out[key] = Fraction(value.strip()) if key == "kappa" else int(value)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad value in --params entry {item!r}") from None
    return out


def cmd_trace(args) -> int:
    params = _parse_params(args.params)
    for key in _PARAM_KEYS:
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if args.horizon is not None and args.horizon < 0:
        raise UsageError("--horizon must be >= 0")
    states = None
    if args.scenario == "replay":
        if not args.states:
            raise UsageError("replay scenario needs --states FILE")
        text = Path(args.states).read_text(encoding="utf-8")
        states = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not states:
            raise DataError(f"{args.states}: no states")
    elif args.horizon is None:
        raise UsageError(f"{args.scenario} scenario needs --horizon")
    if "action_size" not in params or "t_stage" not in params:
        raise UsageError("trace needs action_size and t_stage (flags or --params)")
    try:
        spec = ScenarioSpec(
            kind=args.scenario,
            action_count=params["action_size"],
            t_stage=params["t_stage"],
            kappa=params.get("kappa", Fraction(1)),
            horizon=args.horizon,
            m_unique=params.get("m"),
            tau=params.get("tau"),
            states=states,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(format_series(trace_synthetic(spec)), args.out)
    return EXIT_OK


# -- simulate ----------------------------------------------------------------


def _run_one(cfg, kind, steps, seed, out_dir: Path, svg: bool) -> list[str]:
    from .experiment import simulate

    meter, _ = simulate(cfg, kind=kind, steps=steps, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, series in enumerate(meter.series):
        (out_dir / f"intersection_{i}.csv").write_text(format_series(series), encoding="utf-8")
    mean = meter.mean_series()
    (out_dir / "mean.csv").write_text(format_series(mean), encoding="utf-8")
    if svg:
        (out_dir / "msize.svg").write_text(render(_msize_chart([(f"mean ({kind})", mean)])), encoding="utf-8")
    lines = []
    if cfg.analysis.check_m_bound:
        hp_bound = m_bound(len(cfg.grid.phases), cfg.memory.t_stage)
        counts = [meter.unique_states(i) for i in range(len(meter.series))]
        bound = "undefined" if hp_bound is None else str(hp_bound)
        lines.append(f"seed {seed}: unique raw states per intersection {counts} (M bound {bound})")
    return lines


def cmd_simulate(args) -> int:
    cfg = config_mod.load(args.config) if args.config else config_mod.RunConfig()
    if args.agent:
        cfg = replace(cfg, agent=replace(cfg.agent, kind=args.agent))
    seed = cfg.grid.seed if args.seed is None else args.seed
    env_seed = os.environ.get("DUALMEM_SEED")
    if env_seed:
        try:
            seed = int(env_seed)
        except ValueError:
            raise UsageError(f"DUALMEM_SEED must be an integer, got {env_seed!r}") from None
    steps = cfg.grid.steps if args.steps is None else args.steps
    if steps < 0:
        raise UsageError("--steps must be >= 0")
    svg = args.svg or cfg.analysis.svg

    from .gridsim import ActionSpace

    try:
        action_count = ActionSpace.from_names(cfg.grid.phases).count
    except ValueError as exc:
        raise config_mod.ConfigError(str(exc)) from None
    report = check_constraints(action_count, cfg.kappa, cfg.memory.t_stage)
    print(f"constraints |A|={action_count} kappa={cfg.kappa} T={cfg.memory.t_stage}:")
    print("\n".join(_constraint_lines(report)))

    out = Path(args.out_dir)
    if args.seeds <= 1:
        lines = _run_one(cfg, cfg.agent.kind, steps, seed, out, svg)
    else:
        seeds = [seed + k for k in range(args.seeds)]
        with ProcessPoolExecutor(max_workers=min(len(seeds), os.cpu_count() or 1)) as pool:
            futures = [
                pool.submit(_run_one, cfg, cfg.agent.kind, steps, s, out / f"seed_{s}", svg) for s in seeds
            ]
            lines = [ln for f in futures for ln in f.result()]
    if lines:
        print("\n".join(lines))
    return EXIT_OK


# -- report ------------------------------------------------------------------


def _msize_chart(named_series) -> Chart:
    chart = Chart("Memory table growth", "t", "entries")
    for label, series in named_series:
        dual = any(s.m_s or s.m_L for s in series)
        ys = [float(s.msize_dual if dual else s.msize_q) for s in series]
        chart.lines.append(Line(label, [s.t for s in series], ys, steps=dual))
    return chart


def cmd_report(args) -> int:
    named = []
    for path in args.input:
        series = read_series(path)
        groups: dict = {}
        for s in series:
            groups.setdefault(s.intersection_id, []).append(s)
        for iid, samples in groups.items():
            dual = any(s.m_s or s.m_L for s in samples)
            label = Path(path).stem + ("" if len(groups) == 1 else f"[{iid}]")
            named.append((f"{label} ({'dual' if dual else 'sarsa'})", samples))
    _emit(render(_msize_chart(named)), args.out)
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dualmem", description="Dual-memory RL toolkit: analyze, trace, simulate, report.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze", help="closed-form ratio sweep to CSV (and SVG)")
    a.add_argument("--scenario", choices=["worst", "best"], required=True)
    a.add_argument("--action-size", type=_int_list, required=True, help="e.g. 8 or 4,8,16 or 4:16")
    a.add_argument("--kappa", type=_frac_list, default=[Fraction(1)], help="e.g. 1 or 1/4,1/2,1")
    a.add_argument("--t-stage", type=_int_list, required=True)
    a.add_argument("--n-max", type=int, help="worst case: n = 1..N")
    a.add_argument("--m", type=_int_list, help="best case: unique-state counts")
    a.add_argument("--out", help="CSV path (default stdout)")
    a.add_argument("--svg", help="also write a chart here")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("trace", help="step the memory tables over a synthetic stream")
    t.add_argument("--scenario", choices=["worst", "best", "replay"], required=True)
    t.add_argument("--params", help="comma list of key=value: action_size, kappa, t_stage, m, tau")
    t.add_argument("--action-size", dest="action_size", type=int)
    t.add_argument("--kappa", type=Fraction)
    t.add_argument("--t-stage", dest="t_stage", type=int)
    t.add_argument("--m", type=int)
    t.add_argument("--tau", type=int)
    t.add_argument("--states", help="replay stream: one state token per line")
    t.add_argument("--horizon", type=int)
    t.add_argument("--out", help="CSV path (default stdout)")
    t.set_defaults(func=cmd_trace)

    s = sub.add_parser("simulate", help="run the grid simulation and write memory-size CSVs")
    s.add_argument("--config", help="TOML run configuration")
    s.add_argument("--agent", choices=["dual", "sarsa"])
    s.add_argument("--steps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--seeds", type=int, default=1, help="replicate over this many consecutive seeds")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--svg", action="store_true")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", help="render CSV series as an SVG line chart")
    r.add_argument("--input", nargs="+", required=True)
    r.add_argument("--out", help="SVG path (default stdout)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except config_mod.ConfigError as exc:
        print(f"dualmem: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"dualmem: schema error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DataError as exc:
        print(f"dualmem: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"dualmem: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
