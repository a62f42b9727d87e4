"""Headless command-line driver.

Verbs: simulate (run an experiment to CSV), bode (estimate a Bode diagram
from a record CSV), design (print the full compensator design chain),
synthesize / verify / dump-dot (interaction engine), serve (run the lab
server), export (copy an archive out of a data directory).

Exit status 0 on success, 1 on a domain error (one parsable line on
stderr), 2 on bad flags.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import leaddesign
from .errors import SealabError
from .gr1 import build_spec, synthesize, verify
from .gr1.strategy import Strategy
from .plant import NoiseConfig, plant_tf, run_closed_loop, run_open_loop, save_record, load_record
from .sysid import analytic_bode_data, measure_margins, piecewise_fft_bode, single_fft_bode
from .server.config import ServerConfig
from .server.experiments import ExperimentDef, load_experiments


def _load_experiment(name: str, data_dir: str | None) -> ExperimentDef:
    if data_dir and (Path(data_dir) / "experiments.json").exists():
        with open(Path(data_dir) / "experiments.json") as fh:
            doc = json.load(fh)
    else:
        doc = json.loads(resources.files("sealab.data").joinpath("experiments.json").read_text())
    experiments = load_experiments(doc)
    if name not in experiments:
        raise SealabError(f"unknown experiment '{name}' (have: {', '.join(sorted(experiments))})")
    return experiments[name]


def _analytic_design(exp: ExperimentDef, phi_d: float) -> leaddesign.LeadDesignState:
    """Reference design chain computed from the analytic Bode diagram."""
    tf = exp.k_ss * plant_tf(exp.plant)
    grid = np.logspace(0, np.log10(0.9 * np.pi * exp.plant.f_s / 2), 8000)
    bode = analytic_bode_data(tf, exp.plant.loop_delay, grid)
    report = measure_margins(bode)
    if not report.crossover_found:
        raise SealabError("loop magnitude never crosses 0 dB; adjust k_ss")
    state = leaddesign.LeadDesignState(
        k_ss=exp.k_ss, phi_pm=report.phi_pm, omega_gc_min=report.omega_gc,
        phi_d=phi_d, bode=bode,
    )
    return leaddesign.run_reference_chain(state)


def cmd_simulate(args) -> int:
    exp = _load_experiment(args.experiment, args.data_dir)
    noise = NoiseConfig(sigma_f=(args.sigma if args.sigma is not None else exp.noise.sigma_f), seed=args.seed)
    chirp = exp.chirp
    if args.kind == "closed":
        state = _analytic_design(exp, args.phi_d)
        lead = leaddesign.lead_tf(state.k, state.p, state.z)
        record = run_closed_loop(exp.plant, lead, exp.k_ss, chirp, noise)
    else:
        record = run_open_loop(exp.plant, chirp, noise)
    save_record(record, args.out, exp.plant, noise)
    print(f"wrote {record.n_samples} samples to {args.out} (+ sidecar metadata)")
    return 0


def cmd_bode(args) -> int:
    record = load_record(args.record)
    if args.method == "single":
        bode = single_fft_bode(record)
    else:
        bode = piecewise_fft_bode(record, args.segments)
    out = Path(args.out)
    out.write_text(bode.to_csv())
    meta = {
        "source": bode.source,
        "points": len(bode.omega),
        **bode.meta,
    }
    Path(str(out)[: -4] if str(out).endswith(".csv") else str(out)).with_suffix(".meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    report = measure_margins(bode)
    if report.crossover_found:
        print(f"{len(bode.omega)} points -> {args.out}; phi_pm = {report.phi_pm:.2f} deg at {report.omega_gc:.2f} rad/s")
    else:
        print(f"{len(bode.omega)} points -> {args.out}; no 0 dB crossover in band")
    if args.plot:
        _plot_bode(bode, args.plot)
        print(f"plot -> {args.plot}")
    return 0


def _plot_bode(bode, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    ax1.semilogx(bode.omega, bode.mag_db)
    ax1.set_ylabel("magnitude (dB)")
    ax1.grid(True, which="both", alpha=0.3)
    ax2.semilogx(bode.omega, bode.phase_deg)
    ax2.set_ylabel("phase (deg)")
    ax2.set_xlabel("angular frequency (rad/s)")
    ax2.set_ylim(-270, 90)
    ax2.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_design(args) -> int:
    exp = _load_experiment(args.experiment, args.data_dir)
    state = _analytic_design(exp, args.phi_d)
    lead = leaddesign.lead_tf(state.k, state.p, state.z)
    loop = leaddesign.controller_tf(state) * plant_tf(exp.plant)
    grid = np.logspace(0, np.log10(0.9 * np.pi * exp.plant.f_s / 2), 8000)
    achieved = measure_margins(analytic_bode_data(loop, exp.plant.loop_delay, grid))
    print(f"experiment        : {exp.id} (k_ss = {exp.k_ss})")
    print(f"measured phi_pm   : {state.phi_pm:9.3f} deg at omega_gc_min = {state.omega_gc_min:.2f} rad/s")
    print(f"desired phi_d     : {state.phi_d:9.3f} deg")
    print(f"delta_phi         : {state.delta_phi:9.3f} deg")
    print(f"phi_max           : {state.phi_max:9.3f} deg  (band {state.delta_phi + 5:.2f} .. {state.delta_phi + 10:.2f})")
    print(f"alpha             : {state.alpha:9.4f}")
    print(f"omega_gc_max      : {state.omega_gc_max:9.2f} rad/s")
    print(f"omega_gc          : {state.omega_gc:9.2f} rad/s")
    print(f"controller        : k = {state.k:.4f}, p = {state.p:.2f} rad/s, z = {state.z:.4f} rad/s")
    print(f"lead section      : {state.k:.4f} (s + {state.z:.4f}) / (s + {state.p:.2f}), steady gain {exp.k_ss}")
    print(f"achieved phi_pm   : {achieved.phi_pm:9.3f} deg at {achieved.omega_gc:.2f} rad/s "
          f"(miss {achieved.phi_pm - state.phi_d:+.2f} deg)")
    assert lead.order == 1
    return 0


def _spec_for(args):
    if args.experiment:
        exp = _load_experiment(args.experiment, args.data_dir)
        return build_spec(list(exp.question_chain))
    names = [f"q{i + 1}" for i in range(args.questions)]
    return build_spec(names)


def cmd_synthesize(args) -> int:
    spec = _spec_for(args)
    strategy = synthesize(spec)
    if args.out:
        Path(args.out).write_text(strategy.to_json())
    meta = strategy.metadata
    print(
        f"synthesized: {meta['minimized_states']} states "
        f"({meta['raw_states']} before minimization, {meta['positions']} game positions), "
        f"{meta['env_actions']} environment APs, {meta['sys_actions']} system APs"
        + (f" -> {args.out}" if args.out else "")
    )
    return 0


def cmd_verify(args) -> int:
    spec = _spec_for(args)
    if args.strategy:
        strategy = Strategy.from_json(Path(args.strategy).read_text())
    else:
        strategy = synthesize(spec)
    report = verify(strategy, spec, plays=args.plays, seed=args.seed, depth=args.depth)
    print(report.summary())
    for v in report.violations[:10]:
        print(f"  VIOLATION {v.predicate} at state {v.state} on '{v.move}' via {v.trace}")
    return 0 if report.ok else 1


def cmd_dump_dot(args) -> int:
    if args.strategy:
        strategy = Strategy.from_json(Path(args.strategy).read_text())
    else:
        strategy = synthesize(_spec_for(args))
    Path(args.out).write_text(strategy.to_dot())
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import LabServer
    from .server.api import create_app

    config = ServerConfig.load(args.config)
    if args.port:
        config.port = args.port
    if args.data_dir:
        config.data_dir = args.data_dir
    app = create_app(LabServer(config))
    uvicorn.run(app, host=args.host, port=config.port, log_level="info")
    return 0


def cmd_export(args) -> int:
    src = Path(args.data_dir) / "archives" / args.archive
    if not (src / "archive.json").exists():
        raise SealabError(f"no archive '{args.archive}' under {args.data_dir}")
    dst = Path(args.out)
    dst.mkdir(parents=True, exist_ok=True)
    for name in ("archive.json", "record.csv", "record.meta.json", "bode.csv", "bode_ideal.csv"):
        shutil.copyfile(src / name, dst / name)
    print(f"exported archive '{args.archive}' to {dst}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sealab", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run an experiment and write the record CSV")
    p.add_argument("--experiment", default="sysid")
    p.add_argument("--kind", choices=["open", "closed"], default="open")
    p.add_argument("--phi-d", type=float, default=45.0, help="design target for closed-loop runs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=None, help="override noise standard deviation")
    p.add_argument("--data-dir", default=None, help="read the experiment catalog from a data dir")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("bode", help="estimate a Bode diagram from a record CSV")
    p.add_argument("record")
    p.add_argument("--segments", type=int, default=120)
    p.add_argument("--method", choices=["piecewise", "single"], default="piecewise")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None, help="optional PNG path")
    p.set_defaults(fn=cmd_bode)

    p = sub.add_parser("design", help="print the reference compensator design chain")
    p.add_argument("--phi-d", type=float, required=True)
    p.add_argument("--experiment", default="feedback")
    p.add_argument("--data-dir", default=None)
    p.set_defaults(fn=cmd_design)

    for name, fn in (("synthesize", cmd_synthesize), ("verify", cmd_verify), ("dump-dot", cmd_dump_dot)):
        p = sub.add_parser(name, help=f"{name} the interaction engine")
        p.add_argument("--questions", type=int, default=6, help="synthetic chain length")
        p.add_argument("--experiment", default=None, help="use an experiment's question chain")
        p.add_argument("--data-dir", default=None)
        p.add_argument("--strategy", default=None, help="load a strategy JSON instead of synthesizing")
        if name == "synthesize":
            p.add_argument("--out", default=None)
        if name == "verify":
            p.add_argument("--plays", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--depth", type=int, default=12)
        if name == "dump-dot":
            p.add_argument("--out", required=True)
        p.set_defaults(fn=fn)

    p = sub.add_parser("serve", help="run the lab server")
    p.add_argument("--config", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("export", help="copy an archive out of a data directory")
    p.add_argument("--archive", required=True)
    p.add_argument("--data-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SealabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
