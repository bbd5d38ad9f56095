"""Command-line front end.

    decaylab run <config>         run one scenario file (or preset name)
    decaylab suite <dir>          run every *.ini / *.cfg in a directory
    decaylab presets              list shipped presets (--write DIR to dump)
    decaylab verify-weights       constant identities + weight inequalities
    decaylab fit <csv>            refit a persisted series

Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 execution error.
DECAYLAB_OUT sets the default output root.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import decay, functionals, presets, scenarios

__all__ = ["main"]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decaylab", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help="output directory (default $DECAYLAB_OUT or .)")
    common.add_argument("--margin", type=float, default=None,
                        help="verdict margin override")
    common.add_argument("--practical-b", type=float, default=None,
                        dest="practical_b", help="practical-b override")

    p_run = sub.add_parser("run", parents=[common],
                           help="run one scenario config or preset")
    p_run.add_argument("config", help="config path, literal text, or preset name")

    p_suite = sub.add_parser("suite", parents=[common],
                             help="run all configs in a directory")
    p_suite.add_argument("directory")
    p_suite.add_argument("--parallel", type=int, default=1)

    p_presets = sub.add_parser("presets", help="list or dump shipped presets")
    p_presets.add_argument("--write", default=None, metavar="DIR",
                           help="write every preset as DIR/<name>.ini")

    p_vw = sub.add_parser("verify-weights", parents=[common],
                          help="constant identities and weight inequalities")
    p_vw.add_argument("--seed", type=int, default=20240809)
    p_vw.add_argument("--pairs", type=int, default=200)
    p_vw.add_argument("--families", type=int, default=20)

    p_fit = sub.add_parser("fit", help="fit a decay model to a series CSV")
    p_fit.add_argument("csv")
    p_fit.add_argument("--model", required=True,
                       choices=("LogDecay", "PolyDecay", "CompactDecay"))
    p_fit.add_argument("--b", type=float, default=None,
                       help="offset b (LogDecay)")
    p_fit.add_argument("--R", type=float, default=None,
                       help="support radius R (CompactDecay)")
    p_fit.add_argument("--window", required=True, metavar="LO:HI")
    return ap


def _load_config_arg(arg: str) -> scenarios.ScenarioConfig:
    if arg in presets.CATALOG:
        return presets.load(arg)
    return scenarios.load_config(arg)


def _exit_code(reports) -> int:
    if any(r.failed for r in reports):
        return 2
    if any(not r.all_pass for r in reports):
        return 1
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (scenarios.ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "run":
        cfg = _load_config_arg(args.config)
        report = scenarios.run_scenario(cfg, args.out, args.margin,
                                        args.practical_b)
        print(json.dumps(_summary(report), indent=2, sort_keys=True))
        return _exit_code([report])

    if args.command == "suite":
        root = Path(args.directory)
        paths = sorted(list(root.glob("*.ini")) + list(root.glob("*.cfg")))
        if not paths:
            print(f"error: no *.ini or *.cfg configs under {root}",
                  file=sys.stderr)
            return 2
        configs = [scenarios.load_config(p) for p in paths]
        reports = scenarios.run_suite(configs, args.parallel, args.out,
                                      args.margin, args.practical_b)
        for rep in reports:
            print(json.dumps(_summary(rep), sort_keys=True))
        return _exit_code(reports)

    if args.command == "presets":
        if args.write:
            outdir = Path(args.write)
            outdir.mkdir(parents=True, exist_ok=True)
            for name in presets.names():
                (outdir / f"{name}.ini").write_text(presets.get(name))
            print(f"wrote {len(presets.CATALOG)} presets to {outdir}")
        else:
            for name in presets.names():
                print(name)
        return 0

    if args.command == "verify-weights":
        cfg = scenarios.ScenarioConfig(name="verify-weights",
                                       theorem="weight_suite", seed=args.seed)
        cfg.echo = {"seed": args.seed}
        report = scenarios.run_weight_suite(cfg, args.pairs, args.families)
        print(json.dumps(report.payload, indent=2, sort_keys=True))
        return 0 if report.all_pass else 1

    if args.command == "fit":
        lo, _, hi = args.window.partition(":")
        window = (float(lo), float(hi))
        header, data = functionals.read_series_csv(args.csv)
        ts = data[:, header.index("t")]
        Es = data[:, header.index("E")]
        b_or_R = {"LogDecay": args.b, "PolyDecay": 1.0,
                  "CompactDecay": args.R}[args.model]
        if b_or_R is None:
            flag = "--b" if args.model == "LogDecay" else "--R"
            print(f"error: {args.model} requires {flag}", file=sys.stderr)
            return 2
        fit = decay.fit_decay(ts, Es, args.model, b_or_R, window)
        print(json.dumps(fit.to_dict(), indent=2, sort_keys=True))
        return 0

    raise AssertionError(args.command)


def _summary(report: scenarios.ScenarioReport) -> dict:
    p = report.payload
    out = {"name": report.name, "all_pass": report.all_pass,
           "failed": report.failed}
    if "error" in p:
        out["error"] = p["error"]
    if p.get("verdicts"):
        out["verdicts"] = p["verdicts"]
    if "defects" in p:
        out["defects"] = p["defects"]
    if "truncation_contamination" in p:
        out["truncation_contamination"] = p["truncation_contamination"]
    return out


if __name__ == "__main__":
    sys.exit(main())
