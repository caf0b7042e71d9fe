"""Command line entry point: ``jointerg <subcommand> [flags]``.

Exit codes: 0 success, 2 hypothesis violation, 3 config error,
4 numeric inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from typing import Optional, Sequence

from ..errors import ConfigError, JointErgError
from .config import default_config, load_config
from .emit import emit, to_json_text, write_text

EXIT = {"hypothesis": 2, "config": 3, "inconclusive": 4}
log = logging.getLogger("jointerg")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="experiment config (INI) or tuple spec for pet")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointerg", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="Taylor family, window errors, change of variables")
    _common(p)
    p.add_argument("--N-grid", dest="n_grid", default=None, help="comma separated N values")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--mode", default=None, choices=("hardy", "case1", "case2", "case3"))

    pet = sub.add_parser("pet", help="PET reduction of a tuple spec")
    pet_sub = pet.add_subparsers(dest="pet_command", required=True)
    for name, text in (("reduce", "reduce to degree 1 and print the trace"),
                       ("check", "reduce and check (P1)-(P4), inclusion and the Claim")):
        q = pet_sub.add_parser(name, help=text)
        _common(q)

    for name, text in (("weyl", "Weyl-average convergence curves for conditions (i)/(ii)"),
                       ("verify", "conditions (i)/(ii) plus the multiple-average deviation"),
                       ("pipeline", "every stage, with JSON/CSV/text reports")):
        q = sub.add_parser(name, help=text)
        _common(q)
    return ap


def _experiment(args):
    cfg = load_config(args.config) if args.config else default_config()
    changes = {}
    if args.precision_bits is not None:
        changes["precision__bits"] = args.precision_bits
    if args.seed is not None:
        changes["run__seed"] = args.seed
    if args.threads is not None:
        changes["run__threads"] = args.threads
    if getattr(args, "n_grid", None):
        from .config import _ints
        try:
            changes["schedule__N"] = _ints(args.n_grid)
        except ValueError as exc:
            raise ConfigError(f"--N-grid: {exc}") from exc
    if getattr(args, "samples", None) is not None:
        changes["cutoffs__samples"] = args.samples
    if getattr(args, "mode", None):
        changes["function__mode"] = args.mode
    return cfg.replace(**changes) if changes else cfg


def _out_dir(args, cfg=None) -> str:
    if args.out:
        return args.out
    return cfg.get("output", "dir") if cfg is not None else "out"


# ---------------------------------------------------------------- subcommands

def cmd_approx(args) -> int:
    from ..fn.expr import SmoothExpr
    from .pipeline import run_pipeline
    cfg = _experiment(args)
    report = run_pipeline(cfg, stop_after="change_of_variables")
    sel, cov = report.stages["select"], report.stages["change_of_variables"]["cells"]
    L = SmoothExpr.parse(sel["L"], var="N")
    rows = []
    for N, err, cell in zip(report.stages["window_error"]["N"],
                            report.stages["window_error"]["max_error"], cov):
        rows.append((N, float(L(N)), sel["K"], err, cell["substitution_gap"]))
    out = _out_dir(args, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("N", "L(N)", "K", "max_error", "cov_error"))
    for r in rows:
        w.writerow([r[0], repr(r[1]), r[2], repr(r[3]), repr(r[4])])
    write_text(f"{out}/approx.csv", buf.getvalue())
    payload = {"K": sel["K"], "L": sel["L"], "coefficients": report.stages["taylor"]["coefficients"],
               "D_inv": report.stages["change_of_variables"]["D_inv"],
               "new_window": report.stages["change_of_variables"]["new_window"],
               "config_hash": cfg.digest}
    write_text(f"{out}/approx.json", to_json_text(payload))
    print(f"K = {sel['K']}   L(N) = {sel['L']}")
    for j, c in enumerate(payload["coefficients"]):
        print(f"  r^{j}: {c}")
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_pet(args) -> int:
    from ..pet import group_inclusion, level_check, linear_coeffs, reduce, seminorm_spec
    from .tuplespec import load_tuple_spec
    if not args.config:
        raise ConfigError("pet needs --config <tuple spec>")
    _, A = load_tuple_spec(args.config)
    trace, final = reduce(A)
    record = {"input": A.to_json(), "steps": []}
    print(f"input: {A}")
    for k, (t, B) in enumerate(trace, 1):
        rec = B.trace[-1]
        step = {"t": t, "inherited": rec.inherited, "dropped": list(rec.dropped),
                "groups": [list(g) for g in rec.groups], "tuple": B.to_json()}
        line = f"step {k}: t={t} inherited={rec.inherited} -> s={B.s}, ell={B.ell}, deg={B.degree}"
        if args.pet_command == "check":
            step["levels"] = level_check(B).to_json()
            line += "  levels ok"
        record["steps"].append(step)
        print(line)
    coeffs = linear_coeffs(final)
    spec = seminorm_spec(final)
    record["linear_coeffs"] = [str(c) for c in coeffs]
    record["seminorm"] = spec.to_json()
    if args.pet_command == "check":
        incl = group_inclusion(final)
        record["inclusion"] = incl.to_json()
        record["final_levels"] = level_check(final).to_json()
        print(f"inclusion: {'ok' if incl.ok else 'FAILED'}")
    print(f"final: {final.ell} iterates of degree {final.degree}")
    for m, c in enumerate(coeffs[:8], 1):
        print(f"  c_{m}(h) = {c}")
    if len(coeffs) > 8:
        print(f"  ... {len(coeffs) - 8} more")
    print(f"seminorm: {spec}")
    write_text(f"{_out_dir(args)}/pet_{args.pet_command}.json", to_json_text(record))
    if args.pet_command == "check" and not record["inclusion"]:
        return 2
    return 0


def _ergodicity(args, with_functions: bool):
    from ..fn.expr import SmoothExpr
    from ..torus import TorusSystem, TrigPoly, condition_check, iterate_sequence
    cfg = _experiment(args)
    fn = {k: cfg.get("function", k) for k in ("s_part", "p_part", "e_part", "t_part")}
    a = SmoothExpr.parse(fn["s_part"]) + SmoothExpr.parse(fn["p_part"] or "0")
    for k in ("e_part", "t_part"):
        if fn[k]:
            a = a + SmoothExpr.parse(fn[k])
    system = TorusSystem.from_table([list(r) for r in cfg.get("system", "alpha")])
    checkpoints = sorted(cfg.get("schedule", "verify_N"))
    if not checkpoints:
        raise ConfigError("schedule.verify_N is empty")
    values = iterate_sequence(a, checkpoints[-1])
    fs = None
    if with_functions:
        fs = [TrigPoly.character((1,) + (0,) * (system.m - 1)) for _ in range(system.d)]
    rep = condition_check(system, values, cfg.get("cutoffs", "char_cutoff"),
                          cfg.get("cutoffs", "product_cutoff"), checkpoints,
                          cfg.get("thresholds", "threshold"), fs, cfg.get("run", "threads"))
    rows = []
    for pair, seq in rep.cond_i.items():
        rows += [("cond_i", N, pair, v) for N, v in zip(checkpoints, seq)]
    rows += [("cond_ii", N, "product", v) for N, v in zip(checkpoints, rep.cond_ii)]
    if with_functions:
        rows += [("average", N, "deviation", v)
                 for N, v in zip(checkpoints, rep.average_deviation)]
    out = _out_dir(args, cfg)
    name = "verify" if with_functions else "weyl"
    csv_text = "N,quantity,value\n" + "".join(f"{N},{q}:{m},{v!r}\n" for q, N, m, v in rows)
    write_text(f"{out}/{name}.csv", csv_text)
    payload = {"system": system.to_json(), "sequence": a.to_str("n"), "config_hash": cfg.digest,
               "report": rep.to_json()}
    write_text(f"{out}/{name}.json", to_json_text(payload))
    sys.stdout.write(csv_text)
    print(f"verdict: {'conditions hold' if rep.verdict else 'conditions fail'}"
          f" (threshold {rep.threshold})")
    return 0


def cmd_pipeline(args) -> int:
    from ..errors import StageError
    from .pipeline import run_pipeline
    cfg = _experiment(args)
    out = _out_dir(args, cfg)
    try:
        report = run_pipeline(cfg)
    except StageError as exc:
        emit(exc.report, out, cfg.get("output", "formats"))
        raise
    paths = emit(report, out, cfg.get("output", "formats"))
    for p in paths:
        print(p)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handlers = {"approx": cmd_approx, "pet": cmd_pet, "pipeline": cmd_pipeline,
                "weyl": lambda a: _ergodicity(a, False), "verify": lambda a: _ergodicity(a, True)}
    try:
        return handlers[args.command](args)
    except JointErgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT.get(exc.kind, 2)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
