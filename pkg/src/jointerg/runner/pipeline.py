"""The staged pipeline: decompose, select K and L, Taylor family, change of
variables, PET reduction, seminorm spec, torus verification."""
from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .. import __version__
from ..errors import HypothesisViolated, JointErgError, StageError
from ..fn import decompose, growth_profile, tempered_alpha
from ..fn.expr import SmoothExpr
from ..pet import (group_inclusion, level_check, linear_coeffs, make_tuple, reduce,
                   seminorm_spec)
from ..torus import (TorusSystem, TrigPoly, condition_check, cond_expect_invariant, host_kra,
                     iterate_sequence)
from ..window import (change_of_variables, select_order, select_window, taylor_family,
                      window_error)
from .config import ExperimentConfig

SCHEMA_VERSION = "jointerg.report/1"


@dataclass
class RunReport:
    config: ExperimentConfig
    stages: dict = field(default_factory=dict)  # stage -> record
    rows: list = field(default_factory=list)  # (stage, N, metric, value)
    wall_clock: dict = field(default_factory=dict)
    error: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "version": __version__,
                "config_hash": self.config.digest, "config": self.config.to_json(),
                "stages": self.stages, "error": self.error, "wall_clock": self.wall_clock}


class _Stage:
    def __init__(self, report: RunReport, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.report.wall_clock[self.name] = round(time.perf_counter() - self.t0, 6)
        if exc is not None and not isinstance(exc, StageError):
            if isinstance(exc, (JointErgError, ValueError, ArithmeticError)):
                err = StageError(self.name, exc)
                self.report.error = {"stage": self.name, "type": type(exc).__name__,
                                     "kind": err.kind, "message": str(exc),
                                     "context": _plain(getattr(exc, "context", {}))}
                raise err from exc
        return False


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def _system(cfg: ExperimentConfig) -> TorusSystem:
    return TorusSystem.from_table([list(r) for r in cfg.get("system", "alpha")])


def substitution_gap(cov, samples: int, rng: random.Random) -> float:
    """max |a_N n^K + p_N(n) - (k^K + p_{N,s}(k))| over sampled n = kQ + s."""
    kmax = max(int(math.floor(cov.new_window_value)), 0)
    worst = 0.0
    for _ in range(samples):
        k, s = rng.randint(0, kmax), rng.randrange(cov.Q)
        n = k * cov.Q + s
        worst = max(worst, float(abs(cov.full_poly(n) - cov.substituted(k, s))))
    return worst


STAGES = ("decompose", "select", "taylor", "window_error", "change_of_variables", "pet",
          "seminorm", "verify")


class _Done(Exception):
    pass


def run_pipeline(cfg: ExperimentConfig, threads: Optional[int] = None,
                 stop_after: Optional[str] = None) -> RunReport:
    """Run every stage applicable to the mode, or up to ``stop_after``.

    A failing stage raises StageError carrying its tag; the partial report
    is attached as ``exc.report``.
    """
    if stop_after is not None and stop_after not in STAGES:
        raise ValueError(f"unknown stage {stop_after!r}")
    report = RunReport(cfg)
    try:
        _run(cfg, report, threads or cfg.get("run", "threads"), stop_after)
    except StageError as exc:
        exc.report = report
        raise
    except _Done:
        pass
    return report


def _run(cfg: ExperimentConfig, report: RunReport, threads: int, stop_after=None):
    def done(name):
        if name == stop_after:
            raise _Done

    mode = cfg.get("function", "mode")
    fn = {k: cfg.get("function", k) for k in ("s_part", "p_part", "e_part", "t_part", "deg_s")}
    rows = report.rows

    with _Stage(report, "decompose"):
        decomp = decompose(fn["s_part"], fn["p_part"] or "0", fn["e_part"] or None,
                           deg_s=fn["deg_s"])
        t = tempered_alpha(SmoothExpr.parse(fn["t_part"])) if fn["t_part"] else None
        if mode == "case3" and (decomp.s_part.is_zero or not decomp.log_dominated):
            what = "s_h = 0" if decomp.s_part.is_zero else "s_h is not dominated from below by log"
            raise HypothesisViolated(f"log < s_h hypothesis unsatisfiable ({what})",
                                     hypothesis="log < s_h")
        report.stages["decompose"] = {
            "s_part": decomp.s_part.to_str(), "p_coeffs": [c.to_str() for c in decomp.p_coeffs],
            "deg_s": decomp.deg_s, "deg_p": decomp.deg_p, "log_dominated": decomp.log_dominated,
            "strongly_nonpoly_verified": decomp.strongly_nonpoly_verified,
            "tempered": None if t is None else {"expr": t.expr.to_str(), "degree": t.degree,
                                                 "alpha": t.alpha}}
    done("decompose")

    with _Stage(report, "select"):
        wmode = "hardy" if mode == "case3" else mode
        K = select_order(decomp, wmode, t)
        core = t.expr if mode == "case2" else decomp.s_part
        L = select_window(core, K, wmode, None if t is None else t.alpha)
        prof = growth_profile(L)
        report.stages["select"] = {"K": K, "L": L.to_str("N"), "window_mode": wmode,
                                   "L_profile": {"power": prof.p, "log_power": prof.q}}
    done("select")

    with _Stage(report, "taylor"):
        extra = t if mode in ("case1", "case2") else None
        fam = taylor_family(decomp, extra, K, L)
        total = decomp.total + (t.expr if extra is not None else 0)
        report.stages["taylor"] = {"coefficients": fam.coeff_strings("N"),
                                   "leading_is_aN": fam.leading_is_aN}
    done("taylor")

    grid = cfg.get("schedule", "N")
    with _Stage(report, "window_error"):
        samples = cfg.get("cutoffs", "samples")
        with ThreadPoolExecutor(max(1, threads)) as pool:
            errs = list(pool.map(lambda N: window_error(total, fam, N, samples), grid))
        report.stages["window_error"] = {"N": list(grid), "max_error": errs}
        rows += [("window_error", N, "max_error", e) for N, e in zip(grid, errs)]
    done("window_error")

    with _Stage(report, "change_of_variables"):
        prec = cfg.get("precision", "bits")
        rng = random.Random(cfg.get("run", "seed"))
        covs = []
        for N in grid:
            cov = change_of_variables(fam, N, prec)
            gap = substitution_gap(cov, cfg.get("cutoffs", "cov_samples"), rng)
            covs.append({"N": N, "Q": cov.Q, "new_window": cov.new_window_value,
                         "leading_error_bound": cov.leading_error_bound,
                         "substitution_gap": gap})
            rows += [("change_of_variables", N, "Q", cov.Q),
                     ("change_of_variables", N, "new_window", cov.new_window_value),
                     ("change_of_variables", N, "leading_error_bound", cov.leading_error_bound),
                     ("change_of_variables", N, "substitution_gap", gap)]
        report.stages["change_of_variables"] = {
            "D_inv": cov.D_inv.to_str("N") if grid else None,
            "new_window": cov.new_window.to_str("N") if grid else None, "cells": covs}
    done("change_of_variables")

    system = _system(cfg)
    with _Stage(report, "pet"):
        # T_j^{[a(n)]} after the substitution: q_j = e_j (k^K + p_{N,s}(k)),
        # with the N-dependent lower coefficients as opaque generators c0..c_{K-1}
        d = system.d
        gens = tuple(f"c{v}" for v in range(K))
        lower = {j: {v: [gens[v] if i == j - 1 else "0" for i in range(d)] for v in range(K)}
                 for j in range(1, d + 1)}
        A = make_tuple(d, d, K, lower, generators=gens)
        trace, final = reduce(A, max_iterates=cfg.get("pet", "max_iterates"))
        levels_ok = all(level_check(B).ok for _, B in trace)
        incl = group_inclusion(final)
        coeffs = linear_coeffs(final)
        report.stages["pet"] = {
            "d": d, "ell": d, "K": K, "steps": len(trace), "final_iterates": final.ell,
            "t_sequence": [t_ for t_, _ in trace],
            "inherited": [B.trace[-1].inherited for _, B in trace],
            "levels_ok": levels_ok, "inclusion": incl.to_json(),
            "first_linear_coeff": str(coeffs[0]) if coeffs else None,
            "digest": _digest(final)}
    done("pet")

    with _Stage(report, "seminorm"):
        spec = seminorm_spec(final, cfg.get("pet", "D"))
        record = {"spec": spec.to_json()}
        f1 = TrigPoly.character((1,) + (0,) * (system.m - 1))
        if spec.mode == "multi":
            dirs = [(g, spec.D) for g in spec.directions]
            record["host_kra_f1"] = host_kra(system, f1, dirs)
        else:
            record["invariant_factor_norm_f1"] = _single_condition(system, f1)
        report.stages["seminorm"] = record
    done("seminorm")

    with _Stage(report, "verify"):
        checkpoints = sorted(cfg.get("schedule", "verify_N"))
        values = iterate_sequence(total, checkpoints[-1]) if checkpoints else []
        fs = [TrigPoly.character((1,) + (0,) * (system.m - 1)) for _ in range(system.d)]
        rep = condition_check(system, values, cfg.get("cutoffs", "char_cutoff"),
                              cfg.get("cutoffs", "product_cutoff"), checkpoints,
                              cfg.get("thresholds", "threshold"), fs, threads)
        report.stages["verify"] = rep.to_json()
        for j, N in enumerate(checkpoints):
            rows.append(("verify", N, "cond_i_max", rep.cond_i_max[j]))
            rows.append(("verify", N, "cond_ii", rep.cond_ii[j]))
            rows.append(("verify", N, "average_deviation", rep.average_deviation[j]))


def _digest(final) -> str:
    import hashlib
    return hashlib.sha256(str(final).encode()).hexdigest()[:16]


def _single_condition(system: TorusSystem, f: TrigPoly) -> float:
    """max over a of ||E(f (x) conj f | I((T_1 x T_1)^a))||_2.

    For rational coordinates the a-th power can gain invariant frequencies,
    so a runs up to the common denominator of alpha_1 (capped at 64).
    """
    m = system.m
    ff = TrigPoly(2 * m, {k + tuple(-x for x in k2): c * c2.conjugate()
                          for k, c in f.coeffs.items() for k2, c2 in f.coeffs.items()})
    row = system.alpha[0]
    q = 1
    for c in row:
        if c.is_rational:
            q = math.lcm(q, Fraction(c.rat).denominator)
    worst = 0.0
    for a in range(1, min(q, 64) + 1):
        theta = tuple(c * a for c in row) * 2
        worst = max(worst, cond_expect_invariant(ff, [theta]).l2)
    return worst
