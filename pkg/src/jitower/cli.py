"""Command-line front end: build, extend, verify, normals, report.

Configuration is a flat key=value file; reports are JSON documents with a
stable key order and exact rationals rendered as "num/den", so identical
inputs produce byte-identical outputs.  Exit codes: 0 all checks pass
(possibly with sampled / not-guaranteed qualifiers), 1 some check failed,
2 the configuration or tower file was unusable.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .certificate import Certificate, CheckResult, FAIL, PASS
from .groups import CapExceeded
from .tower import (FeasibilityStop, LoadError, TowerConfig, TowerState,
                    betti_checks, build, load_tower, save_tower, step,
                    torsion_shadow_check)
from .words import OrderBudget

CHECK_GROUPS = ("core", "betti", "torsion", "grading", "fixed", "normals",
                "rigidity")
DEFAULT_CHECKS = ("core", "betti", "torsion")


def parse_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (need key = value): {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def config_from_args(args) -> TowerConfig:
    raw = parse_config_file(args.config) if args.config else {}
    cfg = TowerConfig()
    if "d" in raw:
        cfg.d = int(raw["d"])
    if "primes" in raw:
        cfg.primes = tuple(int(x) for x in raw["primes"].replace(",", " ").split())
    if "epsilon" in raw:
        cfg.epsilon = Fraction(raw["epsilon"])
    scale = int(raw.get("budget_scale", cfg.budget.scale))
    base = int(raw.get("budget_base", cfg.budget.base))
    cfg.budget = OrderBudget(scale, base)
    if "depth" in raw:
        cfg.depth = int(raw["depth"])
    if "seed" in raw and raw["seed"] != "trivial":
        cfg.seed_path = raw["seed"]
    if "mode" in raw:
        cfg.mode = raw["mode"]
    for key in ("force_hlist", "test_budget"):
        if key in raw:
            setattr(cfg, key, _parse_bool(raw[key]))
    for key in ("enum_cap", "submodule_guard", "scan_cap", "torsion_scan_len"):
        if key in raw:
            setattr(cfg, key, int(raw[key]))
    # flags override the file
    if getattr(args, "depth", None) is not None:
        cfg.depth = args.depth
    if getattr(args, "force_hlist", False):
        cfg.force_hlist = True
    if getattr(args, "relaxed", False):
        cfg.mode = "relaxed"
    if getattr(args, "test_budget", False):
        cfg.test_budget = True
    return cfg


def _emit(cert: Certificate, args) -> int:
    for line in cert.summary_lines():
        print(line)
    print(f"overall: {cert.overall()}")
    report_path = getattr(args, "report", None)
    if report_path:
        with open(report_path, "w") as fh:
            fh.write(cert.to_json())
        print(f"report written to {report_path}")
    return 0 if cert.overall() == PASS else 1


def cmd_build(args) -> int:
    try:
        cfg = config_from_args(args)
        state, cert = build(cfg)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    save_tower(state, args.out)
    print(f"tower written to {args.out} "
          f"(depth {state.depth}{', truncated' if state.truncated else ''})")
    return _emit(cert, args)


def cmd_extend(args) -> int:
    try:
        state = load_tower(args.tower)
    except (LoadError, OSError) as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 2
    cfg = state.config
    cfg.depth = args.depth if args.depth is not None else cfg.depth + 1
    if cfg.depth > len(cfg.primes):
        print("prime sequence too short for the requested depth", file=sys.stderr)
        return 2
    cert = Certificate(meta={"tool": "jitower", "extended_from": state.depth})
    while state.depth < cfg.depth:
        try:
            step(state)
        except FeasibilityStop as stop:
            state.truncated = True
            state.checks.append(CheckResult("tower.truncated", PASS,
                                            f"stopped early: {stop}"))
            break
    if state.depth >= 2:
        state.checks.append(torsion_shadow_check(state))
    state.checks.extend(betti_checks(state))
    cert.checks = list(state.checks)
    out = args.out or args.tower
    save_tower(state, out)
    print(f"tower written to {out} (depth {state.depth})")
    return _emit(cert, args)


def _verify_core(state: TowerState) -> list:
    checks = []
    eps = state.config.epsilon
    for lv in state.levels:
        prefix = f"level{lv.index}"
        below = state.group(lv.index - 1)
        if lv.rel is not None:
            checks.append(CheckResult(
                f"{prefix}.kernel-dim", PASS,
                f"dim ker = {lv.rel.kernel_dim} = (d-1)|G|+1 with |G| = {below.order}"))
        if lv.index >= 2:
            from .certificate import NOT_GUARANTEED
            ok = lv.delta > 1 - eps
            checks.append(CheckResult(
                f"{prefix}.margin", PASS if ok else NOT_GUARANTEED,
                f"delta = {lv.delta} vs 1 - eps = {1 - eps} (r={lv.r}, s={lv.s})"))
            bound = Fraction(state.config.d - 1) * below.order * (1 - eps)
            ok = Fraction(lv.dim) >= bound
            checks.append(CheckResult(
                f"{prefix}.dim-lower-bound",
                PASS if ok else (NOT_GUARANTEED if lv.relaxed_used else FAIL),
                f"dim V = {lv.dim} >= (d-1)|G|(1-eps) = {bound}"))
    ok = True
    for w, (order, lvl) in state.ledger.items():
        now = state.top.element_order(state.pi(w, state.depth))
        if now != order:
            ok = False
    checks.append(CheckResult(
        "tower.order-stability", PASS if ok else FAIL,
        f"{len(state.ledger)} frozen words keep their orders at the top"))
    return checks


def _verify_fixed(state: TowerState) -> list:
    from .certificate import NOT_GUARANTEED, SAMPLED
    from .forge import cyclic_subgroup_reps
    checks = []
    eps = state.config.epsilon
    for lv in state.levels:
        if lv.index < 2:
            continue
        below = state.group(lv.index - 1)
        if not below.is_enumerable(state.config.enum_cap):
            continue
        reps = cyclic_subgroup_reps(below)
        margin_ok, eps_ok = True, True
        witness = None
        for e, size in reps:
            dim = lv.module.fixed_dim([e])
            if lv.delta > 0 and Fraction(dim) > Fraction(lv.dim) / (lv.delta * size):
                margin_ok = False
                witness = {"subgroup_size": size, "fixed_dim": dim}
            if Fraction(dim) * (1 - eps) * size > Fraction(lv.dim):
                eps_ok = False
                witness = {"subgroup_size": size, "fixed_dim": dim}
        checks.append(CheckResult(
            f"level{lv.index}.fixed-bound-margin", SAMPLED if margin_ok else FAIL,
            f"dim V^K <= dim V/(delta|K|) over {len(reps)} cyclic subgroups",
            witness=None if margin_ok else witness))
        checks.append(CheckResult(
            f"level{lv.index}.fixed-bound-eps",
            SAMPLED if eps_ok else (NOT_GUARANTEED if lv.relaxed_used else FAIL),
            f"dim V^K <= dim V/((1-eps)|K|) over {len(reps)} cyclic subgroups",
            witness=None if eps_ok else witness))
    return checks


def _max_enumerable_level(state: TowerState) -> int:
    k = 0
    for lvl in range(state.depth + 1):
        if state.group(lvl).is_enumerable(state.config.enum_cap):
            k = lvl
    return k


def verify_certificate(state: TowerState, wanted=DEFAULT_CHECKS) -> Certificate:
    """Re-run the selected check groups on a loaded tower."""
    if "all" in wanted:
        wanted = CHECK_GROUPS
    cert = Certificate(meta={
        "tool": "jitower",
        "tower": "verify",
        "depth": state.depth,
        "conforming": state.conforming(),
        "checks": list(wanted),
    })
    cert.checks.append(CheckResult("load.invariants", PASS,
                                   "stored bases canonical, kernels and "
                                   "derivation identities verified on load"))
    if "core" in wanted:
        cert.checks.extend(_verify_core(state))
    if "betti" in wanted:
        cert.checks.extend(betti_checks(state))
    if "torsion" in wanted and state.depth >= 2:
        cert.checks.append(torsion_shadow_check(state))
    if "grading" in wanted:
        from .analysis import graded_chain_report
        level = _max_enumerable_level(state)
        if level >= 1:
            cert.checks.extend(graded_chain_report(state, level))
    if "fixed" in wanted:
        cert.checks.extend(_verify_fixed(state))
    if "normals" in wanted:
        from .analysis import (classification_report, growth_report,
                               size_bound_report, tower_chain)
        level = _max_enumerable_level(state)
        chain = tower_chain(state)[:level + 1]
        if len(chain) >= 1 and chain[-1].order <= 2000:
            descs, check = classification_report(
                chain, guard=state.config.submodule_guard)
            cert.checks.append(check)
            cert.checks.append(size_bound_report(chain, descs))
            _, gchecks = growth_report(chain, guard=state.config.submodule_guard)
            cert.checks.extend(gchecks)
        else:
            cert.checks.append(CheckResult(
                "normals.classification-oracle", "skipped",
                f"top enumerable level has order {chain[-1].order}, "
                "brute force capped at 2000"))
    if "rigidity" in wanted:
        from .analysis import rigidity_report
        for i in range(1, state.depth):
            if state.group(i).is_enumerable(state.config.enum_cap):
                cert.checks.append(rigidity_report(
                    state, i, guard=state.config.submodule_guard))
    return cert


def cmd_verify(args) -> int:
    try:
        state = load_tower(args.tower)
    except (LoadError, OSError) as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 2
    wanted = tuple(args.checks.split(",")) if args.checks else DEFAULT_CHECKS
    for w in wanted:
        if w not in CHECK_GROUPS and w != "all":
            print(f"unknown check group {w!r} (have {', '.join(CHECK_GROUPS)})",
                  file=sys.stderr)
            return 2
    return _emit(verify_certificate(state, wanted), args)


def cmd_normals(args) -> int:
    try:
        state = load_tower(args.tower)
    except (LoadError, OSError) as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 2
    from .analysis import growth_report, tower_chain
    level = args.level if args.level is not None else _max_enumerable_level(state)
    if level > state.depth or not state.group(level).is_enumerable(
            state.config.enum_cap):
        print(f"level {level} is not enumerable", file=sys.stderr)
        return 2
    chain = tower_chain(state)[:level + 1]
    brute = chain[-1].order <= 2000
    try:
        table, checks = growth_report(chain, max_index=args.max_index,
                                      guard=state.config.submodule_guard,
                                      brute=brute)
    except CapExceeded as exc:
        print(f"truncated: {exc}")
        return 0
    for line in table.lines():
        print(line)
    print(f"total normal subgroups: {table.total}"
          + ("" if brute else " (brute-force oracle skipped: group too large)"))
    cert = Certificate(meta={"tool": "jitower", "level": level}, checks=checks)
    return _emit(cert, args)


def cmd_report(args) -> int:
    try:
        state = load_tower(args.tower)
    except (LoadError, OSError) as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 2
    cfg = state.config
    print(f"tower: d={cfg.d} primes={list(cfg.primes)} epsilon={cfg.epsilon} "
          f"budget=({cfg.budget.scale},{cfg.budget.base}) mode={cfg.mode}")
    print(f"depth {state.depth}"
          + (" (truncated)" if state.truncated else "")
          + f", conforming={state.conforming()}")
    for k in range(state.depth + 1):
        g = state.group(k)
        if k == 0:
            print(f"  G_0: seed order {g.order}")
            continue
        lv = state.levels[k - 1]
        size = str(g.order) if g.order < 10 ** 12 else \
            f"{lv.p}^{lv.dim} * {state.group(k - 1).order}"
        print(f"  G_{k}: order {size}, p={lv.p}, dim V={lv.dim}, "
              f"delta={lv.delta}, r={lv.r}, s={lv.s}, hlist={int(lv.hlist_used)}")
    if state.ledger:
        print("frozen words:")
        for w, (o, lvl) in sorted(state.ledger.items(),
                                  key=lambda kv: (len(kv[0]), kv[0].letters)):
            print(f"  {w} order {o} (level {lvl})")
    else:
        print("frozen words: none")
    threshold = Fraction(cfg.d - 1) * (1 - cfg.epsilon)
    for lv in state.levels[1:]:
        ratio = Fraction(lv.dim, state.group(lv.index - 1).order)
        print(f"  ratio dim V_{lv.index}/|G_{lv.index - 1}| = {ratio} "
              f"(threshold {threshold})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="jitower",
        description="build and verify towers of finite split extensions")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build a tower from a config")
    p_build.add_argument("--config", help="key=value config file")
    p_build.add_argument("--out", default="tower.twr", help="tower output path")
    p_build.add_argument("--report", help="write the JSON certificate here")
    p_build.add_argument("--depth", type=int)
    p_build.add_argument("--force-hlist", dest="force_hlist", action="store_true")
    p_build.add_argument("--relaxed", action="store_true")
    p_build.add_argument("--test-budget", dest="test_budget", action="store_true")
    p_build.set_defaults(func=cmd_build)

    p_ext = sub.add_parser("extend", help="resume a tower file and add levels")
    p_ext.add_argument("--tower", required=True)
    p_ext.add_argument("--out", help="defaults to overwriting the input")
    p_ext.add_argument("--depth", type=int, help="new total depth")
    p_ext.add_argument("--report")
    p_ext.set_defaults(func=cmd_extend)

    p_ver = sub.add_parser("verify", help="re-verify a tower file")
    p_ver.add_argument("--tower", required=True)
    p_ver.add_argument("--checks", help=f"comma list from {','.join(CHECK_GROUPS)} or all")
    p_ver.add_argument("--report")
    p_ver.set_defaults(func=cmd_verify)

    p_nrm = sub.add_parser("normals", help="normal subgroup growth table")
    p_nrm.add_argument("--tower", required=True)
    p_nrm.add_argument("--level", type=int)
    p_nrm.add_argument("--max-index", dest="max_index", type=int)
    p_nrm.add_argument("--report")
    p_nrm.set_defaults(func=cmd_normals)

    p_rep = sub.add_parser("report", help="summarize a tower file")
    p_rep.add_argument("--tower", required=True)
    p_rep.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
