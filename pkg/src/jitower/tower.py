"""The induction driver: grow towers G_{k+1} = V_{k+1} ⋊ G_k level by level.

Each step scans free words against the order budget (only words whose
budget value is below the current exponent can possibly exceed it, which
turns the scan into a finite one), freezes offending orders into a ledger,
optionally lists normal closures of lower-level elements when the prime is
large enough (or when forced), and forges the next module over the next
prime.  Every structural claim about the step is recorded as a certificate
check: the margin, the dimension lower bound, order stability, the
fixed-space bounds, projection compatibility and the torsion shadow.

Tower files are a versioned line-oriented text format; vectors are written
as contiguous digit strings in base p (alphabet 0-9a-z, so p <= 36).
Loading re-derives boundary kernels and validates every stored invariant,
so a corrupted file fails loudly instead of producing a silently wrong
tower.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import numpy as np

from .certificate import Certificate, CheckResult, FAIL, NOT_GUARANTEED, PASS, SAMPLED
from .extension import ExtensionGroup
from .forge import (BuildError, ForgeInput, SubgroupData, build_module,
                    cyclic_subgroup_reps, splitting_vector,
                    verify_conclusions)
from .gmodule import GModule
from .groups import CapExceeded, TableGroup, word_image
from .linalg import PrimeField, Subspace
from .relmod import RelationModule, relation_module
from .words import OrderBudget, Word, enumerate_words

__all__ = [
    "TowerConfig",
    "Level",
    "TowerState",
    "FeasibilityStop",
    "LoadError",
    "init_tower",
    "step",
    "build",
    "normal_closure_in_extension",
    "save_tower",
    "load_tower",
    "hlist_gate",
]

MAGIC = "JITOWER"
FORMAT_VERSION = 1
DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


class FeasibilityStop(RuntimeError):
    """The top level is too large to enumerate, so no further step can run."""


class LoadError(ValueError):
    """A tower file failed to parse or failed an invariant on load."""


@dataclass
class TowerConfig:
    d: int = 2
    primes: tuple = (2, 3, 5)
    epsilon: Fraction = Fraction(1, 10)
    budget: OrderBudget = OrderBudget(16, 8)
    depth: int = 3
    seed_path: str | None = None
    mode: str = "strict"
    force_hlist: bool = False
    test_budget: bool = False
    enum_cap: int = 10 ** 6
    submodule_guard: int = 100_000
    scan_cap: int = 200_000
    torsion_scan_len: int = 6

    @property
    def relaxed(self) -> bool:
        return self.mode == "relaxed"

    def load_seed(self) -> TableGroup:
        if self.seed_path is None:
            return TableGroup.trivial(self.d)
        seed = TableGroup.from_file(self.seed_path)
        return seed

    def validate(self, seed: TableGroup):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.mode not in ("strict", "relaxed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not Fraction(0) < self.epsilon < Fraction(1, 4):
            raise ValueError("epsilon must lie in (0, 1/4)")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be pairwise distinct")
        for p in self.primes:
            PrimeField(p)
            if seed.order % p == 0:
                raise ValueError(f"prime {p} divides the seed order {seed.order}")
        if not 1 <= self.depth <= len(self.primes):
            raise ValueError("depth must be between 1 and the number of primes")
        if len(seed.generators) != self.d:
            raise ValueError(
                f"seed designates {len(seed.generators)} generators, need d = {self.d}")
        if self.test_budget:
            self.budget.tail_sum(self.d)  # still must converge
        elif not self.budget.admissible(self.d, self.epsilon):
            raise ValueError(
                f"order budget tail sum {self.budget.tail_sum(self.d)} exceeds "
                f"epsilon/2 = {self.epsilon / 2}")


@dataclass
class Level:
    index: int
    field: PrimeField
    rel: RelationModule | None     # None for a synthetic level over a nontrivial seed
    module: GModule                # the level module V_k (live part)
    gen_vecs: np.ndarray
    section_vec: np.ndarray
    group: ExtensionGroup
    delta: Fraction
    r: int
    s: int
    hlist_used: bool
    relaxed_used: bool

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def dim(self) -> int:
        return self.module.live_dim


@dataclass
class TowerState:
    config: TowerConfig
    seed: TableGroup
    levels: list = dataclass_field(default_factory=list)
    ledger: dict = dataclass_field(default_factory=dict)   # Word -> (order, level)
    checks: list = dataclass_field(default_factory=list)
    truncated: bool = False

    @property
    def depth(self) -> int:
        return len(self.levels)

    def group(self, k: int):
        return self.seed if k == 0 else self.levels[k - 1].group

    @property
    def top(self):
        return self.group(self.depth)

    def pi(self, w: Word, k: int):
        g = self.group(k)
        return word_image(w, g.generators, g.identity)

    def conforming(self) -> bool:
        return not self.config.test_budget and not any(
            lv.relaxed_used for lv in self.levels)


def hlist_gate(p: int, epsilon: Fraction) -> bool:
    """Whether the prime is large enough to demand the closure list."""
    e = float(epsilon)
    return math.log(p) > max(1.0 / e, math.log(e) / (2 * e - 0.5))


def _first_level(config: TowerConfig, seed: TableGroup) -> Level:
    field = PrimeField(config.primes[0])
    d = config.d
    if seed.order == 1:
        rel = relation_module(seed, seed.generators, field)
        module = rel.module
        gen_vecs = np.eye(d, dtype=np.int64)
        section_vec = splitting_vector(rel)
    else:
        rel = None
        module = GModule.trivial(field, seed, d)
        gen_vecs = np.zeros((d, module.ambient_dim), dtype=np.int64)
        for j in range(d):
            gen_vecs[j, j * seed.order] = 1
        gen_vecs = module.killed.reduce(gen_vecs)
        section_vec = np.zeros(module.ambient_dim, dtype=np.int64)
    group = ExtensionGroup(module, gen_vecs=gen_vecs,
                           gen_lowers=seed.generators,
                           section_vec=section_vec, name="level1")
    return Level(1, field, rel, module, gen_vecs, section_vec, group,
                 Fraction(1), 0, 0, False, False)


def init_tower(config: TowerConfig) -> TowerState:
    seed = config.load_seed()
    config.validate(seed)
    state = TowerState(config, seed)
    state.levels.append(_first_level(config, seed))
    state.checks.append(CheckResult(
        "tower.budget", PASS,
        f"tail sum {config.budget.tail_sum(config.d)} vs epsilon/2 = "
        f"{config.epsilon / 2}"
        + (" (test budget, certificate non-conforming)" if config.test_budget else "")))
    lvl = state.levels[0]
    state.checks.append(CheckResult(
        "level1.split-structure", PASS,
        f"|G_1| = {lvl.group.order} = {lvl.p}^{lvl.dim} * {seed.order}"))
    return state


def _scan_words(state: TowerState) -> list:
    """Words whose budget value is below the current exponent and whose
    order at the top level exceeds it; returns (word, order) pairs."""
    config = state.config
    top = state.top
    exp = top.exponent()
    budget = config.budget
    max_len = 0
    while budget.of_length(max_len + 1) < exp:
        max_len += 1
    if max_len == 0:
        return []
    words = enumerate_words(config.d, max_len)
    if len(words) > config.scan_cap:
        raise CapExceeded(
            f"word scan of {len(words)} words exceeds the cap {config.scan_cap}")
    out = []
    for w in words[1:]:
        o = budget.of(w)
        if o >= exp:
            continue
        order = top.element_order(word_image(w, top.generators, top.identity))
        if order > o:
            out.append((w, order))
    return out


def normal_closure_in_extension(ext: ExtensionGroup, g_lower):
    """Smallest normal subgroup of a split extension containing section(g).

    Returned as the pair (W, M): M is the normal closure of g in the base
    group (index tuple) and W the span of (m - 1) applied to the module, so
    the subgroup is exactly {(w, m) : w in W, m in M} in split coordinates.
    """
    lower = ext.lower
    m_idxs = lower.normal_closure([g_lower])
    module = ext.module
    basis = module.live.basis
    p = ext.field.p
    rows = []
    for m in m_idxs:
        if m == 0:
            continue
        rows.append((module.act(int(m), basis) - basis) % p)
    if rows:
        w_space = module.g_span(np.vstack(rows))
    else:
        w_space = Subspace.zero(ext.field, module.ambient_dim)
    return w_space, m_idxs


def _hlist(state: TowerState) -> list:
    """Deduplicated normal closures of nontrivial next-to-top elements,
    embedded in the top group via the section."""
    k = state.depth
    level = state.levels[-1]
    top = level.group
    below = state.group(k - 1)
    seen = {}
    for g in below.elements()[1:]:
        w_space, m_idxs = normal_closure_in_extension(top, g)
        key = (w_space, frozenset(int(i) for i in m_idxs))
        if key in seen:
            continue
        gens = [top.from_vpart(below.identity, row) for row in w_space.basis]
        gens += [top.section(below.elements()[int(i)]) for i in m_idxs if i != 0]
        size = level.p ** w_space.dim * len(m_idxs)
        m_set = frozenset(int(i) for i in m_idxs)

        def member(e, w_space=w_space, m_set=m_set):
            return (below.index_of(e.lower) in m_set
                    and w_space.contains(top.vpart(e)))

        norm = 0
        for x in top.elements():
            xi = x.inverse()
            if all(member(x * h * xi) for h in gens):
                norm += 1
        seen[key] = SubgroupData(tuple(gens), (), size, norm,
                                 label=f"ncl-of-level-{k - 1}-element")
    return list(seen.values())


def _fixed_space_checks(state: TowerState, res, prefix: str,
                        relaxed_used: bool) -> list:
    """One pass over the cyclic subgroups of the base, emitting both the
    margin-based and the epsilon-based fixed-space bounds.

    The margin bound is guaranteed by the construction whenever delta > 0,
    so violating it is a genuine failure; the epsilon bound is only claimed
    by strict-mode towers and degrades to not-guaranteed otherwise.
    """
    eps = state.config.epsilon
    v = res.module
    reps = cyclic_subgroup_reps(res.input.group)
    margin_ok, eps_ok = True, True
    witness = None
    for e, size in reps:
        dim = v.fixed_dim([e])
        if res.delta > 0 and Fraction(dim) > Fraction(v.live_dim) / (res.delta * size):
            margin_ok = False
            witness = {"subgroup_size": size, "fixed_dim": dim}
        if Fraction(dim) * (1 - eps) * size > Fraction(v.live_dim):
            eps_ok = False
            witness = {"subgroup_size": size, "fixed_dim": dim}
    eps_bad = NOT_GUARANTEED if relaxed_used else FAIL
    out = [CheckResult(f"{prefix}.fixed-bound-margin",
                       SAMPLED if margin_ok else FAIL,
                       f"dim V^K <= dim V/(delta|K|) over {len(reps)} cyclic subgroups",
                       witness=None if margin_ok else witness),
           CheckResult(f"{prefix}.fixed-bound-eps",
                       SAMPLED if eps_ok else eps_bad,
                       f"dim V^K <= dim V/((1-eps)|K|) over {len(reps)} cyclic subgroups",
                       witness=None if eps_ok else witness)]
    return out


def step(state: TowerState) -> Level:
    """Build one more level on top of the tower."""
    config = state.config
    k = state.depth
    if k + 1 > len(config.primes):
        raise FeasibilityStop("prime sequence exhausted")
    top = state.top
    if not top.is_enumerable(config.enum_cap):
        raise FeasibilityStop(
            f"|G_{k}| = {top.order} exceeds the enumeration cap {config.enum_cap}")
    field = PrimeField(config.primes[k])
    prefix = f"level{k + 1}"

    # words that outrun their budget, plus everything already frozen
    new_freezes = _scan_words(state)
    for w, order in new_freezes:
        if w in state.ledger:
            if state.ledger[w][0] != order:
                raise RuntimeError(
                    f"frozen order of {w} changed: {state.ledger[w][0]} -> {order}")
        else:
            state.ledger[w] = (order, k)
    words = tuple(sorted(state.ledger, key=lambda w: (len(w), w.letters)))

    hlist_used = config.force_hlist or hlist_gate(state.levels[-1].p, config.epsilon)
    subgroups = tuple(_hlist(state)) if hlist_used else ()

    inp = ForgeInput(top, tuple(top.generators), field, words, subgroups,
                     relaxed=config.relaxed)
    res = build_module(inp)

    margin_ok = res.delta > 1 - config.epsilon
    if not margin_ok and not config.relaxed:
        state.checks.append(CheckResult(
            f"{prefix}.margin", FAIL,
            f"delta = {res.delta} vs 1 - eps = {1 - config.epsilon}"))
        raise BuildError(
            f"delta = {res.delta} <= 1 - eps = {1 - config.epsilon} in strict mode")
    state.checks.append(CheckResult(
        f"{prefix}.margin", PASS if margin_ok else NOT_GUARANTEED,
        f"delta = {res.delta} vs 1 - eps = {1 - config.epsilon} "
        f"(r={len(words)}, s={len(subgroups)})"
        + ("" if margin_ok else "; gate bypassed in relaxed mode")))
    relaxed_used = not margin_ok

    state.checks.append(CheckResult(
        f"{prefix}.kernel-dim", PASS,
        f"dim ker = {res.rel.kernel_dim} = (d-1)|G|+1 with |G| = {top.order}"))

    bound = Fraction(config.d - 1) * top.order * (1 - config.epsilon)
    dim_ok = Fraction(res.dim) >= bound
    if not dim_ok and not config.relaxed:
        state.checks.append(CheckResult(
            f"{prefix}.dim-lower-bound", FAIL,
            f"dim V = {res.dim} >= (d-1)|G|(1-eps) = {bound}"))
        raise BuildError(f"dim V = {res.dim} below the strict bound {bound}")
    state.checks.append(CheckResult(
        f"{prefix}.dim-lower-bound", PASS if dim_ok else NOT_GUARANTEED,
        f"dim V = {res.dim} >= (d-1)|G|(1-eps) = {bound}"
        + ("" if dim_ok else "; gate bypassed in relaxed mode")))
    relaxed_used = relaxed_used or not dim_ok

    for c in verify_conclusions(res, check_fixed_bound=False, prefix=prefix):
        state.checks.append(c)
    state.checks.extend(_fixed_space_checks(state, res, prefix, relaxed_used))

    level = Level(k + 1, field, res.rel, res.module, res.gen_vecs,
                  res.section_vec, res.extension(), res.delta, len(words),
                  len(subgroups), hlist_used, relaxed_used)
    state.levels.append(level)

    # canonical projection compatibility on deterministic random words
    rng = random.Random(1000 + k)
    ok = True
    for _ in range(40):
        letters = [rng.choice([1, -1]) * rng.randint(1, config.d)
                   for _ in range(rng.randint(0, 8))]
        w = Word.make(letters)
        if state.pi(w, k + 1).lower != state.pi(w, k):
            ok = False
    state.checks.append(CheckResult(
        f"{prefix}.projection-compat", PASS if ok else FAIL,
        "q(pi_top(w)) = pi_below(w) on 40 pseudorandom words"))

    # the whole ledger keeps its frozen orders at the new top
    ok = True
    detail = []
    for w, (order, lvl) in sorted(state.ledger.items(),
                                  key=lambda kv: (len(kv[0]), kv[0].letters)):
        now = state.top.element_order(state.pi(w, k + 1))
        detail.append(f"{order}@{lvl}->{now}")
        if now != order:
            ok = False
    state.checks.append(CheckResult(
        f"{prefix}.order-stability", PASS if ok else FAIL,
        f"{len(state.ledger)} frozen words keep their orders"
        + (f" ({', '.join(detail)})" if detail else "")))

    size = (str(level.group.order) if level.group.order < 10 ** 12
            else f"{level.p}^{level.dim} * {top.order}")
    state.checks.append(CheckResult(
        f"{prefix}.split-structure", PASS,
        f"|G_{k + 1}| = {size} = {level.p}^{level.dim} * {top.order}"))
    return level


def torsion_shadow_check(state: TowerState) -> CheckResult:
    """Every short word has top-level order bounded by its budget or its
    frozen value, and dividing the tower exponent."""
    config = state.config
    top = state.top
    exp = top.exponent()
    ok = True
    worst = None
    words = enumerate_words(config.d, config.torsion_scan_len)
    for w in words:
        order = top.element_order(state.pi(w, state.depth))
        bound = max(config.budget.of(w), state.ledger.get(w, (0, 0))[0])
        if exp % order != 0 or order > bound:
            ok = False
            worst = {"word": list(w.letters), "order": order, "bound": bound}
    # an unfrozen word may legitimately outrun a test budget at the very top
    # level (the next step would freeze it); only conforming towers assert
    bad = FAIL if state.conforming() else NOT_GUARANTEED
    return CheckResult(
        "tower.torsion-shadow", PASS if ok else bad,
        f"{len(words)} words of length <= {config.torsion_scan_len}: order divides "
        f"{exp} and stays within budget/frozen bounds", witness=worst)


def betti_checks(state: TowerState) -> list:
    """The mod-p homology ratio dim V_{k+1} / |G_k| against (d-1)(1-eps).

    The same ratio lower-bounds the rank gradient along the tower, since
    the kernel of the projection onto G_k surjects onto V_{k+1}.
    """
    config = state.config
    out = []
    threshold = Fraction(config.d - 1) * (1 - config.epsilon)
    for lv in state.levels[1:]:
        below = state.group(lv.index - 1)
        ratio = Fraction(lv.dim, below.order)
        ok = ratio >= threshold
        bad = NOT_GUARANTEED if lv.relaxed_used else FAIL
        out.append(CheckResult(
            f"tower.betti-ratio.level{lv.index}",
            PASS if ok else bad,
            f"dim V_{lv.index}/|G_{lv.index - 1}| = {ratio} >= (d-1)(1-eps) = "
            f"{threshold}; rank-gradient lower bound d(N)/[G:N] >= {ratio}"))
    return out


def build(config: TowerConfig) -> tuple:
    """Drive a tower to the configured depth or the feasibility boundary."""
    state = init_tower(config)
    while state.depth < config.depth:
        try:
            step(state)
        except FeasibilityStop as stop:
            state.truncated = True
            state.checks.append(CheckResult(
                "tower.truncated", PASS, f"stopped early: {stop}"))
            break
    if state.depth >= 2:
        state.checks.append(torsion_shadow_check(state))
    state.checks.extend(betti_checks(state))
    cert = Certificate(meta={
        "tool": "jitower",
        "format": FORMAT_VERSION,
        "d": config.d,
        "primes": list(config.primes[:state.depth]),
        "epsilon": str(config.epsilon),
        "mode": config.mode,
        "conforming": state.conforming(),
        "depth": state.depth,
        "truncated": state.truncated,
        "orders": [state.group(k).order if state.group(k).order < 10 ** 18 else
                   f"{state.group(k).lower.order}*{state.levels[k-1].p}^{state.levels[k-1].dim}"
                   for k in range(state.depth + 1)],
    }, checks=list(state.checks))
    return state, cert


# serialization


def _vec_str(vec: np.ndarray, p: int) -> str:
    if p > len(DIGITS):
        raise ValueError(f"serialization supports p <= {len(DIGITS)}, got {p}")
    return "".join(DIGITS[int(x)] for x in vec)


def _vec_parse(s: str, p: int, n: int) -> np.ndarray:
    if len(s) != n:
        raise LoadError(f"vector of length {len(s)}, expected {n}")
    try:
        out = np.array([DIGITS.index(c) for c in s], dtype=np.int64)
    except ValueError as exc:
        raise LoadError(f"bad digit in vector: {exc}") from None
    if np.any(out >= p):
        raise LoadError(f"digit out of range for base {p}")
    return out


def save_tower(state: TowerState, path):
    lines = serialize_tower(state)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def serialize_tower(state: TowerState) -> list:
    config = state.config
    lines = [f"{MAGIC} {FORMAT_VERSION}"]
    lines.append(f"d {config.d}")
    lines.append(f"epsilon {config.epsilon.numerator}/{config.epsilon.denominator}")
    lines.append("primes " + " ".join(str(p) for p in config.primes))
    lines.append(f"budget {config.budget.scale} {config.budget.base}")
    lines.append(f"mode {config.mode}")
    lines.append(f"force_hlist {int(config.force_hlist)}")
    lines.append(f"test_budget {int(config.test_budget)}")
    lines.append(f"enum_cap {config.enum_cap}")
    lines.append(f"submodule_guard {config.submodule_guard}")
    lines.append(f"scan_cap {config.scan_cap}")
    lines.append(f"torsion_scan_len {config.torsion_scan_len}")
    lines.append(f"depth {config.depth}")
    lines.append(f"truncated {int(state.truncated)}")
    if state.seed.order == 1:
        lines.append("seed trivial")
    else:
        lines.append(f"seed table {state.seed.order}")
        for row in state.seed.table:
            lines.append("row " + " ".join(str(int(x)) for x in row))
        lines.append("seedgens " + " ".join(str(g) for g in state.seed._gen_idx))
    lines.append(f"ledger {len(state.ledger)}")
    for w, (order, lvl) in sorted(state.ledger.items(),
                                  key=lambda kv: (len(kv[0]), kv[0].letters)):
        letters = " ".join(str(x) for x in w.letters) if w.letters else "-"
        lines.append(f"frozen {order} {lvl} {letters}")
    lines.append(f"levels {state.depth}")
    for lv in state.levels:
        p = lv.p
        lines.append(f"level {lv.index}")
        lines.append(f"prime {p}")
        lines.append(f"ambient {lv.module.ambient_dim}")
        lines.append(f"sdim {lv.module.killed.dim}")
        lines.append(f"vdim {lv.dim}")
        lines.append(f"r {lv.r}")
        lines.append(f"s {lv.s}")
        lines.append(f"delta {lv.delta.numerator}/{lv.delta.denominator}")
        lines.append(f"hlist {int(lv.hlist_used)}")
        lines.append(f"relaxed {int(lv.relaxed_used)}")
        for row in lv.module.killed.basis:
            lines.append("srow " + _vec_str(row, p))
        for row in lv.gen_vecs:
            lines.append("gen " + _vec_str(row, p))
        lines.append("section " + _vec_str(lv.section_vec, p))
    lines.append("end")
    return lines


class _Reader:
    def __init__(self, lines):
        self.lines = lines
        self.pos = 0

    def next(self, key: str | None = None) -> list:
        if self.pos >= len(self.lines):
            raise LoadError("unexpected end of file")
        parts = self.lines[self.pos].split()
        self.pos += 1
        if key is not None and (not parts or parts[0] != key):
            raise LoadError(f"expected {key!r} at line {self.pos}")
        return parts


def load_tower(path) -> TowerState:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    rd = _Reader(lines)
    head = rd.next(MAGIC)
    if len(head) != 2 or head[1] != str(FORMAT_VERSION):
        raise LoadError(f"unsupported format version in header {head}")
    try:
        d = int(rd.next("d")[1])
        num, den = rd.next("epsilon")[1].split("/")
        epsilon = Fraction(int(num), int(den))
        primes = tuple(int(x) for x in rd.next("primes")[1:])
        ba, bb = (int(x) for x in rd.next("budget")[1:])
        mode = rd.next("mode")[1]
        force_hlist = bool(int(rd.next("force_hlist")[1]))
        test_budget = bool(int(rd.next("test_budget")[1]))
        enum_cap = int(rd.next("enum_cap")[1])
        submodule_guard = int(rd.next("submodule_guard")[1])
        scan_cap = int(rd.next("scan_cap")[1])
        torsion_scan_len = int(rd.next("torsion_scan_len")[1])
        depth = int(rd.next("depth")[1])
        truncated = bool(int(rd.next("truncated")[1]))
    except (ValueError, IndexError) as exc:
        raise LoadError(f"malformed header: {exc}") from None

    seed_line = rd.next("seed")
    if seed_line[1] == "trivial":
        seed = TableGroup.trivial(d)
    elif seed_line[1] == "table":
        n = int(seed_line[2])
        rows = [[int(x) for x in rd.next("row")[1:]] for _ in range(n)]
        gens = tuple(int(x) for x in rd.next("seedgens")[1:])
        try:
            seed = TableGroup(np.array(rows, dtype=np.int64), gens=gens, name="seed")
        except ValueError as exc:
            raise LoadError(f"bad seed table: {exc}") from None
    else:
        raise LoadError(f"unknown seed kind {seed_line[1]!r}")

    config = TowerConfig(d=d, primes=primes, epsilon=epsilon,
                         budget=OrderBudget(ba, bb), depth=depth,
                         seed_path=None, mode=mode, force_hlist=force_hlist,
                         test_budget=test_budget, enum_cap=enum_cap,
                         submodule_guard=submodule_guard, scan_cap=scan_cap,
                         torsion_scan_len=torsion_scan_len)
    try:
        config.validate(seed)
    except ValueError as exc:
        raise LoadError(f"invalid configuration: {exc}") from None
    state = TowerState(config, seed, truncated=truncated)
    state.seed = seed

    n_ledger = int(rd.next("ledger")[1])
    for _ in range(n_ledger):
        parts = rd.next("frozen")
        order, lvl = int(parts[1]), int(parts[2])
        letters = [] if parts[3] == "-" else [int(x) for x in parts[3:]]
        state.ledger[Word.make(letters, rank=d)] = (order, lvl)

    n_levels = int(rd.next("levels")[1])
    if not 1 <= n_levels <= len(primes):
        raise LoadError(f"level count {n_levels} out of range")
    for li in range(1, n_levels + 1):
        state.levels.append(_load_level(rd, state, li))

    if rd.next()[0] != "end":
        raise LoadError("missing end marker")

    # frozen orders must hold at the top of the loaded tower
    for w, (order, _) in state.ledger.items():
        now = state.top.element_order(state.pi(w, state.depth))
        if now != order:
            raise LoadError(
                f"ledger violation: {w} has order {now}, frozen as {order}")
    return state


def _load_level(rd: _Reader, state: TowerState, li: int) -> Level:
    config = state.config
    if int(rd.next("level")[1]) != li:
        raise LoadError(f"levels out of order at {li}")
    p = int(rd.next("prime")[1])
    if p != config.primes[li - 1]:
        raise LoadError(f"level {li} prime {p} != configured {config.primes[li - 1]}")
    field = PrimeField(p)
    ambient = int(rd.next("ambient")[1])
    sdim = int(rd.next("sdim")[1])
    vdim = int(rd.next("vdim")[1])
    r = int(rd.next("r")[1])
    s = int(rd.next("s")[1])
    num, den = rd.next("delta")[1].split("/")
    delta = Fraction(int(num), int(den))
    hlist_used = bool(int(rd.next("hlist")[1]))
    relaxed_used = bool(int(rd.next("relaxed")[1]))

    below = state.group(li - 1)
    if ambient != config.d * below.order:
        raise LoadError(f"level {li} ambient {ambient} != d*|G| = "
                        f"{config.d * below.order}")
    srows = np.array([_vec_parse(rd.next("srow")[1], p, ambient)
                      for _ in range(sdim)], dtype=np.int64).reshape(sdim, ambient)
    gen_vecs = np.array([_vec_parse(rd.next("gen")[1], p, ambient)
                         for _ in range(config.d)], dtype=np.int64)
    section_vec = _vec_parse(rd.next("section")[1], p, ambient)

    killed = Subspace.span(field, ambient, srows)
    if killed.dim != sdim or not np.array_equal(killed.basis, srows):
        raise LoadError(f"level {li}: stored basis is not in canonical reduced form")

    if li == 1 and state.seed.order > 1:
        expected = GModule.trivial(field, state.seed, config.d)
        if expected.killed != killed:
            raise LoadError("level 1: killed subspace does not match the "
                            "trivial-action convention for a nontrivial seed")
        module, rel = expected, None
        want = module.killed.reduce(np.eye(config.d * state.seed.order,
                                           dtype=np.int64)[
            [j * state.seed.order for j in range(config.d)]])
        if not np.array_equal(gen_vecs, want):
            raise LoadError("level 1: generator decorations are not canonical")
        if np.any(section_vec):
            raise LoadError("level 1: section vector must vanish")
    else:
        try:
            rel = relation_module(below, below.generators, field)
        except ValueError as exc:
            raise LoadError(f"level {li}: {exc}") from None
        for row in srows:
            if np.any(rel.derivation(row)):
                raise LoadError(
                    f"level {li}: stored killed row is outside the boundary kernel")
        try:
            module = rel.module.quotient(killed)
        except ValueError as exc:
            raise LoadError(f"level {li}: killed subspace invalid: {exc}") from None
        if not np.array_equal(module.killed.reduce(gen_vecs), gen_vecs):
            raise LoadError(f"level {li}: generator decorations are not reduced")
        for i, g in enumerate(below.generators):
            if not np.array_equal(rel.derivation(gen_vecs[i]), rel.element_delta(g)):
                raise LoadError(
                    f"level {li}: generator decoration {i} breaks the derivation "
                    "identity")
        want = np.zeros(below.order, dtype=np.int64) + 1
        want[0] = (1 - below.order) % p
        if not np.array_equal(rel.derivation(section_vec), want % p):
            raise LoadError(f"level {li}: section vector fails its boundary identity")
    if module.live_dim != vdim:
        raise LoadError(f"level {li}: stored vdim {vdim} != computed "
                        f"{module.live_dim}")
    group = ExtensionGroup(module, gen_vecs=gen_vecs,
                           gen_lowers=below.generators,
                           section_vec=section_vec, name=f"level{li}")
    return Level(li, field, rel, module, gen_vecs, section_vec, group,
                 delta, r, s, hlist_used, relaxed_used)
