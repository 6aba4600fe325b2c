"""Build level modules from relation modules and verify their advertised properties.

Given a finite group G with d generators, a coprime prime p, a list of
free words and a list of subgroups, this layer computes the exact margin

    delta = 1 - sum_i 1/(ord(w_i)(d-1)) - sum_j |G| / (|H_j| |N_G(H_j)|),

kills the span of every relator power image, the span of every H_j-fixed
space, and the canonical trivial line (the norm vector of copy 0), and
returns the quotient of the relation module.  The surviving module V has
dim V >= (d-1)|G|*delta, carries lifted generators (e_i, t_i), and admits
the order-preservation, fixed-space-vanishing and fixed-space-bound checks
that ``verify_conclusions`` re-derives numerically.

The trivial line is killed in every branch, not only when both lists are
empty: the fixed-space bound needs the killed space to contain a G-fixed
vector, and with words whose exponent sums all vanish mod p the relator
spans alone may miss one.  The dimension bound is unaffected because the
relation module has (d-1)|G| + 1 dimensions to start with.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .certificate import CheckResult, FAIL, PASS, SAMPLED, SKIPPED
from .extension import ExtensionGroup
from .gmodule import GModule
from .groups import GroupHandle, normalizer_indices, word_image
from .linalg import PrimeField, Subspace, solve_batch
from .relmod import RelationModule, relation_module, relator_power_image

__all__ = [
    "BuildError",
    "ForgeInput",
    "ForgeResult",
    "SubgroupData",
    "compute_delta",
    "build_module",
    "splitting_vector",
    "verify_conclusions",
    "cyclic_subgroup_reps",
]


class BuildError(RuntimeError):
    """The margin delta was not positive and relaxed mode was off."""


@dataclass
class SubgroupData:
    """A subgroup of the base group with the sizes the margin formula needs."""

    generators: tuple
    indices: tuple
    size: int
    normalizer_size: int
    label: str = ""

    @classmethod
    def from_elements(cls, group: GroupHandle, elements, label: str = ""):
        idxs = group.subgroup_closure(elements)
        sub = np.asarray(idxs, dtype=np.int64)
        nn = normalizer_indices(group.mult_table(), group.inverse_table(), sub)
        return cls(tuple(elements), idxs, len(idxs), int(nn.size), label)


@dataclass
class ForgeInput:
    group: GroupHandle
    gens: tuple
    field: PrimeField
    words: tuple = ()
    subgroups: tuple = ()          # SubgroupData entries
    relaxed: bool = False

    @property
    def d(self) -> int:
        return len(self.gens)


@dataclass
class ForgeResult:
    input: ForgeInput
    rel: RelationModule
    module: GModule                # the surviving quotient module V
    delta: Fraction
    word_orders: tuple
    gen_vecs: np.ndarray           # d ambient vectors, reduced mod killed
    section_vec: np.ndarray        # A with section(g) = ((1-g)A/|G|, g)
    checks: list = field(default_factory=list)
    _extension: ExtensionGroup | None = None

    @property
    def dim(self) -> int:
        return self.module.live_dim

    def extension(self) -> ExtensionGroup:
        """The group V ⋊ G with the lifted generators (e_i, t_i)."""
        if self._extension is None:
            self._extension = ExtensionGroup(
                self.module, gen_vecs=self.gen_vecs, gen_lowers=self.input.gens,
                section_vec=self.section_vec, check=False)
        return self._extension


def compute_delta(group: GroupHandle, d: int, word_orders, subgroups) -> Fraction:
    """The exact rational margin; empty lists give 1."""
    delta = Fraction(1)
    for o in word_orders:
        delta -= Fraction(1, o * (d - 1))
    for h in subgroups:
        delta -= Fraction(group.order, h.size * h.normalizer_size)
    return delta


def splitting_vector(rel: RelationModule) -> np.ndarray:
    """A = sum over h of a particular solution of  boundary(a) = h - 1.

    Then (1-g)A/|G| solves the same equation for g, and the induced section
    g -> ((1-g)A/|G|, g) is a homomorphism on the nose.
    """
    n = rel.group.order
    targets = np.zeros((n, n), dtype=np.int64)
    targets[np.arange(n), np.arange(n)] += 1
    targets[0] -= 1
    sols = solve_batch(rel.boundary, targets % rel.field.p, rel.field.p)
    return sols.sum(axis=1) % rel.field.p


def build_module(inp: ForgeInput) -> ForgeResult:
    """Run one forging step; raises BuildError when delta <= 0 in strict use."""
    rel = relation_module(inp.group, inp.gens, inp.field)
    module = rel.module
    word_orders = []
    for w in inp.words:
        g = word_image(w, inp.gens, inp.group.identity)
        word_orders.append(inp.group.element_order(g))
    delta = compute_delta(inp.group, inp.d, word_orders, inp.subgroups)
    if delta <= 0 and not inp.relaxed:
        raise BuildError(f"margin delta = {delta} is not positive")

    killed_rows = [module.norm_vector(0)]
    for w in inp.words:
        u = relator_power_image(w, rel)
        span = module.g_span(u.reshape(1, -1))
        killed_rows.append(span.basis)
    for h in inp.subgroups:
        fixed = module.invariants(h.generators)
        span = module.g_span(fixed.basis)
        killed_rows.append(span.basis)
    killed = Subspace.span(inp.field, module.ambient_dim, np.vstack(
        [np.atleast_2d(r) for r in killed_rows]))
    quotient = module.quotient(killed)

    n = inp.group.order
    gen_vecs = np.zeros((inp.d, module.ambient_dim), dtype=np.int64)
    for i in range(inp.d):
        gen_vecs[i, i * n] = 1
    gen_vecs = quotient.killed.reduce(gen_vecs)

    result = ForgeResult(inp, rel, quotient, delta, tuple(word_orders),
                         gen_vecs, splitting_vector(rel))
    bound = Fraction(inp.d - 1) * inp.group.order * delta
    result.checks.append(CheckResult(
        "forge.dim-bound",
        PASS if Fraction(quotient.live_dim) >= bound else FAIL,
        f"dim V = {quotient.live_dim} >= (d-1)|G|*delta = {bound}"))
    return result


def cyclic_subgroup_reps(group: GroupHandle) -> list:
    """One generator per distinct cyclic subgroup, identity subgroup included."""
    seen = set()
    reps = []
    elements = group.elements()
    for e in elements:
        idxs = frozenset(group.subgroup_closure([e]))
        if idxs not in seen:
            seen.add(idxs)
            reps.append((e, len(idxs)))
    return reps


def verify_conclusions(result: ForgeResult, extra_subgroups=(),
                       exhaustive_limit: int = 1000,
                       check_fixed_bound: bool = True,
                       prefix: str = "forge") -> list:
    """Re-derive every advertised conclusion numerically.

    Orders of the listed words are recomputed in the extension; the fixed
    space of every listed subgroup is recomputed on V; the fixed-space
    bound is checked for every cyclic subgroup of the base group plus any
    supplied extras (and is labelled as sampled, since the full subgroup
    lattice is out of reach in general).  The section is checked to be a
    homomorphism, exhaustively for small base groups.
    """
    inp = result.input
    checks = []
    v = result.module

    # generator decorations satisfy the derivation identity
    ok = True
    for i, g in enumerate(inp.gens):
        want = result.rel.element_delta(g)
        # any representative of the reduced coset has the same boundary image
        if not np.array_equal(result.rel.derivation(result.gen_vecs[i]), want):
            ok = False
    checks.append(CheckResult(f"{prefix}.generator-derivation",
                              PASS if ok else FAIL,
                              "boundary(e_i) = t_i - 1 for every lifted generator"))

    ext = result.extension()
    if inp.words:
        ok = True
        details = []
        for w, o in zip(inp.words, result.word_orders):
            lifted = word_image(w, ext.generators, ext.identity)
            lo = ext.element_order(lifted)
            details.append(f"{o}->{lo}")
            if lo != o:
                ok = False
        checks.append(CheckResult(f"{prefix}.orders-preserved",
                                  PASS if ok else FAIL,
                                  f"word orders in V:G vs G: {', '.join(details)}"))

    if inp.subgroups:
        ok = True
        dims = []
        for h in inp.subgroups:
            dim = v.invariants(h.generators).dim
            dims.append(dim)
            if dim != 0:
                ok = False
        checks.append(CheckResult(f"{prefix}.fixed-vanish",
                                  PASS if ok else FAIL,
                                  f"fixed-space dims on V: {dims}"))

    if check_fixed_bound:
        if result.delta > 0:
            ok = True
            worst = None
            subs = [((e,), size) for e, size in cyclic_subgroup_reps(inp.group)]
            for extra in extra_subgroups:
                data = SubgroupData.from_elements(inp.group, extra)
                subs.append((data.generators, data.size))
            for gens, size in subs:
                dim = v.fixed_dim(gens)
                # dim V^K <= dim V / (delta |K|), exactly
                if Fraction(dim) > Fraction(v.live_dim, 1) / (result.delta * size):
                    ok = False
                    worst = {"subgroup_size": size, "fixed_dim": dim}
            checks.append(CheckResult(
                f"{prefix}.fixed-bound-margin", SAMPLED if ok else FAIL,
                f"dim V^K <= dim V/(delta*|K|) over {len(subs)} sampled subgroups",
                witness=worst))
        else:
            checks.append(CheckResult(f"{prefix}.fixed-bound-margin", SKIPPED,
                                      "margin delta <= 0, bound not applicable"))

    # section homomorphism
    n = inp.group.order
    if n <= exhaustive_limit:
        lt = inp.group.mult_table()
        sec = ext._sections
        ok = True
        for g in range(n):
            lhs = v.killed.reduce(sec[g] + v.act_raw(g, sec))
            if not np.array_equal(lhs, sec[lt[g]]):
                ok = False
                break
        label, count = "exhaustive", n * n
    else:
        rng = random.Random(7)
        pairs = [(inp.group.random_element(rng), inp.group.random_element(rng))
                 for _ in range(200)]
        ok = all(ext.section(a) * ext.section(b) == ext.section(a * b)
                 for a, b in pairs)
        label, count = "sampled", len(pairs)
    checks.append(CheckResult(
        f"{prefix}.section-homomorphism",
        (PASS if label == "exhaustive" else SAMPLED) if ok else FAIL,
        f"section multiplicativity over {count} pairs ({label})"))

    result.checks.extend(checks)
    return checks
