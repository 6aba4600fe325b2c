"""Relation modules realized as boundary-map kernels inside F_p[G]^d.

For a finite group G generated by t_1, ..., t_d and a prime p coprime to
|G|, the boundary map sends the ambient basis vector (i, h) to
h*t_i - h in F_p[G].  Its kernel is the relation module of the
presentation x_i -> t_i; its dimension is (d-1)|G| + 1 and, by Gaschuetz's
classical decomposition, the fixed space of any subgroup H has dimension
(d-1)|G:H| + 1.

Elements of the free group embed multiplicatively into pairs
(fox vector, image): the vector of evaluated Fox derivatives satisfies the
derivation identity  boundary(vector) = image - 1, and pairs multiply by
(a, g)(b, h) = (a + g.b, gh).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gmodule import GModule
from .groups import CapExceeded, GroupHandle, closure_indices
from .linalg import PrimeField, kernel_basis
from .words import Word, fox_vector

__all__ = [
    "RelationModule",
    "relation_module",
    "boundary_matrix",
    "magnus_pair",
    "magnus_product",
    "relator_power_image",
    "gaschuetz_check",
]


@dataclass
class RelationModule:
    """The kernel of the boundary map, presented as the live part of a GModule."""

    module: GModule
    boundary: np.ndarray
    group: GroupHandle
    gens: tuple
    field: PrimeField

    @property
    def d(self) -> int:
        return len(self.gens)

    @property
    def kernel_dim(self) -> int:
        return self.module.live_dim

    def derivation(self, vec) -> np.ndarray:
        """boundary @ vec, an element of F_p[G] in coordinate form."""
        return self.boundary @ (np.asarray(vec, dtype=np.int64) % self.field.p) \
            % self.field.p

    def element_delta(self, g) -> np.ndarray:
        """The coordinate vector of g - 1 in F_p[G]."""
        out = np.zeros(self.group.order, dtype=np.int64)
        out[self.group.index_of(g)] += 1
        out[0] -= 1
        return out % self.field.p


def boundary_matrix(group: GroupHandle, gen_idxs, p: int) -> np.ndarray:
    """The |G| x d|G| boundary matrix sending column (i, h) to h*t_i - h."""
    n = group.order
    table = group.mult_table()
    d = len(gen_idxs)
    b = np.zeros((n, d * n), dtype=np.int64)
    rows = np.arange(n)
    for i, t in enumerate(gen_idxs):
        cols = i * n + rows
        b[table[:, t], cols] = (b[table[:, t], cols] + 1) % p
        b[rows, cols] = (b[rows, cols] - 1) % p
    return b


def relation_module(group: GroupHandle, gens, field: PrimeField,
                    check: bool = True) -> RelationModule:
    """Build the relation module for the given generating tuple.

    Requires p coprime to |G| and that the tuple generates; both are
    checked.  The returned module has nothing killed yet, and its live
    subspace is exactly the boundary kernel.
    """
    if isinstance(field, int):
        field = PrimeField(field)
    if group.order % field.p == 0:
        raise ValueError(f"prime {field.p} divides the group order {group.order}")
    gens = tuple(gens)
    gen_idxs = [group.index_of(g) for g in gens]
    if check:
        reach = closure_indices(group.mult_table(), gen_idxs)
        if reach.size != group.order:
            raise ValueError("the tuple does not generate the group")
    b = boundary_matrix(group, gen_idxs, field.p)
    kernel = kernel_basis(b, field)
    module = GModule(field, group, len(gens), live=kernel, check=check)
    expected = (len(gens) - 1) * group.order + 1
    if module.live_dim != expected:
        raise RuntimeError(
            f"kernel dimension {module.live_dim} != expected {expected}")
    return RelationModule(module, b, group, gens, field)


def magnus_pair(word: Word, rel: RelationModule):
    """The multiplicative pair (fox vector, image) of a free word.

    Satisfies rel.derivation(vec) == image - 1, and magnus_pair(u*v) equals
    magnus_product(rel, magnus_pair(u), magnus_pair(v)).
    """
    sums, value = fox_vector(word, rel.gens, rel.group.identity, rel.field.p)
    n = rel.group.order
    vec = np.zeros(rel.module.ambient_dim, dtype=np.int64)
    for i, s in enumerate(sums):
        for g, c in s.terms.items():
            vec[i * n + rel.group.index_of(g)] = c
    return vec, value


def magnus_product(rel: RelationModule, a, b):
    """(a_vec + a_g . b_vec, a_g * b_g); the pair multiplication."""
    vec = (a[0] + rel.module.act_raw(a[1], b[0])) % rel.field.p
    return vec, a[1] * b[1]


def gaschuetz_check(rel: RelationModule, subgroup_sets=None) -> list:
    """Fixed-space dimensions against (d-1)|G:H| + 1, one check per subgroup.

    ``subgroup_sets`` is an iterable of element-index collections; when
    omitted the full subgroup lattice is enumerated (small groups only).
    Also records the kernel-dimension identity itself.
    """
    from .certificate import CheckResult, FAIL, PASS
    group, d = rel.group, rel.d
    if subgroup_sets is None:
        subgroup_sets = group.all_subgroups()
    expected_kernel = (d - 1) * group.order + 1
    out = [CheckResult(
        "relmod.kernel-dim",
        PASS if rel.kernel_dim == expected_kernel else FAIL,
        f"dim ker = {rel.kernel_dim}, (d-1)|G|+1 = {expected_kernel}")]
    for sub in subgroup_sets:
        idxs = sorted(int(i) for i in sub)
        elements = [group.element(i) for i in idxs] \
            if hasattr(group, "element") else [group.elements()[i] for i in idxs]
        dim = rel.module.fixed_dim(elements)
        want = (d - 1) * (group.order // len(idxs)) + 1
        out.append(CheckResult(
            f"relmod.fixed-dim.H{len(idxs)}." + "-".join(map(str, idxs[:6])),
            PASS if dim == want else FAIL,
            f"dim of the fixed space = {dim}, (d-1)|G:H|+1 = {want}"))
    return out


def relator_power_image(word: Word, rel: RelationModule,
                        order_cap: int | None = None) -> np.ndarray:
    """The fox vector of word**k where k = ord(image of word).

    The result always lies in the boundary kernel.  Computed as the orbit
    sum (1 + g + ... + g^(k-1)) applied to the fox vector of the word,
    which is the same element with k group operations instead of k word
    expansions.
    """
    vec, g = magnus_pair(word, rel)
    k = rel.group.element_order(g, order_cap)
    if k is None:
        raise CapExceeded(f"order of the word image exceeds the cap {order_cap}")
    acc = vec.copy()
    cur = vec
    gi = rel.group.index_of(g)
    for _ in range(k - 1):
        cur = rel.module.act_raw(gi, cur)
        acc = (acc + cur) % rel.field.p
    return acc
