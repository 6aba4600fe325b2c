import pytest

from jitower.groups import TableGroup
from jitower.tower import TowerConfig, build
from jitower.words import OrderBudget


def c2():
    return TableGroup.cyclic(2, gens=(1, 1))


def c3():
    return TableGroup.cyclic(3, gens=(1, 1))


def c4():
    return TableGroup.cyclic(4, gens=(1, 1))


def c5():
    return TableGroup.cyclic(5, gens=(1, 1))


def c7():
    return TableGroup.cyclic(7, gens=(1, 1))


def c22():
    g = TableGroup.direct_product(TableGroup.cyclic(2), TableGroup.cyclic(2))
    return TableGroup(g.table, gens=(2, 1), name="C2xC2")


def c6():
    g = TableGroup.direct_product(TableGroup.cyclic(2), TableGroup.cyclic(3))
    # (1,1) has order 6 and sits at index 1*3+1 = 4
    return TableGroup(g.table, gens=(4, 4), name="C6")


def s3():
    return TableGroup.symmetric(3)


@pytest.fixture(scope="session")
def default_tower():
    """The stock tower: d=2, primes (2,3,5), eps=1/10, budget (16,8), depth 3."""
    return build(TowerConfig())


@pytest.fixture(scope="session")
def budget_tower():
    """Aggressive test budget o(w) = 4^len: exercises the freezing path."""
    cfg = TowerConfig(budget=OrderBudget(1, 4), test_budget=True, mode="relaxed")
    return build(cfg)


@pytest.fixture(scope="session")
def forced_hlist_tower():
    """Trivial seed with --force-hlist: the step onto the 324-element level
    feeds the three distinct closures of the nontrivial level-1 elements
    into the next module build (margin 5/6, so relaxed mode)."""
    cfg = TowerConfig(force_hlist=True, mode="relaxed")
    return build(cfg)


@pytest.fixture(scope="session")
def seeded_hlist_tower(tmp_path_factory):
    """Nontrivial seed C3 with a forced closure list; must run relaxed."""
    path = tmp_path_factory.mktemp("seed") / "c3.txt"
    TableGroup.cyclic(3, gens=(1, 1)).to_file(path)
    cfg = TowerConfig(primes=(2, 5), depth=2, seed_path=str(path),
                      force_hlist=True, mode="relaxed")
    return build(cfg)
