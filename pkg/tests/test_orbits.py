import random

import pytest

from fsiegel.errors import ResourceLimitError, VerificationFailure
from fsiegel.symplectic import TAG_SP_0, TAG_SP_F, GroupElement, enumerate_symplectic, generators, group_order, make_space
from fsiegel.lagrangian import enumerate_lagrangians, l_minus, l_plus, strata
from fsiegel.orbits import (
    act,
    apply_word,
    orbit,
    partition,
    stabilizer_elements,
    stabilizer_order,
)
from fsiegel.cayley import v_k


def test_act_examples():
    sp = make_space(3, 1)
    assert act(GroupElement(sp.identity, TAG_SP_F), l_plus(sp)) == l_plus(sp)
    assert act(sp.j, l_plus(sp)) == l_minus(sp)


def test_act_group_law_randomized():
    sp = make_space(3, 2)
    rng = random.Random(6)
    gens = generators(sp, TAG_SP_F)
    pts = enumerate_lagrangians(3, 2)
    for _ in range(50):
        g = gens[rng.randrange(len(gens))]
        w = pts[rng.randrange(len(pts))]
        assert act(g, act(g.inverse(), w)) == w


def test_orbit_partition_sizes_3_1():
    sp = make_space(3, 1)
    pts = enumerate_lagrangians(3, 1)
    pf = partition(pts, generators(sp, TAG_SP_F), invariant="h_rank")
    assert sorted(pf.sizes()) == [4, 6]
    by_label = {lab.h_rank: orb.size for orb, lab in zip(pf.orbits, pf.labels)}
    assert by_label == {0: 4, 1: 6}
    assert not pf.conflicts

    p0 = partition(pts, generators(sp, TAG_SP_0), invariant="o_type")
    assert sorted(p0.sizes()) == [4, 6]
    by_label = {lab.o_type: orb.size for orb, lab in zip(p0.orbits, p0.labels)}
    assert by_label == {0: 4, 1: 6}
    assert not p0.conflicts


def test_partition_single_fixed_point():
    sp = make_space(3, 1)
    eye = GroupElement(sp.identity, TAG_SP_F)
    rep = partition([l_plus(sp)], [eye])
    assert len(rep.orbits) == 1 and rep.orbits[0].size == 1


def test_partition_is_schedule_independent():
    sp = make_space(3, 2)
    pts = enumerate_lagrangians(3, 2)
    gens = generators(sp, TAG_SP_F)
    a = partition(pts, gens, invariant="h_rank")
    b = partition(pts, list(reversed(gens)), invariant="h_rank")
    assert a.as_sets() == b.as_sets()
    assert [o.representative for o in a.orbits] == [o.representative for o in b.orbits]


def test_orbit_representative_is_minimum():
    sp = make_space(3, 1)
    pts = enumerate_lagrangians(3, 1)
    pf = partition(pts, generators(sp, TAG_SP_F))
    for orb in pf.orbits:
        assert orb.representative == min(orb.members)


def test_transporter_words():
    sp = make_space(3, 2)
    gens = generators(sp, TAG_SP_0)
    rec = orbit(l_plus(sp), gens)
    rng = random.Random(12)
    members = rec.members
    for _ in range(25):
        w = members[rng.randrange(len(members))]
        assert apply_word(rec.transporters[w.key], rec.representative, gens) == w


def test_orbit_cap():
    sp = make_space(3, 2)
    with pytest.raises(ResourceLimitError):
        orbit(l_plus(sp), generators(sp, TAG_SP_0), cap=10)


def test_stabilizer_order_arithmetic():
    assert stabilizer_order(24, 6) == 4
    assert stabilizer_order(24, 4) == 6
    with pytest.raises(VerificationFailure):
        stabilizer_order(24, 5)


def test_stabilizer_examples_3_1():
    sp = make_space(3, 1)
    g0 = enumerate_symplectic(sp, TAG_SP_0, 1000)
    stab = stabilizer_elements(l_plus(sp), g0)
    assert len(stab) == 4  # norm-one circle
    orb = orbit(l_plus(sp), generators(sp, TAG_SP_0))
    assert orb.size == 6
    assert stabilizer_order(len(g0), orb.size) == len(stab)

    vk1 = v_k(sp, 1)
    stab1 = stabilizer_elements(vk1, g0)
    assert len(stab1) == 6
    assert orbit(vk1, generators(sp, TAG_SP_0)).size == 4


def test_stabilizer_filter_matches_generic_path():
    sp = make_space(3, 1)
    g0 = enumerate_symplectic(sp, TAG_SP_0, 1000)
    point = v_k(sp, 1)
    fast = {g.mat.key() for g in stabilizer_elements(point, g0)}
    slow = {g.mat.key() for g in stabilizer_elements(point, g0.elements())}
    assert fast == slow


def test_whole_group_fixes_point_edge():
    sp = make_space(3, 1)
    eye = GroupElement(sp.identity, TAG_SP_F)
    grp = [eye]
    assert len(stabilizer_elements(l_plus(sp), grp)) == 1


@pytest.mark.parametrize("q,n", [(3, 1), (3, 2)])
def test_orbit_stabilizer_consistency(q, n):
    sp = make_space(q, n)
    g0 = enumerate_symplectic(sp, TAG_SP_0, 10**5)
    _, o_str = strata(q, n)
    for k in range(n + 1):
        point = v_k(sp, k)
        stab = stabilizer_elements(point, g0)
        orb = orbit(point, generators(sp, TAG_SP_0))
        assert len(stab) * orb.size == group_order(TAG_SP_0, q, n)
        assert orb.size == len(o_str[n - k])
