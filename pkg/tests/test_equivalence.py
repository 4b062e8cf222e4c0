import random
from itertools import product

import pytest

from dualmem.equivalence import (
    GroupElement,
    RawState,
    SymmetryGroup,
    canonical_element,
    canonicalize,
    orbit,
    remap_action,
)
from dualmem.gridsim import ActionSpace

from oracles import brute_orbit_classes

# NS and EW plus two phases fixed by every symmetry
SYMMETRIC = ActionSpace.from_names(["NS", "EW", "-", "NESW"])
SPLIT = ActionSpace.from_names(["N", "E", "S", "W"])


@pytest.fixture
def dihedral():
    return SymmetryGroup.dihedral(SYMMETRIC.served)


def test_dihedral_has_eight_elements(dihedral):
    assert len(dihedral) == 8
    assert dihedral.identity.perm == (0, 1, 2, 3)


def test_group_rejects_non_closed_phase_set():
    with pytest.raises(ValueError, match="not closed"):
        SymmetryGroup.dihedral([{0, 2}, {1}, {2}, {3}])


def test_group_rejects_missing_inverse():
    r1 = GroupElement("r1", (1, 2, 3, 0), (0,))
    ident = GroupElement("id", (0, 1, 2, 3), (0,))
    with pytest.raises(ValueError):
        SymmetryGroup([ident, r1])


def test_orbit_of_symmetric_state_is_singleton(dihedral):
    s = RawState((1, 1, 1, 1), 2)  # all-red phase
    assert orbit(s, dihedral) == {s}


def test_orbit_contains_rotations(dihedral):
    s = RawState((2, 0, 0, 0), 2)
    orb = orbit(s, dihedral)
    for bins in [(0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)]:
        assert RawState(bins, 2) in orb
    assert len(orb) == 4


def test_identity_group_orbit():
    g = SymmetryGroup.identity_group(4)
    s = RawState((2, 1, 0, 1), 3)
    assert orbit(s, g) == {s}
    assert canonicalize(s, g) == s


@pytest.mark.parametrize("served", [SYMMETRIC.served, SPLIT.served])
def test_orbit_size_divides_group_order(served):
    g = SymmetryGroup.dihedral(served)
    for bins in product(range(3), repeat=4):
        for p in range(len(served)):
            assert len(g) % len(orbit(RawState(bins, p), g)) == 0


def test_canonicalize_minimal_state(dihedral):
    s = RawState((0, 0, 0, 0), 0)
    assert canonicalize(s, dihedral) == s


def test_rotated_images_share_canonical_form(dihedral):
    s = RawState((2, 0, 0, 0), 0)
    r1 = dihedral.elements[1]
    assert canonicalize(r1.apply(s), dihedral) == canonicalize(s, dihedral)
    assert canonicalize(s, dihedral) == min(orbit(s, dihedral))


def test_canonical_element_maps_state_to_canonical(dihedral):
    rng = random.Random(1)
    for _ in range(200):
        s = RawState(tuple(rng.randrange(3) for _ in range(4)), rng.randrange(4))
        c, e = canonical_element(s, dihedral)
        assert e.apply(s) == c


def test_remap_ns_under_quarter_turn(dihedral):
    r1 = next(e for e in dihedral if e.name == "r1")
    ns, ew = 0, 1
    assert remap_action(ns, r1) == ew
    assert remap_action(ew, r1) == ns
    assert remap_action(ns, dihedral.identity) == ns


def test_remap_round_trip(dihedral):
    for e in dihedral:
        inv = dihedral.inverse(e)
        for a in range(4):
            assert remap_action(remap_action(a, e), inv) == a


def test_remap_matches_served_approaches():
    # the remapped phase serves exactly the image of the original approaches
    g = SymmetryGroup.dihedral(SPLIT.served)
    for e in g:
        for a, served in enumerate(SPLIT.served):
            assert SPLIT.served[remap_action(a, e)] == frozenset(e.perm[i] for i in served)


@pytest.mark.parametrize("served", [SYMMETRIC.served, SPLIT.served])
def test_class_count_matches_brute_partition(served):
    g = SymmetryGroup.dihedral(served)
    space = [RawState(b, p) for b in product(range(3), repeat=4) for p in range(len(served))]
    canon = {canonicalize(s, g) for s in space}
    classes = brute_orbit_classes(served, 3)
    assert len(canon) == len(classes)
    assert sum(len(c) for c in classes) == len(space) == 324
    for cls in classes:
        assert len({canonicalize(RawState(*s), g) for s in cls}) == 1
    # Burnside: classes = average number of fixed points
    fixed = sum(sum(e.apply(s) == s for s in space) for e in g)
    assert fixed % len(g) == 0 and fixed // len(g) == len(canon)
