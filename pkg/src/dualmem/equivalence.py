"""Symmetry-group canonicalization of intersection states.

Approaches are indexed clockwise ``N=0, E=1, S=2, W=3``. A group element
permutes approaches and relabels signal phases consistently, so a state and
its rotated/mirrored image land in one equivalence class with one canonical
representative (the lexicographic minimum of the orbit).
"""

from __future__ import annotations

from itertools import product
from typing import Collection, NamedTuple, Sequence

APPROACHES = ("N", "E", "S", "W")


class RawState(NamedTuple):
    queue_bins: tuple[int, ...]
    phase: int


class CanonicalState(NamedTuple):
    queue_bins: tuple[int, ...]
    phase: int


class GroupElement(NamedTuple):
    name: str
    perm: tuple[int, ...]  # approach i -> perm[i]
    phase_map: tuple[int, ...]  # phase p -> phase_map[p]

    def apply(self, s: RawState) -> RawState:
        bins = [0] * len(s.queue_bins)
        for i, b in enumerate(s.queue_bins):
            bins[self.perm[i]] = b
        return RawState(tuple(bins), self.phase_map[s.phase])

    def compose(self, other: GroupElement) -> GroupElement:
        """``self ∘ other``: apply ``other`` first."""
        return GroupElement(
            f"{self.name}*{other.name}",
            tuple(self.perm[j] for j in other.perm),
            tuple(self.phase_map[q] for q in other.phase_map),
        )

    def inverse(self) -> GroupElement:
        perm = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            perm[j] = i
        phase_map = [0] * len(self.phase_map)
        for p, q in enumerate(self.phase_map):
            phase_map[q] = p
        return GroupElement(f"{self.name}^-1", tuple(perm), tuple(phase_map))

    @property
    def key(self) -> tuple:
        return (self.perm, self.phase_map)


def _phase_map(perm: Sequence[int], served: Sequence[frozenset[int]]) -> tuple[int, ...]:
    lookup = {s: p for p, s in enumerate(served)}
    out = []
    for s in served:
        image = frozenset(perm[i] for i in s)
        if image not in lookup:
            names = "".join(APPROACHES[i] for i in sorted(s))
            raise ValueError(
                f"phase set is not closed under the symmetry: phase serving {names!r} has no image"
            )
        out.append(lookup[image])
    return tuple(out)


class SymmetryGroup:
    """A finite group acting on :class:`RawState`.

    The group axioms are checked by brute force over the composition table
    when the group is built.
    """

    def __init__(self, elements: Sequence[GroupElement], name: str = "custom"):
        self.elements = list(elements)
        self.name = name
        self._verify()
        self._index = {e.key: i for i, e in enumerate(self.elements)}

    def _verify(self) -> None:
        if not self.elements:
            raise ValueError("group has no elements")
        keys = {e.key for e in self.elements}
        if len(keys) != len(self.elements):
            raise ValueError("group has duplicate elements")
        n_app = len(self.elements[0].perm)
        n_ph = len(self.elements[0].phase_map)
        identity = (tuple(range(n_app)), tuple(range(n_ph)))
        if identity not in keys:
            raise ValueError("group lacks the identity")
        for a, b in product(self.elements, repeat=2):
            if a.compose(b).key not in keys:
                raise ValueError(f"group not closed: {a.name} * {b.name}")
        for a in self.elements:
            if a.inverse().key not in keys:
                raise ValueError(f"element {a.name} has no inverse in the group")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def identity(self) -> GroupElement:
        return self.elements[0]

    def inverse(self, e: GroupElement) -> GroupElement:
        return self.elements[self._index[e.inverse().key]]

    @classmethod
    def identity_group(cls, phase_count: int, approach_count: int = 4) -> SymmetryGroup:
        e = GroupElement("id", tuple(range(approach_count)), tuple(range(phase_count)))
        return cls([e], name="identity")

    @classmethod
    def dihedral(cls, served: Sequence[Collection[int]]) -> SymmetryGroup:
        """The 8 rotations/reflections of a four-way intersection.

        ``served[p]`` lists the approaches that phase ``p`` gives green to;
        the phase set must be closed under the group.
        """
        served = [frozenset(s) for s in served]
        elements = []
        for mirror in (False, True):
            for k in range(4):
                perm = tuple(((-i if mirror else i) + k) % 4 for i in range(4))
                name = ("m" if mirror else "") + f"r{k}"
                elements.append(GroupElement(name, perm, _phase_map(perm, served)))
        return cls(elements, name="dihedral")

    @classmethod
    def by_name(cls, name: str, served: Sequence[Collection[int]]) -> SymmetryGroup:
        if name == "dihedral":
            return cls.dihedral(served)
        if name == "identity":
            return cls.identity_group(len(served))
        raise ValueError(f"unknown symmetry {name!r}; expected 'dihedral' or 'identity'")


def orbit(s: RawState, g: SymmetryGroup) -> set[RawState]:
    return {e.apply(s) for e in g}


def canonical_element(s: RawState, g: SymmetryGroup) -> tuple[CanonicalState, GroupElement]:
    """Canonical form of ``s`` and the first group element mapping ``s`` onto it."""
    best = None
    best_e = None
    for e in g:
        img = e.apply(s)
        if best is None or img < best:
            best, best_e = img, e
    return CanonicalState(*best), best_e


def canonicalize(s: RawState, g: SymmetryGroup) -> CanonicalState:
    return canonical_element(s, g)[0]


def remap_action(a: int, e: GroupElement) -> int:
    return e.phase_map[a]
