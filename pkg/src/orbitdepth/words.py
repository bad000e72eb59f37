"""Free-group words and endomorphisms.

A word of rank n is a freely reduced tuple of nonzero signed integers in
{-n..-1, 1..n}; positive entries are generators, negative entries their
inverses.  All operations are pure; Word and GroupMap are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class WordError(ValueError):
    pass


def _check_letters(letters: Iterable[int], rank: int) -> None:
    for a in letters:
        if a == 0 or abs(a) > rank:
            raise WordError(f"invalid letter {a} for rank {rank}")


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise WordError("rank must be >= 1")
        _check_letters(self.letters, self.rank)
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise WordError("word is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def to_json(self) -> list[int]:
        return list(self.letters)


def reduce(raw: Sequence[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence (stack-based, one pass)."""
    _check_letters(raw, rank)
    out: list[int] = []
    for a in raw:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return Word(tuple(out), rank)


def identity(rank: int) -> Word:
    return Word((), rank)


def generator(i: int, rank: int) -> Word:
    return Word((i,), rank)


def _same_rank(a: Word, b: Word) -> None:
    if a.rank != b.rank:
        raise WordError(f"rank mismatch: {a.rank} != {b.rank}")


def mul(a: Word, b: Word) -> Word:
    _same_rank(a, b)
    return reduce(a.letters + b.letters, a.rank)


def inv(a: Word) -> Word:
    return Word(tuple(-x for x in reversed(a.letters)), a.rank)


def comm(a: Word, b: Word) -> Word:
    """Commutator [a, b] = a^-1 b^-1 a b."""
    _same_rank(a, b)
    return reduce(inv(a).letters + inv(b).letters + a.letters + b.letters, a.rank)


def conjugate(w: Word, s: Word) -> Word:
    """s^-1 w s."""
    _same_rank(w, s)
    return reduce(inv(s).letters + w.letters + s.letters, w.rank)


def nested_commutator(depth: int, leaves: Sequence[Word]) -> Word:
    """Left-nested commutator [[..[l1,l2],l3]..,l_depth]; lies in L_depth.

    Leaves are recycled if fewer than `depth` are given.
    """
    if depth < 1:
        raise WordError("depth must be >= 1")
    if not leaves:
        raise WordError("need at least one leaf")
    w = leaves[0]
    for i in range(1, depth):
        w = comm(w, leaves[i % len(leaves)])
    return w


@dataclass(frozen=True)
class GroupMap:
    """Endomorphism of the free group, given by generator images."""

    rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise WordError("need one image per generator")
        for w in self.images:
            if w.rank != self.rank:
                raise WordError("image rank mismatch")

    def to_json(self) -> dict:
        return {"rank": self.rank, "images": [w.to_json() for w in self.images]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupMap":
        rank = data["rank"]
        return cls(rank, tuple(reduce(img, rank) for img in data["images"]))


def identity_map(rank: int) -> GroupMap:
    return GroupMap(rank, tuple(generator(i, rank) for i in range(1, rank + 1)))


def apply_map(m: GroupMap, w: Word) -> Word:
    if m.rank != w.rank:
        raise WordError("rank mismatch")
    out: list[int] = []
    for a in w.letters:
        img = m.images[abs(a) - 1]
        out.extend(img.letters if a > 0 else inv(img).letters)
    return reduce(out, w.rank)


def compose_maps(m1: GroupMap, m2: GroupMap) -> GroupMap:
    """apply(compose(m1, m2), w) == apply(m1, apply(m2, w))."""
    if m1.rank != m2.rank:
        raise WordError("rank mismatch")
    return GroupMap(m1.rank, tuple(apply_map(m1, w) for w in m2.images))
