"""Integer characters of one-relator groups and the walk criterion for the BNS invariant.

The relator read against a character traces a closed walk in Z.  Whether the
class of the character lies in the first BNS invariant is read off from how
often, and where, that walk attains its minimum (Brown's criterion).  The
kernel of a discrete character is finitely generated iff both the character
and its negative lie in the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce as _fold
from math import gcd
from typing import Mapping, Union

from .onerelator import OneRelatorPresentation, free_elimination
from .words import Alphabet, WordError

IN_SIGMA = "in_sigma"
NOT_IN_SIGMA = "not_in_sigma"
INCONCLUSIVE = "inconclusive"
FG = "finitely_generated"
NOT_FG = "not_finitely_generated"

# a bare Alphabet stands for the free group on it (no relator)
Group = Union[OneRelatorPresentation, Alphabet]


@dataclass(frozen=True)
class Character:
    alphabet: Alphabet
    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != len(self.alphabet):
            raise WordError("one weight per generator is required")
        if not any(w):
            raise WordError("the zero character has no direction")

    @classmethod
    def of(cls, alphabet: Alphabet, weights: Mapping[str, int]) -> "Character":
        for g in weights:
            alphabet.index(g)
        return cls(alphabet, tuple(weights.get(g, 0) for g in alphabet))

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "Character":
        weights = {}
        for part in text.split(","):
            name, eq, val = part.partition("=")
            if not eq:
                raise WordError(f"bad character entry {part!r}, expected name=int")
            try:
                weights[name.strip()] = int(val)
            except ValueError:
                raise WordError(f"bad weight in {part!r}") from None
        return cls.of(alphabet, weights)

    def normalized(self) -> "Character":
        d = _fold(gcd, (abs(x) for x in self.weights if x))
        return Character(self.alphabet, tuple(x // d for x in self.weights))

    def __neg__(self) -> "Character":
        return Character(self.alphabet, tuple(-x for x in self.weights))

    def scaled(self, k: int) -> "Character":
        return Character(self.alphabet, tuple(k * x for x in self.weights))

    def weight(self, letter: int) -> int:
        w = self.weights[abs(letter) - 1]
        return w if letter > 0 else -w

    def __str__(self):
        return ",".join(f"{g}={w}" for g, w in zip(self.alphabet, self.weights))


def _relator(P: Group) -> tuple[int, ...]:
    return () if isinstance(P, Alphabet) else P.written


def _alphabet(P: Group) -> Alphabet:
    return P if isinstance(P, Alphabet) else P.alphabet


def weighted_sum(chi: Character, P: Group) -> int:
    return sum(chi.weight(x) for x in _relator(P))


def validate(chi: Character, P: Group) -> bool:
    if chi.alphabet != _alphabet(P):
        raise WordError("character and presentation use different alphabets")
    return weighted_sum(chi, P) == 0


@dataclass(frozen=True)
class BrownWalk:
    relator: tuple[int, ...]
    heights: tuple[int, ...]
    min_value: int
    max_value: int
    min_positions: tuple[int, ...]
    max_positions: tuple[int, ...]


def brown_walk(chi: Character, P: Group) -> BrownWalk:
    if not validate(chi, P):
        raise WordError(f"character {chi} does not vanish on the relator")
    rel = _relator(P)
    hs = [0]
    for x in rel:
        hs.append(hs[-1] + chi.weight(x))
    cyc = hs[:-1] if rel else hs
    lo, hi = min(cyc), max(cyc)
    return BrownWalk(
        tuple(rel), tuple(hs), lo, hi,
        tuple(i for i, h in enumerate(cyc) if h == lo),
        tuple(i for i, h in enumerate(cyc) if h == hi),
    )


@dataclass(frozen=True)
class SigmaVerdict:
    verdict: str
    reason: str

    @property
    def decided(self) -> bool:
        return self.verdict != INCONCLUSIVE


def sigma_membership(chi: Character, P: Group) -> SigmaVerdict:
    walk = brown_walk(chi, P)
    A = chi.alphabet
    n = len(A)
    rel = walk.relator
    if not rel:
        if n == 1:
            return SigmaVerdict(IN_SIGMA, "infinite cyclic group")
        return SigmaVerdict(NOT_IN_SIGMA, f"free group of rank {n}")
    fe = free_elimination(P)
    if fe is not None:
        rank = fe[1]
        if rank == 1:
            return SigmaVerdict(IN_SIGMA, "group is infinite cyclic")
        return SigmaVerdict(NOT_IN_SIGMA, f"group is free of rank {rank}")
    used = {abs(x) for x in rel}
    if len(used) < n:
        missing = [g for g in A if A.letter(g) not in used]
        return SigmaVerdict(NOT_IN_SIGMA, f"nontrivial free product: {' '.join(missing)} absent from relator")
    if P.relator.is_proper_power():
        return SigmaVerdict(INCONCLUSIVE, "relator is a proper power")

    L = len(rel)
    mins = walk.min_positions
    if all(chi.weights):
        if len(mins) == 1:
            return SigmaVerdict(IN_SIGMA, "minimum attained once")
        return SigmaVerdict(NOT_IN_SIGMA, f"minimum attained {len(mins)} times")
    if n >= 3:
        return SigmaVerdict(NOT_IN_SIGMA, "character vanishes on a generator and there are at least three generators")
    if len(mins) == 2:
        i, j = mins
        for a, b in ((i, j), (j, i)):
            # letter rel[a] leads from vertex a to vertex a + 1
            if (a + 1) % L == b and chi.weight(rel[a]) == 0:
                return SigmaVerdict(IN_SIGMA, "minimum attained twice, joined by a single vanishing letter")
    return SigmaVerdict(NOT_IN_SIGMA, f"minimum attained {len(mins)} times, not as one vanishing letter")


@dataclass(frozen=True)
class KernelVerdict:
    verdict: str
    plus: SigmaVerdict
    minus: SigmaVerdict

    @property
    def decided(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def lines(self) -> list[str]:
        return sorted([
            f"kernel_fg = {self.verdict}",
            f"sigma_minus = {self.minus.verdict}",
            f"sigma_minus.reason = {self.minus.reason}",
            f"sigma_plus = {self.plus.verdict}",
            f"sigma_plus.reason = {self.plus.reason}",
        ])


def kernel_fg(chi: Character, P: Group) -> KernelVerdict:
    plus = sigma_membership(chi, P)
    minus = sigma_membership(-chi, P)
    if plus.verdict == NOT_IN_SIGMA or minus.verdict == NOT_IN_SIGMA:
        v = NOT_FG
    elif plus.decided and minus.decided:
        v = FG
    else:
        v = INCONCLUSIVE
    return KernelVerdict(v, plus, minus)
