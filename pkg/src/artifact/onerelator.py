"""One-relator presentations and the Magnus-Moldavanskii rewriting step.

A step takes a generator ``t`` with zero exponent sum in the relator and
rewrites the relator over the conjugates ``g_j = t^j g t^-j``.  The group is
then an HNN extension of the new one-relator group, the stable letter ``t``
identifying two Magnus subgroups generated by the shifted families.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .words import Alphabet, CyclicWord, Word, WordError, exponent_sum, substitute


class MagnusError(ValueError):
    """Precondition failure of a rewriting step (e.g. nonzero pivot exponent sum)."""


class DegenerateStep(MagnusError):
    """The pivot does not interact with the rest of the relator."""


@dataclass(frozen=True)
class OneRelatorPresentation:
    alphabet: Alphabet
    relator: CyclicWord
    # rotation as supplied by the user; character walks are read along it
    written: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.relator.letters:
            raise WordError("relator must be nontrivial after cyclic reduction")
        if self.relator.alphabet != self.alphabet:
            raise WordError("relator is over a different alphabet")
        if self.written is None:
            object.__setattr__(self, "written", self.relator.letters)

    @classmethod
    def of(cls, relator: Word | CyclicWord | str, alphabet: Alphabet | None = None) -> "OneRelatorPresentation":
        if isinstance(relator, str):
            if alphabet is None:
                raise WordError("parsing a relator needs an alphabet")
            relator = Word.parse(relator, alphabet)
        alphabet = alphabet or relator.alphabet
        c = relator if isinstance(relator, CyclicWord) else CyclicWord(alphabet, relator.letters)
        written = relator.letters
        if not isinstance(relator, CyclicWord):
            i = 0
            j = len(written)
            while j - i >= 2 and written[i] == -written[j - 1]:
                i, j = i + 1, j - 1
            written = written[i:j]
        return cls(alphabet, c, tuple(written))

    @property
    def written_word(self) -> Word:
        return Word(self.alphabet, self.written)

    def occurrences(self) -> dict[str, int]:
        counts = {g: 0 for g in self.alphabet}
        for x in self.relator.letters:
            counts[self.alphabet.name(x)] += 1
        return counts

    def __str__(self):
        return f"< {', '.join(self.alphabet)} | {self.relator} >"


def is_magnus_subgroup(P: OneRelatorPresentation, Y: Iterable[str]) -> bool:
    """True iff the relator is not a word in the generators Y alone."""
    Y = set(Y)
    for g in Y:
        P.alphabet.index(g)
    return any(P.alphabet.name(x) not in Y for x in P.relator.letters)


@dataclass(frozen=True)
class MagnusStep:
    input: OneRelatorPresentation
    pivot: str
    vertex: OneRelatorPresentation
    left_magnus: tuple[str, ...]
    right_magnus: tuple[str, ...]
    stable_letter: str
    index_map: dict[str, tuple[str, int]]

    def lines(self, prefix: str = "") -> list[str]:
        out = [
            f"{prefix}pivot = {self.pivot}",
            f"{prefix}vertex.generators = {' '.join(self.vertex.alphabet)}",
            f"{prefix}vertex.relator = {self.vertex.relator}",
            f"{prefix}left_magnus = {' '.join(self.left_magnus)}",
            f"{prefix}right_magnus = {' '.join(self.right_magnus)}",
            f"{prefix}stable_letter = {self.stable_letter}",
        ]
        for name in self.vertex.alphabet:
            g, j = self.index_map[name]
            out.append(f"{prefix}index_map.{name} = {g} shift {j}")
        return out

    def pullback(self) -> Word:
        """Vertex relator with every g_j replaced by pivot^j g pivot^-j."""
        A = self.input.alphabet
        t = Word.generator(A, self.pivot)
        images = {name: Word.generator(A, g).conjugate_by(t ** j) for name, (g, j) in self.index_map.items()}
        return substitute(self.vertex.relator, images, A)


def _heights(P: OneRelatorPresentation, pivot: str):
    t = P.alphabet.letter(pivot)
    h = 0
    out = []
    for x in P.written:
        if abs(x) == t:
            h += 1 if x > 0 else -1
        else:
            out.append((x, h))
    return out


def magnus_step(P: OneRelatorPresentation, pivot: str) -> MagnusStep:
    A = P.alphabet
    if len(A) < 2:
        raise MagnusError("a rewriting step needs at least two generators")
    t = A.letter(pivot)
    if exponent_sum(P.relator, pivot) != 0:
        raise MagnusError(f"pivot {pivot} has nonzero exponent sum {exponent_sum(P.relator, pivot)}")
    used = {abs(x) for x in P.relator.letters}
    if t not in used:
        raise DegenerateStep(f"pivot {pivot} does not occur in the relator")
    if used == {t}:
        raise DegenerateStep(f"relator is a power of the pivot {pivot}")

    occ = _heights(P, pivot)
    ranges: dict[str, list[int]] = {}
    for g in A:
        if g == pivot:
            continue
        hs = [h for x, h in occ if A.name(x) == g]
        ranges[g] = [min(hs), max(hs)] if hs else [0, 0]
    single = [g for g in ranges if ranges[g][0] == ranges[g][1]]
    if len(single) == len(ranges):
        first = single[0]
        ranges[first][0] -= 1
        single = single[1:]
    for g in single:
        ranges[g][1] += 1

    names = []
    index_map = {}
    for g, (lo, hi) in ranges.items():
        for j in range(lo, hi + 1):
            name = f"{g}_{j}"
            names.append(name)
            index_map[name] = (g, j)
    B = Alphabet(tuple(names))
    letters = tuple(B.letter(f"{A.name(x)}_{h}", 1 if x > 0 else -1) for x, h in occ)
    vertex = OneRelatorPresentation.of(Word(B, letters))
    left = tuple(n for n in names if index_map[n][1] != ranges[index_map[n][0]][1])
    right = tuple(n for n in names if index_map[n][1] != ranges[index_map[n][0]][0])
    return MagnusStep(P, pivot, vertex, left, right, pivot, index_map)


def _fresh_name(A: Alphabet, base: str = "x") -> str:
    if base not in A:
        return base
    k = 1
    while f"{base}{k}" in A:
        k += 1
    return f"{base}{k}"


def exponent_stabilize(P: OneRelatorPresentation, g1: str, g2: str):
    """Embed into a presentation where the new generator replacing g1 has zero exponent sum.

    g1 -> x^beta and g2 -> g2 x^-alpha, alpha and beta the exponent sums of g1, g2.
    Returns (new presentation, embedding map old generator -> Word).
    """
    A = P.alphabet
    if g1 == g2:
        raise MagnusError("exponent_stabilize needs two distinct generators")
    alpha = exponent_sum(P.relator, g1)
    beta = exponent_sum(P.relator, g2)
    if alpha == 0 or beta == 0:
        raise MagnusError("both generators must have nonzero exponent sum")
    x = _fresh_name(A)
    B = Alphabet(tuple(x if g == g1 else g for g in A))
    xw = Word.generator(B, x)
    emb = {g: Word.generator(B, g) for g in A if g != g1}
    emb[g1] = xw ** beta
    emb[g2] = Word.generator(B, g2) * xw ** (-alpha)
    new = substitute(P.relator, emb, B)
    return OneRelatorPresentation.of(new), emb


def free_elimination(P: OneRelatorPresentation) -> tuple[str, int] | None:
    for g, k in P.occurrences().items():
        if k == 1:
            return g, len(P.alphabet) - 1
    return None


def _single_generator(P: OneRelatorPresentation) -> str | None:
    used = {abs(x) for x in P.relator.letters}
    if len(used) == 1:
        return P.alphabet.name(next(iter(used)))
    return None


@dataclass(frozen=True)
class Stabilization:
    before: OneRelatorPresentation
    after: OneRelatorPresentation
    embedding: dict


@dataclass(frozen=True)
class Hierarchy:
    steps: tuple[MagnusStep, ...]
    terminal: OneRelatorPresentation
    outcome: str  # "free", "base" or "inconclusive"
    eliminated: str | None = None
    free_rank: int | None = None
    reason: str = ""
    stabilizations: dict = field(default_factory=dict)  # step index -> Stabilization

    @property
    def decided(self) -> bool:
        return self.outcome != "inconclusive"

    def lines(self) -> list[str]:
        out = [f"depth = {len(self.steps)}", f"outcome = {self.outcome}",
               f"terminal.generators = {' '.join(self.terminal.alphabet)}",
               f"terminal.relator = {self.terminal.relator}"]
        if self.eliminated is not None:
            out.append(f"eliminated = {self.eliminated}")
            out.append(f"free_rank = {self.free_rank}")
        if self.reason:
            out.append(f"reason = {self.reason}")
        for i, s in enumerate(self.steps):
            if i in self.stabilizations:
                out.append(f"step.{i}.stabilized = {self.stabilizations[i].after.relator}")
            out.extend(s.lines(f"step.{i}."))
        return out


def choose_pivot(P: OneRelatorPresentation) -> str | None:
    used = {abs(x) for x in P.relator.letters}
    for g in P.alphabet:
        if P.alphabet.letter(g) in used and exponent_sum(P.relator, g) == 0:
            return g
    return None


def build_hierarchy(P: OneRelatorPresentation, max_depth: int = 16) -> Hierarchy:
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    steps: list[MagnusStep] = []
    stabs: dict[int, Stabilization] = {}
    cur = P
    while True:
        fe = free_elimination(cur)
        if fe is not None:
            return Hierarchy(tuple(steps), cur, "free", fe[0], fe[1], stabilizations=stabs)
        g = _single_generator(cur)
        if g is not None:
            return Hierarchy(tuple(steps), cur, "base",
                             reason=f"relator is a power of {g}", stabilizations=stabs)
        if len(steps) >= max_depth:
            return Hierarchy(tuple(steps), cur, "inconclusive",
                             reason=f"depth cap {max_depth} reached", stabilizations=stabs)
        pivot = choose_pivot(cur)
        if pivot is None:
            if len(steps) in stabs:
                # the substitution cancelled the new generator out of the relator
                return Hierarchy(tuple(steps), cur, "inconclusive",
                                 reason="stabilization left no zero exponent sum generator", stabilizations=stabs)
            used = [g for g in cur.alphabet if exponent_sum(cur.relator, g) != 0]
            new, emb = exponent_stabilize(cur, used[0], used[1])
            stabs[len(steps)] = Stabilization(cur, new, emb)
            cur = new
            continue
        step = magnus_step(cur, pivot)
        steps.append(step)
        cur = step.vertex


def presentations_match(P: OneRelatorPresentation, Q: OneRelatorPresentation) -> dict[str, tuple[str, int]] | None:
    """Relabeling P-generator -> (Q-generator, sign) carrying P's relator to a rotation of Q's or its inverse."""
    if len(P.alphabet) != len(Q.alphabet) or len(P.relator) != len(Q.relator):
        return None
    src = P.relator.letters
    for cand in (Q.relator, Q.relator.inverse()):
        for rot in cand.rotations():
            m = _letter_bijection(src, rot)
            if m is not None:
                unused_p = [g for g in P.alphabet if P.alphabet.letter(g) not in m]
                used_q = {abs(y) for y in m.values()}
                unused_q = [g for g in Q.alphabet if Q.alphabet.letter(g) not in used_q]
                out = {P.alphabet.name(x): (Q.alphabet.name(y), 1 if y > 0 else -1) for x, y in m.items()}
                out.update({p: (q, 1) for p, q in zip(unused_p, unused_q)})
                return out
    return None


def _letter_bijection(src: Sequence[int], dst: Sequence[int]) -> dict[int, int] | None:
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}
    for x, y in zip(src, dst):
        gx, sy = abs(x), (y if x > 0 else -y)
        if fwd.setdefault(gx, sy) != sy:
            return None
        if back.setdefault(abs(sy), gx) != gx:
            return None
    return fwd
