"""Pieces and the metric small cancellation condition C'(lambda).

The symmetrized closure of a relator set consists of every rotation of every
relator and of its inverse, each rotation counted as its own element even when
two rotations of a proper power spell the same word.  A piece is a common
proper prefix of two of these elements.

Pieces are found as longest common prefixes of rotations, which are longest
common prefixes of suffixes of the doubled cyclic words; one suffix array over
all of them handles relators with 10^5 letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .suffix import lcp_array, suffix_array
from .words import Alphabet, CyclicWord, Word, WordError, letter_key


def _class_rep(c: CyclicWord) -> CyclicWord:
    inv = c.inverse()
    key = lambda w: [letter_key(x) for x in w.letters]
    return c if key(c) <= key(inv) else inv


@dataclass(frozen=True)
class SymmetrizedSet:
    """One stored relator per rotation-and-inversion class."""

    alphabet: Alphabet
    relators: tuple[CyclicWord, ...]

    @classmethod
    def of(cls, words: Iterable[Word | CyclicWord], alphabet: Alphabet | None = None) -> "SymmetrizedSet":
        reps = set()
        for w in words:
            c = w if isinstance(w, CyclicWord) else CyclicWord(w.alphabet, w.letters)
            if not c.letters:
                raise WordError("relators must be nontrivial after cyclic reduction")
            if alphabet is None:
                alphabet = c.alphabet
            elif c.alphabet != alphabet:
                raise WordError("relators over different alphabets")
            reps.add(_class_rep(c))
        if alphabet is None:
            raise WordError("empty relator set needs an alphabet")
        ordered = sorted(reps, key=lambda c: (len(c), [letter_key(x) for x in c.letters]))
        return cls(alphabet, tuple(ordered))

    def elements(self) -> list[tuple[int, int, int, tuple[int, ...]]]:
        """All (relator index, orientation, offset, word) of the closure."""
        out = []
        for j, r in enumerate(self.relators):
            for o, c in ((1, r.letters), (-1, r.inverse().letters)):
                for s in range(len(c)):
                    out.append((j, o, s, c[s:] + c[:s]))
        return out

    def __len__(self):
        return len(self.relators)


@dataclass(frozen=True)
class RelatorPieces:
    relator: CyclicWord
    piece: Word
    length: int


@dataclass(frozen=True)
class PieceReport:
    max_piece_length: int
    shortest_relator_length: int
    lambda_bound: Fraction
    per_relator: tuple[RelatorPieces, ...]

    def lines(self) -> list[str]:
        out = [
            f"lambda_bound = {self.lambda_bound}",
            f"max_piece_length = {self.max_piece_length}",
            f"shortest_relator_length = {self.shortest_relator_length}",
        ]
        for j, rp in enumerate(self.per_relator):
            out.append(f"relator.{j}.length = {len(rp.relator)}")
            out.append(f"relator.{j}.max_piece = {rp.length}")
        return sorted(out)


def _cyclic_strings(S: SymmetrizedSet):
    for j, r in enumerate(S.relators):
        yield j, r.letters
        yield j, r.inverse().letters


def pieces(S: SymmetrizedSet) -> PieceReport:
    if not S.relators:
        raise WordError("pieces needs a nonempty relator set")
    strings = list(_cyclic_strings(S))
    m = len(S.alphabet)
    text: list[int] = []
    owner: list[int] = []  # string id, -1 for separators and second copies
    offset: list[int] = []
    for sid, (_, c) in enumerate(strings):
        for copy in range(2):
            for s, x in enumerate(c):
                text.append(letter_key(x))
                owner.append(sid if copy == 0 else -1)
                offset.append(s)
        text.append(2 * m + sid)
        owner.append(-1)
        offset.append(0)
    sa = suffix_array(text)
    lcp = lcp_array(text, sa)
    sa = sa.tolist()
    lengths = [len(c) for _, c in strings]
    n = len(sa)

    best = [0] * len(strings)
    best_at = [None] * len(strings)  # (text position, piece length)

    def scan(i, step):
        p = sa[i]
        sid = owner[p]
        lim = lengths[sid] - 1
        cur = 0
        run = None
        k = i
        while True:
            if step > 0:
                k += 1
                if k >= n:
                    break
                h = lcp[k]
            else:
                if k == 0:
                    break
                h = lcp[k]
                k -= 1
            run = h if run is None else min(run, h)
            if run <= cur:
                break
            q = sa[k]
            if owner[q] < 0:
                continue
            val = min(run, lim, lengths[owner[q]] - 1)
            cur = max(cur, val)
            if cur >= lim:
                break
        return cur

    for i in range(n):
        p = sa[i]
        sid = owner[p]
        if sid < 0:
            continue
        val = max(scan(i, 1), scan(i, -1))
        if best_at[sid] is None or val > best[sid]:
            best[sid] = val
            best_at[sid] = (p, val)

    per = []
    for j, r in enumerate(S.relators):
        cand = [(best[2 * j], 2 * j), (best[2 * j + 1], 2 * j + 1)]
        val, sid = max(cand, key=lambda t: (t[0], -t[1]))
        p, _ = best_at[sid]
        piece = tuple(_unkey(k) for k in text[p : p + val])
        per.append(RelatorPieces(r, Word(S.alphabet, piece), val))
    return _report(per)


def _unkey(k: int) -> int:
    i, pos = divmod(k, 2)
    return (i + 1) if pos else -(i + 1)


def _report(per: list[RelatorPieces]) -> PieceReport:
    return PieceReport(
        max_piece_length=max(rp.length for rp in per),
        shortest_relator_length=min(len(rp.relator) for rp in per),
        lambda_bound=max(Fraction(rp.length, len(rp.relator)) for rp in per),
        per_relator=tuple(per),
    )


@dataclass(frozen=True)
class CPrimeResult:
    holds: bool
    lam: Fraction
    report: PieceReport
    witness: RelatorPieces | None = None

    def __bool__(self):
        return self.holds


def cprime(S: SymmetrizedSet, lam, report: PieceReport | None = None) -> CPrimeResult:
    """C'(lam): every piece in a relator r is shorter than lam * |r|."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    report = report or pieces(S)
    for rp in report.per_relator:
        if rp.length >= lam * len(rp.relator):
            return CPrimeResult(False, lam, report, rp)
    return CPrimeResult(True, lam, report)
