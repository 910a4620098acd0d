"""Free-group words over named alphabets.

Letters are stored as nonzero integers: generator ``i`` is ``i + 1`` and its
inverse is ``-(i + 1)``.  The public API speaks in ``(index, sign)`` pairs and
generator names; the integer encoding is what every other module iterates over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

_FORBIDDEN = set(" \t\n^;,=#[]:")


class WordError(ValueError):
    """Raised for malformed words, unknown generators and bad alphabets."""


@dataclass(frozen=True)
class Alphabet:
    generators: tuple[str, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if not g or _FORBIDDEN & set(g):
                raise WordError(f"invalid generator name {g!r}")
        if len(set(gens)) != len(gens):
            raise WordError(f"duplicate generator names in {gens}")
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(gens)})

    @classmethod
    def of(cls, names: str | Iterable[str]) -> "Alphabet":
        if isinstance(names, str):
            names = names.split()
        return cls(tuple(names))

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise WordError(f"unknown generator {name!r} for alphabet {self.generators}") from None

    def letter(self, name: str, sign: int = 1) -> int:
        return (self.index(name) + 1) * (1 if sign > 0 else -1)

    def name(self, letter: int) -> str:
        return self.generators[abs(letter) - 1]

    def __str__(self):
        return " ".join(self.generators)


def letter_key(letter: int) -> int:
    """Sort key realising the (index, sign) order with the inverse first."""
    return 2 * (abs(letter) - 1) + (letter > 0)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _cyclic_core(letters: tuple[int, ...]) -> tuple[int, int]:
    """Bounds (i, j) with letters[i:j] cyclically reduced; input must be freely reduced."""
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return i, j


def least_rotation(seq: Sequence[int]) -> int:
    """Offset of the lexicographically least rotation (Booth's algorithm)."""
    n = len(seq)
    if n == 0:
        return 0
    s = list(seq) + list(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def primitive_period(seq: Sequence) -> int:
    """Smallest p dividing len(seq) with seq == seq[p:] + seq[:p]."""
    n = len(seq)
    if n == 0:
        return 0
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


@dataclass(frozen=True)
class Word:
    alphabet: Alphabet
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        n = len(self.alphabet)
        for x in letters:
            if x == 0 or abs(x) > n:
                raise WordError(f"letter {x} out of range for alphabet of size {n}")
        object.__setattr__(self, "letters", free_reduce(letters))

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "Word":
        return cls(alphabet, parse_letters(text, alphabet))

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet, ())

    @classmethod
    def generator(cls, alphabet: Alphabet, name: str) -> "Word":
        return cls(alphabet, (alphabet.letter(name),))

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if other.alphabet != self.alphabet:
            raise WordError("cannot multiply words over different alphabets")
        return Word(self.alphabet, self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(self.alphabet, base.letters * abs(k))

    def inverse(self) -> "Word":
        return Word(self.alphabet, tuple(-x for x in reversed(self.letters)))

    def conjugate_by(self, g: "Word") -> "Word":
        """g * self * g^-1"""
        return g * self * g.inverse()

    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(x) - 1, 1 if x > 0 else -1) for x in self.letters]

    def generators_used(self) -> set[str]:
        return {self.alphabet.name(x) for x in self.letters}

    def __str__(self):
        return format_letters(self.letters, self.alphabet)

    def __repr__(self):
        return f"Word({str(self)!r})"


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word kept in its least rotation."""

    alphabet: Alphabet
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = free_reduce(tuple(self.letters))
        i, j = _cyclic_core(letters)
        letters = letters[i:j]
        k = least_rotation([letter_key(x) for x in letters])
        object.__setattr__(self, "letters", letters[k:] + letters[:k])

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "CyclicWord":
        return cls(alphabet, parse_letters(text, alphabet))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @property
    def word(self) -> Word:
        return Word(self.alphabet, self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(self.alphabet, tuple(-x for x in reversed(self.letters)))

    def root(self) -> tuple["CyclicWord", int]:
        """(u, k) with self a rotation of u^k and u not a proper power."""
        p = primitive_period(self.letters)
        if p == 0:
            return self, 0
        return CyclicWord(self.alphabet, self.letters[:p]), len(self.letters) // p

    def is_proper_power(self) -> bool:
        return self.root()[1] > 1

    def rotations(self) -> list[tuple[int, ...]]:
        n = len(self.letters)
        return [self.letters[i:] + self.letters[:i] for i in range(n)]

    def __str__(self):
        return format_letters(self.letters, self.alphabet)

    def __repr__(self):
        return f"CyclicWord({str(self)!r})"


def parse_letters(text: str, alphabet: Alphabet) -> tuple[int, ...]:
    out: list[int] = []
    for token in text.split():
        if token == "1":
            continue
        name, _, exp = token.partition("^")
        if _:
            try:
                k = int(exp)
            except ValueError:
                raise WordError(f"bad exponent in token {token!r}") from None
            if k == 0:
                raise WordError(f"zero exponent in token {token!r}")
        else:
            k = 1
        x = alphabet.letter(name)
        out.extend([x if k > 0 else -x] * abs(k))
    return free_reduce(out)


def format_letters(letters: Sequence[int], alphabet: Alphabet) -> str:
    """Run-length text form, '1' for the empty word."""
    if not letters:
        return "1"
    parts = []
    run_letter, run = letters[0], 0
    for x in list(letters) + [0]:
        if x == run_letter:
            run += 1
            continue
        name = alphabet.name(run_letter)
        k = run if run_letter > 0 else -run
        parts.append(name if k == 1 else f"{name}^{k}")
        run_letter, run = x, 1
    return " ".join(parts)


def reduce(raw: Iterable[tuple[int, int]], alphabet: Alphabet) -> Word:
    """Freely reduce a sequence of ``(generator index, sign)`` pairs."""
    letters = []
    for i, s in raw:
        if not 0 <= i < len(alphabet) or s not in (1, -1):
            raise WordError(f"invalid signed letter ({i}, {s})")
        letters.append((i + 1) * s)
    return Word(alphabet, tuple(letters))


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Return (c, u) with w == u c u^-1 and c cyclically reduced, canonically rotated."""
    i, j = _cyclic_core(w.letters)
    core = w.letters[i:j]
    c = CyclicWord(w.alphabet, core)
    k = least_rotation([letter_key(x) for x in core])
    # core = core[:k] * rotated * core[:k]^-1
    conj = Word(w.alphabet, w.letters[:i] + core[:k])
    return c, conj


def exponent_sum(w: Word | CyclicWord, g: str) -> int:
    x = w.alphabet.letter(g)
    return sum(1 if y == x else -1 for y in w.letters if abs(y) == x)


def exponent_vector(w: Word | CyclicWord) -> list[int]:
    v = [0] * len(w.alphabet)
    for x in w.letters:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def substitute(w: Word | CyclicWord, images: Mapping[str, Word], target: Alphabet | None = None) -> Word:
    """Apply the homomorphism generator -> image and freely reduce."""
    if target is None:
        target = next(iter(images.values())).alphabet if images else w.alphabet
    cache: dict[int, tuple[int, ...]] = {}
    out: list[int] = []
    for x in w.letters:
        if x not in cache:
            name = w.alphabet.name(x)
            if name not in images:
                raise WordError(f"no image given for generator {name!r}")
            img = images[name]
            if img.alphabet != target:
                raise WordError(f"image of {name!r} is not over the target alphabet")
            cache[x] = img.letters if x > 0 else tuple(-y for y in reversed(img.letters))
        for y in cache[x]:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(target, tuple(out))


def are_conjugate(u: Word, v: Word) -> bool:
    return u.alphabet == v.alphabet and cyclic_reduce(u)[0] == cyclic_reduce(v)[0]
