"""Plain-text file formats: subgroup lists, presentations, graphs of groups, tree paths.

Every parser raises ``FormatError`` (a ``ValueError``) on malformed input and
every serializer produces text its parser reads back to an equal value.
"""

from __future__ import annotations

import re

from .bassserre import EdgeGroup, GraphOfFreeGroups, TreePath, VertexGroup
from .onerelator import OneRelatorPresentation
from .words import Alphabet, Word, WordError, format_letters


class FormatError(ValueError):
    pass


def _lines(text: str) -> list[str]:
    out = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            out.append(ln)
    return out


def _names_in(words: list[str]) -> list[str]:
    seen: list[str] = []
    for w in words:
        for tok in w.split():
            if tok == "1":
                continue
            name = tok.split("^", 1)[0]
            if name not in seen:
                seen.append(name)
    return sorted(seen)


# --------------------------------------------------------------------------
# subgroup files


def parse_subgroup(text: str, alphabet: Alphabet | None = None) -> tuple[Alphabet, list[Word]]:
    """One generator word per line; an optional ``[generators] ...`` line fixes the alphabet.

    Without it the alphabet is the sorted set of names that occur.
    """
    lines = _lines(text)
    if lines and lines[0].startswith("[generators]"):
        header = lines.pop(0)[len("[generators]"):].split()
        alphabet = Alphabet.of(header)
    if alphabet is None:
        alphabet = Alphabet.of(_names_in(lines))
    try:
        return alphabet, [Word.parse(ln, alphabet) for ln in lines]
    except WordError as exc:
        raise FormatError(str(exc)) from None


def serialize_subgroup(alphabet: Alphabet, words: list[Word]) -> str:
    return "\n".join([f"[generators] {alphabet}"] + [str(w) for w in words]) + "\n"


# --------------------------------------------------------------------------
# presentation files


def parse_presentation(text: str) -> tuple[Alphabet, list[Word]]:
    """``[generators] a b`` then one ``[relator] word`` line per relator.

    The words may also sit on the line following their tag.
    """
    gens = None
    rels: list[str] = []
    pending = None
    for ln in _lines(text):
        if ln.startswith("[generators]"):
            rest = ln[len("[generators]"):].strip()
            if gens is not None:
                raise FormatError("more than one [generators] line")
            gens = rest.split() if rest else None
            pending = "gens" if not rest else None
        elif ln.startswith("[relator]"):
            if gens is None:
                raise FormatError("[relator] before [generators]")
            rest = ln[len("[relator]"):].strip()
            if rest:
                rels.append(rest)
                pending = None
            else:
                pending = "rel"
        elif pending == "gens":
            gens = ln.split()
            pending = None
        elif pending == "rel":
            rels.append(ln)
            pending = None
        else:
            raise FormatError(f"unexpected line {ln!r}")
    if gens is None:
        raise FormatError("missing [generators] line")
    try:
        A = Alphabet.of(gens)
        return A, [Word.parse(r, A) for r in rels]
    except WordError as exc:
        raise FormatError(str(exc)) from None


def parse_one_relator(text: str) -> OneRelatorPresentation:
    A, rels = parse_presentation(text)
    if len(rels) != 1:
        raise FormatError(f"expected exactly one relator, found {len(rels)}")
    try:
        return OneRelatorPresentation.of(rels[0], A)
    except WordError as exc:
        raise FormatError(str(exc)) from None


def serialize_presentation(alphabet: Alphabet, relators) -> str:
    lines = [f"[generators] {alphabet}"]
    lines += [f"[relator] {format_letters(r.letters, alphabet)}" for r in relators]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# graphs of groups

_FIELD = re.compile(r"(gens|from|to|d0|d1):")


def _fields(body: str) -> dict[str, str]:
    parts = _FIELD.split(body.replace("/", " "))
    if parts[0].strip():
        raise FormatError(f"unexpected text {parts[0].strip()!r}")
    out = {}
    for key, val in zip(parts[1::2], parts[2::2]):
        if key in out:
            raise FormatError(f"field {key} given twice")
        out[key] = val.strip()
    return out


def _word_list(text: str, A: Alphabet) -> tuple[Word, ...]:
    items = [s.strip() for s in text.split(";")]
    if items == [""]:
        return ()
    if any(not s for s in items):
        raise FormatError(f"empty entry in word list {text!r}")
    return tuple(Word.parse(s, A) for s in items)


def parse_gog(text: str) -> GraphOfFreeGroups:
    blocks: list[tuple[str, str, list[str]]] = []
    head = re.compile(r"^\[(vertex|edge)\s+([^\]\s]+)\s*\](.*)$")
    for ln in _lines(text):
        m = head.match(ln)
        if m:
            blocks.append((m.group(1), m.group(2), [m.group(3)]))
        elif blocks:
            blocks[-1][2].append(ln)
        else:
            raise FormatError(f"unexpected line {ln!r}")
    vertices = []
    alphabets = {}
    raw_edges = []
    for kind, name, body in blocks:
        f = _fields(" ".join(body))
        if kind == "vertex":
            if set(f) - {"gens"}:
                raise FormatError(f"vertex {name}: unexpected fields {sorted(set(f) - {'gens'})}")
            try:
                A = Alphabet.of(f.get("gens", "").split())
            except WordError as exc:
                raise FormatError(f"vertex {name}: {exc}") from None
            if name in alphabets:
                raise FormatError(f"duplicate vertex {name}")
            alphabets[name] = A
            vertices.append(VertexGroup(name, A))
        else:
            missing = {"from", "to", "d0", "d1"} - set(f)
            if missing:
                raise FormatError(f"edge {name}: missing fields {sorted(missing)}")
            raw_edges.append((name, f))
    edges = []
    for name, f in raw_edges:
        src, dst = f["from"], f["to"]
        if src not in alphabets or dst not in alphabets:
            raise FormatError(f"edge {name}: unknown endpoint")
        try:
            d0 = _word_list(f["d0"], alphabets[src])
            d1 = _word_list(f["d1"], alphabets[dst])
        except WordError as exc:
            raise FormatError(f"edge {name}: {exc}") from None
        edges.append(EdgeGroup(name, src, dst, d0, d1))
    return GraphOfFreeGroups(tuple(vertices), tuple(edges))


def serialize_gog(gog: GraphOfFreeGroups) -> str:
    lines = [f"[vertex {v.name}] gens: {v.alphabet}" for v in gog.vertices]
    for e in gog.edges:
        d0 = "; ".join(str(w) for w in e.d0)
        d1 = "; ".join(str(w) for w in e.d1)
        lines.append(f"[edge {e.name}] from: {e.source} to: {e.target} / d0: {d0} / d1: {d1}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# tree paths: one step per line, ``ELEMENT | EDGE SIGN`` with SIGN +1 or -1


def parse_path(text: str, gog: GraphOfFreeGroups) -> TreePath:
    raw = []
    for ln in _lines(text):
        elem, bar, rest = ln.partition("|")
        parts = rest.split()
        if not bar or len(parts) != 2 or parts[1] not in ("+1", "-1", "1"):
            raise FormatError(f"bad path step {ln!r}, expected 'word | edge +1'")
        raw.append((elem.strip(), parts[0], -1 if parts[1] == "-1" else 1))
    if not raw:
        raise FormatError("empty path")
    steps = []
    try:
        first = gog.edge(raw[0][1])
        v = first.source if raw[0][2] > 0 else first.target
        start = v
        for elem, name, sign in raw:
            e = gog.edge(name)
            here = e.source if sign > 0 else e.target
            if here != v:
                raise FormatError(f"step along {name} does not leave vertex {v}")
            steps.append((Word.parse(elem, gog.alphabet_at(v)), name, sign))
            v = e.target if sign > 0 else e.source
    except (WordError, ValueError) as exc:
        raise FormatError(str(exc)) from None
    return TreePath(start, tuple(steps))


def serialize_path(path: TreePath) -> str:
    return "".join(f"{g} | {n} {'+1' if s > 0 else '-1'}\n" for g, n, s in path.steps)
