"""Graphs of free groups, Britton reduction and path stabilizers in the Bass-Serre tree.

Conventions.  An edge ``e`` runs from ``source`` to ``target`` with edge group
free on ``z1..zr``, ``d0`` landing in the source group and ``d1`` in the target
group, subject to ``e d1(z) e^-1 = d0(z)``.  A letter ``(e, +1)`` crosses from
source to target and ``(e, -1)`` crosses back.

A tree path from the base coset ``1 G_v`` is a list of steps
``(g, e, sign)``: at the current vertex coset ``P G_u`` take the edge
``P g e^sign``.  Its stabilizer is ``P g d_out(G_e) g^-1 P^-1``, where
``d_out`` is ``d0`` for sign +1 and ``d1`` for sign -1.
"""

from __future__ import annotations

import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .stallings import (
    DEFAULT_CAP,
    BasisExpresser,
    ResourceCapExceeded,
    SubgroupGraph,
    build,
    intersect,
)
from .words import Alphabet, Word, substitute


class GraphOfGroupsError(ValueError):
    """Malformed graph of groups, edge sequence or tree path."""


@dataclass(frozen=True)
class VertexGroup:
    name: str
    alphabet: Alphabet


@dataclass(frozen=True)
class EdgeGroup:
    name: str
    source: str
    target: str
    d0: tuple[Word, ...]
    d1: tuple[Word, ...]

    @property
    def rank(self) -> int:
        return len(self.d0)

    @property
    def basis_alphabet(self) -> Alphabet:
        return Alphabet(tuple(f"z{k}" for k in range(1, self.rank + 1)))

    def images(self, side: int) -> tuple[Word, ...]:
        return self.d0 if side == 0 else self.d1

    def end(self, side: int) -> str:
        return self.source if side == 0 else self.target


def out_side(sign: int) -> int:
    """Which edge map lands at the vertex a letter leaves from."""
    return 0 if sign > 0 else 1


def in_side(sign: int) -> int:
    return 1 if sign > 0 else 0


@dataclass(frozen=True)
class GraphOfFreeGroups:
    vertices: tuple[VertexGroup, ...]
    edges: tuple[EdgeGroup, ...]

    @cached_property
    def _vertex_index(self):
        return {v.name: v for v in self.vertices}

    @cached_property
    def _edge_index(self):
        return {e.name: e for e in self.edges}

    def vertex(self, name: str) -> VertexGroup:
        try:
            return self._vertex_index[name]
        except KeyError:
            raise GraphOfGroupsError(f"unknown vertex {name!r}") from None

    def edge(self, name: str) -> EdgeGroup:
        try:
            return self._edge_index[name]
        except KeyError:
            raise GraphOfGroupsError(f"unknown edge {name!r}") from None

    def alphabet_at(self, vertex: str) -> Alphabet:
        return self.vertex(vertex).alphabet

    def incident(self, vertex: str) -> list[tuple[str, int]]:
        """Edge letters leaving ``vertex``, in edge order."""
        out = []
        for e in self.edges:
            if e.source == vertex:
                out.append((e.name, 1))
            if e.target == vertex:
                out.append((e.name, -1))
        return out

    @cached_property
    def _expressers(self) -> dict:
        return {}

    def expresser(self, edge: str, side: int) -> BasisExpresser:
        key = (edge, side)
        if key not in self._expressers:
            e = self.edge(edge)
            A = self.alphabet_at(e.end(side))
            self._expressers[key] = BasisExpresser(e.images(side), A, e.basis_alphabet.generators)
        return self._expressers[key]

    def express(self, edge: str, side: int, w: Word) -> Word | None:
        """Edge-group preimage of w under d0 (side 0) or d1 (side 1), if w is in the image."""
        e = self.edge(edge)
        if e.rank == 0:
            return Word(e.basis_alphabet) if not w.letters else None
        return self.expresser(edge, side).express(w)

    def image_graph(self, edge: str, side: int) -> SubgroupGraph:
        e = self.edge(edge)
        if e.rank == 0:
            return build([], self.alphabet_at(e.end(side)))
        return self.expresser(edge, side).graph

    def edge_map(self, edge: str, side: int, x: Word) -> Word:
        e = self.edge(edge)
        A = self.alphabet_at(e.end(side))
        return substitute(x, dict(zip(e.basis_alphabet.generators, e.images(side))), A)

    def __getstate__(self):
        state = dict(self.__dict__)
        for k in ("_expressers", "_vertex_index", "_edge_index"):
            state.pop(k, None)
        return state


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        out = [f"valid = {'ok' if self.ok else 'failure'}"]
        out += [f"problem.{i} = {p}" for i, p in enumerate(self.problems)]
        return out


def validate(gog: GraphOfFreeGroups) -> ValidationReport:
    problems = []
    names = [v.name for v in gog.vertices]
    if not names:
        problems.append("no vertices")
    if len(set(names)) != len(names):
        problems.append("duplicate vertex names")
    enames = [e.name for e in gog.edges]
    if len(set(enames)) != len(enames):
        problems.append("duplicate edge names")
    known = set(names)
    for e in gog.edges:
        if e.source not in known or e.target not in known:
            problems.append(f"edge {e.name}: unknown endpoint")
            continue
        if len(e.d0) != len(e.d1):
            problems.append(f"edge {e.name}: d0 has {len(e.d0)} images but d1 has {len(e.d1)}")
            continue
        for side in (0, 1):
            A = gog.alphabet_at(e.end(side))
            imgs = e.images(side)
            if any(w.alphabet != A for w in imgs):
                problems.append(f"edge {e.name}: d{side} images not over the {e.end(side)} alphabet")
                continue
            r = build(imgs, A).rank
            if r != e.rank:
                problems.append(f"edge {e.name}: d{side} is not injective (rank {r} != {e.rank})")
    if names and not problems:
        adj = {v: set() for v in names}
        for e in gog.edges:
            adj[e.source].add(e.target)
            adj[e.target].add(e.source)
        seen = {names[0]}
        queue = deque([names[0]])
        while queue:
            v = queue.popleft()
            for w in adj[v] - seen:
                seen.add(w)
                queue.append(w)
        if seen != known:
            problems.append("underlying graph is not connected")
    return ValidationReport(not problems, tuple(problems))


# --------------------------------------------------------------------------
# Britton reduction


@dataclass(frozen=True)
class BrittonWord:
    """g_0 e_1 g_1 ... e_k g_k: vertex elements alternating with edge letters."""

    start: str
    elements: tuple[Word, ...]
    letters: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if len(self.elements) != len(self.letters) + 1:
            raise GraphOfGroupsError("need one more vertex element than edge letters")

    def vertices(self, gog: GraphOfFreeGroups) -> list[str]:
        vs = [self.start]
        for name, sign in self.letters:
            e = gog.edge(name)
            if e.end(out_side(sign)) != vs[-1]:
                raise GraphOfGroupsError(f"edge letter {name}^{sign} does not leave vertex {vs[-1]}")
            vs.append(e.end(in_side(sign)))
        return vs

    def check(self, gog: GraphOfFreeGroups):
        for v, g in zip(self.vertices(gog), self.elements):
            if g.alphabet != gog.alphabet_at(v):
                raise GraphOfGroupsError(f"element {g} is not in the group of vertex {v}")

    @property
    def length(self) -> int:
        return len(self.letters)

    def is_trivial(self) -> bool:
        return not self.letters and not self.elements[0].letters

    def end(self, gog: GraphOfFreeGroups) -> str:
        return self.vertices(gog)[-1]

    def __mul__(self, other: "BrittonWord") -> "BrittonWord":
        els = self.elements[:-1] + (self.elements[-1] * other.elements[0],) + other.elements[1:]
        return BrittonWord(self.start, els, self.letters + other.letters)

    def inverse(self, gog: GraphOfFreeGroups) -> "BrittonWord":
        return BrittonWord(
            self.end(gog),
            tuple(g.inverse() for g in reversed(self.elements)),
            tuple((n, -s) for n, s in reversed(self.letters)),
        )

    def __str__(self):
        parts = []
        for i, g in enumerate(self.elements):
            if g.letters:
                parts.append(f"({g})")
            if i < len(self.letters):
                n, s = self.letters[i]
                parts.append(n if s > 0 else f"{n}^-1")
        return " ".join(parts) or "1"


def vertex_element(vertex: str, g: Word) -> BrittonWord:
    return BrittonWord(vertex, (g,), ())


def britton_reduce(gog: GraphOfFreeGroups, w: BrittonWord) -> BrittonWord:
    """Remove every pinch e^s g e^-s with g in the image on the far side."""
    w.check(gog)
    els: list[Word] = [w.elements[0]]
    lets: list[tuple[str, int]] = []
    for letter, g in zip(w.letters, w.elements[1:]):
        if lets and lets[-1] == (letter[0], -letter[1]):
            name, sign = lets[-1]
            inner = in_side(sign)
            x = gog.express(name, inner, els[-1])
            if x is not None:
                moved = gog.edge_map(name, 1 - inner, x)
                lets.pop()
                els.pop()
                els[-1] = els[-1] * moved * g
                continue
        lets.append(letter)
        els.append(g)
    return BrittonWord(w.start, tuple(els), tuple(lets))


# --------------------------------------------------------------------------
# tree paths and their stabilizers


@dataclass(frozen=True)
class TreePath:
    start: str
    steps: tuple[tuple[Word, str, int], ...]

    def __len__(self):
        return len(self.steps)

    def vertices(self, gog: GraphOfFreeGroups) -> list[str]:
        vs = [self.start]
        for g, name, sign in self.steps:
            e = gog.edge(name)
            if e.end(out_side(sign)) != vs[-1]:
                raise GraphOfGroupsError(f"step along {name}^{sign} does not leave vertex {vs[-1]}")
            if g.alphabet != gog.alphabet_at(vs[-1]):
                raise GraphOfGroupsError(f"element {g} is not in the group of vertex {vs[-1]}")
            vs.append(e.end(in_side(sign)))
        return vs

    def backtrack_at(self, gog: GraphOfFreeGroups) -> int | None:
        """Index of the first step that returns along the previous tree edge."""
        for i in range(1, len(self.steps)):
            _, n0, s0 = self.steps[i - 1]
            g, n1, s1 = self.steps[i]
            if n0 == n1 and s0 == -s1 and gog.image_graph(n0, in_side(s0)).contains(g):
                return i
        return None

    def is_reduced(self, gog: GraphOfFreeGroups) -> bool:
        self.vertices(gog)
        return self.backtrack_at(gog) is None

    def __str__(self):
        return f"[{self.start}] " + " ; ".join(
            f"({g}) {n}{'' if s > 0 else '^-1'}" for g, n, s in self.steps)


@dataclass(frozen=True)
class PathStabilizer:
    path: TreePath
    vertex: str  # vertex group the result lives in
    graph: SubgroupGraph
    edge_coordinates: tuple[Word, ...]  # generators in the first edge group

    @property
    def rank(self) -> int:
        return self.graph.rank

    @property
    def trivial(self) -> bool:
        return self.graph.rank == 0


def path_stabilizer(gog: GraphOfFreeGroups, path: TreePath, cap: int = DEFAULT_CAP) -> PathStabilizer:
    if not path.steps:
        raise GraphOfGroupsError("path must have length at least 1")
    vs = path.vertices(gog)
    bt = path.backtrack_at(gog)
    if bt is not None:
        raise GraphOfGroupsError(f"path backtracks at step {bt}")
    g1, e1, s1 = path.steps[0]
    first = gog.edge(e1)
    Z1 = first.basis_alphabet
    # generators of the running intersection, as (current edge coords, first edge coords)
    pairs = [(Word.generator(Z1, z), Word.generator(Z1, z)) for z in Z1]
    prev_name, prev_sign = e1, s1
    for i in range(1, len(path.steps)):
        if not pairs:
            break
        g, name, sign = path.steps[i]
        v = vs[i]
        A = gog.alphabet_at(v)
        prev = gog.edge(prev_name)
        cur_coords = [p for p, _ in pairs]
        in_imgs = [gog.edge_map(prev_name, in_side(prev_sign), p) for p in cur_coords]
        running = build(in_imgs, A)
        nxt = _conj_graph(gog.image_graph(name, out_side(sign)), g)
        T = intersect(running, nxt, cap)
        if T.rank == 0:
            pairs = []
            break
        # rewrite T's basis through the current generators back to first-edge coordinates
        s_expr = BasisExpresser(cur_coords, prev.basis_alphabet)
        to_first = dict(zip(s_expr.target.generators, (q for _, q in pairs)))
        new_pairs = []
        for t in T.basis():
            in_coords = gog.express(prev_name, in_side(prev_sign), t)
            s_word = None if in_coords is None else s_expr.express(in_coords)
            there = gog.express(name, out_side(sign), g.inverse() * t * g)
            if s_word is None or there is None:
                raise AssertionError("intersection element escaped its subgroups")
            new_pairs.append((there, substitute(s_word, to_first, Z1)))
        pairs = new_pairs
        prev_name, prev_sign = name, sign
    v0 = vs[0]
    A0 = gog.alphabet_at(v0)
    gens = [gog.edge_map(e1, out_side(s1), q).conjugate_by(g1) for _, q in pairs]
    return PathStabilizer(path, v0, build(gens, A0), tuple(q for _, q in pairs))


def _conj_graph(H: SubgroupGraph, g: Word) -> SubgroupGraph:
    return build([u.conjugate_by(g) for u in H.basis()], H.alphabet)


def stabilizer_fixes_path(gog: GraphOfFreeGroups, stab: PathStabilizer) -> bool:
    """Check, by Britton reduction alone, that each generator fixes every edge of the path."""
    path = stab.path
    for x in stab.graph.basis():
        xw = vertex_element(stab.vertex, x)
        for i in range(len(path.steps)):
            p = path_prefix(path, i)
            conj = britton_reduce(gog, p.inverse(gog) * xw * p)
            if conj.letters:
                return False
            _, name, sign = path.steps[i]
            if not gog.image_graph(name, out_side(sign)).contains(conj.elements[0]):
                return False
    return True


def path_prefix(path: TreePath, i: int) -> BrittonWord:
    """g_1 e_1 g_2 ... e_i g_{i+1} (0-based i): carries the base edge data to step i."""
    els = tuple(g for g, _, _ in path.steps[: i + 1])
    lets = tuple((n, s) for _, n, s in path.steps[:i])
    return BrittonWord(path.start, els, lets)


# --------------------------------------------------------------------------
# sampling


def _ball_element(rng: random.Random, A: Alphabet, radius: int) -> Word:
    m = len(A)
    if m == 0 or radius == 0:
        return Word(A)
    sizes = [1] + [2 * m * (2 * m - 1) ** (l - 1) for l in range(1, radius + 1)]
    length = rng.choices(range(radius + 1), weights=sizes)[0]
    letters: list[int] = []
    for _ in range(length):
        choices = [x for k in range(1, m + 1) for x in (k, -k) if not (letters and x == -letters[-1])]
        letters.append(rng.choice(choices))
    return Word(A, tuple(letters))


def _sample_path(gog: GraphOfFreeGroups, k: int, radius: int, rng: random.Random, max_tries: int = 200):
    start = rng.choice([v.name for v in gog.vertices])
    v = start
    steps: list[tuple[Word, str, int]] = []
    rejections = 0
    for _ in range(k):
        options = gog.incident(v)
        if not options:
            return None, rejections
        for _ in range(max_tries):
            name, sign = rng.choice(options)
            g = _ball_element(rng, gog.alphabet_at(v), radius)
            if steps:
                _, pn, ps = steps[-1]
                if pn == name and ps == -sign and gog.image_graph(pn, in_side(ps)).contains(g):
                    rejections += 1
                    continue
            break
        else:
            return None, rejections
        steps.append((g, name, sign))
        v = gog.edge(name).end(in_side(sign))
    return TreePath(start, tuple(steps)), rejections


def _sample_one(args):
    gog, k, radius, seed, index, cap = args
    rng = random.Random(f"{seed}:{index}")
    path, rejections = _sample_path(gog, k, radius, rng)
    if path is None:
        return index, None, None, rejections
    try:
        stab = path_stabilizer(gog, path, cap)
    except ResourceCapExceeded:
        return index, path, None, rejections
    return index, path, stab.rank, rejections


@dataclass(frozen=True)
class AcylReport:
    k: int
    C: int
    samples: int
    seed: int
    ball_radius: int
    violations: tuple[tuple[TreePath, int], ...]
    rejections: int
    inconclusive: int
    verdict: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "verdict", "violated" if self.violations else "no_violation_found")

    def lines(self) -> list[str]:
        out = [
            f"ball_radius = {self.ball_radius}",
            f"C = {self.C}",
            f"inconclusive_samples = {self.inconclusive}",
            f"k = {self.k}",
            f"rejections = {self.rejections}",
            f"samples = {self.samples}",
            f"seed = {self.seed}",
            f"verdict = {self.verdict}",
            f"violations = {len(self.violations)}",
        ]
        if self.violations:
            p, r = self.violations[0]
            out.append(f"witness.path = {p}")
            out.append(f"witness.stabilizer_rank = {r}")
        else:
            out.append("note = sampling evidence only; no_violation_found is not a proof")
        return sorted(out)


def acyl_sample(gog: GraphOfFreeGroups, k: int, C: int = 1, samples: int = 1000, seed: int = 0,
                ball_radius: int = 3, workers: int = 1, cap: int = DEFAULT_CAP) -> AcylReport:
    """Sample reduced tree paths of length k and look for nontrivial pointwise stabilizers.

    Vertex groups are free, so a stabilizer has at most C elements exactly when
    it is trivial; any positive-rank stabilizer is a violation.
    """
    if k < 1 or C < 1 or samples < 0 or ball_radius < 0:
        raise ValueError("need k >= 1, C >= 1, samples >= 0, ball_radius >= 0")
    jobs = [(gog, k, ball_radius, seed, i, cap) for i in range(samples)]
    if workers > 1 and samples > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sample_one, jobs, chunksize=max(1, samples // (4 * workers))))
    else:
        results = [_sample_one(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    violations = []
    rejections = 0
    inconclusive = 0
    for _, path, r, rej in results:
        rejections += rej
        if r is None:
            inconclusive += 1
        elif r >= 1:
            violations.append((path, r))
    return AcylReport(k, C, samples, seed, ball_radius, tuple(violations), rejections, inconclusive)


# --------------------------------------------------------------------------
# explicit constants


def _positive(*xs):
    for x in xs:
        if not isinstance(x, int) or x < 1:
            raise ValueError(f"expected a positive integer, got {x!r}")


def lemma_nv(heights: Sequence[int]) -> int:
    """Number of edge ends at a vertex that a nontrivial element can fix: sum of heights."""
    if not heights:
        raise ValueError("need at least one incident edge height")
    _positive(*heights)
    return sum(heights)


def lemma215_bound(n: int, k: int) -> int:
    """Height bound n^k for edge stabilizers of a (k, C)-acylindrical splitting."""
    _positive(n, k)
    return n ** k


def thm31_constant(k_vert: int, k: int) -> int:
    """(2 k_vert)^k * k_vert."""
    _positive(k_vert, k)
    return (2 * k_vert) ** k * k_vert
