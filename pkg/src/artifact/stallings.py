"""Stallings graphs of finitely generated subgroups of free groups.

A subgroup is stored as its folded core graph with base vertex 0 and vertices
numbered breadth-first from the base (letters tried as a, a^-1, b, b^-1, ...),
so two equal subgroups give identical objects.  Intersections and conjugate
intersections come from fiber products explored pair by pair from a start
vertex; ``cap`` bounds the number of product edges examined.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .words import Alphabet, CyclicWord, Word, WordError, free_reduce

DEFAULT_CAP = 10**7


class ResourceCapExceeded(RuntimeError):
    """A fiber product grew past the configured edge cap; the answer is unknown."""


class NotABasis(ValueError):
    pass


def _letter_order(alphabet: Alphabet) -> list[int]:
    out = []
    for i in range(1, len(alphabet) + 1):
        out += [i, -i]
    return out


def _shortlex(w: Word):
    return (len(w), [2 * abs(x) + (x < 0) for x in w.letters])


# --------------------------------------------------------------------------
# folding


class _Folder:
    """Mutable labelled graph that folds itself as edges are added.

    With ``track=True`` every edge also carries a word over the abstract
    generators (positive integers 1..r), and folding applies gauge changes so
    that reading a closed path at the base multiplies out to the expression of
    that loop in the generators.  This only works when the generators are a
    free basis; a conflict raises NotABasis.
    """

    def __init__(self, track=False):
        self.track = track
        self.edges: dict[int, list] = {}  # id -> [src, letter, dst, label]
        self.adj: list[dict[int, list[int]]] = [{}]
        self.alive = [True]
        self._next_edge = 0

    def new_vertex(self) -> int:
        self.adj.append({})
        self.alive.append(True)
        return len(self.adj) - 1

    def add_path(self, letters: Sequence[int], label: tuple[int, ...] = ()):
        """Attach a closed path at the base reading ``letters``."""
        if not letters:
            return
        v = 0
        for k, x in enumerate(letters):
            w = 0 if k == len(letters) - 1 else self.new_vertex()
            self._add_edge(v, x, w, label if k == len(letters) - 1 else ())
            v = w

    def _add_edge(self, u, x, v, label):
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = [u, x, v, label]
        self.adj[u].setdefault(x, []).append(eid)
        self.adj[v].setdefault(-x, []).append(eid)

    def _traverse(self, eid, u, x):
        src, y, dst, lab = self.edges[eid]
        if src == u and y == x:
            return dst, lab
        return src, _inv(lab)

    def _detach(self, eid):
        src, x, dst, _ = self.edges.pop(eid)
        self.adj[src][x].remove(eid)
        if not self.adj[src][x]:
            del self.adj[src][x]
        self.adj[dst][-x].remove(eid)
        if not self.adj[dst][-x]:
            del self.adj[dst][-x]

    def _gauge(self, z, c):
        if not c:
            return
        ci = _inv(c)
        seen = set()
        for ids in self.adj[z].values():
            for eid in ids:
                if eid in seen:
                    continue
                seen.add(eid)
                e = self.edges[eid]
                lab = e[3]
                if e[0] == z:
                    lab = _mul(ci, lab)
                if e[2] == z:
                    lab = _mul(lab, c)
                e[3] = lab

    def _merge(self, keep, gone):
        touched = set()
        for ids in list(self.adj[gone].values()):
            for eid in list(ids):
                if eid not in self.edges:
                    continue
                e = self.edges[eid]
                self._detach(eid)
                src = keep if e[0] == gone else e[0]
                dst = keep if e[2] == gone else e[2]
                self.edges[eid] = [src, e[1], dst, e[3]]
                self.adj[src].setdefault(e[1], []).append(eid)
                self.adj[dst].setdefault(-e[1], []).append(eid)
                touched.update((src, dst))
        self.adj[gone] = {}
        self.alive[gone] = False
        return touched

    def fold(self, rng=None):
        """Fold until deterministic.  ``rng`` randomizes the identification order."""
        stack = [v for v in range(len(self.adj)) if self.alive[v]]
        if rng is not None:
            rng.shuffle(stack)
        while stack:
            if rng is not None:
                k = rng.randrange(len(stack))
                stack[k], stack[-1] = stack[-1], stack[k]
            u = stack.pop()
            if not self.alive[u]:
                continue
            clashes = [x for x, ids in self.adj[u].items() if len(ids) > 1]
            if not clashes:
                continue
            clash = clashes[0] if rng is None else rng.choice(clashes)
            e1, e2 = self.adj[u][clash][:2] if rng is None else rng.sample(self.adj[u][clash], 2)
            w1, l1 = self._traverse(e1, u, clash)
            w2, l2 = self._traverse(e2, u, clash)
            if w1 == w2:
                if self.track and l1 != l2:
                    raise NotABasis("generators satisfy a relation")
                self._detach(e2)
            else:
                keep, gone, lk, lg = w1, w2, l1, l2
                if gone == 0 or (keep != 0 and self._degree(gone) > self._degree(keep)):
                    keep, gone, lk, lg = w2, w1, l2, l1
                if self.track:
                    self._gauge(gone, _mul(_inv(lg), lk))
                stack.extend(self._merge(keep, gone))
                stack.append(keep)
            stack.append(u)

    def _degree(self, v):
        return sum(len(ids) for ids in self.adj[v].values())

    def prune(self):
        """Remove hanging trees away from the base."""
        queue = [v for v in range(1, len(self.adj)) if self.alive[v] and self._degree(v) <= 1]
        while queue:
            v = queue.pop()
            if not self.alive[v] or v == 0 or self._degree(v) > 1:
                continue
            nbrs = []
            for ids in list(self.adj[v].values()):
                for eid in list(ids):
                    e = self.edges[eid]
                    nbrs.append(e[2] if e[0] == v else e[0])
                    self._detach(eid)
            self.alive[v] = False
            queue.extend(nbrs)

    def as_maps(self):
        """(out, labels): out[v][x] = w and labels[v][x] for live vertices."""
        out: dict[int, dict[int, int]] = {}
        labels: dict[int, dict[int, tuple]] = {}
        for v in range(len(self.adj)):
            if not self.alive[v]:
                continue
            out[v] = {}
            labels[v] = {}
            for x, ids in self.adj[v].items():
                (eid,) = ids
                w, lab = self._traverse(eid, v, x)
                out[v][x] = w
                labels[v][x] = lab
        return out, labels


def _inv(w):
    return tuple(-x for x in reversed(w))


def _mul(u, v):
    return free_reduce(u + v)


def _canonical(out: dict, base, alphabet: Alphabet):
    """BFS renumbering of a folded graph given as out[v][letter] = w."""
    order = _letter_order(alphabet)
    num = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        nbrs = out[v]
        for x in order:
            w = nbrs.get(x)
            if w is not None and w not in num:
                num[w] = len(num)
                queue.append(w)
    edges = sorted(
        (num[v], x - 1, num[w]) for v, nbrs in out.items() if v in num for x, w in nbrs.items() if x > 0
    )
    return len(num), tuple(edges), num


def _prune_map(out: dict, base=None) -> dict:
    """Core of a folded graph given as a map (relative to ``base`` if given)."""
    out = {v: dict(n) for v, n in out.items()}
    deg = {v: len(n) for v, n in out.items()}
    queue = [v for v, d in deg.items() if d <= 1 and v != base]
    while queue:
        v = queue.pop()
        if v not in out or v == base or deg[v] > 1:
            continue
        for x, w in out.pop(v).items():
            if w in out and w != v:
                del out[w][-x]
                deg[w] -= 1
                if deg[w] <= 1:
                    queue.append(w)
        del deg[v]
    return out


# --------------------------------------------------------------------------
# the subgroup graph


@dataclass(frozen=True)
class SubgroupGraph:
    alphabet: Alphabet
    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    generator_words: tuple[Word, ...] = field(default=(), compare=False, repr=False)

    base = 0

    @cached_property
    def out(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.num_vertices)]
        for s, i, d in self.edges:
            out[s][i + 1] = d
            out[d][-(i + 1)] = s
        return out

    @cached_property
    def _tree(self):
        """BFS spanning tree: (path word letters to each vertex, non-tree edges)."""
        order = _letter_order(self.alphabet)
        paths: list[tuple[int, ...] | None] = [None] * self.num_vertices
        paths[0] = ()
        tree_edges = set()
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for x in order:
                w = self.out[v].get(x)
                if w is not None and paths[w] is None:
                    paths[w] = paths[v] + (x,)
                    tree_edges.add((v, x - 1, w) if x > 0 else (w, -x - 1, v))
                    queue.append(w)
        extra = [e for e in self.edges if e not in tree_edges]
        return paths, extra

    def path_to(self, v: int) -> Word:
        return Word(self.alphabet, self._tree[0][v])

    @cached_property
    def basis_alphabet(self) -> Alphabet:
        return Alphabet(tuple(f"h{k}" for k in range(1, self.rank + 1)))

    @cached_property
    def _basis_index(self):
        return {e: k for k, e in enumerate(self._tree[1])}

    def basis(self) -> list[Word]:
        paths = self._tree[0]
        out = []
        for s, i, d in self._tree[1]:
            out.append(Word(self.alphabet, paths[s] + (i + 1,) + _inv(paths[d])))
        return out

    @property
    def rank(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def is_trivial(self) -> bool:
        return not self.edges

    def read(self, w: Word | Sequence[int], start: int = 0):
        v = start
        letters = w.letters if isinstance(w, Word) else w
        for x in letters:
            v = self.out[v].get(x)
            if v is None:
                return None
        return v

    def contains(self, w: Word) -> bool:
        return self.read(w) == 0

    def serialize(self) -> str:
        lines = [str(self.num_vertices)]
        lines += [f"{s} {self.alphabet.generators[i]} {d}" for s, i, d in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "SubgroupGraph":
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        n = int(lines[0])
        edges = []
        for ln in lines[1:]:
            s, g, d = ln.split()
            edges.append((int(s), alphabet.index(g), int(d)))
        out = {v: {} for v in range(n)}
        for s, i, d in edges:
            if (i + 1) in out[s] or -(i + 1) in out[d]:
                raise WordError("serialized graph is not folded")
            out[s][i + 1] = d
            out[d][-(i + 1)] = s
        n2, e2, _ = _canonical(_prune_map(out, 0), 0, alphabet)
        graph = cls(alphabet, n2, e2)
        if n2 != n or e2 != tuple(sorted(edges)):
            raise WordError("serialized graph is not in canonical core form")
        return graph

    def __str__(self):
        return f"SubgroupGraph(rank={self.rank}, vertices={self.num_vertices}, edges={len(self.edges)})"


def _from_map(out, base, alphabet, gens=()) -> SubgroupGraph:
    n, edges, _ = _canonical(_prune_map(out, base), base, alphabet)
    return SubgroupGraph(alphabet, n, edges, tuple(gens))


def build(generators: Iterable[Word], alphabet: Alphabet | None = None, rng=None) -> SubgroupGraph:
    gens = list(generators)
    if alphabet is None:
        if not gens:
            raise WordError("an alphabet is needed to build the trivial subgroup")
        alphabet = gens[0].alphabet
    folder = _Folder()
    for g in gens:
        if g.alphabet != alphabet:
            raise WordError("generators over different alphabets")
        folder.add_path(g.letters)
    folder.fold(rng)
    folder.prune()
    out, _ = folder.as_maps()
    n, edges, _ = _canonical(out, 0, alphabet)
    return SubgroupGraph(alphabet, n, edges, tuple(gens))


def rank(H: SubgroupGraph) -> int:
    return H.rank


def membership(H: SubgroupGraph, w: Word) -> Word | None:
    """Witness over H's spanning-tree basis if w is in H, else None."""
    if w.alphabet != H.alphabet:
        raise WordError("word and subgroup over different alphabets")
    idx = H._basis_index
    v = 0
    out = []
    for x in w.letters:
        u = v
        v = H.out[v].get(x)
        if v is None:
            return None
        e = (u, x - 1, v) if x > 0 else (v, -x - 1, u)
        k = idx.get(e)
        if k is not None:
            out.append((k + 1) if x > 0 else -(k + 1))
    if v != 0:
        return None
    return Word(H.basis_alphabet, tuple(out))


def is_finite_index(H: SubgroupGraph) -> int | None:
    full = 2 * len(H.alphabet)
    if all(len(nbrs) == full for nbrs in H.out):
        return H.num_vertices
    return None


# --------------------------------------------------------------------------
# expressing members in a prescribed basis


class BasisExpresser:
    """Rewrite members of <u_1, ..., u_r> as words in the u_i.

    Raises NotABasis if the u_i do not freely generate their span.
    """

    def __init__(self, images: Sequence[Word], alphabet: Alphabet | None = None, names: Sequence[str] | None = None):
        self.images = list(images)
        self.alphabet = alphabet if alphabet is not None else self.images[0].alphabet
        names = names or [f"y{k}" for k in range(1, len(self.images) + 1)]
        self.target = Alphabet(tuple(names))
        folder = _Folder(track=True)
        for k, u in enumerate(self.images):
            if not u.letters:
                raise NotABasis(f"generator {k + 1} is trivial")
            folder.add_path(u.letters, (k + 1,))
        folder.fold()
        folder.prune()
        self._out, self._labels = folder.as_maps()
        n_edges = sum(len(v) for v in self._out.values()) // 2
        if n_edges - len(self._out) + 1 != len(self.images):
            raise NotABasis("rank of span is smaller than the number of generators")

    def express(self, w: Word) -> Word | None:
        v = 0
        acc: list[int] = []
        for x in w.letters:
            nxt = self._out[v].get(x)
            if nxt is None:
                return None
            for y in self._labels[v][x]:
                if acc and acc[-1] == -y:
                    acc.pop()
                else:
                    acc.append(y)
            v = nxt
        if v != 0:
            return None
        return Word(self.target, tuple(acc))

    @cached_property
    def graph(self) -> SubgroupGraph:
        return _from_map(self._out, 0, self.alphabet, self.images)


# --------------------------------------------------------------------------
# fiber products


def _explore(outs: Sequence[list[dict[int, int]]], start: tuple, letters, budget: list[int]):
    """Component of the labelled product containing ``start``.

    Returns a map tuple -> {letter: tuple}.  ``budget`` is a one-element list
    decremented per product edge.
    """
    comp: dict[tuple, dict[int, tuple]] = {start: {}}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        nbrs = comp[t]
        for x in letters:
            img = []
            for out, v in zip(outs, t):
                w = out[v].get(x)
                if w is None:
                    break
                img.append(w)
            else:
                s = tuple(img)
                nbrs[x] = s
                budget[0] -= 1
                if budget[0] < 0:
                    raise ResourceCapExceeded("fiber product exceeded the edge cap")
                if s not in comp:
                    comp[s] = {}
                    queue.append(s)
    return comp


def _map_rank(comp) -> int:
    e = sum(len(n) for n in comp.values()) // 2
    return e - len(comp) + 1


def intersect(H: SubgroupGraph, K: SubgroupGraph, cap: int = DEFAULT_CAP) -> SubgroupGraph:
    if H.alphabet != K.alphabet:
        raise WordError("subgroups over different alphabets")
    comp = _explore([H.out, K.out], (0, 0), _letter_order(H.alphabet), [cap])
    return _from_map(comp, (0, 0), H.alphabet)


def conjugate(H: SubgroupGraph, g: Word) -> SubgroupGraph:
    """Graph of g H g^-1."""
    return build([u.conjugate_by(g) for u in H.basis()], H.alphabet)


def _loop_basis(comp, base, alphabet) -> list[Word]:
    """Basis of closed paths at ``base`` in a component map."""
    order = _letter_order(alphabet)
    paths = {base: ()}
    queue = deque([base])
    tree = set()
    while queue:
        v = queue.popleft()
        for x in order:
            w = comp[v].get(x)
            if w is not None and w not in paths:
                paths[w] = paths[v] + (x,)
                tree.add((v, x))
                tree.add((w, -x))
                queue.append(w)
    out = []
    for v in sorted(comp, key=lambda t: (len(paths[t]), t)):
        for x in order:
            if x < 0:
                continue
            w = comp[v].get(x)
            if w is not None and (v, x) not in tree:
                out.append(Word(alphabet, paths[v] + (x,) + _inv(paths[w])))
    return out


@dataclass(frozen=True)
class ConjugateIntersection:
    representative: Word
    core: SubgroupGraph


def _self_components(H: SubgroupGraph, cap: int):
    """Non-diagonal components of H x H (as maps), in a fixed order."""
    letters = _letter_order(H.alphabet)
    seen = set()
    budget = [cap]
    diag = _explore([H.out, H.out], (0, 0), letters, budget)
    seen.update(diag)
    comps = []
    for u in range(H.num_vertices):
        for v in range(H.num_vertices):
            if (u, v) in seen:
                continue
            comp = _explore([H.out, H.out], (u, v), letters, budget)
            seen.update(comp)
            comps.append(comp)
    return comps


def _best_representative(H: SubgroupGraph, comp) -> tuple[Word, tuple]:
    best = None
    for u, v in comp:
        g = H.path_to(u) * H.path_to(v).inverse()
        key = _shortlex(g)
        if best is None or key < best[0]:
            best = (key, g, (u, v))
    return best[1], best[2]


def conjugate_intersections(H: SubgroupGraph, cap: int = DEFAULT_CAP) -> list[ConjugateIntersection]:
    """H cap gHg^-1 for each double coset HgH (g not in H) where it is nontrivial."""
    out = []
    for comp in _self_components(H, cap):
        if _map_rank(comp) < 1:
            continue
        g, (u, v) = _best_representative(H, comp)
        pu = H.path_to(u)
        gens = [w.conjugate_by(pu) for w in _loop_basis(comp, (u, v), H.alphabet)]
        out.append(ConjugateIntersection(g, build(gens, H.alphabet)))
    out.sort(key=lambda c: _shortlex(c.representative))
    return out


def is_malnormal(H: SubgroupGraph, cap: int = DEFAULT_CAP) -> tuple[bool, Word | None]:
    """(True, None) if H is malnormal, else (False, g) with H cap gHg^-1 nontrivial."""
    bad = conjugate_intersections(H, cap)
    if bad:
        return False, bad[0].representative
    return True, None


def cyclic_malnormal_fastpath(w: CyclicWord) -> bool:
    """Malnormality of <w> for a nontrivial cyclically reduced w, in linear time."""
    if not w.letters:
        raise WordError("the trivial word generates the trivial subgroup")
    return not w.is_proper_power() and w != w.inverse()


# --------------------------------------------------------------------------
# height


@dataclass(frozen=True)
class HeightCertificate:
    subgroup: SubgroupGraph
    n: int
    verdict: str  # "holds" or "fails"
    witness: tuple[Word, ...] | None = None
    element: Word | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def height_leq(H: SubgroupGraph, n: int, cap: int = DEFAULT_CAP) -> HeightCertificate:
    """Decide whether any n conjugates g_i H g_i^-1 with distinct cosets g_i H meet trivially.

    Nontrivial intersections of such conjugates are loops in components of the
    n-fold fiber product of the core graph whose vertex tuples have pairwise
    distinct entries; reading a word is injective on a folded graph, so
    distinctness is constant on a component.  Components are grown one factor
    at a time, keeping only cores of positive rank.
    """
    if n < 1:
        raise ValueError("n must be positive")
    letters = _letter_order(H.alphabet)
    budget = [cap]
    if H.rank == 0:
        return HeightCertificate(H, n, "holds")
    level = [{(v,): {x: (w,) for x, w in H.out[v].items()} for v in range(H.num_vertices)}]
    for m in range(1, n):
        nxt = []
        keys = set()
        for comp in level:
            seen = set()
            outs = [_TupleOut(comp), H.out]
            for t in comp:
                for v in range(H.num_vertices):
                    if v in t or (t, v) in seen:
                        continue
                    prod = _explore(outs, (t, v), letters, budget)
                    seen.update(prod)
                    if _map_rank(prod) < 1:
                        continue
                    flat = {a + (b,): {x: c + (d,) for x, (c, d) in nb.items()} for (a, b), nb in prod.items()}
                    core = _prune_map(flat)
                    key = frozenset(tuple(sorted(s)) for s in core)
                    if key not in keys:
                        keys.add(key)
                        nxt.append(core)
        level = nxt
        if not level:
            return HeightCertificate(H, n, "holds")
    comp = level[0]
    t = min(comp)
    gs = tuple(H.path_to(v).inverse() for v in t)
    loops = _loop_basis(comp, t, H.alphabet)
    return HeightCertificate(H, n, "fails", gs, loops[0] if loops else None)


class _TupleOut:
    """Adapter so a component map can be a factor in _explore."""

    def __init__(self, comp):
        self.comp = comp

    def __getitem__(self, t):
        return self.comp[t]


def height(H: SubgroupGraph, max_n: int = 8, cap: int = DEFAULT_CAP) -> int | None:
    """Least n <= max_n with height_leq(H, n) holding, or None."""
    for n in range(1, max_n + 1):
        if height_leq(H, n, cap).holds:
            return n
    return None
