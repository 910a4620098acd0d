import io as stdio

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact import io
from artifact.bassserre import EdgeGroup, GraphOfFreeGroups, TreePath, VertexGroup
from artifact.cli import main
from artifact.repro import EX37_RELATOR, block_length, gen_sequence
from artifact.words import Alphabet, Word, substitute

AB = Alphabet.of("a b")

CENTRAL_GOG = """\
# <a> and <b> glued along a^2 = b^2
[vertex A] gens: a
[vertex B] gens: b
[edge e] from: A to: B
  d0: a^2
  d1: b^2
"""


def run(tmp_path, *argv, files=None):
    for name, text in (files or {}).items():
        (tmp_path / name).write_text(text)
    out = stdio.StringIO()
    code = main([a.replace("@", str(tmp_path) + "/") for a in argv], out=out)
    return code, out.getvalue()


def kv(text):
    return dict(ln.split(": ", 1) for ln in text.splitlines())


# -- sequence ---------------------------------------------------------------------------


def test_sequence_values():
    seq = gen_sequence(2)
    assert seq.n_values == (1, 464, 1722824)
    assert seq.lengths[0] == 107879 == 463 + sum(range(1, 464))
    assert len(seq.words) == 1 and len(seq.words[0]) == 107879
    assert seq.lengths[1] == block_length(464, 1722824) > 10 ** 12
    with pytest.raises(ValueError):
        gen_sequence(0)


# -- file formats -----------------------------------------------------------------------


def test_subgroup_file():
    A, words = io.parse_subgroup("# comment\na^2\nb a b^-1\n")
    assert A == AB and [str(w) for w in words] == ["a^2", "b a b^-1"]
    A, words = io.parse_subgroup("[generators] a b c\na\n")
    assert len(A) == 3
    assert io.parse_subgroup(io.serialize_subgroup(A, words)) == (A, words)
    with pytest.raises(io.FormatError):
        io.parse_subgroup("[generators] a\nb\n")


def test_presentation_file():
    A, rels = io.parse_presentation("[generators] a b\n[relator]\na b a^-1 b^-1\n")
    assert A == AB and str(rels[0]) == "a b a^-1 b^-1"
    for bad in ("[relator] a\n", "[generators] a\n[generators] b\n", "a b\n", "[generators] a\n[relator] b\n"):
        with pytest.raises(io.FormatError):
            io.parse_presentation(bad)
    with pytest.raises(io.FormatError):
        io.parse_one_relator("[generators] a b\n[relator] a\n[relator] b\n")


def test_gog_file():
    gog = io.parse_gog(CENTRAL_GOG)
    assert [v.name for v in gog.vertices] == ["A", "B"]
    assert str(gog.edges[0].d1[0]) == "b^2"
    assert io.parse_gog(io.serialize_gog(gog)) == gog
    for bad in ("junk\n", "[edge e] from: A to: B d0: d1:\n", "[vertex A] gens: a\n[vertex A] gens: b\n",
                "[vertex A] gens: a\n[edge e] from: A to: A d0: b d1: a\n", "[vertex A] gens: a color: red\n"):
        with pytest.raises(io.FormatError):
            io.parse_gog(bad)


def test_path_file():
    gog = io.parse_gog(CENTRAL_GOG)
    path = io.parse_path("1 | e -1\na | e +1\n", gog)
    assert path.start == "B" and len(path) == 2
    assert io.parse_path(io.serialize_path(path), gog) == path
    for bad in ("a e +1\n", "1 | e +2\n", "", "1 | f +1\n", "a | e +1\na | e +1\n", "b | e +1\n"):
        with pytest.raises(io.FormatError):
            io.parse_path(bad, gog)


words_ab = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8).map(lambda xs: Word(AB, tuple(xs)))
nonempty_ab = words_ab.filter(lambda w: len(w) > 0)


@settings(max_examples=200)
@given(st.lists(words_ab, max_size=5))
def test_subgroup_round_trip(words):
    assert io.parse_subgroup(io.serialize_subgroup(AB, words)) == (AB, words)


@settings(max_examples=200)
@given(st.lists(nonempty_ab, min_size=1, max_size=4))
def test_presentation_round_trip(words):
    A, rels = io.parse_presentation(io.serialize_presentation(AB, words))
    assert A == AB and rels == words
    # serializing the parsed value again is a fixed point
    assert io.serialize_presentation(A, rels) == io.serialize_presentation(AB, words)


@settings(max_examples=200)
@given(st.lists(st.tuples(nonempty_ab, nonempty_ab), max_size=3), st.lists(nonempty_ab, max_size=3))
def test_gog_and_path_round_trip(edge_images, path_elems):
    edges = tuple(EdgeGroup(f"e{i}", "F", "F", (u,), (v,)) for i, (u, v) in enumerate(edge_images))
    gog = GraphOfFreeGroups((VertexGroup("F", AB),), edges)
    text = io.serialize_gog(gog)
    assert io.parse_gog(text) == gog
    assert io.serialize_gog(io.parse_gog(text)) == text
    if edges:
        path = TreePath("F", tuple((g, "e0", 1 if i % 2 else -1) for i, g in enumerate(path_elems)))
        if path.steps:
            assert io.parse_path(io.serialize_path(path), gog) == path


# -- command line -----------------------------------------------------------------------


def test_cli_cprime(tmp_path):
    files = {"ex.txt": f"[generators] a b\n[relator] {EX37_RELATOR}\n",
             "comm.txt": "[generators] a b\n[relator] a b a^-1 b^-1\n"}
    code, out = run(tmp_path, "cprime", "--lambda", "1/6", "@ex.txt", files=files)
    assert code == 0
    assert kv(out)["cprime"] == "holds" and kv(out)["max_piece_length"] == "4"
    code, out = run(tmp_path, "cprime", "--lambda", "1/6", "@comm.txt")
    assert code == 1 and "witness.piece" in kv(out)
    assert run(tmp_path, "cprime", "--lambda", "x", "@ex.txt")[0] == 3
    assert run(tmp_path, "cprime", "--lambda", "-1", "@ex.txt")[0] == 3


def test_cli_subgroup_commands(tmp_path):
    files = {"h.txt": "a^2\nb\n", "k.txt": "a^3\nb\n", "sq.txt": "a^2\n"}
    code, out = run(tmp_path, "fold", "@h.txt", files=files)
    assert code == 0 and kv(out)["rank"] == "2"
    code, out = run(tmp_path, "fold", "--serialize", "@h.txt")
    assert out.splitlines()[0] == "2"
    code, out = run(tmp_path, "member", "@h.txt", "a^2 b a^-2")
    rows = kv(out)
    assert code == 0
    # the witness spells the word in the printed basis
    basis = {k[len("basis."):]: Word.parse(v, AB) for k, v in rows.items() if k.startswith("basis.")}
    B = Alphabet.of(sorted(basis))
    assert substitute(Word.parse(rows["witness"], B), basis, AB) == Word.parse("a^2 b a^-2", AB)
    assert run(tmp_path, "member", "@h.txt", "a")[0] == 1
    code, out = run(tmp_path, "intersect", "@h.txt", "@k.txt")
    assert code == 0 and kv(out)["rank"] == "2"  # <a^6, b>
    code, out = run(tmp_path, "malnormal", "@sq.txt")
    assert code == 1 and kv(out)["witness"] == "a"
    code, out = run(tmp_path, "height", "@sq.txt")
    assert code == 0 and kv(out)["height"] == "3"
    code, out = run(tmp_path, "height", "--n", "2", "@sq.txt")
    assert code == 1 and "witness.element" in kv(out)


def test_cli_cap_is_inconclusive(tmp_path):
    files = {"h.txt": "a b a b^-1\n", "k.txt": "a b^2 a^-1 b\n"}
    code, out = run(tmp_path, "--cap", "2", "intersect", "@h.txt", "@k.txt", files=files)
    assert code == 2 and out.startswith("inconclusive")


def test_cli_one_relator_commands(tmp_path):
    files = {"bs.txt": "[generators] t b\n[relator] t b t^-1 b^-2\n",
             "ex.txt": f"[generators] a b\n[relator] {EX37_RELATOR}\n"}
    code, out = run(tmp_path, "magnus-step", "--pivot", "t", "@bs.txt", files=files)
    assert code == 0 and kv(out)["vertex.generators"] == "b_0 b_1"
    assert run(tmp_path, "magnus-step", "--pivot", "b", "@bs.txt")[0] == 3
    code, out = run(tmp_path, "hierarchy", "@ex.txt")
    assert code == 0 and kv(out)["free_rank"] == "5" and kv(out)["depth"] == "2"
    assert run(tmp_path, "hierarchy", "--max-depth", "1", "@ex.txt")[0] == 2
    code, out = run(tmp_path, "bns", "--char", "a=1,b=-1", "@ex.txt")
    assert code == 0 and kv(out)["kernel_fg"] == "finitely_generated"
    code, out = run(tmp_path, "bns", "--char", "a=1,b=0", "@ex.txt")
    assert code == 0 and kv(out)["kernel_fg"] == "not_finitely_generated"
    assert run(tmp_path, "bns", "--char", "a=1,b=1", "@bs.txt")[0] == 3


def test_cli_graph_commands(tmp_path):
    files = {"g.txt": CENTRAL_GOG, "p.txt": "1 | e -1\na | e +1\n",
             "bad.txt": "[vertex A] gens: a\n[vertex B] gens: b\n[edge e] from: A to: B d0: a; a^2 d1: b; b^2\n"}
    assert run(tmp_path, "validate-gog", "@g.txt", files=files)[0] == 0
    code, out = run(tmp_path, "validate-gog", "@bad.txt")
    assert code == 1 and "not injective" in out
    code, out = run(tmp_path, "stabilizer", "--gog", "@g.txt", "--path", "@p.txt")
    assert code == 0 and kv(out)["rank"] == "1" and kv(out)["basis.0"] == "b^2"
    code, out = run(tmp_path, "--seed", "7", "acyl", "--gog", "@g.txt", "--k", "4", "--samples", "30")
    assert code == 1 and kv(out)["verdict"] == "violated" and kv(out)["seed"] == "7"
    code2, out2 = run(tmp_path, "acyl", "--seed", "7", "--gog", "@g.txt", "--k", "4", "--samples", "30")
    assert (code2, out2) == (code, out)


def test_cli_machine_format_is_sorted(tmp_path):
    files = {"bs.txt": "[generators] t b\n[relator] t b t^-1 b^-2\n"}
    code, out = run(tmp_path, "--format", "machine", "bns", "--char", "t=1,b=0", "@bs.txt", files=files)
    lines = out.splitlines()
    assert code == 0 and lines == sorted(lines)
    assert all(" = " in ln for ln in lines)


def test_cli_usage_errors(tmp_path):
    assert run(tmp_path)[0] == 3
    assert run(tmp_path, "nonsense")[0] == 3
    assert run(tmp_path, "fold", "@missing.txt")[0] == 3
    assert run(tmp_path, "member", "@h.txt", "z", files={"h.txt": "a\n"})[0] == 3
    assert run(tmp_path, "fold", "@bad.txt", files={"bad.txt": "[generators] a\nb\n"})[0] == 3


def test_cli_repro_ex_3_7(tmp_path):
    code, out = run(tmp_path, "--format", "machine", "repro", "ex-3-7")
    assert code == 0
    assert "overall = pass" in out.splitlines()
