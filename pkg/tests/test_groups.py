import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp import config
from relhyp.errors import BackendMismatch, ConfigError, UnsupportedBackend
from relhyp.groups import (
    Cyclic,
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    MarkedGroup,
    ball,
    dihedral,
    inverse,
    multiply_reduce,
    peripheral_syllables,
    symmetric,
)


def test_free_reduction(w):
    assert multiply_reduce(w("ab"), w("b^-1a")) == w("a^2")
    assert multiply_reduce(w("a^3"), w("a^-3")).is_identity()


def test_involution(z2):
    s = z2.parse("s")
    assert (s * s).is_identity()


def test_inverse_examples(w, z2):
    assert inverse(w("ab^-1")) == w("ba^-1")
    assert inverse(w("1")).is_identity()
    Z2 = FreeAbelian(2)
    assert inverse(Z2((2, -3))) == Z2((-2, 3))


def test_syllables(f2, w):
    syl = peripheral_syllables(w("a^3b^-2a"), f2.fam)
    assert [(lam, str(h)) for lam, h in syl] == [("A", "a^3"), ("B", "b^-2"), ("A", "a")]
    assert peripheral_syllables(w("1"), f2.fam) == []
    assert [(lam, str(h)) for lam, h in peripheral_syllables(w("b^5"), f2.fam)] == [("B", "b^5")]


def test_syllables_need_free_product():
    Z = FreeGroup(1)
    fam_like = config.load("f2").fam
    with pytest.raises(UnsupportedBackend):
        peripheral_syllables(Z.parse("a"), fam_like)


def test_ball_sizes(f2):
    assert len(ball(f2.mg, 2)) == 17
    assert [str(g) for g in ball(f2.mg, 0)] == ["1"]
    Z = FreeGroup(1, ["t"])
    B = ball(MarkedGroup.default(Z), 3)
    assert sorted(g.nf[0][1] if g.nf else 0 for g in B) == list(range(-3, 4))


def test_ball_free_group_formula(f2):
    # 1 + 4 * (3^r - 1) / 2
    for r in range(6):
        assert len(ball(f2.mg, r)) == 1 + 2 * (3 ** r - 1)


@pytest.mark.parametrize("name", config.FIXTURES)
def test_group_laws_on_ball(name):
    fx = config.load(name)
    B = list(ball(fx.mg, 2))
    e = fx.group.identity
    for a, b, c in itertools.product(B, repeat=3):
        assert (a * b) * c == a * (b * c)
    for a in B:
        assert a * ~a == e == ~a * a
        assert a * e == a


@pytest.mark.parametrize("name", ["f2", "z2_z2"])
def test_syllables_remultiply_and_alternate(name):
    fx = config.load(name)
    for g in ball(fx.mg, 5):
        syl = peripheral_syllables(g, fx.fam)
        prod = fx.group.identity
        for _, h in syl:
            prod = prod * h
        assert prod == g
        idx = [i for i, _ in g.nf]
        assert all(x != y for x, y in zip(idx, idx[1:]))


@pytest.mark.parametrize("name", config.FIXTURES)
def test_ball_monotone_and_symmetric(name):
    fx = config.load(name)
    sizes = [len(ball(fx.mg, r)) for r in range(5)]
    assert sizes == sorted(sizes)
    B = ball(fx.mg, 4)
    assert {~g for g in B} == set(B)


def test_parse_round_trip(f2, z2):
    for fx in (f2, z2):
        for g in ball(fx.mg, 3):
            assert fx.parse(str(g)) == g


def test_parse_errors(f2):
    with pytest.raises(ConfigError):
        f2.parse("q")
    with pytest.raises(ConfigError):
        f2.parse("a^")


def test_mixed_backends_rejected():
    A, B = FreeGroup(1, ["a"]), FreeGroup(1, ["c"])
    with pytest.raises(BackendMismatch):
        A.parse("a") * B.parse("c")


def test_marked_group_needs_symmetry():
    G = FreeGroup(1)
    with pytest.raises(ConfigError):
        MarkedGroup(G, (G.parse("a"),))


def test_squared_generators_contain_x0():
    G = Cyclic(8)
    x0 = [G.identity, G.parse("c"), G.parse("c^-1")]
    mg = MarkedGroup.squared(G, x0)
    assert set(x0) <= set(mg.X)
    assert len(mg.X) == 5


def test_finite_groups():
    assert len(dihedral(5).elements()) == 10
    assert len(symmetric(4).elements()) == 24
    S = symmetric(3)
    for a, b in itertools.product(S.elements(), repeat=2):
        assert ~(a * b) == ~b * ~a


def test_free_product_unique_names():
    with pytest.raises(ConfigError):
        FreeProduct([FreeGroup(1, ["a"]), FreeGroup(1, ["a"])])


words = st.lists(st.tuples(st.sampled_from("ab"), st.integers(-4, 4).filter(bool)), max_size=8)


def _word(f2, parts):
    g = f2.group.identity
    for letter, k in parts:
        g = g * f2.parse(f"{letter}^{k}")
    return g


@settings(max_examples=200, deadline=None)
@given(words, words, words)
def test_associativity_random_words(x, y, z):
    f2 = config.load("f2")
    a, b, c = _word(f2, x), _word(f2, y), _word(f2, z)
    assert (a * b) * c == a * (b * c)
    assert ~(a * b) == ~b * ~a


@settings(max_examples=200, deadline=None)
@given(words)
def test_normal_form_is_reduced(x):
    f2 = config.load("f2")
    g = _word(f2, x)
    assert all(p for _, p in g.nf)
    assert all(i != j for (i, _), (j, _) in zip(g.nf, g.nf[1:]))
