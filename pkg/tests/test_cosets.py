import itertools
import random

import pytest

from relhyp import audit
from relhyp.cosets import (
    CosetHandle,
    Separation,
    calibrate_constants,
    components,
    coset_of,
    entrance_exit_set,
    penetration_data,
    separating_cosets,
    triangle_decomposition,
)
from relhyp.errors import NonGeodesic, NotSeparating
from relhyp.groups import ball
from relhyp.relative import Letter, RelPath, build_relative_graph


@pytest.fixture(scope="module")
def rel(f2):
    return build_relative_graph(f2.mg, f2.fam, 3)


@pytest.fixture(scope="module")
def sep(rel):
    return Separation(rel, 3)


def H(lam, g):
    return Letter("H", lam, g)


def test_components_examples(f2, w):
    p = RelPath(w("1"), (H("A", w("a^3")), Letter("X", "b", w("b")), H("A", w("a^2"))))
    cs = components(p, f2.fam)
    assert [c.coset for c in cs] == [coset_of(f2.fam, "A", w("1")), coset_of(f2.fam, "A", w("a^3b"))]
    assert all(c.isolated for c in cs)
    one = components(RelPath(w("1"), (H("A", w("a")), H("A", w("a^2")))), f2.fam)
    assert len(one) == 1 and one[0].a_plus == w("a^3")
    xs = RelPath(w("1"), (Letter("X", "a", w("a")), Letter("X", "b", w("b"))))
    assert components(xs, f2.fam) == []


def test_components_connected_not_isolated(f2, w):
    # a^2, b, b^-1, a^3: both A-runs sit in <a>
    p = RelPath(w("1"), (H("A", w("a^2")), H("B", w("b")), H("B", w("b^-1")), H("A", w("a^3"))))
    cs = [c for c in components(p, f2.fam) if c.lam == "A"]
    assert len(cs) == 2 and not any(c.isolated for c in cs)


def test_closed_components_wrap(f2, w):
    loop = RelPath(w("1"), (H("A", w("a^2")), H("B", w("b")), H("B", w("b^-1")), H("A", w("a^-2"))))
    cs = components(loop, f2.fam, closed=True)
    assert len([c for c in cs if c.lam == "A"]) == 1
    with pytest.raises(ValueError):
        components(RelPath(w("1"), (H("A", w("a")),)), f2.fam, closed=True)


def test_penetration_examples(rel, f2, w):
    (p,) = rel.geodesics(w("1"), w("a^5b^5"))
    r = penetration_data(rel, p, coset_of(f2.fam, "A", w("1")))
    assert (r.p_in, r.p_out, r.dhat) == (w("1"), w("a^5"), 5)
    r = penetration_data(rel, p, coset_of(f2.fam, "B", w("a^5")))
    assert (r.p_in, r.p_out) == (w("a^5"), w("a^5b^5"))
    assert penetration_data(rel, p, coset_of(f2.fam, "A", w("b"))) is None
    slow = RelPath(w("1"), (H("A", w("a^2")), H("A", w("a^-2"))))
    with pytest.raises(NonGeodesic):
        penetration_data(rel, slow, coset_of(f2.fam, "A", w("1")))


def test_separating_examples(rel, f2, w):
    A = lambda x: coset_of(f2.fam, "A", w(x))
    assert list(separating_cosets(rel, w("1"), w("a^5b^5"), "A", 3)) == [A("1")]
    assert list(separating_cosets(rel, w("1"), w("a^2b^2"), "A", 3)) == []
    S = separating_cosets(rel, w("1"), w("a^5b^5a^5"), "A", 3)
    assert list(S) == [A("1"), A("a^5b^5")]
    assert [S.dist[x] for x in S] == [0, 2]
    doc = S.to_json()
    assert doc["cosets"][1]["E"] == [["a^5b^5", "a^5b^5a^5"]]


def test_entrance_exit_examples(rel, f2, w):
    A1 = coset_of(f2.fam, "A", w("1"))
    assert entrance_exit_set(rel, w("1"), w("a^5b^5"), A1, 3) == {(w("1"), w("a^5"))}
    assert entrance_exit_set(rel, w("a^5b^5"), w("1"), A1, 3) == {(w("a^5"), w("1"))}
    h = w("ba^-1")
    Ah = A1.translate(h, f2.fam)
    assert entrance_exit_set(rel, h, h * w("a^5b^5"), Ah, 3) == {(h, h * w("a^5"))}
    with pytest.raises(NotSeparating):
        entrance_exit_set(rel, w("1"), w("a^2"), A1, 3)


def test_entrance_set_with_several_geodesics(rel, f2, w):
    # the b-syllable can be an X- or an H-letter; the A-coset entrance is unchanged
    E = entrance_exit_set(rel, w("b"), w("ba^4b"), coset_of(f2.fam, "A", w("b")), 3)
    assert E == {(w("b"), w("ba^4"))}
    assert len(rel.geodesics(w("b"), w("ba^4b"))) == 2


def test_triangle_examples(sep, f2, w):
    A = lambda x: coset_of(f2.fam, "A", w(x))
    t = triangle_decomposition(sep, w("1"), w("a^5b^5"), w("a^5"), "A")
    assert (t.first, t.second, t.rest) == ([A("1")], [], [])
    t = triangle_decomposition(sep, w("a^2"), w("a^2"), w("b"), "A")
    assert (t.first, t.second, t.rest) == ([], [], [])
    t = triangle_decomposition(sep, w("1"), w("a^5b^5a^4"), w("a^5b^5"), "A")
    assert (t.first, t.second, t.rest) == ([A("1")], [A("a^5b^5")], [])


def test_separation_symmetry_and_shift(sep, f2):
    B = list(ball(f2.mg, 2))
    rng = random.Random(1)
    for f, g in itertools.product(B, repeat=2):
        for lam in ("A", "B"):
            S = sep.separating(f, g, lam)
            assert set(S) == set(sep.separating(g, f, lam))
            assert len(S) <= sep.rel.distance(f, g)
            h = rng.choice(B)
            moved = {x.translate(h, f2.fam) for x in S}
            assert set(sep.separating(h * f, h * g, lam)) == moved


def test_segment_and_enumerate_agree(rel, f2):
    seg, enum = Separation(rel, 3, "segment"), Separation(rel, 3, "enumerate")
    B = list(ball(f2.mg, 3))
    rng = random.Random(7)
    for _ in range(300):
        f, g = rng.choice(B), rng.choice(B)
        for lam in ("A", "B"):
            a, b = seg.separating(f, g, lam), enum.separating(f, g, lam)
            assert a.cosets == b.cosets and a.E == b.E


def test_entrance_is_closest_point(rel, f2):
    # d(f, a_-) equals d(f, xH) along every geodesic
    B = list(ball(f2.mg, 3))
    e = f2.group.identity
    for g in B:
        for p in rel.geodesics(e, g):
            for c in components(p, f2.fam):
                assert rel.distance(e, c.a_minus) == rel.coset_distance(e, c.lam, c.coset.rep)


def test_calibration_on_f2(f2):
    rel = build_relative_graph(f2.mg, f2.fam, 4)
    k = calibrate_constants(rel, samples=300)
    assert (k.C, k.D) == (1, 3)
    assert k.polygons > 0 and k.isolated > 0
    assert calibrate_constants(rel, samples=0, exhaustive_radius=1, D_override=10).D == 10
    with pytest.raises(ValueError):
        calibrate_constants(rel, samples=0, exhaustive_radius=1, D_override=0)


def test_calibration_without_peripherals(f2h):
    rel = build_relative_graph(f2h.mg, f2h.fam, 2)
    k = calibrate_constants(rel, samples=20, exhaustive_radius=1)
    assert (k.C, k.D, k.isolated) == (1, 3, 0)
    assert k.note == "floor"


def test_separating_check_radius2(f2_ctx, z2_ctx):
    for ctx in (f2_ctx, z2_ctx):
        status, detail = audit.check_separating(ctx, radius=2, literal_samples=300, compare_radius=2)
        assert status == "pass", detail


def test_separating_check_fails_with_zero_threshold(f2):
    from relhyp.cosets import Constants
    ctx = audit.Context(f2, radius=3, constants=Constants(1, 0), allow_small_D=True)
    status, detail = audit.check_separating(ctx, radius=2, literal_samples=100, compare_radius=2)
    assert status == "fail"
