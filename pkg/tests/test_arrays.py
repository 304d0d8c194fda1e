import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp import audit
from relhyp.arrays import (
    A_set_bound,
    K_element,
    K_level,
    L_constant,
    PeripheralArrayMap,
    Subgroup,
    audit_array,
    coset_average,
    finite_fixture_array,
    lift_r_tilde,
    restrict_array,
    window_K,
    z_fixture_array,
)
from relhyp.cosets import coset_of
from relhyp.errors import ConfigError
from relhyp.groups import Cyclic, FreeGroup, FreeProduct, PeripheralFamily


def support(v):
    return {k[1] for k, x in v.items() if x}


@pytest.fixture(scope="module")
def rA(f2):
    return z_fixture_array(f2.fam, "A")


def test_z_fixture_values(rA, w):
    r = PeripheralArrayMap(rA)
    assert support(r(w("a^3"))) == {w("1"), w("a"), w("a^2")}
    assert r.norm_sq(w("a^3")) == 3
    assert support(r(w("a^-2"))) == {w("a^-1"), w("a^-2")}
    assert all(x == -1 for _, x in r(w("a^-2")).items())
    assert not r(w("1"))
    assert r.axiom1(w("a^3")) and r.axiom1(w("a^-7"))


def test_z2_fixture_is_coordinatewise(z2):
    r = PeripheralArrayMap(z_fixture_array(z2.fam, "P"))
    g = z2.parse("x^2y^-3")
    assert r.norm_sq(g) == 5
    assert r.axiom1(g)
    for h in (z2.parse("x"), z2.parse("y^2x^-1"), z2.parse("x^-4")):
        assert math.isclose(r.defect(h, g), r.norm(h), abs_tol=1e-12)


def test_finite_fixture():
    G = FreeProduct([FreeGroup(1, ["a"]), Cyclic(2, "s")])
    fam = PeripheralFamily(G, {"S": 1})
    z = finite_fixture_array(fam, "S")
    r = PeripheralArrayMap(z)
    s = G.parse("s")
    assert not r(s) and r.axiom1(s)
    assert r.defect(s, s) == 0
    rep = audit_array(r, [G.identity, s], thresholds=[0, 1])
    assert [len(p.direct) for p in rep.properness] == [2, 2]
    one = restrict_array(r, Subgroup("1", lambda g: g.is_identity()))
    assert not one(G.identity)
    with pytest.raises(ConfigError):
        finite_fixture_array(PeripheralFamily(G, {"A": 0}), "A")


def test_lift_examples(rA, w):
    t = lift_r_tilde(rA, w("a^2"), w("a^5"))
    assert support(t) == {w("a^2"), w("a^3"), w("a^4")}
    assert not lift_r_tilde(rA, w("1"), w("ab"))
    assert lift_r_tilde(rA, w("a^5"), w("a^2")) == -t


@settings(max_examples=100, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from(["1", "b", "ab^-1", "b^2a"]))
def test_lift_antisymmetric_and_equivariant(m, n, hs):
    from relhyp import config
    f2 = config.load("f2")
    rA = z_fixture_array(f2.fam, "A")
    w = f2.parse
    h = w(hs)
    f = h * (w(f"a^{m}") if m else w("1"))
    g = f * (w(f"a^{n}") if n else w("1"))
    t = lift_r_tilde(rA, f, g)
    assert lift_r_tilde(rA, g, f) == -t
    assert support(t) <= {f * w(f"a^{k}") if k else f for k in range(-6, 7)}
    assert lift_r_tilde(rA, f, g) == lift_r_tilde(rA, ~h * f, ~h * g).translate(h, rA.canon)
    assert t.norm_sq() == abs(n)


def test_K_constants(rA, w):
    for m in range(-4, 5):
        p = ((0, m),) if m else ()
        assert math.isclose(K_element(rA, p), math.sqrt(abs(m)))
        K, stable = window_K(rA, p, 12)
        assert stable and math.isclose(K, math.sqrt(abs(m)))
    assert [K_level(rA, n) for n in range(5)] == pytest.approx([math.sqrt(n) for n in range(5)])


def test_L_constant(f2_ctx, w):
    assert L_constant(f2_ctx.sep, "A", w("a^5b^5")) == 5
    assert L_constant(f2_ctx.sep, "B", w("a^5b^5")) == 5
    assert L_constant(f2_ctx.sep, "A", w("a^2")) == 0


def test_coset_average_examples(f2_ctx, rA, w):
    sep = f2_ctx.sep
    x = coset_of(f2_ctx.fx.fam, "A", w("1"))
    avg = coset_average(sep, rA, w("1"), w("a^5b^5"), x)
    assert avg == lift_r_tilde(rA, w("1"), w("a^5"))
    assert avg.norm_sq() == 5
    assert coset_average(sep, rA, w("a^5b^5"), w("1"), x) == -avg


def test_second_array_examples(f2_ctx, w):
    R = f2_ctx.R("A")
    g = w("a^5b^5a^4")
    assert R.norm_sq(g) == 9
    assert sorted(p.norm_sq() for p in R.pieces(w("1"), g).values()) == [4, 5]
    assert not R(w("a^2"))
    K = R.constants.K
    assert math.isclose(K, 2 * math.sqrt(3))
    assert math.sqrt(5) <= R.norm(g) + K
    assert R.axiom1(g)


def test_first_array_examples(f2_ctx, w):
    Q = f2_ctx.Q
    assert Q.norm_sq(w("a^5")) == 4
    assert Q.norm_sq(w("1")) == 0
    assert Q.norm_sq(w("a^5b^5a^4")) == 12
    assert Q.axiom1(w("a^5b^5a^4"))


def test_combined_array_examples(f2_ctx, w):
    P = f2_ctx.P
    g = w("a^5b^5a^4")
    assert P.norm_sq(g) == 26
    assert P.norm_sq_parts(g) == [12, 9, 5]
    assert P.norm_sq(w("1")) == 0
    for m in range(1, 9):
        assert P.norm_sq(w(f"a^{m}")) == 4 + (m if m > 3 else 0)


def test_first_level_set_has_13_elements(f2_ctx, w):
    (lvl,), alpha = audit.properness_levels(f2_ctx, levels=(2,), window=8)
    expect = {w("1")} | {w(f"{x}^{s * k}") for x in "ab" for s in (1, -1) for k in (1, 2, 3)}
    assert set(lvl.direct) == expect
    assert lvl.contained and lvl.window_complete
    assert alpha == 1


def test_A_set_radius(rA):
    K = 2 * math.sqrt(3)
    assert A_set_bound(rA, 3, 3, K) == 41
    assert A_set_bound(rA, 3, 0, 0) == 3


def test_peripheral_audit_defect_equals_norm(rA, w):
    r = PeripheralArrayMap(rA)
    gs = [w(f"a^{m}") if m else w("1") for m in range(-3, 4)]
    hs = [w(f"a^{k}") if k else w("1") for k in range(-10, 11)]
    rep = audit_array(r, hs, thresholds=[1, 2], g_elements=gs, h_elements=hs,
                      bound=lambda g: r.norm(g))
    assert rep.axiom1 and rep.ok
    for row, g in zip(rep.axiom2, gs):
        assert math.isclose(row["defect"], r.norm(g), abs_tol=1e-12)
    assert [len(p.direct) for p in rep.properness] == [3, 9]
    doc = rep.to_json()
    assert doc["axiom1"] == "exact-pass"


def test_restriction_to_even_powers(rA, w):
    r = PeripheralArrayMap(rA)
    fam = rA.fam

    def is_even(g):
        return fam.contains("A", g) and sum(e for _, e in fam.restrict_nf("A", g)) % 2 == 0

    even = Subgroup("2Z", is_even)
    rr = restrict_array(r, even)
    for k in range(-5, 6):
        g = w(f"a^{2 * k}") if k else w("1")
        assert rr(g) == r(g)
    with pytest.raises(ValueError):
        rr(w("a"))
    elems = [w(f"a^{2 * k}") if k else w("1") for k in range(-20, 21)]
    # ||r(a^2k)||^2 = 2|k|
    assert sum(1 for g in elems if rr.norm_sq(g) <= 9) == 9


def test_restriction_of_P(f2_ctx):
    status, detail = audit.check_restriction(f2_ctx, levels=(1, 2), window=6)
    assert status == "pass"
    assert detail["counts"] == {1: 1, 2: 7}


def test_axioms_on_ball(f2_ctx):
    for g in f2_ctx.ball(3):
        assert f2_ctx.Q.axiom1(g)
        assert f2_ctx.P.axiom1(g)


def test_first_array_check_small(f2_ctx, z2_ctx):
    for ctx in (f2_ctx, z2_ctx):
        status, detail = audit.check_first_array(ctx, g_radius=2, h_radius=3, axiom_radius=3)
        assert status == "pass", detail


def test_second_array_check_small(f2_ctx):
    status, detail = audit.check_second_array(f2_ctx, axiom_radius=3, g_radius=2, h_radius=3, ortho_radius=1)
    assert status == "pass", detail


def test_two_sided_bound(f2_ctx):
    status, _ = audit.check_two_sided(f2_ctx, outer=1, inner=2)
    assert status == "pass"


def test_corrupted_tilde_breaks_first_array(f2):
    from relhyp.cosets import Constants
    ctx = audit.Context(f2, radius=3, constants=Constants(1, 3), corrupt_tilde=True)
    status, detail = audit.check_first_array(ctx, g_radius=1, h_radius=2, axiom_radius=2)
    assert status == "fail"
    assert detail["axiom1_failures"]


def test_zero_threshold_breaks_second_array(f2):
    from relhyp.cosets import Constants
    ctx = audit.Context(f2, radius=3, constants=Constants(1, 0), allow_small_D=True)
    # with D = 0 a geodesic can skip a "separating" coset through a parallel X-edge
    chk = audit._timed("second array R", audit.check_second_array, ctx, axiom_radius=3, g_radius=2,
                       h_radius=3, ortho_radius=1)
    assert chk.status == "fail"
    assert "InvariantViolation" in chk.detail["error"]


def test_rational_norms_are_exact(f2_ctx, w):
    assert isinstance(f2_ctx.R("B").norm_sq(w("b^7a")), (int, Fraction))
