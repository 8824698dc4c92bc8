from fractions import Fraction as Q

import pytest

from affcoh.cartan import (
    bilinear_form,
    build_simple_lie_algebra,
    coadjoint_derivation,
    invariant_polynomials,
    principal_triple,
)


@pytest.fixture(scope="module")
def sl2():
    return build_simple_lie_algebra("sl2")


@pytest.fixture(scope="module")
def sl3():
    return build_simple_lie_algebra("sl3")


def test_sl2_basis_and_brackets(sl2):
    L = sl2
    assert L.names == ["e", "h", "f"]
    e, h, f = L.index["e"], L.index["h"], L.index["f"]
    assert L.bracket(e, f) == {h: Q(1)}
    assert L.bracket(h, e) == {e: Q(2)}
    assert L.bracket(h, f) == {f: Q(-2)}
    assert L.weights[e] == (Q(2),)
    assert L.weights[f] == (Q(-2),)
    assert L.weights[h] == (Q(0),)


def test_sl3_dimensions_and_sample_brackets(sl3):
    L = sl3
    assert L.dim == 8 and L.rank == 2
    e1, e2, e12 = L.index["e1"], L.index["e2"], L.index["e12"]
    f1, h1 = L.index["f1"], L.index["h1"]
    assert L.bracket(e1, e2) == {e12: Q(1)}
    assert L.bracket(e1, f1) == {h1: Q(1)}
    assert L.weights[e1] == (Q(2), Q(-1))
    assert L.weights[e12] == (Q(1), Q(1))


@pytest.mark.parametrize("name", ["sl2", "sl3"])
def test_jacobi_identity_exhaustive(name):
    L = build_simple_lie_algebra(name)
    for a in range(L.dim):
        va = {a: Q(1)}
        for b in range(L.dim):
            vb = {b: Q(1)}
            for c in range(L.dim):
                vc = {c: Q(1)}
                s = {}
                for x, y, z in ((va, vb, vc), (vb, vc, va), (vc, va, vb)):
                    for k, v in L.bracket_vec(x, L.bracket_vec(y, z)).items():
                        s[k] = s.get(k, 0) + v
                assert all(v == 0 for v in s.values())


@pytest.mark.parametrize("name", ["sl2", "sl3"])
def test_antisymmetry(name):
    L = build_simple_lie_algebra(name)
    for a in range(L.dim):
        for b in range(L.dim):
            ab = L.bracket(a, b)
            ba = L.bracket(b, a)
            assert ab == {k: -v for k, v in ba.items()}


def test_trace_form_values_sl2(sl2):
    k0 = bilinear_form(sl2, "trace")
    e, h, f = (sl2.index[x] for x in "ehf")
    assert k0.value(h, h) == 2
    assert k0.value(e, f) == 1
    assert k0.value(e, e) == 0
    assert k0.value(e, h) == 0


def test_killing_is_2n_times_trace():
    for name, n in (("sl2", 2), ("sl3", 3)):
        L = build_simple_lie_algebra(name)
        kK = bilinear_form(L, "killing")
        k0 = bilinear_form(L, "trace")
        assert kK.gram == k0.scale(2 * n).gram


def test_critical_form_values_sl2(sl2):
    kc = bilinear_form(sl2, "critical")
    e, h, f = (sl2.index[x] for x in "ehf")
    assert kc.value(h, h) == -4
    assert kc.value(e, f) == -2


def test_form_family_shift(sl2):
    k0 = bilinear_form(sl2, "trace")
    kc = bilinear_form(sl2, "critical")
    fam = bilinear_form(sl2, "critical", shift=Q(3))
    h = sl2.index["h"]
    assert fam.value(h, h) == kc.value(h, h) + 3 * k0.value(h, h)


@pytest.mark.parametrize("name", ["sl2", "sl3"])
def test_form_invariance(name):
    # kappa([x,y],z) + kappa(y,[x,z]) = 0 for basis triples
    L = build_simple_lie_algebra(name)
    for kind in ("trace", "killing"):
        k = bilinear_form(L, kind)
        for a in range(L.dim):
            for b in range(L.dim):
                for c in range(L.dim):
                    s = sum(
                        k.value(d, c) * v for d, v in L.bracket(a, b).items()
                    ) + sum(
                        k.value(b, d) * v for d, v in L.bracket(a, c).items()
                    )
                    assert s == 0


def test_invariant_polynomial_sl2_explicit(sl2):
    polys = invariant_polynomials(sl2)
    assert [p.degree for p in polys] == [2]
    e, h, f = (sl2.index[x] for x in "ehf")
    expo_h2 = tuple(2 if i == h else 0 for i in range(3))
    expo_ef = tuple(1 if i in (e, f) else 0 for i in range(3))
    assert polys[0].coeffs == {expo_h2: Q(1, 2), expo_ef: Q(2)}
    # evaluation at the point pairing h against the trace form
    k0 = bilinear_form(sl2, "trace")
    point = [k0.value(h, a) for a in range(3)]
    assert polys[0].eval_at(point) == 2


@pytest.mark.parametrize("name", ["sl2", "sl3"])
def test_invariant_polynomials_are_invariant(name):
    L = build_simple_lie_algebra(name)
    for p in invariant_polynomials(L):
        for a in range(L.dim):
            assert coadjoint_derivation(L, a, p.coeffs) == {}


def test_invariant_polynomial_degrees():
    assert [p.degree for p in invariant_polynomials(build_simple_lie_algebra("sl2"))] == [2]
    assert [p.degree for p in invariant_polynomials(build_simple_lie_algebra("sl3"))] == [2, 3]


def test_principal_triple_sl2(sl2):
    tri = principal_triple(sl2)
    e, h, f = (sl2.index[x] for x in "ehf")
    assert tri.f_vec == {f: Q(1)}
    assert tri.rho_check == {h: Q(1, 2)}
    assert tri.e_vec == {e: Q(1)}
    assert tri.exponents == [1]
    assert tri.kernel_elements[1] == {e: Q(1)}


def test_principal_triple_sl3(sl3):
    tri = principal_triple(sl3)
    L = sl3
    e1, e2, e12 = L.index["e1"], L.index["e2"], L.index["e12"]
    assert tri.exponents == [1, 2]
    # rho_check acts as diag(1, 0, -1) in the defining rep
    m = L.matrix_of(tri.rho_check)
    assert [m[i][i] for i in range(3)] == [Q(1), Q(0), Q(-1)]
    # raising element is proportional to e1 + e2 with the triple normalization
    assert tri.e_vec == {e1: Q(2), e2: Q(2)}
    assert tri.kernel_elements[2] == {e12: Q(1)}
    # triple relations
    br = L.bracket_vec(tri.e_vec, tri.f_vec)
    assert br == {k: 2 * v for k, v in tri.rho_check.items()}


@pytest.mark.parametrize("name", ["sl2", "sl3"])
def test_exponents_match_invariant_degrees(name):
    # two independent routes: centralizer grading vs trace-power degrees
    L = build_simple_lie_algebra(name)
    tri = principal_triple(L)
    degs = sorted(p.degree for p in invariant_polynomials(L))
    assert sorted(x + 1 for x in tri.exponents) == degs


def test_decompose_roundtrip(sl3):
    L = sl3
    vec = {0: Q(3), 4: Q(-1, 2), 7: Q(5)}
    assert L.decompose(L.matrix_of(vec)) == vec
