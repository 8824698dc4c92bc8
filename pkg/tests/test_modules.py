import itertools
from fractions import Fraction as Q

import pytest

from affcoh.cartan import bilinear_form, build_simple_lie_algebra
from affcoh.linalg import vec_add
from affcoh.modules import LoopModule, energy_of_mono


@pytest.fixture(scope="module")
def sl2():
    return build_simple_lie_algebra("sl2")


@pytest.fixture(scope="module")
def kc(sl2):
    return bilinear_form(sl2, "critical")


def test_classical_vacuum_graded_dimensions(sl2):
    V = LoopModule(sl2, "Vcl")
    assert [len(V.graded_basis(e)) for e in range(4)] == [1, 3, 9, 22]


def test_quantum_matches_classical_dimensions(sl2, kc):
    Vq = LoopModule(sl2, "Vq", form=kc)
    Vc = LoopModule(sl2, "Vcl")
    for e in range(4):
        assert Vq.graded_basis(e) == Vc.graded_basis(e)


def test_vacuum_annihilation(sl2, kc):
    V = LoopModule(sl2, "Vq", form=kc)
    for n in (0, 1, 2):
        for a in range(3):
            assert V.act((n, a), ()) == {}


def test_single_contraction_on_vacuum_module(sl2, kc):
    # raising mode at t^1 against one lowering generator at t^{-1}:
    # only the central term survives on the vacuum
    V = LoopModule(sl2, "Vq", form=kc)
    e, f = sl2.index["e"], sl2.index["f"]
    got = V.act((1, e), ((-1, f),))
    assert got == {(): Q(-2)}


def test_single_contraction_level_dependence(sl2):
    k0 = bilinear_form(sl2, "trace")
    e, f = sl2.index["e"], sl2.index["f"]
    for shift in (Q(0), Q(1), Q(-3, 2), Q(2)):
        form = bilinear_form(sl2, "critical", shift=shift)
        V = LoopModule(sl2, "Vq", form=form)
        got = V.act((1, e), ((-1, f),))
        want = Q(-2) + shift * k0.value(e, f)
        assert got == ({(): want} if want else {})


def test_affine_commutation_relations(sl2, kc):
    # [x t^n, y t^m] = [x,y] t^{n+m} + n delta kappa(x,y) on a monomial slice
    V = LoopModule(sl2, "Vq", form=kc)
    monos = V.graded_basis(0) + V.graded_basis(1) + V.graded_basis(2)
    test_modes = [(n, a) for n in (-2, -1, 0, 1, 2) for a in range(3)]
    for x, y in itertools.product(test_modes, repeat=2):
        nx, ax = x
        ny, ay = y
        for mono in monos:
            lhs = {}
            vec_add(lhs, V.act_vec(x, V.act(y, mono)))
            vec_add(lhs, V.act_vec(y, V.act(x, mono)), Q(-1))
            rhs = {}
            for c, cmu in sl2.mu.get((ax, ay), {}).items():
                vec_add(rhs, V.act((nx + ny, c), mono), cmu)
            if nx + ny == 0:
                vec_add(rhs, {mono: Q(1)}, Q(nx) * kc.value(ax, ay))
            assert lhs == rhs, (x, y, mono)


def test_highest_weight_vacuum_rules(sl2, kc):
    M = LoopModule(sl2, "Mq", form=kc, weight=(Q(5),))
    e, h, f = (sl2.index[x] for x in "ehf")
    assert M.act((0, e), ()) == {}
    assert M.act((0, h), ()) == {(): Q(5)}
    assert M.act((1, f), ()) == {}
    assert M.act((0, f), ()) == {((0, f),): Q(1)}
    # raising zero mode against one lowering zero mode: reads the weight
    assert M.act((0, e), ((0, f),)) == {(): Q(5)}


def test_twisted_cartan_action_reads_monomial_weight(sl2, kc):
    M = LoopModule(sl2, "Mq", form=kc, weight=(Q(7),))
    h = sl2.index["h"]
    for energy, wt in [(0, (Q(-2),)), (1, (Q(0),)), (2, (Q(2),))]:
        for mono in M.graded_basis(energy, wt):
            got = M.act_twisted((0, h), mono)
            expected = {mono: wt[0]} if wt[0] else {}
            assert got == expected


def test_highest_weight_graded_basis_sl2(sl2, kc):
    M = LoopModule(sl2, "Mq", form=kc, weight=(Q(0),))
    f = sl2.index["f"]
    assert M.graded_basis(0, (Q(-4),)) == [((0, f), (0, f))]
    assert M.graded_basis(0, (Q(1),)) == []
    e1w0 = M.graded_basis(1, (Q(0),))
    e_idx, h_idx = sl2.index["e"], sl2.index["h"]
    assert e1w0 == [((-1, e_idx), (0, f)), ((-1, h_idx),)]


def test_highest_weight_graded_basis_sl3(kc):
    L = build_simple_lie_algebra("sl3")
    M = LoopModule(L, "Mcl")
    f1, f2, f12 = L.index["f1"], L.index["f2"], L.index["f12"]
    # weight -(alpha1 + alpha2): either f12 or the pair f1 f2
    basis = M.graded_basis(0, (Q(-1), Q(-1)))
    assert basis == sorted([((0, f12),), ((0, f1), (0, f2))])


def test_graded_basis_needs_weight_for_highest_weight_family(sl2):
    M = LoopModule(sl2, "Mcl")
    with pytest.raises(ValueError):
        M.graded_basis(1)


def test_classical_action_is_derivation(sl2):
    V = LoopModule(sl2, "Vcl")
    e, h, f = (sl2.index[x] for x in "ehf")
    # raising mode at t^1 on a product: only the t^{-2} factor survives the
    # quotient projection, giving [e, f] at t^{-1} times the other factor
    got = V.act((1, e), ((-2, f), (-1, f)))
    assert got == {tuple(sorted(((-1, h), (-1, f)))): Q(1)}


def test_classical_no_central_term(sl2):
    V = LoopModule(sl2, "Vcl")
    e, f = sl2.index["e"], sl2.index["f"]
    assert V.act((1, e), ((-1, f),)) == {}


def test_contract_form_example(sl2):
    # one contraction per matching factor, coefficient n * kappa0(a,b)
    V = LoopModule(sl2, "Vcl")
    k0 = bilinear_form(sl2, "trace")
    e, f = sl2.index["e"], sl2.index["f"]
    got = V.contract_form((1, e), ((-1, f), (-1, f)), k0)
    assert got == {((-1, f),): Q(2)}


def test_energy_of_mono():
    assert energy_of_mono(()) == 0
    assert energy_of_mono(((-3, 0), (-1, 2), (0, 2))) == 4


def test_pbw_symbol(sl2):
    vec = {((-1, 0), (-1, 2)): Q(2), ((-2, 1),): Q(5)}
    assert LoopModule.pbw_symbol(vec) == {((-1, 0), (-1, 2)): Q(2)}


def test_quantum_highest_weight_commutation(sl2, kc):
    # same bracket check on the highest-weight module, zero modes included
    M = LoopModule(sl2, "Mq", form=kc, weight=(Q(3),))
    monos = M.graded_basis(0, (Q(-2),)) + M.graded_basis(1, (Q(0),)) \
        + M.graded_basis(1, (Q(-2),))
    test_modes = [(n, a) for n in (-1, 0, 1) for a in range(3)]
    for x, y in itertools.product(test_modes, repeat=2):
        nx, ax = x
        ny, ay = y
        for mono in monos:
            lhs = {}
            vec_add(lhs, M.act_vec(x, M.act(y, mono)))
            vec_add(lhs, M.act_vec(y, M.act(x, mono)), Q(-1))
            rhs = {}
            for c, cmu in sl2.mu.get((ax, ay), {}).items():
                vec_add(rhs, M.act((nx + ny, c), mono), cmu)
            if nx + ny == 0:
                vec_add(rhs, {mono: Q(1)}, Q(nx) * kc.value(ax, ay))
            assert lhs == rhs, (x, y, mono)
