import itertools
import random
from fractions import Fraction as Q

import pytest

from affcoh.cartan import bilinear_form, build_simple_lie_algebra
from affcoh.linalg import in_image, vec_add
from affcoh.vertex import VertexLayer


@pytest.fixture(scope="module")
def V(sl2_vertex):
    return sl2_vertex


@pytest.fixture(scope="module")
def keys3(V):
    C = V.complex
    out = []
    for e in range(0, 4):
        for p in range(0, C.max_degree(e) + 1):
            out.extend(C.raw_cochain_basis(p, e))
    out.sort()
    return out


def energy_pairs(V, keys, smax, smin=0):
    vac = V.vacuum_key
    return [(ka, kb) for ka in keys for kb in keys
            if ka != vac and kb != vac
            and smin <= V.key_energy(ka) + V.key_energy(kb) <= smax]


# ----------------------------------------------------------- state-field map

def test_vacuum_axiom_energy_le_3(V, keys3):
    assert V.vacuum_axiom_failures(keys3, depth=2) == []


def test_field_of_vacuum_is_identity(V, keys3):
    f = V.state_field(V.vacuum_key)
    for key in keys3[:40]:
        w = {key: Q(1)}
        assert V.field_mode(f, -1, w) == w
        assert V.field_mode(f, 0, w) == {}


def test_generator_field_relations(V):
    assert V.generator_commutation_failures(max_mode=2) == []


def test_clifford_relations_exhaustive(V, keys3):
    labs = [(n, b) for n in range(0, 4) for b in range(V.L.dim)]
    for key in keys3:
        w = {key: Q(1)}
        for (n1, a) in labs:
            for (n2, b) in labs:
                anti = V.contract(a, -n1, V.dual_insert(b, n2, w))
                vec_add(anti, V.dual_insert(b, n2, V.contract(a, -n1, w)))
                anti = {k: v for k, v in anti.items() if v}
                want = w if (a == b and n1 == n2) else {}
                assert anti == want
                sq = V.contract(a, -n1, V.contract(b, -n2, w))
                vec_add(sq, V.contract(b, -n2, V.contract(a, -n1, w)))
                assert not any(sq.values())


def test_derivation_identity_exhaustive_low(V, keys3):
    pairs = energy_pairs(V, keys3, 2)
    assert V.dg_identity_failures(pairs) == []


def test_derivation_identity_sampled_energy_3(V, keys3):
    rng = random.Random(11)
    pairs = rng.sample(energy_pairs(V, keys3, 3, smin=3), 200)
    assert V.dg_identity_failures(pairs) == []


# ------------------------------------------------------------- cup product

def test_cup_skew_via_translate_sum(V, keys3):
    rng = random.Random(3)
    for ka, kb in rng.sample(energy_pairs(V, keys3, 3), 150):
        assert V.skew_symmetry_defect(-1, ka, kb) == {}


def test_cup_naive_swap_fails(V):
    # without the translate corrections the swap rule is false
    ka = (((-1, 1),), ((0, 0),))
    kb = (((-1, 1), (-1, 2)), ((0, 1), (0, 2)))
    lhs = V.mode_apply({ka: Q(1)}, -1, {kb: Q(1)})
    sgn = Q(-1) if (V.key_parity(ka) and V.key_parity(kb)) else Q(1)
    vec_add(lhs, V.mode_apply({kb: Q(1)}, -1, {ka: Q(1)}), -sgn)
    assert any(lhs.values())


def test_cup_skew_mod_coboundary_on_representatives(V):
    C = V.complex
    reps = []
    for p in (0, 1):
        for e in range(0, 5):
            r = C.cohomology(p, e, reps=True)
            reps.extend((p, e, v) for v in r["representatives"])
    checked = 0
    for (p1, e1, A), (p2, e2, B) in \
            itertools.combinations_with_replacement(reps, 2):
        if e1 + e2 > 4:
            continue
        diff = V.cup(A, B)
        sgn = Q(-1) if (p1 % 2 and p2 % 2) else Q(1)
        vec_add(diff, V.cup(B, A), -sgn)
        diff = {k: v for k, v in diff.items() if v}
        if not diff:
            checked += 1
            continue
        m_in, _, tgt = C.differential_matrix(p1 + p2 - 1, e1 + e2)
        tidx = {k: i for i, k in enumerate(tgt)}
        ok, _ = in_image(m_in, {tidx[k]: v for k, v in diff.items()})
        assert ok, (p1, e1, p2, e2)
        checked += 1
    assert checked >= 10


# ----------------------------------------------------------------- homotopy

def test_homotopy_identity_all_generator_pairs(V):
    for ka in V.generator_keys():
        for kb in V.generator_keys():
            s = V.key_energy(ka) + V.key_energy(kb)
            for m in range(0, s + 2):
                assert V.homotopy_defect(m, ka, kb) == {}


def test_homotopy_identity_exhaustive_low(V, keys3):
    for ka, kb in energy_pairs(V, keys3, 2):
        s = V.key_energy(ka) + V.key_energy(kb)
        for m in range(0, s + 1):
            assert V.homotopy_defect(m, ka, kb) == {}


def test_homotopy_identity_random_composite_pairs(V, keys3):
    rng = random.Random(7)
    comp = [(ka, kb) for ka, kb in energy_pairs(V, keys3, 3, smin=3)
            if len(ka[0]) + len(ka[1]) >= 2 or len(kb[0]) + len(kb[1]) >= 2]
    sample = rng.sample(comp, 120)
    for ka, kb in sample:
        for m in range(0, 4):
            assert V.homotopy_defect(m, ka, kb) == {}


def test_homotopy_identity_with_flipped_sign_fails(V, keys3):
    # the uncorrected convention puts a minus on the z(dA, B) term; at
    # least one low-energy pair must then violate the identity
    found = False
    for ka, kb in energy_pairs(V, keys3, 2):
        A, B = {ka: Q(1)}, {kb: Q(1)}
        for m in range(0, 3):
            bad = V.d(V.z_map(m, A, B))
            vec_add(bad, V.z_map(m, V.d(A), B), Q(-1))
            vec_add(bad, V.z_map(m, A, V.d(B)),
                    Q((-1) ** V.key_parity(ka)))
            vec_add(bad, V.mode_apply(A, m, B), Q(-1))
            if any(v for v in bad.values()):
                found = True
                break
        if found:
            break
    assert found


def test_homotopy_generator_normalization(V):
    vac = V.vacuum_key
    n = V.L.dim
    for a in range(n):
        for b in range(n):
            got = V.z_pair(0, (((-1, a),), ()), ((), ((0, b),)))
            want = {vac: Q(1, 2)} if a == b else {}
            assert got == want
            # the same slots at the next mode index vanish
            assert V.z_pair(1, (((-1, a),), ()), ((), ((0, b),))) == {}
            # two currents or two duals never produce a degree -1 output
            assert V.z_pair(0, (((-1, a),), ()), (((-1, b),), ())) == {}
            assert V.z_pair(1, (((-1, a),), ()), (((-1, b),), ())) == {}
            assert V.z_pair(0, ((), ((0, a),)), ((), ((0, b),))) == {}


def test_homotopy_vanishes_outside_window(V):
    ka = (((-1, 0),), ())
    kb = (((-1, 1),), ((0, 2),))
    s = V.key_energy(ka) + V.key_energy(kb)
    for m in range(s, s + 3):
        assert V.z_pair(m, ka, kb) == {}
    assert V.z_pair(-1, ka, kb) == {}
    assert V.z_pair(0, V.vacuum_key, kb) == {}
    assert V.z_pair(0, ka, V.vacuum_key) == {}


def test_homotopy_probe_table(V):
    # frozen values of the deterministic particular solution; these pin
    # the elimination-chosen representative, not just its existence
    probes = {
        (1, ((), ((0, 0), (0, 1), (0, 2), (1, 0))), (((-1, 0),), ())):
            {((), ((0, 0), (0, 1), (0, 2))): Q(-1)},
        (1, ((), ((0, 0), (0, 1), (0, 2), (1, 1))), (((-1, 1),), ())):
            {((), ((0, 0), (0, 1), (0, 2))): Q(-1)},
        (1, ((), ((0, 0), (0, 1), (1, 0))), (((-1, 0),), ())):
            {((), ((0, 0), (0, 1))): Q(1)},
        (1, ((), ((0, 0), (0, 1), (1, 0))), (((-1, 0),), ((0, 2),))):
            {((), ((0, 0), (0, 1), (0, 2))): Q(1)},
    }
    for (m, ka, kb), want in probes.items():
        assert V.z_pair(m, ka, kb) == want


def test_homotopy_solution_deterministic(sl2):
    a = VertexLayer(sl2, bilinear_form(sl2, "critical"))
    b = VertexLayer(sl2, bilinear_form(sl2, "critical"))
    a._solve_z_through(2)
    b._solve_z_through(2)
    assert a._z_slots == b._z_slots


# ------------------------------------------------- relative subcomplex check

def relative_invariant_vectors(V, energy):
    """Vectors killed by all zero-mode contractions and by the constant
    subalgebra, i.e. members of the relative subcomplex."""
    C = V.complex
    out = []
    for p in range(0, C.max_degree(energy) + 1):
        basis = [k for k in C.raw_cochain_basis(p, energy)
                 if all(n >= 1 for (n, _) in k[1])]
        if not basis:
            continue
        idx = {k: i for i, k in enumerate(basis)}
        rows = []
        for a in range(V.L.dim):
            cols = []
            for k in basis:
                img = C.const_action(a, {k: Q(1)})
                assert all(kk in idx for kk in img)
                cols.append({idx[kk]: v for kk, v in img.items()})
            for r in range(len(basis)):
                row = {j: cols[j].get(r, Q(0)) for j in range(len(basis))}
                row = {j: v for j, v in row.items() if v}
                rows.append(row)
        from affcoh.linalg import SparseMatrixQ, kernel_basis
        M = SparseMatrixQ.from_rows(rows, len(basis))
        for kv in kernel_basis(M):
            vec = {}
            for j, c in kv.items():
                vec_add(vec, {basis[j]: Q(1)}, c)
            out.append(vec)
    return out


def test_relative_subcomplex_closed_under_homotopy(V):
    # within the solved window the relative subcomplex has invariant
    # vectors only at energies 0 and 2, so every in-window pair involves
    # the vacuum and the closure statement holds with value zero; the
    # check is still run honestly over everything the window contains
    byenergy = {e: relative_invariant_vectors(V, e) for e in range(0, 4)}
    assert len(byenergy[0]) == 1 and byenergy[0][0] == V.vacuum
    assert byenergy[1] == []
    assert len(byenergy[2]) == 2
    checked = 0
    for e1 in range(0, 4):
        for e2 in range(0, 4 - e1):
            for A in byenergy[e1]:
                for B in byenergy[e2]:
                    for m in range(0, e1 + e2 + 1):
                        val = V.z_map(m, A, B)
                        for (mono, psis) in val:
                            assert all(n >= 1 for (n, _) in psis)
                        if val:
                            img = {}
                            for a in range(V.L.dim):
                                vec_add(img, V.complex.const_action(a, val))
                            assert not any(img.values())
                        checked += 1
    assert checked > 0
