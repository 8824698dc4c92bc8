"""Lie algebra cochain complexes for the positive loop algebra and its
Iwahori-type subalgebra, with module coefficients.

A cochain basis key is a pair (mono, psis): a module monomial together with
a strictly increasing tuple of odd dual generators.  The dual generator
labelled (n, a) pairs against basis mode a at t^n, carries energy +n and
weight -wt(a), so every (degree, energy, weight) slice is finite.

Three pairs:
  "absolute"    positive loop algebra, no constraint;
  "relative-g"  positive loop algebra relative to its constant subalgebra:
                no zero-mode duals, constant-invariant cochains only;
  "iwahori-h"   Iwahori subalgebra relative to the Cartan: duals at n = 0
                only in raising directions, total weight zero.

The differential is assembled in normally ordered operator form (module
action terms plus the quadratic-dual term); `differential_matrix_coordinate`
re-derives each matrix entry from the alternating-sum evaluation formula as
an independent route, and the two are compared in the tests.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import SparseMatrixQ, SpanReducer, kernel_basis, rank, vec_add
from .modules import LoopModule, energy_of_mono

Q = Fraction

PAIRS = ("absolute", "relative-g", "iwahori-h")


def _insert_psi(psis, k):
    """Wedge k onto the front, canonicalize; None if k repeats."""
    if k in psis:
        return None
    pos = 0
    while pos < len(psis) and psis[pos] < k:
        pos += 1
    return psis[:pos] + (k,) + psis[pos:], (-1) ** pos


class ChevalleyComplex:
    def __init__(self, L, pair: str, module: LoopModule):
        if pair not in PAIRS:
            raise ValueError(f"unknown pair {pair!r}")
        if pair == "iwahori-h" and not module.highest_weight:
            raise ValueError("iwahori pair needs a highest-weight module")
        if pair != "iwahori-h" and module.highest_weight:
            raise ValueError("loop-algebra pairs need a vacuum-type module")
        self.L = L
        self.pair = pair
        self.module = module
        self._iwahori = pair == "iwahori-h"
        # zero-mode directions of the acting algebra vs of the allowed duals:
        # the Iwahori pair acts through its Cartan but is relative to it
        if self._iwahori:
            self._zero_dirs_act = set(L.positive) | set(L.cartan)
            self._zero_dirs_psi = set(L.positive)
        else:
            self._zero_dirs_act = set(range(L.dim))
            self._zero_dirs_psi = set(range(L.dim))
        self._dcache = {}
        self._pair_cache = {}
        self.zero_weight = (Q(0),) * L.rank

    # ------------------------------------------------------------- grading

    def psi_energy(self, psis) -> int:
        return sum(n for (n, _) in psis)

    def key_energy(self, key) -> int:
        mono, psis = key
        return energy_of_mono(mono) + self.psi_energy(psis)

    def key_weight(self, key):
        mono, psis = key
        wt = list(self.module.weight_of_mono(mono))
        for (_, a) in psis:
            for i, w in enumerate(self.L.weights[a]):
                wt[i] -= w
        return tuple(wt)

    def _psi_labels(self, max_energy: int):
        out = []
        for n in range(max_energy + 1):
            dirs = self._zero_dirs_psi if n == 0 else range(self.L.dim)
            if self.pair == "relative-g" and n == 0:
                continue
            for a in sorted(dirs):
                out.append((n, a))
        return out

    def raw_cochain_basis(self, p: int, energy: int, weight=None):
        """All keys at the given degree, energy and (optional) weight.

        The relative pairs restrict the dual labels here; invariance is a
        separate cut applied by `invariant_basis`.
        """
        if weight is not None:
            weight = tuple(Q(x) for x in weight)
        import itertools

        labels = self._psi_labels(energy)
        keys = []
        for psis in itertools.combinations(labels, p):
            pe = self.psi_energy(psis)
            if pe > energy:
                continue
            mweight = None
            if weight is not None:
                mweight = list(weight)
                for (_, a) in psis:
                    for i, w in enumerate(self.L.weights[a]):
                        mweight[i] += w
                mweight = tuple(mweight)
            for mono in self.module.graded_basis(energy - pe, mweight):
                keys.append((mono, psis))
        keys.sort()
        return keys

    # ---------------------------------------------------------- invariance

    def const_action(self, a: int, vec: dict) -> dict:
        """Action of constant basis element a on cochains (even derivation:
        module part by the zero mode, dual part by the coadjoint rule)."""
        out = {}
        mod = self.module
        for (mono, psis), c in vec.items():
            for mono2, cc in mod.act_twisted((0, a), mono).items():
                vec_add(out, {(mono2, psis): Q(1)}, c * cc)
            for i, (n, b) in enumerate(psis):
                others = psis[:i] + psis[i + 1:]
                front_sign = (-1) ** i
                for e_idx in range(self.L.dim):
                    m = self.L.mu.get((a, e_idx), {}).get(b)
                    if not m:
                        continue
                    ins = _insert_psi(others, (n, e_idx))
                    if ins is None:
                        continue
                    new_psis, s = ins
                    vec_add(out, {(mono, new_psis): Q(1)}, -m * c * front_sign * s)
        return out

    def invariant_basis(self, p: int, energy: int, weight=None):
        """Cochain vectors spanning the pair's actual (relative) cochains."""
        if self.pair == "absolute":
            return [{k: Q(1)} for k in self.raw_cochain_basis(p, energy, weight)]
        if self._iwahori:
            keys = self.raw_cochain_basis(p, energy, self.zero_weight)
            return [{k: Q(1)} for k in keys]
        # relative-g: weight-zero keys, then the joint kernel of the simple
        # raising and lowering generators (complete reducibility)
        keys = self.raw_cochain_basis(p, energy, self.zero_weight)
        if not keys:
            return []
        gens = [g for (e_i, _, f_i) in self.L.simple for g in (e_i, f_i)]
        cols = []
        for k in keys:
            col = {}
            for gi, a in enumerate(gens):
                for kk, v in self.const_action(a, {k: Q(1)}).items():
                    col[(gi, kk)] = v
            cols.append(col)
        row_keys = sorted({rk for col in cols for rk in col})
        row_index = {rk: i for i, rk in enumerate(row_keys)}
        m = SparseMatrixQ.from_columns(cols, row_index=row_index, nrows=len(row_keys))
        out = []
        for kv in kernel_basis(m):
            out.append({keys[i]: c for i, c in kv.items()})
        return out

    # -------------------------------------------------------- differential

    def _is_acting(self, mode) -> bool:
        n, a = mode
        if self._iwahori:
            return n >= 1 or (n == 0 and a in self._zero_dirs_act)
        return n >= 0

    def _acting_modes(self, max_energy: int):
        out = []
        for n in range(max_energy + 1):
            dirs = self._zero_dirs_act if n == 0 else range(self.L.dim)
            for a in sorted(dirs):
                out.append((n, a))
        return out

    def _bracket_pairs(self, label):
        """Ordered acting-mode pairs (k, l, coeff) with [J_k, J_l] hitting
        the dual label's mode."""
        hit = self._pair_cache.get(label)
        if hit is not None:
            return hit
        nm, cm = label
        pairs = []
        for nk in range(nm + 1):
            nl = nm - nk
            k_dirs = self._zero_dirs_act if nk == 0 else range(self.L.dim)
            l_dirs = self._zero_dirs_act if nl == 0 else range(self.L.dim)
            for a in k_dirs:
                for b in l_dirs:
                    m = self.L.mu.get((a, b), {}).get(cm)
                    if m:
                        pairs.append(((nk, a), (nl, b), m))
        self._pair_cache[label] = pairs
        return pairs

    def _d_key(self, key, rho, include_cubic) -> dict:
        default = rho is None and include_cubic
        if default:
            hit = self._dcache.get(key)
            if hit is not None:
                return hit
            rho_fn = self.module.act_twisted
        else:
            rho_fn = rho if rho is not None else self.module.act_twisted
        mono, psis = key
        out = {}
        for k in self._acting_modes(energy_of_mono(mono)):
            img = rho_fn(k, mono)
            if not img:
                continue
            ins = _insert_psi(psis, k)
            if ins is None:
                continue
            new_psis, sgn = ins
            for mono2, cc in img.items():
                vec_add(out, {(mono2, new_psis): Q(1)}, sgn * cc)
        if include_cubic:
            for j, label in enumerate(psis):
                reduced = psis[:j] + psis[j + 1:]
                csign = (-1) ** j
                for k, l, m in self._bracket_pairs(label):
                    insl = _insert_psi(reduced, l)
                    if insl is None:
                        continue
                    psis_l, sl = insl
                    insk = _insert_psi(psis_l, k)
                    if insk is None:
                        continue
                    psis_kl, sk = insk
                    vec_add(
                        out,
                        {(mono, psis_kl): Q(1)},
                        Q(-1, 2) * m * csign * sl * sk,
                    )
        if default:
            self._dcache[key] = out
        return out

    def apply_d(self, vec: dict, rho=None, include_cubic: bool = True) -> dict:
        out = {}
        for key, c in vec.items():
            vec_add(out, self._d_key(key, rho, include_cubic), c)
        return out

    def differential_matrix(self, p: int, energy: int, weight=None,
                            rho=None, include_cubic: bool = True):
        """Matrix of d from the invariant basis at degree p into the raw key
        basis one degree up.  Returns (matrix, sources, target_keys)."""
        if self.pair != "absolute":
            weight = self.zero_weight
        src = self.invariant_basis(p, energy, weight)
        tgt = self.raw_cochain_basis(p + 1, energy, weight)
        tindex = {k: i for i, k in enumerate(tgt)}
        cols = []
        for v in src:
            dv = self.apply_d(v, rho=rho, include_cubic=include_cubic)
            col = {}
            for k, c in dv.items():
                if k not in tindex:
                    raise AssertionError(
                        f"differential left the {self.pair} subcomplex at {k}"
                    )
                col[tindex[k]] = c
            cols.append(col)
        m = SparseMatrixQ.from_columns(cols, row_index={i: i for i in range(len(tgt))},
                                       nrows=len(tgt))
        return m, src, tgt

    def differential_matrix_coordinate(self, p: int, energy: int, weight=None):
        """Same matrix, entry by entry from the alternating evaluation
        formula: insertion terms with sign of the omitted slot, plus bracket
        contractions with the sign of the omitted pair.  Shares no code with
        the operator route above."""
        if self.pair != "absolute":
            weight = self.zero_weight
        src = self.invariant_basis(p, energy, weight)
        tgt = self.raw_cochain_basis(p + 1, energy, weight)
        rho_fn = self.module.act_twisted

        # group each source vector's coordinates by dual tuple
        src_by_psis = []
        for v in src:
            g = {}
            for (mono, psis), c in v.items():
                g.setdefault(psis, {})[mono] = c
            src_by_psis.append(g)

        entries = {}
        for ti, (mono_t, psis_t) in enumerate(tgt):
            for si, groups in enumerate(src_by_psis):
                total = Q(0)
                # action terms: omit slot i, act by its mode on the module
                for i, k in enumerate(psis_t):
                    rest = psis_t[:i] + psis_t[i + 1:]
                    part = groups.get(rest)
                    if not part:
                        continue
                    sgn = (-1) ** i
                    for mono_s, c in part.items():
                        img = rho_fn(k, mono_s)
                        cc = img.get(mono_t)
                        if cc:
                            total += sgn * c * cc
                # bracket terms: omit slots i < j, insert their bracket mode
                for i in range(len(psis_t)):
                    ni, ai = psis_t[i]
                    for j in range(i + 1, len(psis_t)):
                        nj, aj = psis_t[j]
                        rest = psis_t[:i] + psis_t[i + 1:j] + psis_t[j + 1:]
                        for cm, m in self.L.mu.get((ai, aj), {}).items():
                            lab = (ni + nj, cm)
                            if not self._is_acting(lab):
                                continue
                            ins = _insert_psi(rest, lab)
                            if ins is None:
                                continue
                            psis_s, s = ins
                            part = groups.get(psis_s)
                            if not part:
                                continue
                            c = part.get(mono_t)
                            if c:
                                total += (-1) ** (i + j) * m * s * c
                if total:
                    entries[(ti, si)] = total
        return (
            SparseMatrixQ(len(tgt), len(src), entries),
            src,
            tgt,
        )

    # ---------------------------------------------------------- cohomology

    def cohomology(self, p: int, energy: int, weight=None, reps: bool = False):
        """dim H^p in the slice, optionally with canonical representatives.

        Representatives are kernel vectors reduced to their unique normal
        form modulo the image of the previous differential.
        """
        m_out, src, _ = self.differential_matrix(p, energy, weight)
        n_p = len(src)
        rank_out = rank(m_out) if n_p else 0
        if p == 0:
            rank_in = 0
            img_vectors = []
        else:
            m_in, src_prev, tgt_prev = self.differential_matrix(p - 1, energy, weight)
            rank_in = rank(m_in) if len(src_prev) else 0
            img_vectors = None
            if reps:
                img_vectors = []
                for j in range(m_in.ncols):
                    col = m_in.column(j)
                    img_vectors.append({tgt_prev[i]: v for i, v in col.items()})
        dim = n_p - rank_out - rank_in
        result = {"p": p, "energy": energy, "weight": weight, "dim": dim,
                  "cochain_dim": n_p, "rank_out": rank_out, "rank_in": rank_in}
        if not reps:
            return result
        key_order = self.raw_cochain_basis(
            p, energy, self.zero_weight if self.pair != "absolute" else weight)
        reducer = SpanReducer(img_vectors or [], key_order)
        chosen, seen = [], SpanReducer([], key_order)
        for kv in kernel_basis(m_out):
            raw = {}
            for i, c in kv.items():
                vec_add(raw, src[i], c)
            nf = reducer.normal_form(raw)
            if not nf or seen.contains(nf):
                continue
            chosen.append(nf)
            seen = SpanReducer(chosen, key_order)
            if len(chosen) == dim:
                break
        if len(chosen) != dim:
            raise AssertionError("representative extraction mismatch")
        result["representatives"] = chosen
        return result

    def max_degree(self, energy: int) -> int:
        """Largest degree any key at this energy can have: count distinct
        dual labels, cheapest first, until the energy budget runs out."""
        count = 0
        spent = 0
        for (n, _) in sorted(self._psi_labels(energy), key=lambda l: l[0]):
            if spent + n > energy:
                break
            spent += n
            count += 1
        return count

    def euler_characteristic(self, energy: int, weight=None, max_p: int | None = None):
        """Alternating sums of cochain and cohomology dimensions; they must
        agree slice by slice."""
        if max_p is None:
            max_p = self.max_degree(energy)
        chi_c = 0
        chi_h = 0
        for p in range(max_p + 1):
            r = self.cohomology(p, energy, weight)
            chi_c += (-1) ** p * r["cochain_dim"]
            chi_h += (-1) ** p * r["dim"]
        return chi_c, chi_h
