"""One-parameter tilts of the cochain differential and their class maps.

Moving the level off the critical form by h times a fixed invariant
direction changes the quantum differential by a term linear in h; the
classical counterpart keeps the derivation action and adds the central
contraction against the same direction.  In both cases the full family is

    d(h) = d0 + h d1

over one and the same cochain basis, because the differential is affine in
the module action and the direction enters that action linearly.  This
module extracts d1 slice by slice as an exact matrix difference, checks the
square-zero relations that make (d0, d1) a differential family, and pushes
d1 down to cohomology, where it acts as a degree-raising map on classes.

The quantum and classical maps are compared through leading symbols: the
top layer of the length filtration of a quantum tilt matches the classical
contraction applied to the top layer of the argument, up to a classical
coboundary.  The classical map is also a differential on cohomology in its
own right; away from energy zero it has no cohomology, which is the
degeneration mechanism behind the level-direction class maps being
injective on degree-zero classes.
"""

from __future__ import annotations

from fractions import Fraction

from .cartan import BilinearForm, SimpleLieAlgebra, bilinear_form
from .chevalley import ChevalleyComplex
from .linalg import (SparseMatrixQ, in_image, matmul, rank, solve_in_basis,
                     vec_add)
from .modules import LoopModule

Q = Fraction


class TiltedClassicalModule(LoopModule):
    """Classical action plus the central contraction against a fixed form.

    This is the parameter-one member of the classical family; the
    contraction term is the whole h-linear part, since the derivation
    action itself does not move with the level.
    """

    def __init__(self, L: SimpleLieAlgebra, family: str,
                 direction: BilinearForm, weight=None):
        super().__init__(L, family, weight=weight)
        self.direction = direction

    def act(self, mode, mono) -> dict:
        out = super().act(mode, mono)
        vec_add(out, self.contract_form(mode, mono, self.direction), Q(1))
        return out


class DifferentialFamily:
    """A cochain complex together with the first-order tilt of its
    differential along a direction in the space of invariant forms.

    quantum families ("Vq", "Mq") move the level: the tilted member lives
    at the critical form plus `scale` times the trace form.  Classical
    families ("Vcl", "Mcl") keep the derivation action and add the central
    contraction against the same direction.  Both members are genuine
    square-zero complexes, so d1 = d(1) - d(0) automatically satisfies
    d0 d1 + d1 d0 = 0 and d1^2 = 0; the checks below recompute that on
    every slice rather than taking it on faith.
    """

    def __init__(self, L: SimpleLieAlgebra, pair: str = "absolute",
                 family: str = "Vq", scale=1, weight=None):
        self.L = L
        self.pair = pair
        self.family = family
        self.scale = Q(scale)
        self.quantum = family in ("Vq", "Mq")
        self.direction = bilinear_form(L, "trace").scale(self.scale)
        if self.quantum:
            base_mod = LoopModule(L, family, form=bilinear_form(L, "critical"),
                                  weight=weight)
            tilt_mod = LoopModule(
                L, family,
                form=bilinear_form(L, "critical").plus(self.direction),
                weight=weight)
        else:
            base_mod = LoopModule(L, family, weight=weight)
            tilt_mod = TiltedClassicalModule(L, family, self.direction,
                                             weight=weight)
        self.base = ChevalleyComplex(L, pair, base_mod)
        self.tilted = ChevalleyComplex(L, pair, tilt_mod)
        self._slices = {}
        self._coh = {}
        self._img = {}

    # ----------------------------------------------------------- matrices

    def slice(self, p: int, energy: int, weight=None):
        """(d0, d1, sources, target_keys) on one slice.

        Source coordinates are the invariant basis, shared by both family
        members: invariance only sees the constant action, which carries no
        central term, so the bases agree key for key.
        """
        sk = (p, energy, weight)
        hit = self._slices.get(sk)
        if hit is not None:
            return hit
        m0, src0, tgt0 = self.base.differential_matrix(p, energy, weight)
        m1, src1, tgt1 = self.tilted.differential_matrix(p, energy, weight)
        if src0 != src1 or tgt0 != tgt1:
            raise AssertionError("family members disagree on the cochain basis")
        ent = dict(m1.entries)
        for k, v in m0.entries.items():
            w = ent.get(k, Q(0)) - v
            if w:
                ent[k] = w
            else:
                ent.pop(k, None)
        out = (m0, SparseMatrixQ(m1.nrows, m1.ncols, ent), src0, tgt0)
        self._slices[sk] = out
        return out

    def tilt_apply(self, vec: dict) -> dict:
        """The h-linear part of the differential on a raw cochain vector."""
        out = self.tilted.apply_d(vec)
        vec_add(out, self.base.apply_d(vec), Q(-1))
        return out

    def square_failures(self, max_energy: int, weight=None):
        """Check d0^2 = 0, d0 d1 + d1 d0 = 0 and d1^2 = 0 on every invariant
        source vector of every slice up to max_energy.  Returns a list of
        (relation, p, energy) triples that fail; empty means the family is a
        differential family on the window."""
        bad = []
        for e in range(max_energy + 1):
            for p in range(self.base.max_degree(e) + 1):
                _, _, src, _ = self.slice(p, e, weight)
                for v in src:
                    d0v = self.base.apply_d(v)
                    d1v = self.tilt_apply(v)
                    if self.base.apply_d(d0v):
                        bad.append(("d0 d0", p, e))
                        break
                    anti = self.base.apply_d(d1v)
                    vec_add(anti, self.tilt_apply(d0v), Q(1))
                    if anti:
                        bad.append(("d0 d1 + d1 d0", p, e))
                        break
                    if self.tilt_apply(d1v):
                        bad.append(("d1 d1", p, e))
                        break
        return bad

    # --------------------------------------------------------- cohomology

    def cohomology(self, p: int, energy: int, weight=None):
        ck = (p, energy, weight)
        hit = self._coh.get(ck)
        if hit is None:
            hit = self.base.cohomology(p, energy, weight, reps=True)
            self._coh[ck] = hit
        return hit

    def _image_vectors(self, p: int, energy: int, weight=None):
        """Coboundaries inside degree p as raw dict vectors."""
        ik = (p, energy, weight)
        hit = self._img.get(ik)
        if hit is not None:
            return hit
        if p == 0:
            out = []
        else:
            m, _, tgt = self.base.differential_matrix(p - 1, energy, weight)
            out = []
            for j in range(m.ncols):
                col = m.column(j)
                if col:
                    out.append({tgt[i]: c for i, c in col.items()})
        self._img[ik] = out
        return out

    def class_map(self, p: int, energy: int, weight=None):
        """Matrix of the map H^p -> H^{p+1} induced by the tilt, in the
        canonical representative bases.

        Each representative is lifted (it already is a cocycle), hit with
        d1, and reduced against the target representatives modulo the image
        of d0; the anticommutation relation makes the result closed, so the
        reduction always succeeds on a consistent family.
        """
        src_c = self.cohomology(p, energy, weight)
        tgt_c = self.cohomology(p + 1, energy, weight)
        reps = src_c["representatives"]
        treps = tgt_c["representatives"]
        img = self._image_vectors(p + 1, energy, weight)
        keyw = self.base.zero_weight if self.pair != "absolute" else weight
        keys = self.base.raw_cochain_basis(p + 1, energy, keyw)
        targets = [self.tilt_apply(r) for r in reps]
        coords = solve_in_basis(treps + img, targets, keys=keys)
        entries = {}
        for j, co in enumerate(coords):
            if co is None:
                raise ArithmeticError(
                    "tilt of a cocycle is not closed modulo coboundaries "
                    f"at p={p} energy={energy}")
            for i, c in co.items():
                if i < len(treps) and c:
                    entries[(i, j)] = c
        return {
            "matrix": SparseMatrixQ(len(treps), len(reps), entries),
            "src_reps": reps,
            "tgt_reps": treps,
        }

    def class_map_ranks(self, max_p: int, energy: int, weight=None):
        """dim H^p and rank of the class map out of each degree <= max_p."""
        dims, rks = [], []
        for p in range(max_p + 1):
            cm = self.class_map(p, energy, weight)
            dims.append(len(cm["src_reps"]))
            rks.append(rank(cm["matrix"]))
        return dims, rks

    def representative_shift_failures(self, p: int, energy: int, weight=None,
                                      count: int = 3):
        """The class map may not see which cocycle represents a class:
        tilting a coboundary must land back in the coboundaries.  Checks
        the first `count` image vectors of the slice."""
        if p == 0:
            return []
        m_out, _, tgt = self.base.differential_matrix(p, energy, weight)
        tindex = {k: i for i, k in enumerate(tgt)}
        bad = []
        for w in self._image_vectors(p, energy, weight)[:count]:
            tw = self.tilt_apply(w)
            v = {tindex[k]: c for k, c in tw.items()}
            ok, _ = in_image(m_out, v)
            if not ok:
                bad.append((p, energy))
        return bad

    def composite_is_zero(self, p: int, energy: int, weight=None) -> bool:
        """Class map squared: H^p -> H^{p+2} must vanish."""
        a = self.class_map(p, energy, weight)["matrix"]
        b = self.class_map(p + 1, energy, weight)["matrix"]
        return not matmul(b, a).entries


# ------------------------------------------------------------------ symbols


def cochain_symbol(vec: dict) -> dict:
    """Leading layer of the length filtration on the module part of a
    cochain; dual factors do not filter."""
    if not vec:
        return {}
    top = max(len(k[0]) for k in vec)
    return {k: c for k, c in vec.items() if len(k[0]) == top}


def symbol_layer(vec: dict, length: int) -> dict:
    return {k: c for k, c in vec.items() if len(k[0]) == length}


def symbol_comparison_failures(fq: DifferentialFamily,
                               fcl: DifferentialFamily,
                               p: int, max_energy: int):
    """Compare the quantum and classical class maps through symbols.

    For each degree-p quantum representative P with top length l, the
    length-(l-1) layer of its quantum tilt must agree with the classical
    tilt of its symbol, up to a classical coboundary of the same slice.
    Straight equality is the generic outcome; the coboundary fallback keeps
    the check about classes rather than about chosen cocycles.  Returns
    (checked, failures)."""
    if fq.pair != fcl.pair:
        raise ValueError("symbol comparison needs one cochain basis")
    checked = 0
    bad = []
    for e in range(max_energy + 1):
        for P in fq.cohomology(p, e)["representatives"]:
            top = max(len(k[0]) for k in P)
            got = symbol_layer(fq.tilt_apply(P), top - 1) if top else {}
            want = fcl.tilt_apply(cochain_symbol(P))
            diff = dict(got)
            vec_add(diff, want, Q(-1))
            checked += 1
            if not diff:
                continue
            m, _, tgt = fcl.base.differential_matrix(p, e)
            tindex = {k: i for i, k in enumerate(tgt)}
            v = {tindex[k]: c for k, c in diff.items()}
            ok, _ = in_image(m, v)
            if not ok:
                bad.append((p, e))
    return checked, bad


# ------------------------------------------------------------------ products


def cup_leibniz_failures(family: DifferentialFamily, layer, max_energy: int,
                         rng=None, count: int = 60):
    """The tilt is a derivation of the cup product on classes: on closed
    representatives A, B the defect

        d1(A cup B) - d1(A) cup B - (-1)^{|A|} A cup d1(B)

    must be a coboundary.  Samples up to `count` ordered pairs of degree
    <= 1 representatives with total energy <= max_energy and returns
    (checked, failures).  `layer` supplies the cup product; it must sit on
    the same complex as the family."""
    reps = []
    for e in range(max_energy + 1):
        for p in (0, 1):
            for r in family.cohomology(p, e)["representatives"]:
                reps.append((p, e, r))
    pairs = [(a, b) for a in reps for b in reps
             if a[1] + b[1] <= max_energy]
    if rng is not None and len(pairs) > count:
        pairs = rng.sample(pairs, count)
    checked = 0
    bad = []
    for (pa, ea, A), (pb, eb, B) in pairs:
        cupAB = layer.cup(A, B)
        defect = family.tilt_apply(cupAB)
        vec_add(defect, layer.cup(family.tilt_apply(A), B), Q(-1))
        vec_add(defect, layer.cup(A, family.tilt_apply(B)),
                Q((-1) ** (pa + 1)))
        checked += 1
        if not defect:
            continue
        pt, et = pa + pb, ea + eb
        m, _, tgt = family.base.differential_matrix(pt, et)
        tindex = {k: i for i, k in enumerate(tgt)}
        v = {tindex[k]: c for k, c in defect.items()}
        ok, _ = in_image(m, v)
        if not ok:
            bad.append((pa, ea, pb, eb))
    return checked, bad


# ------------------------------------------------------------- degeneration


def class_complex_cohomology(family: DifferentialFamily, max_p: int,
                             energy: int, weight=None):
    """Dimensions of the cohomology of (H^*, class map) up to degree max_p.

    The class map squares to zero, so (H^*, phi) is itself a complex; its
    cohomology in degree p has dimension dim H^p - rank phi_p - rank
    phi_{p-1}.  For the classical vacuum family this vanishes in every
    positive energy slice, which is the exactness that forces quantum
    degree-zero classes to move injectively off the critical level."""
    dims, rks = family.class_map_ranks(max_p, energy, weight)
    out = []
    for p in range(max_p + 1):
        prev = rks[p - 1] if p else 0
        out.append(dims[p] - rks[p] - prev)
    return out
