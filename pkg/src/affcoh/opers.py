"""Connection operators on a truncated formal disc.

An operator is kept as its b-valued coefficient series v(t) mod t^K next
to the fixed principal lowering term: regular ones read d/dt + p_{-1} +
v(t), regular-singular ones read d/dt + (p_{-1} + v(t))/t.  Gauge
transformations by exponentials of n-valued series act through the
defining representation with exact rational series arithmetic, so every
identity here is an equality of truncated series, never a numerical
approximation.

The slice reduction eliminates, height by height in the principal
gradation, everything off the span of the centralizer elements p_j; the
correction at each height is found by one small exact linear solve, and
the achieved gauge is returned alongside the canonical coefficients.

The module also houses the partition-counting oracles for the graded
function rings (and their differential forms) that the cohomology
computations elsewhere are compared against.  Two independent routes
feed the generator degrees: invariant-polynomial degrees for the
module-side labels and principal-triple exponents for the operator-side
labels, so the equality of the two series is a real check rather than a
bookkeeping identity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .cartan import (SimpleLieAlgebra, build_simple_lie_algebra,
                     invariant_polynomials, principal_triple)
from .linalg import solve_in_basis, vec_add

Q = Fraction

SERIES_LABELS = ("FunC", "OmegaC", "FunCRS", "OmegaCRS",
                 "FunOp", "OmegaOp", "OmegaOpRS")


# ------------------------------------------------------- matrix series

def _mzero(n):
    return [[Q(0)] * n for _ in range(n)]


def _mid(n):
    m = _mzero(n)
    for i in range(n):
        m[i][i] = Q(1)
    return m


def _madd(a, b, c=Q(1)):
    n = len(a)
    return [[a[i][j] + c * b[i][j] for j in range(n)] for i in range(n)]


def _mscale(a, c):
    n = len(a)
    return [[c * a[i][j] for j in range(n)] for i in range(n)]


def _mmul(a, b):
    n = len(a)
    out = _mzero(n)
    for i in range(n):
        ai = a[i]
        for k in range(n):
            v = ai[k]
            if v:
                bk = b[k]
                oi = out[i]
                for j in range(n):
                    if bk[j]:
                        oi[j] += v * bk[j]
    return out


def _is_zero(m):
    return all(not v for row in m for v in row)


# series = {power: matrix}, powers below the cutoff only, zeros dropped

def _s_add(a, b, c=Q(1)):
    out = dict(a)
    for p, m in b.items():
        out[p] = _madd(out[p], m, c) if p in out else _mscale(m, c)
        if _is_zero(out[p]):
            del out[p]
    return out


def _s_mul(a, b, cutoff):
    out = {}
    for p, ma in a.items():
        for q, mb in b.items():
            if p + q >= cutoff:
                continue
            m = _mmul(ma, mb)
            out[p + q] = _madd(out[p + q], m) if p + q in out else m
    return {p: m for p, m in out.items() if not _is_zero(m)}


def _s_deriv(a):
    return {p - 1: _mscale(m, Q(p)) for p, m in a.items() if p}


def _s_t_deriv(a):
    # t * d/dt multiplies the t^p coefficient by p
    return {p: _mscale(m, Q(p)) for p, m in a.items() if p}


def _s_exp(x, n, cutoff):
    """exp of a strictly-upper-triangular-valued series; exact since both
    the matrix size and the truncation bound the expansion."""
    acc = {0: _mid(n)}
    term = {0: _mid(n)}
    for j in range(1, n):
        term = _s_mul(term, x, cutoff)
        acc = _s_add(acc, term, Q(1, math.factorial(j)))
    return acc


def _s_log(e, n, cutoff):
    nil = _s_add(e, {0: _mid(n)}, Q(-1))
    acc = {}
    term = {0: _mid(n)}
    for j in range(1, n):
        term = _s_mul(term, nil, cutoff)
        acc = _s_add(acc, term, Q((-1) ** (j + 1), j))
    return acc


# --------------------------------------------------------- oper types

@dataclass
class OperRep:
    L: SimpleLieAlgebra
    precision: int
    singularity: str                 # "regular" | "rs"
    v: tuple                         # per power of t, {basis index: Fraction}

    def __post_init__(self):
        if self.singularity not in ("regular", "rs"):
            raise ValueError(f"unknown singularity {self.singularity!r}")
        if len(self.v) != self.precision:
            raise ValueError("coefficient series length != precision")
        ok = set(self.L.positive) | set(self.L.cartan)
        for coeff in self.v:
            if any(a not in ok for a in coeff):
                raise ValueError("v(t) must take values in the Borel")


@dataclass
class GaugeElement:
    L: SimpleLieAlgebra
    precision: int
    x: tuple                         # per power of t, {basis index: Fraction}

    def __post_init__(self):
        ok = set(self.L.positive)
        for coeff in self.x:
            if any(a not in ok for a in coeff):
                raise ValueError("x(t) must take values in the nilpotent part")


@dataclass
class CanonicalOper:
    L: SimpleLieAlgebra
    precision: int
    coeffs: dict                     # exponent -> tuple of Fractions

    def to_oper(self, singularity: str = "regular") -> OperRep:
        tri = _triple(self.L)
        v = []
        for k in range(self.precision):
            coeff = {}
            for d, series in self.coeffs.items():
                if series[k]:
                    vec_add(coeff, tri.kernel_elements[d], series[k])
            v.append(coeff)
        return OperRep(self.L, self.precision, singularity, tuple(v))


_TRIPLES = {}


def _triple(L):
    tri = _TRIPLES.get(L.name)
    if tri is None:
        tri = principal_triple(L)
        deg = {}
        for d, idxs in tri.degree_space().items():
            for a in idxs:
                deg[a] = d
        tri._index_degree = deg
        _TRIPLES[L.name] = tri
    return tri


def _vseries_to_mats(L, vdict):
    return {p: L.matrix_of(c) for p, c in vdict.items() if c}


def _mats_to_vseries(L, mser):
    return {p: L.decompose(m) for p, m in mser.items() if not _is_zero(m)}


# ------------------------------------------------------- gauge action

def _apply_gauge(L, xser, payload, cutoff, t_weighted):
    """Transform the connection payload by exp(x).

    payload is the matrix series of p_{-1} + v(t); the derivative term is
    g'g^{-1} for ordinary connections and t g'g^{-1} when the payload sits
    over a 1/t prefactor.  The exponential is carried one order past the
    cutoff because differentiation pulls the t^cutoff coefficient down
    into the window.  Returns (new payload, exp(x) mod t^{cutoff+1})."""
    e = _s_exp(xser, L.n, cutoff + 1)
    einv = _s_exp({p: _mscale(m, Q(-1)) for p, m in xser.items()},
                  L.n, cutoff + 1)
    out = _s_mul(_s_mul(e, payload, cutoff), einv, cutoff)
    de = _s_t_deriv(e) if t_weighted else _s_deriv(e)
    out = _s_add(out, _s_mul(de, einv, cutoff), Q(-1))
    return out, e


def gauge_transform(g: GaugeElement, op: OperRep) -> OperRep:
    """Action of exp(x) on the operator, exact mod t^precision.

    The gauge polynomial is taken as an exact representative, so it may
    carry more orders than the oper (derived gauges do: one extra order
    makes their action reproducible at the top coefficient)."""
    if g.precision < op.precision:
        raise ValueError("precision mismatch between gauge and oper")
    L, K = op.L, op.precision
    tri = _triple(L)
    payload = _s_add(_vseries_to_mats(L, dict(enumerate(op.v))),
                     {0: L.matrix_of(tri.f_vec)})
    xser = _vseries_to_mats(L, dict(enumerate(g.x)))
    out, _ = _apply_gauge(L, xser, payload, K, op.singularity == "rs")
    out = _s_add(out, {0: L.matrix_of(tri.f_vec)}, Q(-1))
    wser = _mats_to_vseries(L, out)
    ok = set(L.positive) | set(L.cartan)
    v = [dict() for _ in range(K)]
    for p, c in wser.items():
        if p < 0 or any(a not in ok for a in c):
            raise ValueError("gauge left the oper shape")
        v[p] = c
    return OperRep(L, K, op.singularity, tuple(v))


def compose(g1: GaugeElement, g2: GaugeElement) -> GaugeElement:
    """Group law matching gauge_transform(g1, gauge_transform(g2, op)).

    The result carries one extra order so its action on opers at the
    constituents' precision is exact there."""
    L = g1.L
    Kx = min(g1.precision, g2.precision) + 1
    e1 = _s_exp(_vseries_to_mats(L, dict(enumerate(g1.x))), L.n, Kx)
    e2 = _s_exp(_vseries_to_mats(L, dict(enumerate(g2.x))), L.n, Kx)
    x = _mats_to_vseries(L, _s_log(_s_mul(e1, e2, Kx), L.n, Kx))
    out = [dict() for _ in range(Kx)]
    for p, c in x.items():
        out[p] = c
    return GaugeElement(L, Kx, tuple(out))


# ---------------------------------------------------- slice reduction

def _reduce_to_slice(L, vser, cutoff, t_weighted):
    """Drive v(t) onto the span of the centralizer elements, height by
    height; the height-h component is absorbed by a gauge at height h+1
    because bracketing with the lowering element drops the height by one
    and misses only the centralizer directions."""
    tri = _triple(L)
    deg = tri._index_degree
    space = tri.degree_space()
    payload = _s_add(_vseries_to_mats(L, vser), {0: L.matrix_of(tri.f_vec)})
    pm = {0: L.matrix_of(tri.f_vec)}
    etot = {0: _mid(L.n)}
    keys = list(range(L.dim))
    for d in sorted(int(k) for k in space if k > 0):
        cur = _mats_to_vseries(L, _s_add(payload, pm, Q(-1)))
        idxs = space[d]
        columns = [L.bracket_vec({a: Q(1)}, tri.f_vec) for a in idxs]
        if (d - 1) in tri.kernel_elements:
            columns.append(tri.kernel_elements[d - 1])
        powers, targets = [], []
        for p, c in sorted(cur.items()):
            part = {a: v for a, v in c.items() if deg.get(a, None) == d - 1}
            if part:
                powers.append(p)
                targets.append(part)
        if not powers:
            continue
        sols = solve_in_basis(columns, targets, keys=keys)
        xser = {}
        for p, sol in zip(powers, sols):
            if sol is None:
                raise AssertionError("height component outside its bracket image")
            coeff = {idxs[i]: -c for i, c in sol.items() if i < len(idxs) and c}
            if coeff:
                xser[p] = L.matrix_of(coeff)
        if not xser:
            continue
        payload, e = _apply_gauge(L, xser, payload, cutoff, t_weighted)
        etot = _s_mul(e, etot, cutoff + 1)
    rest = _mats_to_vseries(L, _s_add(payload, pm, Q(-1)))
    slice_vecs = [tri.kernel_elements[d] for d in tri.exponents]
    coeffs = {d: {} for d in tri.exponents}
    sols = solve_in_basis(slice_vecs, [rest[p] for p in sorted(rest)], keys=keys)
    for p, sol in zip(sorted(rest), sols):
        if sol is None:
            raise AssertionError("reduction did not land on the slice")
        for i, c in sol.items():
            if c:
                coeffs[tri.exponents[i]][p] = c
    return coeffs, etot


def canonical_form(op: OperRep):
    """Unique slice representative of a regular oper plus the gauge
    reaching it; exact mod t^precision."""
    if op.singularity != "regular":
        raise ValueError("canonical_form expects a regular oper")
    return _finish_reduction(op, t_weighted=False)


def rs_slice_form(op: OperRep):
    """Slice representative of a regular-singular oper in the same
    d/dt + (p_{-1} + v(t))/t presentation."""
    if op.singularity != "rs":
        raise ValueError("rs_slice_form expects an rs oper")
    return _finish_reduction(op, t_weighted=True)


def _finish_reduction(op, t_weighted):
    L, K = op.L, op.precision
    vser = {p: c for p, c in enumerate(op.v) if c}
    coeffs, etot = _reduce_to_slice(L, vser, K, t_weighted)
    tri = _triple(L)
    out = {}
    for d in tri.exponents:
        series = [Q(0)] * K
        for p, c in coeffs[d].items():
            if not 0 <= p < K:
                raise AssertionError("slice coefficient outside the window")
            series[p] = c
        out[d] = tuple(series)
    xlog = _mats_to_vseries(L, _s_log(etot, L.n, K + 1))
    x = [dict() for _ in range(K + 1)]
    for p, c in xlog.items():
        x[p] = c
    return CanonicalOper(L, K, out), GaugeElement(L, K + 1, tuple(x))


def gauge_between(op1: OperRep, op2: OperRep):
    """Gauge carrying op1 to op2, or None when their canonical forms
    disagree (constructive orbit test)."""
    c1, g1 = canonical_form(op1)
    c2, g2 = canonical_form(op2)
    if c1.coeffs != c2.coeffs:
        return None
    L, Kx = op1.L, op1.precision + 1
    e1 = _s_exp(_vseries_to_mats(L, dict(enumerate(g1.x))), L.n, Kx)
    x2neg = {p: _mscale(L.matrix_of(c), Q(-1))
             for p, c in dict(enumerate(g2.x)).items() if c}
    e2inv = _s_exp(x2neg, L.n, Kx)
    x = _mats_to_vseries(L, _s_log(_s_mul(e2inv, e1, Kx), L.n, Kx))
    out = [dict() for _ in range(Kx)]
    for p, c in x.items():
        out[p] = c
    return GaugeElement(L, Kx, tuple(out))


# ------------------------------------------------------------ residue

def char_poly(m, n):
    """Characteristic polynomial coefficients (c_1..c_n) of x^n + c_1
    x^{n-1} + ... + c_n, by the trace recursion."""
    coeffs = []
    acc = _mid(n)
    for k in range(1, n + 1):
        acc = _mmul(m, acc)
        tr = sum(acc[i][i] for i in range(n))
        c = -tr / k
        coeffs.append(c)
        for i in range(n):
            acc[i][i] += c
    return tuple(coeffs)


def rs_residue(op: OperRep):
    """Weyl-orbit datum of the residue p_{-1} + v(0), encoded by the
    characteristic polynomial in the defining representation."""
    if op.singularity != "rs":
        raise ValueError("rs_residue expects an rs oper")
    tri = _triple(op.L)
    vec = dict(tri.f_vec)
    vec_add(vec, op.v[0])
    return char_poly(op.L.matrix_of(vec), op.L.n)


def punctured_disc_form(op: OperRep, margin: int = 4):
    """Coefficients c_i(t) of the Laurent slice form d/dt + p_{-1} +
    sum_i t^{-d_i-1} c_i(t) p_i of a regular-singular oper.

    Obtained from the rs slice form by the semisimple twist that scales
    height-k components by t^{-k} and adds the t^{-1} Cartan term, then a
    second reduction with Laurent gauge coefficients.  Top coefficients
    beyond the requested precision are affected by the unknown tail of
    v(t) and are recomputed at a higher internal cutoff, so callers get
    exactly op.precision trustworthy coefficients per exponent."""
    L, K = op.L, op.precision
    tri = _triple(L)
    slice_co, _ = rs_slice_form(op)
    vser = {}
    for d in tri.exponents:
        for p, c in enumerate(slice_co.coeffs[d]):
            if c:
                coeff = vser.setdefault(p - d - 1, {})
                vec_add(coeff, tri.kernel_elements[d], c)
    u = {p: dict(c) for p, c in vser.items()}
    vec_add(u.setdefault(-1, {}), tri.rho_check)
    coeffs, _ = _reduce_to_slice(L, u, K + margin, t_weighted=False)
    out = {}
    for d in tri.exponents:
        series = [Q(0)] * K
        for p, c in coeffs[d].items():
            if p < -d - 1:
                raise AssertionError("pole order exceeds the singular bound")
            if p + d + 1 < K:
                series[p + d + 1] = c
        out[d] = tuple(series)
    return CanonicalOper(L, K, out)


# ------------------------------------------------------- series oracle

def _generator_energies(L, label):
    if label not in SERIES_LABELS:
        raise ValueError(f"unknown series label {label!r}")
    if label.endswith("Op") or label.endswith("OpRS"):
        dlist = _triple(L).exponents
    else:
        dlist = [ip.degree - 1 for ip in invariant_polynomials(L)]
    rs = label.endswith("RS")
    return dlist, rs, label.startswith("Omega")


def expected_dimensions(label: str, L, max_energy: int, p: int):
    """Coefficient of q^energy in the s^p part of the free
    skew-commutative series with even and odd generators at energies
    n + d_i + 1 (n >= 0, or n >= -d_i for the RS labels)."""
    dlist, rs, with_odd = _generator_energies(L, label)
    energies = []
    for d in dlist:
        n0 = -d if rs else 0
        for n in range(n0, max_energy - d):
            energies.append(n + d + 1)
    smax = p if with_odd else 0
    table = [[0] * (max_energy + 1) for _ in range(smax + 1)]
    table[0][0] = 1
    for a in energies:
        for e in range(a, max_energy + 1):
            for s in range(smax + 1):
                table[s][e] += table[s][e - a]
    if with_odd:
        for a in energies:
            for e in range(max_energy, a - 1, -1):
                for s in range(smax, 0, -1):
                    table[s][e] += table[s - 1][e - a]
    if p > smax:
        return [0] * (max_energy + 1)
    return table[p]


# ------------------------------------------------------------- JSON IO

def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 \
        else str(q.numerator)


def _parse(s) -> Fraction:
    return Fraction(s)


def oper_to_json(op: OperRep) -> str:
    coeffs = []
    for p, c in enumerate(op.v):
        for a in sorted(c, key=lambda a: op.L.names[a]):
            coeffs.append({"basis": op.L.names[a], "power": p,
                           "value": _fmt(c[a])})
    doc = {"algebra": op.L.name, "precision": op.precision,
           "singularity": op.singularity, "coefficients": coeffs}
    return json.dumps(doc, indent=1, sort_keys=True)


def oper_from_json(text: str) -> OperRep:
    doc = json.loads(text)
    L = build_simple_lie_algebra(doc["algebra"])
    v = [dict() for _ in range(doc["precision"])]
    for ent in doc["coefficients"]:
        a = L.index[ent["basis"]]
        v[ent["power"]][a] = _parse(ent["value"])
    return OperRep(L, doc["precision"], doc["singularity"], tuple(v))


def canonical_to_json(co: CanonicalOper) -> str:
    coeffs = []
    for d in sorted(co.coeffs):
        for p, c in enumerate(co.coeffs[d]):
            if c:
                coeffs.append({"basis": f"p{d}", "power": p,
                               "value": _fmt(c)})
    doc = {"algebra": co.L.name, "precision": co.precision,
           "slice": coeffs}
    return json.dumps(doc, indent=1, sort_keys=True)
