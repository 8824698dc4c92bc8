"""Finite-dimensional simple Lie algebra data used by every other layer.

Structure constants are generated from the defining matrix representation of
sl_n rather than typed in, so the bracket tables, weights and bilinear forms
all trace back to a single source that the tests can cross-check (Jacobi,
form invariance, Killing-vs-trace proportionality).

Conventions fixed here and relied on everywhere else:
  * basis order: positive root vectors by height, then Cartan h_i, then the
    mirrored negative root vectors;
  * weights are tuples (alpha(h_1), ..., alpha(h_r));
  * the "trace" form is tr over the defining rep, "critical" is minus half
    the Killing form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import SparseMatrixQ, kernel_basis, solve_in_basis

Q = Fraction

__all__ = [
    "SimpleLieAlgebra",
    "BilinearForm",
    "build_simple_lie_algebra",
    "bilinear_form",
    "InvariantPolynomial",
    "invariant_polynomials",
    "PrincipalTriple",
    "principal_triple",
    "poly_eval",
    "coadjoint_derivation",
]


def _mat(n):
    return [[Q(0)] * n for _ in range(n)]


def _unit(n, i, j):
    m = _mat(n)
    m[i][j] = Q(1)
    return m


def _mm(a, b):
    n = len(a)
    out = _mat(n)
    for i in range(n):
        ai = a[i]
        for k in range(n):
            x = ai[k]
            if x:
                bk = b[k]
                oi = out[i]
                for j in range(n):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def _bracket_mat(a, b):
    ab = _mm(a, b)
    ba = _mm(b, a)
    return [[ab[i][j] - ba[i][j] for j in range(len(a))] for i in range(len(a))]


def _trace(m):
    return sum(m[i][i] for i in range(len(m)))


@dataclass
class SimpleLieAlgebra:
    name: str
    n: int                 # defining rep size
    rank: int
    dim: int
    names: list
    index: dict            # name -> basis index
    rep: list              # basis index -> defining-rep matrix
    mu: dict               # (a, b) -> {c: coeff}, [x_a, x_b] = sum mu[a,b][c] x_c
    weights: list          # basis index -> tuple alpha(h_i)
    simple: list           # per node i: (e_i, h_i, f_i) basis indices
    positive: list
    cartan: list
    negative: list

    def bracket(self, a: int, b: int) -> dict:
        return dict(self.mu.get((a, b), {}))

    def bracket_vec(self, x: dict, y: dict) -> dict:
        out = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, m in self.mu.get((a, b), {}).items():
                    w = out.get(c, 0) + ca * cb * m
                    if w:
                        out[c] = w
                    else:
                        out.pop(c, None)
        return out

    def matrix_of(self, vec: dict):
        m = _mat(self.n)
        for a, c in vec.items():
            ra = self.rep[a]
            for i in range(self.n):
                for j in range(self.n):
                    if ra[i][j]:
                        m[i][j] += c * ra[i][j]
        return m

    def decompose(self, m) -> dict:
        """Coefficients of a traceless matrix in this basis."""
        if _trace(m) != 0:
            raise ValueError("matrix has nonzero trace")
        out = {}
        for a, nm in enumerate(self.names):
            if nm.startswith("h"):
                continue
            i, j = self._root_pos[a]
            if m[i][j]:
                out[a] = m[i][j]
        s = Q(0)
        for i in range(self.rank):
            s += m[i][i]
            if s:
                out[self.index[f"h{i + 1}" if self.rank > 1 else "h"]] = s
        return out

    def ad_matrix(self, vec: dict):
        """Matrix of ad(vec) on the algebra itself, as dict columns."""
        cols = []
        for b in range(self.dim):
            col = {}
            for a, ca in vec.items():
                for c, mval in self.mu.get((a, b), {}).items():
                    w = col.get(c, 0) + ca * mval
                    if w:
                        col[c] = w
                    else:
                        col.pop(c, None)
            cols.append(col)
        return cols

    def weight_of_vec(self, vec: dict):
        wts = {self.weights[a] for a in vec if vec[a]}
        if len(wts) != 1:
            raise ValueError("vector is not weight-homogeneous")
        return wts.pop()


def build_simple_lie_algebra(name: str) -> SimpleLieAlgebra:
    """Supported: "sl2", "sl3"."""
    if name == "sl2":
        n = 2
    elif name == "sl3":
        n = 3
    else:
        raise ValueError(f"unsupported algebra {name!r}")
    rank = n - 1

    # root vectors E_ij ordered by height j - i, then by i; h_i = E_ii - E_i+1,i+1
    pos_pairs = [
        (i, j) for h in range(1, n) for i in range(n) for j in range(n) if j - i == h
    ]
    names, rep, root_pos = [], [], []

    def root_name(i, j):
        if rank == 1:
            return "e" if j > i else "f"
        letter = "e" if j > i else "f"
        lo, hi = min(i, j), max(i, j)
        return letter + "".join(str(k + 1) for k in range(lo, hi)) if hi - lo > 1 \
            else letter + str(lo + 1)

    for (i, j) in pos_pairs:
        names.append(root_name(i, j))
        rep.append(_unit(n, i, j))
        root_pos.append((i, j))
    for i in range(rank):
        names.append("h" if rank == 1 else f"h{i + 1}")
        m = _mat(n)
        m[i][i], m[i + 1][i + 1] = Q(1), Q(-1)
        rep.append(m)
        root_pos.append(None)
    for (i, j) in pos_pairs:
        names.append(root_name(j, i))
        rep.append(_unit(n, j, i))
        root_pos.append((j, i))

    dim = len(names)
    index = {nm: a for a, nm in enumerate(names)}
    npos = len(pos_pairs)
    positive = list(range(npos))
    cartan = list(range(npos, npos + rank))
    negative = list(range(npos + rank, dim))

    L = SimpleLieAlgebra(
        name=name, n=n, rank=rank, dim=dim, names=names, index=index,
        rep=rep, mu={}, weights=[], simple=[],
        positive=positive, cartan=cartan, negative=negative,
    )
    L._root_pos = root_pos

    for a in range(dim):
        for b in range(dim):
            if a == b:
                continue
            br = L.decompose(_bracket_mat(rep[a], rep[b]))
            if br:
                L.mu[(a, b)] = br

    for a in range(dim):
        wt = []
        for i, hc in enumerate(cartan):
            br = L.mu.get((hc, a), {})
            if not br:
                wt.append(Q(0))
            else:
                if set(br) != {a}:
                    raise AssertionError("basis not weight-homogeneous")
                wt.append(br[a])
        L.weights.append(tuple(wt))

    for i in range(rank):
        if rank == 1:
            L.simple.append((index["e"], index["h"], index["f"]))
        else:
            L.simple.append((index[f"e{i+1}"], index[f"h{i+1}"], index[f"f{i+1}"]))
    return L


# -------------------------------------------------------------------- forms


@dataclass(frozen=True)
class BilinearForm:
    gram: tuple  # tuple of tuples, dim x dim

    def value(self, a: int, b: int):
        return self.gram[a][b]

    def value_vec(self, x: dict, y: dict):
        s = Q(0)
        for a, ca in x.items():
            row = self.gram[a]
            for b, cb in y.items():
                s += ca * cb * row[b]
        return s

    def scale(self, c):
        c = Q(c)
        return BilinearForm(tuple(tuple(c * v for v in row) for row in self.gram))

    def plus(self, other):
        return BilinearForm(
            tuple(
                tuple(x + y for x, y in zip(r1, r2))
                for r1, r2 in zip(self.gram, other.gram)
            )
        )

    def is_zero(self):
        return all(all(v == 0 for v in row) for row in self.gram)


def bilinear_form(L: SimpleLieAlgebra, kind: str, shift=None) -> BilinearForm:
    """kind: "trace" (defining rep), "killing" (from ad), "critical" (-1/2
    Killing).  `shift=h` adds h times the trace form, giving the one-parameter
    family through the critical point when kind="critical"."""
    if kind == "trace":
        gram = tuple(
            tuple(_trace(_mm(L.rep[a], L.rep[b])) for b in range(L.dim))
            for a in range(L.dim)
        )
        f = BilinearForm(gram)
    elif kind == "killing":
        ad = [L.ad_matrix({a: Q(1)}) for a in range(L.dim)]

        def tr_ad(a, b):
            s = Q(0)
            for c in range(L.dim):
                # (ad_a ad_b)_{cc}
                for d, v in ad[b][c].items():
                    s += ad[a][d].get(c, Q(0)) * v
            return s

        f = BilinearForm(
            tuple(tuple(tr_ad(a, b) for b in range(L.dim)) for a in range(L.dim))
        )
    elif kind == "critical":
        f = bilinear_form(L, "killing").scale(Q(-1, 2))
    else:
        raise ValueError(f"unknown form kind {kind!r}")
    if shift is not None and shift != 0:
        f = f.plus(bilinear_form(L, "trace").scale(shift))
    return f


# ----------------------------------------------------- invariant polynomials
# Polynomials on the dual space, as {exponent_tuple: coeff} with one exponent
# slot per basis coordinate X_a, X_a(xi) = xi(x_a).


def _poly_add(dst, src, c=Q(1)):
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)
    return dst


def _poly_mul(p, q):
    out = {}
    for ka, va in p.items():
        for kb, vb in q.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            w = out.get(k, 0) + va * vb
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


def poly_eval(poly: dict, point):
    s = Q(0)
    for expo, c in poly.items():
        t = c
        for i, e in enumerate(expo):
            for _ in range(e):
                t *= point[i]
        s += t
    return s


def coadjoint_derivation(L: SimpleLieAlgebra, a: int, poly: dict) -> dict:
    """Derivation action of basis element a on a polynomial in Sym(L)."""
    out = {}
    for expo, coeff in poly.items():
        for b, eb in enumerate(expo):
            if not eb:
                continue
            for c, m in L.mu.get((a, b), {}).items():
                k = list(expo)
                k[b] -= 1
                k[c] += 1
                _poly_add(out, {tuple(k): coeff * eb * m})
    return out


@dataclass(frozen=True)
class InvariantPolynomial:
    degree: int
    coeffs: dict

    def eval_at(self, point):
        return poly_eval(self.coeffs, point)


def invariant_polynomials(L: SimpleLieAlgebra):
    """Generators of the invariant polynomial ring on the dual space.

    For sl_n these are the power traces tr(rho(x)^k), k = 2..n, pulled over
    to the dual along the trace-form identification.  Degrees come from this
    construction alone; the principal-triple exponents are computed elsewhere
    so the two can be compared as independent routes.
    """
    k0 = bilinear_form(L, "trace")
    cols = [
        {a: k0.gram[a][b] for a in range(L.dim) if k0.gram[a][b]}
        for b in range(L.dim)
    ]
    units = [{a: Q(1)} for a in range(L.dim)]
    inv_cols = solve_in_basis(cols, units, keys=list(range(L.dim)))
    # ell[a] = linear polynomial giving the x_a-coordinate of the point's
    # preimage under xi = k0(x, .)
    zero = tuple([0] * L.dim)

    def xvar(b):
        e = [0] * L.dim
        e[b] = 1
        return tuple(e)

    ell = []
    for a in range(L.dim):
        p = {}
        for b in range(L.dim):
            c = inv_cols[b].get(a)
            if c:
                p[xvar(b)] = c
        ell.append(p)

    # defining-rep matrix with polynomial entries
    M = [[{} for _ in range(L.n)] for _ in range(L.n)]
    for a in range(L.dim):
        ra = L.rep[a]
        for i in range(L.n):
            for j in range(L.n):
                if ra[i][j]:
                    _poly_add(M[i][j], ell[a], ra[i][j])

    out = []
    power = [[({zero: Q(1)} if i == j else {}) for j in range(L.n)] for i in range(L.n)]
    for k in range(1, L.n + 1):
        nxt = [[{} for _ in range(L.n)] for _ in range(L.n)]
        for i in range(L.n):
            for j in range(L.n):
                acc = {}
                for t in range(L.n):
                    if power[i][t] and M[t][j]:
                        _poly_add(acc, _poly_mul(power[i][t], M[t][j]))
                nxt[i][j] = acc
        power = nxt
        if k >= 2:
            tr = {}
            for i in range(L.n):
                _poly_add(tr, power[i][i])
            out.append(InvariantPolynomial(degree=k, coeffs=tr))
    return out


# ----------------------------------------------------------- principal part


@dataclass
class PrincipalTriple:
    f_vec: dict            # lowering element, sum of simple lowering generators
    rho_check: dict        # semisimple element: [rho_check, x] = j x on degree j
    e_vec: dict            # raising element completing the triple
    exponents: list        # ascending
    kernel_elements: dict  # exponent -> vector spanning ker(ad e_vec) in that degree

    def degree_space(self):
        return self._degree_space


def principal_triple(L: SimpleLieAlgebra) -> PrincipalTriple:
    """Principal triple and exponents, derived from the bracket table.

    rho_check is solved from [rho_check, e_i] = e_i; the raising element from
    [e, f] = 2 rho_check inside principal degree one; exponents are the
    rho_check-degrees of the centralizer of the raising element.
    """
    f_vec = {fi: Q(1) for (_, _, fi) in L.simple}

    # solve rho_check in the Cartan: column for h_i holds [h_i, e_j] coefficients
    cols = []
    for hc in L.cartan:
        col = {}
        for j, (ej, _, _) in enumerate(L.simple):
            br = L.mu.get((hc, ej), {})
            if br.get(ej):
                col[j] = br[ej]
        cols.append(col)
    target = {j: Q(1) for j in range(len(L.simple))}
    sol = solve_in_basis(cols, [target], keys=list(range(len(L.simple))))[0]
    if sol is None:
        raise AssertionError("no rho_check in the Cartan")
    rho_check = {L.cartan[i]: c for i, c in sol.items()}

    def principal_degree(a):
        br = L.bracket_vec(rho_check, {a: Q(1)})
        if not br:
            return 0
        if set(br) != {a}:
            raise AssertionError("basis not homogeneous for rho_check")
        return br[a]

    degs = [principal_degree(a) for a in range(L.dim)]
    by_deg = {}
    for a, d in enumerate(degs):
        by_deg.setdefault(d, []).append(a)

    # raising element: x in degree 1 with [x, f_vec] = 2 rho_check
    deg1 = by_deg[Q(1)]
    cols = []
    for a in deg1:
        cols.append(L.bracket_vec({a: Q(1)}, f_vec))
    tgt = {k: 2 * v for k, v in rho_check.items()}
    sol = solve_in_basis(cols, [tgt], keys=list(range(L.dim)))[0]
    if sol is None:
        raise AssertionError("principal raising element not found")
    e_vec = {deg1[i]: c for i, c in sol.items()}

    # exponents: centralizer of e_vec, graded by principal degree
    exponents, kernel_elements = [], {}
    ad_e = L.ad_matrix(e_vec)
    for d in sorted(k for k in by_deg if k > 0):
        idxs = by_deg[d]
        cols = []
        for a in idxs:
            cols.append({c: v for c, v in ad_e[a].items()})
        m = SparseMatrixQ.from_columns(cols, row_index={k: k for k in range(L.dim)},
                                       nrows=L.dim)
        for kv in kernel_basis(m):
            vec = {}
            for i, c in kv.items():
                vec[idxs[i]] = c
            # normalize: unit coefficient on the smallest basis index
            lead = min(vec)
            inv = Q(1) / vec[lead]
            vec = {k: v * inv for k, v in vec.items()}
            exponents.append(int(d))
            kernel_elements[int(d)] = vec

    tri = PrincipalTriple(
        f_vec=f_vec, rho_check=rho_check, e_vec=e_vec,
        exponents=sorted(exponents), kernel_elements=kernel_elements,
    )
    tri._degree_space = {int(k): v for k, v in by_deg.items()}
    return tri
