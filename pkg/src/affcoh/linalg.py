"""Exact sparse linear algebra over arbitrary-precision rationals.

Every rank, kernel and membership test used by the cohomology pipeline goes
through this module.  The elimination is deterministic: columns are processed
in increasing index order and the pivot is always the lowest-index remaining
row with a nonzero entry in the current column, so repeated runs produce
bit-identical reduced forms, kernel bases and witnesses.

A modular fast path (`rank_modular`, `rank_checked`) recomputes ranks over
word-size prime fields.  It cross-checks the exact elimination, it never
replaces it; any disagreement raises `ModularMismatchError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

Q = Fraction

try:
    # optional fast rational type for the elimination inner loop; results
    # are converted back to Fraction at the public boundary
    from gmpy2 import mpq as _mpq
except ImportError:          # pragma: no cover
    _mpq = None

__all__ = [
    "SparseMatrixQ",
    "SpanReducer",
    "rank",
    "rank_modular",
    "rank_checked",
    "kernel_basis",
    "in_image",
    "solve_in_basis",
    "matmul",
    "LinalgError",
    "BadPrimeError",
    "ModularMismatchError",
    "vec_add",
    "vec_scale",
    "vec_canon",
]


class LinalgError(Exception):
    pass


class BadPrimeError(LinalgError):
    """A denominator vanished modulo the chosen prime."""


class ModularMismatchError(LinalgError):
    """Modular fast path disagreed with the exact elimination."""


# ----------------------------------------------------------------- vectors
# Sparse vectors are plain dicts key -> Fraction with no explicit zeros.


def vec_add(dst: dict, src: dict, c=Q(1)) -> dict:
    """dst += c*src in place, pruning zeros."""
    if not c:
        return dst
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)
    return dst


def vec_scale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_canon(v: dict) -> dict:
    return {k: x for k, x in v.items() if x}


# ----------------------------------------------------------------- matrices


@dataclass
class SparseMatrixQ:
    """Immutable-ish sparse rational matrix, entries keyed by (row, col)."""

    nrows: int
    ncols: int
    entries: dict = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows, ncols):
        entries = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                if v:
                    entries[(r, c)] = Q(v)
        return cls(len(rows), ncols, entries)

    @classmethod
    def from_columns(cls, cols, nrows=None, row_index=None):
        """Build from a list of dict column vectors.

        `row_index`: optional dict mapping the columns' keys to row numbers;
        when omitted the union of keys is enumerated in sorted order.
        """
        if row_index is None:
            keys = sorted({k for col in cols for k in col})
            row_index = {k: i for i, k in enumerate(keys)}
            nrows = len(keys)
        if nrows is None:
            nrows = (max(row_index.values()) + 1) if row_index else 0
        entries = {}
        for c, col in enumerate(cols):
            for k, v in col.items():
                if v:
                    entries[(row_index[k], c)] = Q(v)
        return cls(nrows, len(cols), entries)

    @classmethod
    def from_dense(cls, dense):
        rows = [{c: v for c, v in enumerate(row) if v} for row in dense]
        ncols = len(dense[0]) if dense else 0
        return cls.from_rows(rows, ncols)

    def row_dicts(self):
        rows = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def to_dense(self):
        out = [[Q(0)] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self):
        return SparseMatrixQ(
            self.ncols, self.nrows, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def column(self, c):
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def is_zero(self):
        return not self.entries

    def nnz(self):
        return len(self.entries)

    def matvec(self, x: dict) -> dict:
        out = {}
        for (r, c), v in self.entries.items():
            xc = x.get(c)
            if xc:
                w = out.get(r, 0) + v * xc
                if w:
                    out[r] = w
                else:
                    out.pop(r, None)
        return out

    def stack(self, other):
        """Vertical stack; column counts must agree."""
        if self.ncols != other.ncols:
            raise LinalgError("stack: column mismatch")
        entries = dict(self.entries)
        off = self.nrows
        for (r, c), v in other.entries.items():
            entries[(r + off, c)] = v
        return SparseMatrixQ(self.nrows + other.nrows, self.ncols, entries)

    # one slice -> one dump; header then entries sorted by (row, col)
    def dump(self) -> str:
        lines = [f"{self.nrows} {self.ncols} {self.nnz()}"]
        for (r, c) in sorted(self.entries):
            v = self.entries[(r, c)]
            lines.append(f"{r} {c} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        nrows, ncols, nnz = (int(t) for t in lines[0].split())
        entries = {}
        for ln in lines[1:]:
            r, c, val = ln.split()
            num, den = val.split("/")
            entries[(int(r), int(c))] = Q(int(num), int(den))
        if len(entries) != nnz:
            raise LinalgError("dump header does not match entry count")
        return cls(nrows, ncols, entries)


def matmul(a: SparseMatrixQ, b: SparseMatrixQ) -> SparseMatrixQ:
    if a.ncols != b.nrows:
        raise LinalgError("matmul: shape mismatch")
    brows = b.row_dicts()
    entries = {}
    arows = a.row_dicts()
    for r, arow in enumerate(arows):
        acc = {}
        for k, v in arow.items():
            vec_add(acc, brows[k], v)
        for c, v in acc.items():
            entries[(r, c)] = v
    return SparseMatrixQ(a.nrows, b.ncols, entries)


# ------------------------------------------------------------- elimination


def _to_fast(rows):
    if _mpq is None:
        return rows
    return [{c: _mpq(v.numerator, v.denominator) for c, v in row.items()}
            for row in rows]


def _from_fast_value(v):
    if _mpq is None or isinstance(v, Fraction):
        return v
    return Q(int(v.numerator), int(v.denominator))


def _forward(rows, ncols):
    """In-place forward elimination; returns the pivot column list.

    Pivot choice: smallest column first, then the smallest remaining row
    index.  Pivot rows are rescaled to a unit pivot.  A column-to-rows
    occupancy index keeps each step proportional to the rows that actually
    contain the pivot column; the reduced rows are identical to those of a
    plain quadratic sweep.
    """
    pivots = []
    nrows = len(rows)
    occ: dict = {}
    for i, row in enumerate(rows):
        for c in row:
            if c < ncols:
                occ.setdefault(c, set()).add(i)
    # perm[p] = index into rows at position p; where[i] = current position
    perm = list(range(nrows))
    where = list(range(nrows))
    r = 0
    for col in range(ncols):
        ids = occ.get(col)
        if not ids:
            continue
        piv = None
        for i in ids:
            p = where[i]
            if p >= r and (piv is None or p < piv):
                piv = p
        if piv is None:
            continue
        ia, ib = perm[r], perm[piv]
        perm[r], perm[piv] = ib, ia
        where[ia], where[ib] = piv, r
        prow = rows[ib]
        pval = prow[col]
        if pval != 1:
            inv = 1 / pval
            for c in prow:
                prow[c] *= inv
        for i in list(ids):
            if where[i] <= r:
                continue
            ri = rows[i]
            f = ri[col]
            for c, v in prow.items():
                w = ri.get(c, 0) - f * v
                if w:
                    if c not in ri and c < ncols:
                        occ.setdefault(c, set()).add(i)
                    ri[c] = w
                else:
                    if c in ri and c < ncols:
                        occ[c].discard(i)
                    ri.pop(c, None)
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    # restore physical order expected by the callers
    rows[:] = [rows[perm[p]] for p in range(nrows)]
    return pivots


def _back_substitute(rows, pivots):
    """Clear entries above each pivot (full RREF)."""
    for k in range(len(pivots) - 1, -1, -1):
        col = pivots[k]
        prow = rows[k]
        for i in range(k):
            ri = rows[i]
            f = ri.get(col)
            if f is None:
                continue
            for c, v in prow.items():
                w = ri.get(c, 0) - f * v
                if w:
                    ri[c] = w
                else:
                    ri.pop(c, None)


def rank(m: SparseMatrixQ) -> int:
    rows = _to_fast(m.row_dicts())
    return len(_forward(rows, m.ncols))


def kernel_basis(m: SparseMatrixQ):
    """Deterministic right-kernel basis, one dict vector per free column."""
    rows = _to_fast(m.row_dicts())
    pivots = _forward(rows, m.ncols)
    _back_substitute(rows, pivots)
    pivset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = {f: Q(1)}
        for k, col in enumerate(pivots):
            x = rows[k].get(f)
            if x:
                v[col] = _from_fast_value(-x)
        basis.append(v)
    return basis


def in_image(m: SparseMatrixQ, v: dict):
    """Does v lie in the column span of m?  Returns (flag, witness).

    The witness w satisfies m @ w == v with all free coordinates zero.
    """
    aug = m.ncols  # augmented column index
    rows = m.row_dicts()
    for r, val in v.items():
        if val:
            if not 0 <= r < m.nrows:
                raise LinalgError("in_image: vector key out of range")
            rows[r][aug] = Q(val)
    rows = _to_fast(rows)
    pivots = _forward(rows, m.ncols)
    nr = len(pivots)
    for i in range(nr, len(rows)):
        if aug in rows[i]:
            return False, None
    witness = {}
    # echelon back-substitution with free variables pinned to zero
    for k in range(nr - 1, -1, -1):
        col = pivots[k]
        row = rows[k]
        val = row.get(aug, 0)
        for c, coef in row.items():
            if c == col or c == aug:
                continue
            wc = witness.get(c)
            if wc:
                val -= coef * wc
        if val:
            witness[col] = val
    return True, {c: _from_fast_value(x) for c, x in witness.items()}


def solve_in_basis(columns, targets, keys=None):
    """Express each target in the span of `columns` (dict vectors).

    Shares one elimination across all targets.  Returns a list with one
    coordinate dict per target, or None where the target is not in the span.
    """
    if keys is None:
        keys = sorted(
            {k for col in columns for k in col} | {k for t in targets for k in t}
        )
    key_row = {k: i for i, k in enumerate(keys)}
    ncols = len(columns)
    rows = [dict() for _ in keys]
    for j, col in enumerate(columns):
        for k, v in col.items():
            if v:
                rows[key_row[k]][j] = Q(v)
    for t, tgt in enumerate(targets):
        for k, v in tgt.items():
            if v:
                if k not in key_row:
                    raise LinalgError("solve_in_basis: target key outside key set")
                rows[key_row[k]][ncols + t] = Q(v)
    rows = _to_fast(rows)
    pivots = _forward(rows, ncols)
    nr = len(pivots)
    bad = set()
    for i in range(nr, len(rows)):
        for c in rows[i]:
            bad.add(c - ncols)
    out = []
    for t in range(len(targets)):
        if t in bad:
            out.append(None)
            continue
        aug = ncols + t
        coords = {}
        for k in range(nr - 1, -1, -1):
            col = pivots[k]
            row = rows[k]
            val = row.get(aug, 0)
            for c, coef in row.items():
                if c >= ncols or c == col:
                    continue
                wc = coords.get(c)
                if wc:
                    val -= coef * wc
            if val:
                coords[col] = val
        out.append({c: _from_fast_value(x) for c, x in coords.items()})
    return out


class SpanReducer:
    """Canonical normal forms modulo the span of a fixed set of vectors.

    Vectors are dicts over arbitrary hashable keys; `key_order` fixes the
    elimination order, so normal forms are unique and deterministic.  A
    vector lies in the span iff its normal form is empty.
    """

    def __init__(self, vectors, key_order):
        self.key_index = {k: i for i, k in enumerate(key_order)}
        self.keys = list(key_order)
        rows = []
        for v in vectors:
            rows.append({self.key_index[k]: Q(x) for k, x in v.items() if x})
        self.pivots = _forward(rows, len(key_order))
        _back_substitute(rows, self.pivots)
        self.rows = rows[: len(self.pivots)]

    def rank(self):
        return len(self.pivots)

    def normal_form(self, vec: dict) -> dict:
        w = {self.key_index[k]: Q(x) for k, x in vec.items() if x}
        for i, col in enumerate(self.pivots):
            f = w.get(col)
            if f:
                for c, v in self.rows[i].items():
                    x = w.get(c, 0) - f * v
                    if x:
                        w[c] = x
                    else:
                        w.pop(c, None)
        return {self.keys[c]: v for c, v in w.items()}

    def contains(self, vec: dict) -> bool:
        return not self.normal_form(vec)


# ------------------------------------------------------------ modular path


def _is_probable_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3e24 with these witness bases
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _word_primes(count: int):
    """Fixed descending list of primes just below 2**31."""
    out = []
    n = 2**31 - 1
    while len(out) < count:
        if _is_probable_prime(n):
            out.append(n)
        n -= 2
    return tuple(out)


WORD_PRIMES = _word_primes(8)


def rank_modular(m: SparseMatrixQ, prime: int) -> int:
    rows = [dict() for _ in range(m.nrows)]
    for (r, c), v in m.entries.items():
        den = v.denominator % prime
        if den == 0:
            raise BadPrimeError(f"denominator divisible by {prime}")
        e = v.numerator * pow(den, prime - 2, prime) % prime
        if e:
            rows[r][c] = e
    pivots = 0
    nrows = len(rows)
    r = 0
    for col in range(m.ncols):
        piv = None
        for i in range(r, nrows):
            if col in rows[i]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        inv = pow(prow[col], prime - 2, prime)
        prow = {c: v * inv % prime for c, v in prow.items()}
        rows[r] = prow
        for i in range(r + 1, nrows):
            ri = rows[i]
            f = ri.get(col)
            if f is None:
                continue
            for c, v in prow.items():
                w = (ri.get(c, 0) - f * v) % prime
                if w:
                    ri[c] = w
                else:
                    ri.pop(c, None)
        pivots += 1
        r += 1
        if r == nrows:
            break
    return pivots


def rank_checked(m: SparseMatrixQ, nprimes: int = 2) -> int:
    """Exact rank, cross-checked modulo `nprimes` word-size primes.

    A modular rank exceeding the exact rank is impossible for a correct
    implementation, and a smaller one flags a bad prime; both raise, since
    a disagreement must never be resolved silently.
    """
    r = rank(m)
    done = 0
    for p in WORD_PRIMES:
        if done == nprimes:
            break
        try:
            rp = rank_modular(m, p)
        except BadPrimeError:
            continue
        if rp != r:
            raise ModularMismatchError(
                f"rank mismatch: exact {r}, mod {p} gives {rp}"
            )
        done += 1
    if done < nprimes:
        raise ModularMismatchError("not enough usable primes")
    return r
