"""PBW-type modules over the loop algebra of a simple Lie algebra.

A mode is a pair (n, a): basis element a tensored with t^n, energy -n.  A
module vector is a dict mapping monomials (sorted tuples of creation modes)
to rational coefficients; the empty tuple is the generating vector.

Four families:
  "Vq"  quantum vacuum module at a chosen bilinear form (level), creation
        modes n <= -1;
  "Vcl" its classical limit, the symmetric algebra on the same modes with
        the loop algebra acting by derivations (no central term);
  "Mq"  quantum highest-weight module induced from the Iwahori-type
        subalgebra, tensored down by its own highest weight so the Cartan
        zero modes read off the pure monomial weight;
  "Mcl" its classical limit.

Creation modes: n <= -1 for any a, plus n = 0 with a a negative root vector
in the highest-weight families.  The quantum action straightens products by
the loop bracket [x t^n, y t^m] = [x,y] t^{n+m} + n delta_{n+m,0} kappa(x,y)
with the central generator acting as 1.
"""

from __future__ import annotations

from fractions import Fraction

from .cartan import BilinearForm, SimpleLieAlgebra
from .linalg import vec_add

Q = Fraction

FAMILIES = ("Vq", "Vcl", "Mq", "Mcl")


def energy_of_mono(mono) -> int:
    return -sum(n for (n, _) in mono)


class LoopModule:
    def __init__(self, L: SimpleLieAlgebra, family: str,
                 form: BilinearForm | None = None, weight=None):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        self.L = L
        self.family = family
        self.quantum = family in ("Vq", "Mq")
        self.highest_weight = family in ("Mq", "Mcl")
        if self.quantum and form is None:
            raise ValueError("quantum families need a bilinear form")
        self.form = form
        if weight is None:
            weight = (Q(0),) * L.rank
        self.weight = tuple(Q(x) for x in weight)
        self._neg = frozenset(L.negative)
        self._lam = {hc: self.weight[i] for i, hc in enumerate(L.cartan)}
        self._cache = {}

    # ------------------------------------------------------------- grading

    def is_creation(self, mode) -> bool:
        n, a = mode
        if n <= -1:
            return True
        return self.highest_weight and n == 0 and a in self._neg

    def weight_of_mono(self, mono):
        wt = [Q(0)] * self.L.rank
        for (_, a) in mono:
            for i, w in enumerate(self.L.weights[a]):
                wt[i] += w
        return tuple(wt)

    def graded_basis(self, energy: int, weight=None):
        """All monomials of the given energy (and weight, when given).

        Highest-weight families require a weight: their zero-energy layer is
        infinite otherwise.
        """
        if energy < 0:
            return []
        if self.highest_weight and weight is None:
            raise ValueError("highest-weight modules need a weight to slice")
        if weight is not None:
            weight = tuple(Q(x) for x in weight)
        modes = [(n, a) for n in range(-energy, 0) for a in range(self.L.dim)]
        parts = []

        def gen(prefix, rem, start):
            if rem == 0:
                parts.append(tuple(prefix))
                return
            for i in range(start, len(modes)):
                e = -modes[i][0]
                if e <= rem:
                    prefix.append(modes[i])
                    gen(prefix, rem - e, i)
                    prefix.pop()

        gen([], energy, 0)
        out = []
        for part in parts:
            if not self.highest_weight:
                if weight is None or self.weight_of_mono(part) == weight:
                    out.append(part)
                continue
            pw = self.weight_of_mono(part)
            needed = tuple(w - p for w, p in zip(weight, pw))
            for fill in self._zero_mode_fills(needed):
                out.append(part + fill)
        out.sort()
        return out

    def _zero_mode_fills(self, needed):
        neg = self.L.negative
        wts = [self.L.weights[a] for a in neg]
        cosum = [-sum(w) for w in wts]   # each >= 1 for a simple algebra
        fills = []

        def rec(idx, need, acc):
            if idx == len(neg):
                if all(x == 0 for x in need):
                    fills.append(tuple(acc))
                return
            budget = -sum(need)
            if budget < 0:
                return
            kmax = budget // cosum[idx]
            for k in range(int(kmax) + 1):
                rec(idx + 1,
                    tuple(n - k * w for n, w in zip(need, wts[idx])),
                    acc + [(0, neg[idx])] * k)

        rec(0, needed, [])
        return [tuple(sorted(f)) for f in fills]

    # -------------------------------------------------------------- action

    def act(self, mode, mono) -> dict:
        if self.quantum:
            return self._act_q(mode, mono)
        return self._act_cl(mode, mono)

    def act_vec(self, mode, vec: dict) -> dict:
        out = {}
        for mono, c in vec.items():
            vec_add(out, self.act(mode, mono), c)
        return out

    def act_twisted(self, mode, mono) -> dict:
        """Module action with the highest weight subtracted from Cartan zero
        modes, so their eigenvalue equals the pure monomial weight."""
        out = self.act(mode, mono)
        if self.family == "Mq" and mode[0] == 0 and mode[1] in self._lam:
            lam = self._lam[mode[1]]
            if lam:
                vec_add(out, {mono: Q(1)}, -lam)
        return out

    def act_twisted_vec(self, mode, vec: dict) -> dict:
        out = {}
        for mono, c in vec.items():
            vec_add(out, self.act_twisted(mode, mono), c)
        return out

    def _vacuum_rule(self, mode) -> dict:
        n, a = mode
        if self.is_creation(mode):
            return {(mode,): Q(1)}
        if n >= 1 or not self.highest_weight:
            return {}
        # zero mode on the highest-weight vector
        if a in self._lam:
            lam = self._lam[a]
            return {(): lam} if lam else {}
        return {}

    def _act_q(self, mode, mono) -> dict:
        key = (mode, mono)
        hit = self._cache.get(key)
        if hit is not None:
            return dict(hit)
        if not mono:
            out = self._vacuum_rule(mode)
            self._cache[key] = out
            return dict(out)
        B = mono[0]
        if self.is_creation(mode) and mode <= B:
            out = {(mode,) + mono: Q(1)}
            self._cache[key] = out
            return dict(out)
        rest = mono[1:]
        out = {}
        for m2, c2 in self._act_q(mode, rest).items():      # B (mode rest)
            for m3, c3 in self._act_q(B, m2).items():
                w = out.get(m3, 0) + c2 * c3
                if w:
                    out[m3] = w
                else:
                    out.pop(m3, None)
        n, a = mode
        nb, b = B
        for c_idx, cmu in self.L.mu.get((a, b), {}).items():  # [mode, B] rest
            vec_add(out, self._act_q((n + nb, c_idx), rest), cmu)
        if n + nb == 0 and n != 0:                           # central term
            cc = self.form.value(a, b)
            if cc:
                vec_add(out, {rest: Q(1)}, Q(n) * cc)
        self._cache[key] = out
        return dict(out)

    def _act_cl(self, mode, mono) -> dict:
        if self.is_creation(mode):
            return {tuple(sorted(mono + (mode,))): Q(1)}
        n, a = mode
        out = {}
        for i, (m, b) in enumerate(mono):
            rest = mono[:i] + mono[i + 1:]
            for c, cmu in self.L.mu.get((a, b), {}).items():
                nm = (n + m, c)
                if self.is_creation(nm):
                    vec_add(out, {tuple(sorted(rest + (nm,))): Q(1)}, cmu)
        return out

    def contract_form(self, mode, mono, form: BilinearForm) -> dict:
        """Central contraction only: n delta_{n+m,0} form(a,b) per factor."""
        n, a = mode
        out = {}
        if n == 0:
            return out
        for i, (m, b) in enumerate(mono):
            if n + m == 0:
                v = form.value(a, b)
                if v:
                    vec_add(out, {mono[:i] + mono[i + 1:]: Q(1)}, Q(n) * v)
        return out

    def contract_form_vec(self, mode, vec: dict, form: BilinearForm) -> dict:
        out = {}
        for mono, c in vec.items():
            vec_add(out, self.contract_form(mode, mono, form), c)
        return out

    # ------------------------------------------------------------- symbols

    @staticmethod
    def pbw_symbol(vec: dict) -> dict:
        """Top filtration layer: the terms of maximal monomial length."""
        if not vec:
            return {}
        top = max(len(m) for m in vec)
        return {m: c for m, c in vec.items() if len(m) == top}
