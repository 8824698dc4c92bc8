"""Batch verification suites with machine-readable reports.

Each suite compares computed quantities against an independent expectation
and emits one record per comparison with the fields

    pair, module, p, energy, weight, dim, expected, match.

Dimension suites fill the fields literally: one record per cohomology
slice, `dim` computed, `expected` from the partition-series oracle.
Identity and roundtrip suites reuse the same shape with `dim` holding the
observed failure count and `expected` zero, so a report passes exactly when
every record has match = true.

Reports are deterministic: random samples are drawn from fixed seeds,
iteration orders are sorted, and serialization is canonical, so re-running
a suite with one config yields byte-identical output.  Slices are windowed
by energy alone; the differential preserves energy, so every window is
closed under it by construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cartan import bilinear_form, build_simple_lie_algebra
from .chevalley import ChevalleyComplex
from .deform import (DifferentialFamily, class_complex_cohomology,
                     cup_leibniz_failures, symbol_comparison_failures)
from .linalg import in_image, rank, vec_add
from .modules import LoopModule
from .opers import (GaugeElement, OperRep, canonical_form,
                    expected_dimensions, gauge_transform, rs_residue)
from .vertex import VertexLayer

Q = Fraction

SUITES = (
    "classical-vacuum",
    "quantum-vacuum-critical",
    "quantum-vacuum-generic",
    "classical-verma",
    "quantum-verma-critical",
    "quantum-verma-generic",
    "vertex-identities",
    "deformation",
    "oper-roundtrip",
    "absolute-vs-relative",
)

FIELDS = ("pair", "module", "p", "energy", "weight", "dim", "expected",
          "match")


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    algebra: str = "sl2"
    max_energy: int = 5
    max_degree: int = 1
    level: str = "critical"
    weight: tuple | None = None
    precision: int = 4
    report_path: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.algebra not in ("sl2", "sl3"):
            raise ConfigError(f"unknown algebra {self.algebra!r}")
        if self.max_energy < 0 or self.max_degree < 0 or self.precision <= 0:
            raise ConfigError("cutoffs must be positive")
        if self.fmt not in ("json", "tsv"):
            raise ConfigError(f"unknown report format {self.fmt!r}")
        self.shift = parse_level(self.level)
        if self.suite.endswith("verma"):
            lam = self.weight if self.weight is not None else ()
            if any(x != int(x) for x in lam):
                raise ConfigError("Verma weight must be integral")

    def algebra_obj(self):
        return build_simple_lie_algebra(self.algebra)

    def verma_weight(self, L):
        if self.weight is None:
            return (Q(0),) * L.rank
        if len(self.weight) != L.rank:
            raise ConfigError("weight length must equal the rank")
        return tuple(Q(x) for x in self.weight)


def parse_level(level: str) -> Fraction:
    """'critical' or 'generic:H' with H a rational shift off the critical
    form in trace-form units."""
    if level == "critical":
        return Q(0)
    if level.startswith("generic:"):
        try:
            h = Q(level.split(":", 1)[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad level spec {level!r}") from exc
        if h == 0:
            raise ConfigError("generic level must be a nonzero shift")
        return h
    raise ConfigError(f"unknown level spec {level!r}")


def _record(pair, module, p, energy, weight, dim, expected):
    return {
        "pair": pair, "module": module, "p": p, "energy": energy,
        "weight": weight, "dim": dim, "expected": expected,
        "match": dim == expected,
    }


# ----------------------------------------------------------- dimension suites


def _weight_str(w):
    if w is None:
        return None
    return ",".join(_rat_str(x) for x in w)


def _rat_str(q) -> str:
    q = Q(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 \
        else str(q.numerator)


def _dim_suite(cfg: SuiteConfig, pair, family, oracle, weight=None):
    """One record per slice; `oracle(p)` yields the expected dimension row
    for the full energy window."""
    L = cfg.algebra_obj()
    form = None
    if family in ("Vq", "Mq"):
        form = bilinear_form(L, "critical",
                             shift=cfg.shift if cfg.shift else None)
    mod = LoopModule(L, family, form=form, weight=weight)
    C = ChevalleyComplex(L, pair, mod)
    out = []
    for p in range(cfg.max_degree + 1):
        row = oracle(p)
        for e in range(cfg.max_energy + 1):
            dim = C.cohomology(p, e)["dim"]
            out.append(_record(pair, family, p, e, _weight_str(weight),
                               dim, row[e]))
    return out


def suite_classical_vacuum(cfg: SuiteConfig):
    L = cfg.algebra_obj()
    return _dim_suite(
        cfg, "relative-g", "Vcl",
        lambda p: expected_dimensions("OmegaC", L, cfg.max_energy, p))


def suite_quantum_vacuum_critical(cfg: SuiteConfig):
    if cfg.shift:
        raise ConfigError("critical suite takes no level shift")
    L = cfg.algebra_obj()
    return _dim_suite(
        cfg, "relative-g", "Vq",
        lambda p: expected_dimensions("OmegaC", L, cfg.max_energy, p))


def suite_quantum_vacuum_generic(cfg: SuiteConfig):
    if not cfg.shift:
        raise ConfigError("generic suite needs --level generic:H")

    def oracle(p):
        row = [0] * (cfg.max_energy + 1)
        if p == 0:
            row[0] = 1
        return row

    return _dim_suite(cfg, "relative-g", "Vq", oracle)


def suite_classical_verma(cfg: SuiteConfig):
    L = cfg.algebra_obj()
    lam = cfg.verma_weight(L)
    return _dim_suite(
        cfg, "iwahori-h", "Mcl",
        lambda p: expected_dimensions("OmegaCRS", L, cfg.max_energy, p),
        weight=lam)


def suite_quantum_verma_critical(cfg: SuiteConfig):
    if cfg.shift:
        raise ConfigError("critical suite takes no level shift")
    L = cfg.algebra_obj()
    lam = cfg.verma_weight(L)
    return _dim_suite(
        cfg, "iwahori-h", "Mq",
        lambda p: expected_dimensions("OmegaCRS", L, cfg.max_energy, p),
        weight=lam)


def suite_quantum_verma_generic(cfg: SuiteConfig):
    if not cfg.shift:
        raise ConfigError("generic suite needs --level generic:H")
    L = cfg.algebra_obj()
    lam = cfg.verma_weight(L)

    def oracle(p):
        row = [0] * (cfg.max_energy + 1)
        if p == 0:
            row[0] = 1
        return row

    return _dim_suite(cfg, "iwahori-h", "Mq", oracle, weight=lam)


# ----------------------------------------------------------- identity suites


def suite_vertex_identities(cfg: SuiteConfig, layer: VertexLayer = None):
    """State-field checks on the critical vacuum layer.

    The identity window is cfg.max_energy; representative pairs for the
    skew check run one energy step past it, which is the widest slice the
    reductions stay desk-sized on.  A prepared layer can be passed in to
    share the homotopy solve with other callers."""
    L = cfg.algebra_obj()
    N = cfg.max_energy
    if layer is None:
        layer = VertexLayer(L, bilinear_form(L, "critical"))
    C = layer.complex
    out = []

    keys = []
    for e in range(N + 1):
        for p in range(C.max_degree(e) + 1):
            keys.extend(C.raw_cochain_basis(p, e))
    keys.sort()

    bad = layer.vacuum_axiom_failures(keys)
    out.append(_record("absolute", "vacuum-axiom", 0, N, None, len(bad), 0))

    bad = layer.generator_commutation_failures(max_mode=2)
    out.append(_record("absolute", "generator-relations", 0, N, None,
                       len(bad), 0))

    pairs = [(ka, kb) for ka in keys for kb in keys
             if layer.key_energy(ka) + layer.key_energy(kb) <= N]
    bad = layer.dg_identity_failures(pairs)
    out.append(_record("absolute", "derivation-identity", 0, N, None,
                       len(bad), 0))

    nbad = _clifford_failures(layer, keys, N)
    out.append(_record("absolute", "clifford-relations", 0, N, None, nbad, 0))

    nbad, checked = _homotopy_failures(layer, keys, N,
                                       rng=random.Random(7), samples=120)
    out.append(_record("absolute", "homotopy-identity", 0, N, None, nbad, 0))
    out.append(_record("absolute", "homotopy-sample-count", 0, N, None,
                       checked, checked))

    nbad, npairs = _cup_skew_failures(layer, N + 1)
    out.append(_record("absolute", "cup-skew-mod-coboundary", 1, N + 1, None,
                       nbad, 0))
    return out


def _clifford_failures(layer, keys, max_label: int) -> int:
    labels = [(n, b) for n in range(max_label + 1)
              for b in range(layer.L.dim)]
    bad = 0
    for (n, a) in labels:
        for (m, b) in labels:
            delta = Q(1) if (n, a) == (m, b) else Q(0)
            for key in keys:
                v = {key: Q(1)}
                lhs = layer.contract(a, n, layer.dual_insert(b, m, v))
                vec_add(lhs, layer.dual_insert(b, m, layer.contract(a, n, v)),
                        Q(1))
                want = {key: delta} if delta else {}
                if lhs != want:
                    bad += 1
                anti = layer.contract(a, n, layer.contract(b, m, v))
                vec_add(anti, layer.contract(b, m, layer.contract(a, n, v)),
                        Q(1))
                if anti:
                    bad += 1
    return bad


def _homotopy_failures(layer, keys, N, rng, samples):
    layer._solve_z_through(N)
    bad = 0
    checked = 0
    gens = layer.generator_keys()
    for ka in gens:
        for kb in gens:
            s = layer.key_energy(ka) + layer.key_energy(kb)
            for m in range(0, s + 2):
                if layer.homotopy_defect(m, ka, kb):
                    bad += 1
                checked += 1
    composite = [(ka, kb) for ka in keys for kb in keys
                 if ka != layer.vacuum_key and kb != layer.vacuum_key
                 and layer.key_energy(ka) + layer.key_energy(kb) == N
                 and (len(ka[0]) + len(ka[1]) > 1 or len(kb[0]) + len(kb[1]) > 1)]
    for ka, kb in rng.sample(composite, min(samples, len(composite))):
        for m in range(0, N + 1):
            if layer.homotopy_defect(m, ka, kb):
                bad += 1
        checked += 1
    return bad, checked


def _cup_skew_failures(layer, window: int):
    """Skew-commutativity of the cup product modulo coboundaries on all
    pairs of degree <= 1 representatives with total energy in the window."""
    C = layer.complex
    reps = []
    for e in range(window + 1):
        for p in (0, 1):
            coh = C.cohomology(p, e, reps=True)
            for v in coh["representatives"]:
                reps.append((p, e, v))
    bad = 0
    npairs = 0
    for i, (p1, e1, A) in enumerate(reps):
        for (p2, e2, B) in reps[i:]:
            if e1 + e2 > window:
                continue
            npairs += 1
            diff = layer.cup(A, B)
            vec_add(diff, layer.cup(B, A), Q((-1) ** (p1 * p2 + 1)))
            if not diff:
                continue
            pt, et = p1 + p2, e1 + e2
            m, _, tgt = C.differential_matrix(pt - 1, et) if pt else (None,) * 3
            if m is None:
                bad += 1
                continue
            tindex = {k: i for i, k in enumerate(tgt)}
            vv = {tindex[k]: c for k, c in diff.items()}
            ok, _ = in_image(m, vv)
            if not ok:
                bad += 1
    return bad, npairs


def suite_deformation(cfg: SuiteConfig, families=None):
    """Differential-family checks on the vacuum complex: square relations
    identically in the parameter, class map composition, representative
    independence, scaling in the direction, the Leibniz rule on sampled
    class pairs, symbol comparison, and the classical degeneration."""
    L = cfg.algebra_obj()
    N = cfg.max_energy
    if families is None:
        families = (DifferentialFamily(L, "absolute", "Vq"),
                    DifferentialFamily(L, "absolute", "Vcl"))
    fq, fcl = families
    out = []

    out.append(_record("absolute", "family-squares-quantum", 0, N, None,
                       len(fq.square_failures(N)), 0))
    out.append(_record("absolute", "family-squares-classical", 0, N, None,
                       len(fcl.square_failures(N)), 0))

    bad = 0
    for lam in (Q(1), Q(3), Q(-2)):
        fl = DifferentialFamily(L, "absolute", "Vq", scale=lam)
        for e in range(min(N, 3) + 1):
            for p in range(2):
                d1 = fq.slice(p, e)[1]
                if fl.slice(p, e)[1].entries != \
                        {k: lam * v for k, v in d1.entries.items()}:
                    bad += 1
    out.append(_record("absolute", "direction-scaling", 0, min(N, 3), None,
                       bad, 0))

    bad = sum(0 if fq.composite_is_zero(0, e) else 1 for e in range(N + 1))
    bad += sum(0 if fcl.composite_is_zero(0, e) else 1
               for e in range(min(N, 4) + 1))
    out.append(_record("absolute", "class-map-squares", 0, N, None, bad, 0))

    bad = sum(len(fq.representative_shift_failures(1, e))
              for e in range(N + 1))
    out.append(_record("absolute", "representative-independence", 1, N, None,
                       bad, 0))

    layer = VertexLayer(L, fq.base.module.form)
    checked, lbad = cup_leibniz_failures(fq, layer, min(N + 1, 6),
                                         rng=random.Random(19), count=60)
    out.append(_record("absolute", "cup-leibniz", 0, min(N + 1, 6), None,
                       len(lbad), 0))
    out.append(_record("absolute", "cup-leibniz-sample-count", 0,
                       min(N + 1, 6), None, checked, checked))

    checked, sbad = symbol_comparison_failures(fq, fcl, 0, N)
    out.append(_record("absolute", "symbol-comparison", 0, N, None,
                       len(sbad), 0))

    bad = 0
    for e in range(min(N, 4) + 1):
        want = [1, 0, 0] if e == 0 else [0, 0, 0]
        if class_complex_cohomology(fcl, 2, e) != want:
            bad += 1
    out.append(_record("absolute", "classical-degeneration", 2, min(N, 4),
                       None, bad, 0))
    return out


def suite_oper_roundtrip(cfg: SuiteConfig):
    """Canonical-form roundtrips, residue invariance, and the two-route
    series identity, with instance counts fixed by the acceptance gate."""
    K = cfg.precision
    out = []
    for name, trials in (("sl2", 100), ("sl3", 25)):
        L = build_simple_lie_algebra(name)
        rng = random.Random(5 if name == "sl2" else 9)
        bad = 0
        for _ in range(trials):
            op = _random_oper(L, K, rng)
            co, g = canonical_form(op)
            if gauge_transform(g, op).v != co.to_oper().v:
                bad += 1
            co2, g2 = canonical_form(co.to_oper())
            if co2.coeffs != co.coeffs or any(c for c in g2.x):
                bad += 1
        out.append(_record("oper", f"roundtrip-{name}", K, trials, None,
                           bad, 0))

    L = build_simple_lie_algebra(cfg.algebra)
    rng = random.Random(17)
    bad = 0
    for _ in range(50):
        op = _random_oper(L, K, rng, singularity="rs")
        r0 = rs_residue(op)
        g = _random_gauge(L, K, rng)
        if rs_residue(gauge_transform(g, op)) != r0:
            bad += 1
    out.append(_record("oper", "residue-invariance", K, 50, None, bad, 0))

    bad = 0
    for e in range(7):
        f1 = expected_dimensions("FunOp", L, 6, 0)[e]
        f2 = expected_dimensions("FunC", L, 6, 0)[e]
        if f1 != f2:
            bad += 1
    out.append(_record("oper", "series-two-routes", 0, 6, None, bad, 0))
    return out


def _random_oper(L, K, rng, singularity="regular", density=0.75):
    ok = sorted(set(L.positive) | set(L.cartan))
    v = tuple(
        {a: Q(rng.randint(-4, 4), rng.randint(1, 3))
         for a in ok if rng.random() < density}
        for _ in range(K))
    return OperRep(L, K, singularity, v)


def _random_gauge(L, K, rng, density=0.7):
    x = tuple(
        {a: Q(rng.randint(-3, 3), rng.randint(1, 2))
         for a in L.positive if rng.random() < density}
        for _ in range(K))
    return GaugeElement(L, K, x)


def suite_absolute_vs_relative(cfg: SuiteConfig):
    """Classical vacuum: absolute dimensions equal relative dimensions
    tensored with one exterior generator in degree three."""
    L = cfg.algebra_obj()
    Ca = ChevalleyComplex(L, "absolute", LoopModule(L, "Vcl"))
    Cr = ChevalleyComplex(L, "relative-g", LoopModule(L, "Vcl"))
    out = []
    for e in range(cfg.max_energy + 1):
        rel = [Cr.cohomology(p, e)["dim"]
               for p in range(cfg.max_degree + 1)]
        for p in range(cfg.max_degree + 1):
            dim = Ca.cohomology(p, e)["dim"]
            want = rel[p] + (rel[p - 3] if p >= 3 else 0)
            out.append(_record("absolute", "Vcl", p, e, None, dim, want))
    return out


_SUITE_FNS = {
    "classical-vacuum": suite_classical_vacuum,
    "quantum-vacuum-critical": suite_quantum_vacuum_critical,
    "quantum-vacuum-generic": suite_quantum_vacuum_generic,
    "classical-verma": suite_classical_verma,
    "quantum-verma-critical": suite_quantum_verma_critical,
    "quantum-verma-generic": suite_quantum_verma_generic,
    "vertex-identities": suite_vertex_identities,
    "deformation": suite_deformation,
    "oper-roundtrip": suite_oper_roundtrip,
    "absolute-vs-relative": suite_absolute_vs_relative,
}


def run_suite(cfg: SuiteConfig):
    """Execute the configured suite.  Returns (records, all_pass)."""
    records = _SUITE_FNS[cfg.suite](cfg)
    return records, all(r["match"] for r in records)


# ------------------------------------------------------------------ reports


def render_json(records) -> str:
    rows = [{k: rec[k] for k in FIELDS} for rec in records]
    return json.dumps(rows, indent=1, sort_keys=True) + "\n"


def render_tsv(records) -> str:
    lines = ["\t".join(FIELDS)]
    for rec in records:
        lines.append("\t".join(
            "" if rec[k] is None else
            ("true" if rec[k] is True else
             "false" if rec[k] is False else str(rec[k]))
            for k in FIELDS))
    return "\n".join(lines) + "\n"


def render_report(records, fmt: str) -> str:
    if fmt == "json":
        return render_json(records)
    if fmt == "tsv":
        return render_tsv(records)
    raise ConfigError(f"unknown report format {fmt!r}")
