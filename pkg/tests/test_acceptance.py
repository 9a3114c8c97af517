"""Acceptance suite.

Each criterion prints one PASS/FAIL line (visible with ``pytest -s`` or
on failure).  Run with::

    pytest tests/test_acceptance.py -v -s
"""

import io
import json
import math
import random
import time
from contextlib import redirect_stdout
from fractions import Fraction

import mpmath
import pytest

from kriegerlab import (
    Deviation, ExplicitWeights, GeometricTail, IndexClass, Indices, Perturbed,
    SchemeSpec, TwoPoint, Witness, block_for, brute_force_block, classify,
    compose_witnesses, lattice_detect, mc_sample_cocycle, mult_group,
    normalize, validate, witness_search,
)
from kriegerlab.cli import main as cli_main

from conftest import (
    F, SPEC_DIR, capped_scheme, geometric_scheme, interleave, powers,
    single_class, two_inf_spec, type_one_spec, uniform_two_point,
    zero_one_spec,
)

LOG2 = math.log(2.0)


def _report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} ({name}): {status}{(' ' + detail) if detail else ''}")
    assert ok, f"criterion {number} {name}: {detail}"


def _run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(argv)
    return code, buf.getvalue()


# ---------------------------------------------------------------------------
# criterion 1: canonical classifications, each under a second

def test_criterion_1_canonical_classifications():
    cases = [
        (powers(F(1, 2)), "III_lambda", F(1, 2)),
        (uniform_two_point(), "II_1", None),
        (type_one_spec(), "I_inf", None),
        (interleave(F(1, 2), F(1, 3)), "III_1", None),
        (zero_one_spec(), "III_0", None),
    ]
    failures = []
    for spec, label, lam in cases:
        t0 = time.perf_counter()
        v = classify(spec)
        dt = time.perf_counter() - t0
        if v.label != label or (lam is not None and v.lam != lam):
            failures.append(f"{label}: got {v.label}")
        if dt >= 1.0:
            failures.append(f"{label}: took {dt:.2f}s")
    # the stated exact sums
    v = classify(uniform_two_point())
    if v.certificate.evidence["type_II1"]["total"] != "0":
        failures.append("uniform defect sum not exactly 0")
    v = classify(type_one_spec())
    if v.certificate.evidence["type_I"]["total"] != "1/2":
        failures.append("type-I defect sum not exactly 1/2")
    _report(1, "canonical classifications", not failures, "; ".join(failures))


# ---------------------------------------------------------------------------
# criterion 2: witness search agrees with the brute-force oracle

def _oracle_corpus():
    specs = []
    for lam in (F(1, 2), F(1, 3), F(2, 3), F(3, 5), F(4, 9), F(2, 5)):
        specs.append((f"powers_{lam}", powers(lam), lam))
    specs.append(("uniform", uniform_two_point(), F(1, 2)))
    specs.append(("type_one", type_one_spec(), F(1, 2)))
    for r, s in ((F(1, 2), F(1, 3)), (F(1, 2), F(1, 4)), (F(2, 3), F(4, 9))):
        specs.append((f"interleave_{r}_{s}", interleave(r, s), r))
    for q in (F(1, 2), F(1, 3), F(2, 5)):
        specs.append((f"geom_{q}", geometric_scheme(q), q))
    specs.append(("capped_2", capped_scheme(F(1, 2), 3), F(1, 2)))
    specs.append(("capped_3", capped_scheme(F(1, 3), 2), F(1, 3)))
    specs.append(("explicit3", single_class(ExplicitWeights((F(4, 7), F(2, 7), F(1, 7)))), F(1, 2)))
    specs.append(("explicit4", single_class(
        ExplicitWeights((F(8, 15), F(4, 15), F(2, 15), F(1, 15)))), F(1, 2)))
    specs.append(("two_inf", two_inf_spec(), F(1, 2)))
    specs.append(("perturbed", single_class(Perturbed((F(2, 3), F(1, 3)))), F(1, 2)))
    specs.append(("prefixed", SchemeSpec(
        "rational", ((F(3, 5), F(2, 5)), (F(1, 2), F(1, 4), F(1, 4))),
        (IndexClass(Indices(3, 1), TwoPoint("const", F(1, 2))),)), F(1, 2)))
    specs.append(("weightform", single_class(
        TwoPoint("weight", None, Deviation("geometric", rho=F(1, 3), coeff=F(1, 3)))),
        F(1, 3)))
    return specs


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    corpus = _oracle_corpus()
    assert len(corpus) >= 20
    rng = random.Random(20240)
    randoms = []
    while len(randoms) < 10:
        r = F(rng.randint(2, 99), rng.randint(33, 99))
        if r not in randoms:
            randoms.append(r)
    delta = F(1, 1000)
    checked = 0
    disagreements = []
    for name, spec, lam in corpus:
        vs = validate(normalize(spec).spec)
        targets = [lam, lam * lam, lam ** 3] + randoms
        targets = sorted(set(targets))
        for k in (1, 2, 4, 6):
            block = block_for(vs, 0, k, delta)
            words = 1
            for size in block.sizes():
                words *= size
            if words > 10 ** 5:
                continue
            oracle = brute_force_block(vs, block, targets)
            dist = {r["target"]: r["distance"] for r in oracle}
            for t in targets:
                for eps in (F(1, 100), F(1, 10 ** 4)):
                    if eps >= t:
                        continue
                    w = witness_search(vs, t, eps, start=0, max_block=k, delta=delta)
                    checked += 1
                    if (w is not None) != (dist[t] < eps):
                        disagreements.append((name, k, t, eps))
                    elif w is not None:
                        # the witness is optimal on its own block
                        own = block_for(vs, 0, len(w.coordinates), delta)
                        best = brute_force_block(vs, own, [t])[0]["distance"]
                        if abs(w.value - t) != best:
                            disagreements.append((name, k, t, eps, "not optimal"))
    dt = time.perf_counter() - t0
    ok = not disagreements and dt < 60 and checked > 500
    _report(2, "oracle equivalence", ok,
            f"{checked} comparisons, {len(disagreements)} disagreements, {dt:.1f}s")


# ---------------------------------------------------------------------------
# criterion 3: group structure

INCOMMENSURABLE_PAIRS = [
    (F(1, 2), F(1, 3)), (F(1, 2), F(1, 5)), (F(1, 2), F(1, 7)),
    (F(1, 2), F(1, 11)), (F(1, 3), F(1, 5)), (F(1, 3), F(1, 7)),
    (F(1, 5), F(1, 7)), (F(2, 3), F(1, 2)), (F(2, 3), F(1, 5)),
    (F(3, 5), F(1, 2)), (F(3, 5), F(1, 3)), (F(2, 5), F(1, 3)),
    (F(4, 5), F(1, 2)), (F(5, 6), F(1, 2)), (F(5, 8), F(1, 2)),
    (F(3, 4), F(1, 2)), (F(7, 9), F(1, 3)), (F(5, 9), F(2, 3)),
    (F(7, 8), F(1, 2)), (F(8, 9), F(2, 3)), (F(9, 10), F(1, 2)),
    (F(2, 7), F(1, 7)), (F(6, 7), F(1, 2)), (F(10, 11), F(1, 2)),
    (F(3, 10), F(1, 5)),
]


def _cf_falsification(a: Fraction, b: Fraction, bound: int = 10 ** 6) -> bool:
    """No convergent p/q of log(a)/log(b) with p,q <= bound satisfies a**q == b**p.

    Small exponents are checked exactly; larger ones through a 60-digit
    lower bound on |q*log(a) - p*log(b)|, which is far above the working
    precision whenever the equation fails.
    """
    x = math.log(float(a)) / math.log(float(b))
    h0, h1, k0, k1 = 1, 0, 0, 1
    value = x
    for _ in range(64):
        step = math.floor(value)
        h0, h1 = step * h0 + h1, h0
        k0, k1 = step * k0 + k1, k0
        if k0 > bound or h0 > bound:
            break
        if h0 > 0 and k0 > 0:
            if max(h0, k0) <= 1000:
                if a ** k0 == b ** h0:
                    return False
            else:
                with mpmath.workdps(60):
                    err = abs(k0 * mpmath.log(mpmath.mpf(a.numerator) / a.denominator)
                              - h0 * mpmath.log(mpmath.mpf(b.numerator) / b.denominator))
                    if err < mpmath.mpf(10) ** -30:
                        return False
        frac = value - step
        if frac <= 1e-18:
            break
        value = 1.0 / frac
    return True


def test_criterion_3_group_structure():
    failures = []
    for lam in (F(1, 2), F(1, 3), F(2, 3), F(3, 5)):
        for a in range(1, 21):
            for b in range(1, 21):
                g = mult_group([lam ** a, lam ** b])
                want = lam ** math.gcd(a, b)
                if g.kind != "cyclic" or g.generator != want:
                    failures.append((lam, a, b, g.kind))
    assert len(INCOMMENSURABLE_PAIRS) == 25
    for a, b in INCOMMENSURABLE_PAIRS:
        if not _cf_falsification(a, b):
            failures.append(("oracle", a, b))
        g = mult_group([a, b])
        if g.kind != "dense":
            failures.append(("dense", a, b, g.kind))
    _report(3, "group structure", not failures, f"{len(failures)} failures")


# ---------------------------------------------------------------------------
# criterion 4: invariance suites, 200 randomized trials each

def _invariance_corpus():
    return [
        powers(F(1, 2)), powers(F(2, 3)),
        uniform_two_point(), type_one_spec(),
        interleave(F(1, 2), F(1, 3)), interleave(F(1, 2), F(1, 4)),
        geometric_scheme(F(1, 2)), capped_scheme(F(1, 2), 3),
        two_inf_spec(),
        single_class(ExplicitWeights((F(4, 7), F(2, 7), F(1, 7)))),
    ]


def _random_prefix(rng, length):
    out = []
    for _ in range(length):
        k = rng.randint(2, 5)
        vec = [F(rng.randint(1, 9)) for _ in range(k)]
        total = sum(vec)
        out.append(tuple(v / total for v in vec))
    return tuple(out)


def _permuted(spec, rng):
    prefix = []
    for vec in spec.prefix:
        order = list(range(len(vec)))
        rng.shuffle(order)
        prefix.append(tuple(vec[i] for i in order))
    classes = []
    for cls in spec.classes:
        tpl = cls.template
        if isinstance(tpl, ExplicitWeights):
            order = list(range(len(tpl.weights)))
            rng.shuffle(order)
            tpl = ExplicitWeights(tuple(tpl.weights[i] for i in order))
        elif isinstance(tpl, TwoPoint) and tpl.form == "const" and rng.random() < 0.5:
            lam = tpl.value
            tpl = ExplicitWeights((lam / (1 + lam), 1 / (1 + lam)))
        elif isinstance(tpl, Perturbed) and tpl.deviation.family == "zero":
            order = list(range(len(tpl.limit)))
            rng.shuffle(order)
            tpl = Perturbed(tuple(tpl.limit[i] for i in order), tpl.deviation)
        classes.append(IndexClass(cls.indices, tpl))
    return SchemeSpec(spec.mode, tuple(prefix), tuple(classes))


def _scaled(spec, rng):
    """Unnormalize weight vectors by random positive factors."""
    prefix = []
    for vec in spec.prefix:
        c = F(rng.randint(1, 9), rng.randint(1, 9))
        prefix.append(tuple(w * c for w in vec))
    classes = []
    for cls in spec.classes:
        tpl = cls.template
        c = F(rng.randint(1, 9), rng.randint(1, 9))
        if isinstance(tpl, ExplicitWeights):
            tpl = ExplicitWeights(tuple(w * c for w in tpl.weights))
        elif isinstance(tpl, GeometricTail):
            tpl = GeometricTail(tuple(w * c for w in tpl.base), tpl.ratio)
        elif isinstance(tpl, Perturbed):
            tpl = Perturbed(tuple(w * c for w in tpl.limit), tpl.deviation)
        classes.append(IndexClass(cls.indices, tpl))
    return SchemeSpec(spec.mode, tuple(prefix), tuple(classes))


def test_criterion_4_invariance_suites():
    corpus = _invariance_corpus()
    base = [classify(spec) for spec in corpus]
    changes = []

    rng = random.Random(41)
    for trial in range(200):
        i = trial % len(corpus)
        v = classify(_permuted(corpus[i], rng))
        if (v.label, v.lam) != (base[i].label, base[i].lam):
            changes.append(("permutation", trial))

    rng = random.Random(42)
    for trial in range(200):
        i = trial % len(corpus)
        p = rng.randint(0, 8)
        shifted = SchemeSpec(
            corpus[i].mode, _random_prefix(rng, p),
            tuple(IndexClass(Indices(c.indices.start + p, c.indices.step),
                             c.template) for c in corpus[i].classes))
        v = classify(shifted)
        if (v.label, v.lam) != (base[i].label, base[i].lam):
            changes.append(("prefix", trial, p))

    rng = random.Random(43)
    for trial in range(200):
        i = trial % len(corpus)
        scaled = _scaled(corpus[i], rng)
        v = classify(normalize(scaled).spec)
        w = classify(scaled)
        if (v.label, v.lam) != (w.label, w.lam) or \
                (v.label, v.lam) != (base[i].label, base[i].lam):
            changes.append(("normalization", trial))

    _report(4, "invariance suites", not changes, f"{len(changes)} label changes")


# ---------------------------------------------------------------------------
# criterion 5: cocycle exactness for the constant lambda = 1/2 spec

def test_criterion_5_cocycle_exactness():
    vs = validate(powers(F(1, 2)))
    samples = mc_sample_cocycle(vs, seed=7, n_samples=10 ** 4, window=16)
    bad = 0
    for r in samples.ratios:
        n, d = r.numerator, r.denominator
        if (n & (n - 1)) or (d & (d - 1)):
            bad += 1
    lattice = lattice_detect(samples)
    ok = (bad == 0 and lattice.kind == "lattice"
          and abs(lattice.period - LOG2) < 1e-9)
    _report(5, "cocycle exactness", ok,
            f"{bad} non-dyadic ratios, lattice={lattice.kind}, "
            f"|c-log2|={abs((lattice.period or 0) - LOG2):.2e}")


# ---------------------------------------------------------------------------
# criterion 6: witness composition error bound

def test_criterion_6_composition_bound():
    rng = random.Random(6)
    violations = 0
    for trial in range(10 ** 3):
        def triple(coord):
            r = F(rng.randint(1, 40), 20)
            eps = r * F(rng.randint(1, 50), 100)
            d = r + eps * F(rng.randint(-59, 59), 60)
            return Witness((coord,), (0,), (0,), d, r, eps, F(1, 1000))
        w1 = triple(1)
        w2 = triple(2)
        w = compose_witnesses(w1, w2)
        bound = w1.eps * w2.target + w2.eps * w1.target + w1.eps * w2.eps
        if abs(w.value - w.target) > bound or w.eps != bound:
            violations += 1
    _report(6, "composition bound", violations == 0, f"{violations} violations")


# ---------------------------------------------------------------------------
# criteria 7 and 8: analytic vs empirical agreement, and determinism

REPORT_SPECS = ["powers_half.spec", "uniform.spec", "type_one.spec",
                "interleave_2_3.spec", "lambda_zero_one.spec"]


def _report_argv(name):
    return ["report", str(SPEC_DIR / name), "--samples", "10000",
            "--window", "20", "--format", "json"]


@pytest.fixture(scope="module")
def report_runs():
    out = {}
    t0 = time.perf_counter()
    for name in REPORT_SPECS:
        code, text = _run_cli(_report_argv(name))
        out[name] = (code, text)
    return out, time.perf_counter() - t0


def test_criterion_7_analytic_vs_empirical(report_runs):
    runs, elapsed = report_runs
    failures = []
    expected = {
        "powers_half.spec": ("III_lambda", "III_lambda-like", 0.5),
        "uniform.spec": ("II_1", "II-like", None),
        "type_one.spec": ("I_inf", "II-like", None),
        "interleave_2_3.spec": ("III_1", "III_1-like", None),
        "lambda_zero_one.spec": ("III_0", "III_0-like", None),
    }
    for name, (code, text) in runs.items():
        doc = json.loads(text)
        want_a, want_e, lam = expected[name]
        if doc["analytic"]["label"] != want_a or doc["empirical"]["label"] != want_e:
            failures.append(f"{name}: {doc['analytic']['label']}/{doc['empirical']['label']}")
        if not doc["agreement"]:
            failures.append(f"{name}: agreement flag false")
        if lam is not None:
            le = doc["empirical"]["lambda"]
            if abs(math.log(le) / math.log(lam) - 1.0) >= 1e-3:
                failures.append(f"{name}: lambda mismatch {le}")
    if elapsed >= 120:
        failures.append(f"took {elapsed:.0f}s")
    _report(7, "analytic vs empirical", not failures,
            f"{len(failures)} failures, {elapsed:.0f}s")


def test_criterion_8_determinism(report_runs, tmp_path):
    runs, _ = report_runs
    mismatches = []
    for name in REPORT_SPECS:
        code, text = _run_cli(_report_argv(name))
        if (code, text) != runs[name]:
            mismatches.append(f"report {name}")
    other = [
        ["classify", str(SPEC_DIR / "powers_half.spec"), "--format", "json"],
        ["classify", str(SPEC_DIR / "capped_half.spec"), "--format", "json"],
        ["witness", str(SPEC_DIR / "powers_half.spec"), "--target", "0.5",
         "--eps", "1e-3", "--format", "json"],
        ["witness", str(SPEC_DIR / "powers_half.spec"), "--target", "0.3333",
         "--eps", "0.01", "--max-block", "12", "--format", "json"],
        ["sample", str(SPEC_DIR / "powers_half.spec"), "--samples", "1000",
         "--window", "16", "--seed", "7", "--start", "0", "--format", "json"],
        ["oracle", str(SPEC_DIR / "powers_half.spec"), "--length", "3",
         "--targets", "1/3", "--format", "json"],
    ]
    for argv in other:
        first = _run_cli(argv)
        second = _run_cli(argv)
        if first != second:
            mismatches.append(argv[0])
    # convert writes files; compare the bytes
    for i in (1, 2):
        cli_main(["convert", str(SPEC_DIR / "powers_half.factor"), "--from",
                  "factor", "--out", str(tmp_path / f"c{i}.spec")])
    if (tmp_path / "c1.spec").read_bytes() != (tmp_path / "c2.spec").read_bytes():
        mismatches.append("convert")
    _report(8, "determinism", not mismatches, f"{len(mismatches)} mismatches")
