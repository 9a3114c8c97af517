"""The full type decision procedure with machine-checkable certificates.

Pipeline: the type-I series test, then the type-II_1 test, then the
type-III series test; a type-III scheme is branched on whether the
alphabet sizes are bounded, and II_infinity is assigned purely by
elimination when all three series tests reject.  Every verdict carries
a certificate whose stored evidence replays to the same label through
:func:`replay` without touching the original spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exact import FLOAT, RATIONAL, Num, format_scalar, is_exact
from .asymptotics import (
    DIVERGENT, INCONCLUSIVE, SUMMABLE,
    SeriesDescriptor, SeriesPart, SummabilityVerdict, Term,
    cluster_set_M_F, inf_liminf, lambda_clusters, summability,
    union_cluster_report,
)
from .groups import CYCLIC, DENSE, TRIVIAL, mult_group
from .scheme import (
    CappedGeometric, ExplicitWeights, GeometricTail, Perturbed, SchemeSpec,
    SpecError, TP_CONST, TP_EXP, TP_WEIGHT, TwoPoint, ValidatedScheme, _div,
    normalize, validate,
)

LABEL_I_N = "I_n"
LABEL_I_INF = "I_inf"
LABEL_II_1 = "II_1"
LABEL_II_INF = "II_inf"
LABEL_III_0 = "III_0"
LABEL_III_LAMBDA = "III_lambda"
LABEL_III_1 = "III_1"
LABEL_INCONCLUSIVE = "inconclusive"

LABELS = (LABEL_I_N, LABEL_I_INF, LABEL_II_1, LABEL_II_INF,
          LABEL_III_0, LABEL_III_LAMBDA, LABEL_III_1, LABEL_INCONCLUSIVE)


class BranchError(SpecError):
    """A subtype branch was entered outside its precondition."""


class InconclusiveEvidence(SpecError):
    pass


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class Certificate:
    fired: tuple
    mode: str
    c_parameter: Num
    warnings: tuple
    evidence: dict
    notes: tuple = ()

    def to_dict(self):
        return {"fired": list(self.fired),
                "mode": self.mode,
                "C": format_scalar(self.c_parameter),
                "warnings": list(self.warnings),
                "evidence": self.evidence,
                "notes": list(self.notes)}


@dataclass(frozen=True)
class TypeVerdict:
    label: str
    lam: Optional[Num]
    certificate: Certificate

    def to_dict(self):
        return {"label": self.label,
                "lambda": None if self.lam is None else format_scalar(self.lam),
                "certificate": self.certificate.to_dict()}

    def describe(self) -> str:
        if self.label == LABEL_III_LAMBDA:
            return f"III_lambda lambda={format_scalar(self.lam)}"
        return self.label


# ---------------------------------------------------------------------------
# per-coordinate series values

def _is_uniform(weights) -> bool:
    return all(w == weights[0] for w in weights)


def uniformity_defect(weights) -> float:
    """Average of |1 - sqrt(w_i * k)|**2 over a finite weight vector."""
    k = len(weights)
    return sum(abs(1.0 - math.sqrt(float(w) * k)) ** 2 for w in weights) / k


def ratio_defect(weights, c: Num) -> Num:
    """Sum over ordered pairs of w_i w_j min(|w_i/w_j - 1|**2, C).

    Exact when the weights and C are rational.
    """
    total = Fraction(0) if all(is_exact(w) for w in weights) and is_exact(c) else 0.0
    for i, wi in enumerate(weights):
        for j, wj in enumerate(weights):
            if i == j:
                continue
            d = _div(wi, wj) - 1
            d2 = d * d
            total += wi * wj * (d2 if d2 < c else c)
    return total


def _two_point_weights(lam: Num):
    return (_div(1, 1 + lam), _div(lam, 1 + lam))


def _prefix_part(vs: ValidatedScheme, per_vector) -> SeriesPart:
    """Finite contribution of the prefix coordinates."""
    values = [per_vector(vec) for vec in vs.prefix]
    total = sum(values) if values else Fraction(0)
    return SeriesPart("prefix", None, Term("finite", value=total))


def _finite_class_part(vs, k, cls, per_vector) -> SeriesPart:
    values = []
    for n in cls.indices.members:
        pos = cls.indices.position_of(n)
        values.append(per_vector(cls.template.weights_at(n, pos, vs.mode)))
    return SeriesPart(vs.class_labels()[k], None, Term("finite", value=sum(values)))


# ---------------------------------------------------------------------------
# the three series tests

def test_type_I(vs: ValidatedScheme) -> SummabilityVerdict:
    """Summability of the defect series sum_n (1 - max_a mu_n(a))."""
    parts = [_prefix_part(vs, lambda w: 1 - max(w))]
    labels = vs.class_labels()
    for k, cls in enumerate(vs.classes):
        tpl = cls.template
        label = labels[k]
        if not cls.indices.infinite:
            parts.append(_finite_class_part(vs, k, cls, lambda w: 1 - max(w)))
            continue
        if isinstance(tpl, ExplicitWeights):
            t = 1 - _div(max(tpl.weights), tpl.total())
            parts.append(SeriesPart(label, cls.indices, Term("const", value=t)))
        elif isinstance(tpl, GeometricTail):
            t = 1 - _div(max(tpl.base), tpl.total())
            parts.append(SeriesPart(label, cls.indices, Term("const", value=t)))
        elif isinstance(tpl, TwoPoint):
            if tpl.form == TP_CONST:
                lam = tpl.value
                parts.append(SeriesPart(label, cls.indices,
                                        Term("const", value=_div(lam, 1 + lam))))
            elif tpl.form == TP_EXP:
                lam = tpl.value
                parts.append(SeriesPart(label, cls.indices,
                                        Term("converges", value=_div(lam, 1 + lam))))
            elif tpl.form == TP_WEIGHT:
                # defect equals eps_n exactly, closed-form sums available
                parts.append(SeriesPart(label, cls.indices,
                                        Term.from_deviation(tpl.deviation, exact=True)))
            else:
                # defect = lam/(1+lam) with lam = 1-exp(-eps) <= eps
                parts.append(SeriesPart(label, cls.indices,
                                        Term.from_deviation(tpl.deviation)))
        elif isinstance(tpl, Perturbed):
            limit_defect = 1 - _div(max(tpl.limit), sum(tpl.limit))
            if tpl.deviation.family == "zero":
                parts.append(SeriesPart(label, cls.indices,
                                        Term("const", value=limit_defect)))
            else:
                parts.append(SeriesPart(label, cls.indices,
                                        Term("converges", value=limit_defect)))
        elif isinstance(tpl, CappedGeometric):
            parts.append(SeriesPart(label, cls.indices, Term("converges", value=1)))
        else:
            raise SpecError(f"no type-I rule for template {tpl.describe()}")
    return summability(SeriesDescriptor(tuple(parts)))


def test_type_II1(vs: ValidatedScheme) -> SummabilityVerdict:
    """Summability of the uniformity-defect series.

    Requires every alphabet finite; an infinite alphabet fails the
    finite-alphabet precondition and the verdict is reported divergent
    with that reason (the scheme is not II_1 either way).
    """
    if vs.has_infinite_alphabet():
        return SummabilityVerdict(
            DIVERGENT,
            "some coordinates have infinite alphabets; the finite-alphabet "
            "precondition of the II_1 criterion fails")
    parts = [_prefix_part(vs, _uniformity_defect_finite)]
    labels = vs.class_labels()
    for k, cls in enumerate(vs.classes):
        tpl = cls.template
        label = labels[k]
        if not cls.indices.infinite:
            parts.append(_finite_class_part(vs, k, cls, _uniformity_defect_finite))
            continue
        if isinstance(tpl, ExplicitWeights):
            w = tpl.weights_at(cls.indices.first(), 0, vs.mode)
            if _is_uniform(w):
                parts.append(SeriesPart(label, cls.indices, Term("zero")))
            else:
                parts.append(SeriesPart(label, cls.indices,
                                        Term("const", value=uniformity_defect(w))))
        elif isinstance(tpl, TwoPoint):
            lam = tpl.lam_limit()
            if tpl.form == TP_CONST:
                parts.append(SeriesPart(label, cls.indices,
                                        Term("const", value=uniformity_defect(_two_point_weights(lam)))))
            elif lam == 1:
                # defect comparable to eps_n**2 (verified bound: term <= (1-lam_n)**2)
                parts.append(SeriesPart(label, cls.indices,
                                        Term.from_deviation(tpl.deviation.squared())))
            else:
                limit_term = uniformity_defect(_two_point_weights(float(lam)) if lam else (1.0, 0.0))
                parts.append(SeriesPart(label, cls.indices,
                                        Term("converges", value=limit_term)))
        elif isinstance(tpl, Perturbed):
            limit = tpl.weights_at(cls.indices.first(), 0, vs.mode) \
                if tpl.deviation.family == "zero" else tuple(
                    _div(v, sum(tpl.limit)) for v in tpl.limit)
            if _is_uniform(tpl.limit):
                if tpl.deviation.family == "zero":
                    parts.append(SeriesPart(label, cls.indices, Term("zero")))
                else:
                    parts.append(SeriesPart(label, cls.indices,
                                            Term.from_deviation(tpl.deviation.squared())))
            else:
                t = uniformity_defect(limit)
                kind = "const" if tpl.deviation.family == "zero" else "converges"
                parts.append(SeriesPart(label, cls.indices, Term(kind, value=t)))
        elif isinstance(tpl, CappedGeometric):
            parts.append(SeriesPart(label, cls.indices,
                                    Term("power", p=Fraction(1))))
        else:
            raise SpecError(f"no II_1 rule for template {tpl.describe()}")
    return summability(SeriesDescriptor(tuple(parts)))


def _uniformity_defect_finite(weights):
    if _is_uniform(weights):
        return Fraction(0)
    return uniformity_defect(weights)


def test_type_III(vs: ValidatedScheme, c: Num = Fraction(1)) -> SummabilityVerdict:
    """Summability of the capped pairwise ratio-defect series; divergence
    means type III.  The cap C is recorded in the certificate; the
    verdict does not depend on its value."""
    if c <= 0:
        raise SpecError("the cap C must be positive")
    parts = [_prefix_part(vs, lambda w: ratio_defect(w, c))]
    labels = vs.class_labels()
    for k, cls in enumerate(vs.classes):
        tpl = cls.template
        label = labels[k]
        if not cls.indices.infinite:
            parts.append(_finite_class_part(vs, k, cls, lambda w: ratio_defect(w, c)))
            continue
        if isinstance(tpl, ExplicitWeights):
            w = tpl.weights_at(cls.indices.first(), 0, vs.mode)
            t = ratio_defect(w, c)
            parts.append(SeriesPart(label, cls.indices,
                                    Term("zero") if _is_uniform(w) else Term("const", value=t)))
        elif isinstance(tpl, GeometricTail):
            t = _ratio_defect_geometric_tail(tpl, c, vs.mode)
            parts.append(SeriesPart(label, cls.indices, Term("const", value=t)))
        elif isinstance(tpl, TwoPoint):
            lam = tpl.lam_limit()
            if tpl.form == TP_CONST:
                t = ratio_defect(_two_point_weights(tpl.value), c)
                parts.append(SeriesPart(label, cls.indices, Term("const", value=t)))
            elif lam == 1:
                parts.append(SeriesPart(label, cls.indices,
                                        Term.from_deviation(tpl.deviation.squared())))
            elif lam == 0:
                # term comparable to lam_n, hence to eps_n
                parts.append(SeriesPart(label, cls.indices,
                                        Term.from_deviation(tpl.deviation)))
            else:
                t = ratio_defect(_two_point_weights(float(lam)), float(c))
                parts.append(SeriesPart(label, cls.indices, Term("converges", value=t)))
        elif isinstance(tpl, Perturbed):
            norm = tuple(_div(v, sum(tpl.limit)) for v in tpl.limit)
            if _is_uniform(tpl.limit):
                if tpl.deviation.family == "zero":
                    parts.append(SeriesPart(label, cls.indices, Term("zero")))
                else:
                    parts.append(SeriesPart(label, cls.indices,
                                            Term.from_deviation(tpl.deviation.squared())))
            else:
                t = ratio_defect(norm, c)
                kind = "const" if tpl.deviation.family == "zero" else "converges"
                parts.append(SeriesPart(label, cls.indices, Term(kind, value=t)))
        elif isinstance(tpl, CappedGeometric):
            # per-coordinate value scales like 1/|X_n| with affine sizes
            parts.append(SeriesPart(label, cls.indices, Term("power", p=Fraction(1))))
        else:
            raise SpecError(f"no type-III rule for template {tpl.describe()}")
    return summability(SeriesDescriptor(tuple(parts)))


def _ratio_defect_geometric_tail(tpl: GeometricTail, c: Num, mode: str) -> Num:
    """Lower bound of the per-coordinate value on a truncated symbol range.

    All pair contributions are non-negative, so the truncated double sum
    is a rigorous lower bound; it is positive from two symbols on, which
    is what the divergence verdict needs.
    """
    weights = []
    mass = Fraction(0) if mode == RATIONAL else 0.0
    i = 0
    while float(mass) < 1 - 1e-9 and i < 200:
        w = tpl.weight(i)
        w = _div(w, tpl.total())
        weights.append(w if mode == RATIONAL else float(w))
        mass += weights[-1]
        i += 1
    return ratio_defect(tuple(weights), c if mode == RATIONAL else float(c))


# ---------------------------------------------------------------------------
# pure decision helpers (shared by the classifier and certificate replay)

def _decide_unbounded(zero_cluster: bool, liminf_zero: bool, group_kind: Optional[str]):
    if zero_cluster or liminf_zero:
        fired = "unbounded-liminf-zero" if liminf_zero else "unbounded-zero-cluster"
        return LABEL_III_1, fired
    if group_kind == DENSE:
        return LABEL_III_1, "unbounded-dense-group"
    if group_kind == CYCLIC:
        return LABEL_III_LAMBDA, "unbounded-cyclic-group"
    return LABEL_III_0, "unbounded-trivial-group"


def _decide_two_point(zero_one: bool, eps_verdicts, group_kind: Optional[str]):
    if zero_one:
        return LABEL_III_0, "two-point-lambda-set-zero-one"
    if any(v == DIVERGENT for v in eps_verdicts):
        return LABEL_III_1, "two-point-deviations-divergent"
    if any(v == INCONCLUSIVE for v in eps_verdicts):
        return LABEL_INCONCLUSIVE, "two-point-deviations-inconclusive"
    if group_kind == DENSE:
        return LABEL_III_1, "two-point-dense-group"
    if group_kind == CYCLIC:
        return LABEL_III_LAMBDA, "two-point-cyclic-group"
    return LABEL_INCONCLUSIVE, "two-point-trivial-group-contradiction"


def _is_zero_limit(value: Num, mode: str) -> bool:
    if mode == RATIONAL:
        return value == 0
    return abs(float(value)) <= 1e-9


# ---------------------------------------------------------------------------
# type-III subtype branches

def classify_III_unbounded(vs: ValidatedScheme, c: Num = Fraction(1),
                           _pretested: Optional[SummabilityVerdict] = None) -> TypeVerdict:
    """Subtype of a type-III scheme with unbounded alphabet sizes."""
    if vs.limsup_alphabet() is not None:
        raise BranchError(
            f"alphabet sizes are bounded by {vs.limsup_alphabet()}; "
            "this branch needs unbounded sizes")
    type3 = _pretested if _pretested is not None else test_type_III(vs, c)
    if type3.inconclusive:
        raise InconclusiveEvidence("type-III membership is inconclusive")
    if not type3.divergent:
        raise BranchError("the scheme is not type III")
    il = inf_liminf(vs)
    liminf_zero = _is_zero_limit(il, vs.mode)
    union = union_cluster_report(vs)
    values = [v for v in union.values(recurring_only=True)]
    zero_cluster = union.unbounded or any(_is_zero_limit(v, vs.mode) for v in values)
    group = None
    if not (zero_cluster or liminf_zero):
        group = mult_group([v for v in values if not _is_zero_limit(v, vs.mode)])
    label, fired = _decide_unbounded(zero_cluster, liminf_zero,
                                     None if group is None else group.kind)
    lam = group.generator if label == LABEL_III_LAMBDA else None
    evidence = {
        "type_III": type3.to_dict(),
        "branch": "unbounded",
        "unbounded": {
            "inf_liminf": format_scalar(il),
            "inf_liminf_zero": liminf_zero,
            "zero_cluster": zero_cluster,
            "cluster_report": union.to_dict(),
            "transient_report": cluster_set_M_F(vs).to_dict(),
            "group": None if group is None else group.to_dict(),
        },
    }
    cert = Certificate(
        fired=("type-III-series-divergent", fired),
        mode=vs.mode, c_parameter=c, warnings=(),
        evidence=evidence,
        notes=("symbol 0 (ratios identically 1) is excluded from cluster sets",
               "transient-symbol ratio groups are reported but, being finite data, "
               "contribute no cluster points"))
    return TypeVerdict(label, lam, cert)


def classify_III_two_point(vs: ValidatedScheme, c: Num = Fraction(1),
                           _pretested: Optional[SummabilityVerdict] = None) -> TypeVerdict:
    """Subtype of a type-III scheme whose recurring coordinates are two-point.

    Finitely many coordinates (the prefix and finite classes) never
    change the subtype and are ignored here, whatever their alphabets.
    """
    if not vs.all_two_point():
        raise BranchError("some infinite class is not two-point")
    type3 = _pretested if _pretested is not None else test_type_III(vs, c)
    if type3.inconclusive:
        raise InconclusiveEvidence("type-III membership is inconclusive")
    if not type3.divergent:
        raise BranchError("the scheme is not type III")
    lr = lambda_clusters(vs)
    limits = lr.limits()
    zero_limits = [t for t in limits if _is_zero_limit(t, vs.mode)]
    nonzero = [t for t in limits if not _is_zero_limit(t, vs.mode)]
    one_present = any(t == 1 or (vs.mode == FLOAT and abs(float(t) - 1) <= 1e-9)
                      for t in nonzero)
    zero_one = bool(zero_limits) and one_present and len(limits) == 2

    warnings = []
    if zero_limits and set(map(float, nonzero)) - {1.0}:
        warnings.append(
            "ambiguous-zero-in-lambda-set: 0 is a cluster value; the group is "
            "generated from the non-zero values only")

    eps_verdicts = {}
    for group in lr.groups:
        if _is_zero_limit(group.limit, vs.mode):
            continue
        parts = []
        for label, dev in zip(group.classes, group.deviations):
            k = int(label[1:]) - 1
            parts.append(SeriesPart(label, vs.classes[k].indices,
                                    Term.from_deviation(dev, exact=True)))
        eps_verdicts[group.limit] = summability(SeriesDescriptor(tuple(parts)))

    if zero_one:
        divergent_at = [str(format_scalar(t)) for t, v in eps_verdicts.items()
                        if v.divergent]
        if divergent_at:
            warnings.append(
                "zero-one-precedence: deviations at limit(s) "
                f"{', '.join(divergent_at)} diverge, which on its own would force "
                "III_1; the lambda-set {0,1} rule takes precedence by the "
                "documented decision order")

    group_struct = None
    verdict_strings = [v.verdict for v in eps_verdicts.values()]
    if not zero_one and not any(v != SUMMABLE for v in verdict_strings):
        if nonzero:
            group_struct = mult_group(nonzero)
            if group_struct.kind == TRIVIAL:
                warnings.append(
                    "two-point-trivial-group-contradicts-type-III: every lambda "
                    "cluster value is 1 and all deviations are summable, which "
                    "contradicts the established type-III verdict")
        else:
            warnings.append(
                "ambiguous-zero-in-lambda-set: the lambda sequence clusters only "
                "at 0; no group criterion applies")

    label, fired = _decide_two_point(
        zero_one, verdict_strings,
        None if group_struct is None else group_struct.kind)
    if label == LABEL_INCONCLUSIVE and not nonzero and not zero_one:
        fired = "two-point-lambda-only-zero"
    lam = group_struct.generator if label == LABEL_III_LAMBDA else None
    evidence = {
        "type_III": type3.to_dict(),
        "branch": "two_point",
        "two_point": {
            "lambda_report": lr.to_dict(),
            "lambda_set": [format_scalar(t) for t in limits],
            "zero_one": zero_one,
            "eps_verdicts": [{"limit": format_scalar(t), "series": v.to_dict()}
                             for t, v in eps_verdicts.items()],
            "group": None if group_struct is None else group_struct.to_dict(),
        },
    }
    cert = Certificate(
        fired=("type-III-series-divergent", fired),
        mode=vs.mode, c_parameter=c, warnings=tuple(warnings),
        evidence=evidence,
        notes=("deviation summability stands in for the multiplicative deviation "
               "of the lambda sequence; the two are comparable for every "
               "supported form",
               f"{lr.ignored_prefix} finitely-covered coordinates ignored"))
    return TypeVerdict(label, lam, cert)


# ---------------------------------------------------------------------------
# the complete pipeline

def classify(spec: Union[SchemeSpec, ValidatedScheme], c: Num = Fraction(1)) -> TypeVerdict:
    """Assign a type label with a replayable certificate.

    Accepts a raw spec (normalized internally) or an already validated
    scheme.  Never raises on decidability gaps; those become the
    ``inconclusive`` label with the blocking evidence recorded.
    """
    if isinstance(spec, ValidatedScheme):
        spec = spec.spec
    vs = validate(normalize(spec).spec)

    type1 = test_type_I(vs)
    evidence = {"type_I": type1.to_dict()}
    notes = ("normalized before classification",
             "every alphabet has at least two symbols, so a type-I scheme "
             "has infinitely many atoms")
    if type1.inconclusive:
        return _inconclusive(vs, c, evidence, "type-I-series-inconclusive")
    if type1.summable:
        cert = Certificate(("type-I-series-summable",), vs.mode, c, (), evidence, notes)
        return TypeVerdict(LABEL_I_INF, None, cert)

    type2 = test_type_II1(vs)
    evidence["type_II1"] = type2.to_dict()
    if type2.inconclusive:
        return _inconclusive(vs, c, evidence, "type-II1-series-inconclusive")
    if type2.summable:
        cert = Certificate(("type-I-series-divergent", "type-II1-series-summable"),
                           vs.mode, c, (), evidence, notes)
        return TypeVerdict(LABEL_II_1, None, cert)

    type3 = test_type_III(vs, c)
    evidence["type_III"] = type3.to_dict()
    if type3.inconclusive:
        return _inconclusive(vs, c, evidence, "type-III-series-inconclusive")
    if type3.summable:
        cert = Certificate(
            ("type-I-series-divergent", "type-II1-series-divergent",
             "type-III-series-summable", "II-infinity-by-elimination"),
            vs.mode, c, (), evidence, notes)
        return TypeVerdict(LABEL_II_INF, None, cert)

    prelude = ("type-I-series-divergent", "type-II1-series-divergent")
    if vs.limsup_alphabet() is None:
        sub = classify_III_unbounded(vs, c, _pretested=type3)
    elif vs.all_two_point():
        sub = classify_III_two_point(vs, c, _pretested=type3)
    else:
        evidence["branch"] = "bounded_multisymbol"
        cert = Certificate(
            prelude + ("type-III-series-divergent", "bounded-multisymbol-unresolved"),
            vs.mode, c,
            ("bounded alphabets with more than two symbols: such a scheme is "
             "isomorphic to a two-point one, but the reduction is not "
             "constructive here; rebuild the spec with two-point templates",),
            evidence, notes)
        return TypeVerdict(LABEL_INCONCLUSIVE, None, cert)

    merged_evidence = dict(evidence)
    merged_evidence.update(sub.certificate.evidence)
    cert = Certificate(prelude + sub.certificate.fired, vs.mode, c,
                       sub.certificate.warnings, merged_evidence,
                       notes + sub.certificate.notes)
    return TypeVerdict(sub.label, sub.lam, cert)


def _inconclusive(vs, c, evidence, fired) -> TypeVerdict:
    cert = Certificate((fired,), vs.mode, c,
                       ("a series verdict is inconclusive; no label can be "
                        "assigned from the rule table",),
                       evidence)
    return TypeVerdict(LABEL_INCONCLUSIVE, None, cert)


# ---------------------------------------------------------------------------
# certificate replay

def replay(verdict_dict: dict) -> tuple:
    """Recompute (label, lambda) from a serialized verdict's evidence only.

    The replay never sees the spec: it re-runs the decision tree on the
    stored verdicts, so a tampered certificate that does not support its
    label is detected by comparing the outputs.
    """
    ev = verdict_dict["certificate"]["evidence"]
    v1 = ev["type_I"]["verdict"]
    if v1 == INCONCLUSIVE:
        return LABEL_INCONCLUSIVE, None
    if v1 == SUMMABLE:
        return LABEL_I_INF, None
    v2 = ev["type_II1"]["verdict"]
    if v2 == INCONCLUSIVE:
        return LABEL_INCONCLUSIVE, None
    if v2 == SUMMABLE:
        return LABEL_II_1, None
    v3 = ev["type_III"]["verdict"]
    if v3 == INCONCLUSIVE:
        return LABEL_INCONCLUSIVE, None
    if v3 == SUMMABLE:
        return LABEL_II_INF, None
    branch = ev.get("branch")
    if branch == "unbounded":
        u = ev["unbounded"]
        group = u.get("group")
        label, _ = _decide_unbounded(u["zero_cluster"], u["inf_liminf_zero"],
                                     None if group is None else group["kind"])
        lam = group["generator"] if label == LABEL_III_LAMBDA else None
        return label, lam
    if branch == "two_point":
        t = ev["two_point"]
        group = t.get("group")
        label, _ = _decide_two_point(
            t["zero_one"],
            [e["series"]["verdict"] for e in t["eps_verdicts"]],
            None if group is None else group["kind"])
        lam = group["generator"] if label == LABEL_III_LAMBDA else None
        return label, lam
    return LABEL_INCONCLUSIVE, None
