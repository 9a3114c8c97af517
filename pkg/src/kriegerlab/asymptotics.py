"""Cluster-point sets and series summability verdicts.

Cluster points are computed symbolically from template limits, never by
numeric epsilon-clustering, except for finite explicit data (prefix
vectors and finite classes) where values are grouped exactly (rational
mode) or within 1e-9 (float mode).  Summability verdicts come from a
fixed rule table over closed-form term families; numeric evidence alone
yields the first-class verdict ``inconclusive``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .exact import RATIONAL, Num, format_scalar, is_exact
from .scheme import (
    Deviation, ExplicitWeights, GEOMETRIC, Indices, POWER, Perturbed,
    SpecError, TwoPoint, ValidatedScheme, ZERO, ZERO_DEVIATION, _div,
)

FINITE_CLUSTER_TOL = 1e-9
ZERO_FLAG_TOL = Fraction(1, 10 ** 9)
N_MAX = 10 ** 6


class SymbolFinite(SpecError):
    """The symbol does not appear in infinitely many coordinates."""


class NotTwoPoint(SpecError):
    pass


# ---------------------------------------------------------------------------
# term forms and the summability rule table

SUMMABLE = "summable"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Term:
    """Closed-form description of one class's contribution to a series.

    Kinds:
      * ``zero``       -- every term is 0
      * ``finite``     -- finitely many non-zero terms, with their total
      * ``const``      -- term = value at every coordinate of an infinite set
      * ``converges``  -- terms converge to value > 0
      * ``geometric``  -- term = scale*rho**n exactly (``exact=True``) or
                          bounded above by it (``exact=False``)
      * ``power``      -- term comparable to scale*n**(-p)
      * ``numeric``    -- only pointwise evaluation is available
    """

    kind: str
    value: Optional[Num] = None
    rho: Optional[Num] = None
    p: Optional[Num] = None
    scale: Optional[Num] = None
    exact: bool = False
    fn: Optional[Callable[[int], float]] = None

    @staticmethod
    def from_deviation(dev: Deviation, scale: Optional[Num] = None, exact: bool = False):
        """Term comparable to (or equal to, when exact) the deviation values."""
        if dev.family == ZERO:
            return Term("zero")
        if dev.family == GEOMETRIC:
            s = dev.coeff if scale is None else scale * dev.coeff
            return Term("geometric", rho=dev.rho, scale=s, exact=exact)
        if dev.family == POWER:
            s = dev.coeff if scale is None else scale * dev.coeff
            return Term("power", p=dev.exponent, scale=s, exact=exact)
        total = sum(dev.values) if exact else None
        return Term("finite", value=total)


@dataclass(frozen=True)
class SeriesPart:
    label: str
    indices: Optional[Indices]  # None marks purely finite contributions
    term: Term


@dataclass(frozen=True)
class SeriesDescriptor:
    parts: tuple

    def __iter__(self):
        return iter(self.parts)


@dataclass(frozen=True)
class SummabilityVerdict:
    verdict: str
    evidence: str
    total: Optional[Num] = None      # exact closed-form sum when available
    bound: Optional[Num] = None      # rigorous upper bound for summable series
    partial_sum: Optional[float] = None
    n_max: Optional[int] = None

    @property
    def summable(self):
        return self.verdict == SUMMABLE

    @property
    def divergent(self):
        return self.verdict == DIVERGENT

    @property
    def inconclusive(self):
        return self.verdict == INCONCLUSIVE

    def to_dict(self):
        out = {"verdict": self.verdict, "evidence": self.evidence}
        if self.total is not None:
            out["total"] = format_scalar(self.total)
        if self.bound is not None:
            out["bound"] = format_scalar(self.bound)
        if self.partial_sum is not None:
            out["partial_sum"] = self.partial_sum
            out["n_max"] = self.n_max
        return out


def _geometric_tail_sum(rho: Num, scale: Num, indices: Indices) -> Num:
    # sum of scale*rho**n over n = a, a+d, a+2d, ...
    a, d = indices.start, indices.step
    return scale * rho ** a / (1 - rho ** d) if is_exact(rho) and is_exact(scale) \
        else float(scale) * float(rho) ** a / (1 - float(rho) ** d)


def _part_verdict(part: SeriesPart, n_max: int) -> SummabilityVerdict:
    t = part.term
    if t.kind == "zero":
        return SummabilityVerdict(SUMMABLE, f"{part.label}: terms identically zero",
                                  total=Fraction(0))
    if t.kind == "finite":
        return SummabilityVerdict(SUMMABLE, f"{part.label}: finitely many non-zero terms",
                                  total=t.value)
    if t.kind == "const":
        if t.value == 0:
            return SummabilityVerdict(SUMMABLE, f"{part.label}: terms identically zero",
                                      total=Fraction(0))
        return SummabilityVerdict(
            DIVERGENT,
            f"{part.label}: constant positive term {format_scalar(t.value)} on an "
            "infinite index set")
    if t.kind == "converges":
        if t.value <= 0:
            raise SpecError("converges-term with non-positive limit is not decidable")
        return SummabilityVerdict(
            DIVERGENT,
            f"{part.label}: terms converge to {format_scalar(t.value)} > 0, so they "
            "exceed a positive constant eventually")
    if t.kind == "geometric":
        bound = None
        total = None
        if t.scale is not None and part.indices is not None and part.indices.infinite:
            s = _geometric_tail_sum(t.rho, t.scale, part.indices)
            if t.exact:
                total = s
            else:
                bound = s
        word = "equal to" if t.exact else "bounded by a multiple of"
        return SummabilityVerdict(
            SUMMABLE,
            f"{part.label}: terms {word} {format_scalar(t.rho)}**n (geometric rule)",
            total=total, bound=bound)
    if t.kind == "power":
        if t.p > 1:
            return SummabilityVerdict(
                SUMMABLE,
                f"{part.label}: terms comparable to n**(-{format_scalar(t.p)}), "
                "p-series rule with p > 1")
        return SummabilityVerdict(
            DIVERGENT,
            f"{part.label}: terms comparable to n**(-{format_scalar(t.p)}) with "
            "p <= 1, integral-test rule")
    # numeric fallback: partial sums prove nothing either way
    partial = 0.0
    count = 0
    if part.indices is not None:
        for n in part.indices.iterate(n_max):
            partial += t.fn(n)
            count += 1
    return SummabilityVerdict(
        INCONCLUSIVE,
        f"{part.label}: no symbolic rule applies; partial sum over {count} terms",
        partial_sum=partial, n_max=n_max)


def summability(series: SeriesDescriptor, n_max: int = N_MAX) -> SummabilityVerdict:
    """Combine per-part rule-table verdicts.

    Any divergent part makes the series divergent; otherwise any
    inconclusive part wins; otherwise the series is summable with an
    exact total when every part has one.
    """
    verdicts = [_part_verdict(p, n_max) for p in series]
    for v in verdicts:
        if v.divergent:
            return v
    bad = [v for v in verdicts if v.inconclusive]
    if bad:
        return bad[0]
    evidence = "; ".join(v.evidence for v in verdicts) or "empty series"
    total = Fraction(0)
    for v in verdicts:
        if v.total is None:
            total = None
            break
        total = total + v.total
    bound = None
    if total is None:
        parts = [v.total if v.total is not None else v.bound for v in verdicts]
        if all(p is not None for p in parts):
            bound = sum(parts)
    return SummabilityVerdict(SUMMABLE, evidence, total=total, bound=bound)


# convenience constructors used by tests and the CLI oracle command

def geometric_series(coeff: Num, rho: Num, indices: Indices = Indices(1, 1)) -> SeriesDescriptor:
    return SeriesDescriptor((SeriesPart("series", indices,
                                        Term("geometric", rho=rho, scale=coeff, exact=True)),))


def power_series(p: Num, coeff: Num = 1, indices: Indices = Indices(1, 1)) -> SeriesDescriptor:
    return SeriesDescriptor((SeriesPart("series", indices,
                                        Term("power", p=p, scale=coeff, exact=True)),))


def constant_series(c: Num, indices: Indices = Indices(1, 1)) -> SeriesDescriptor:
    return SeriesDescriptor((SeriesPart("series", indices, Term("const", value=c)),))


def numeric_series(fn: Callable[[int], float], indices: Indices = Indices(1, 1)) -> SeriesDescriptor:
    return SeriesDescriptor((SeriesPart("series", indices, Term("numeric", fn=fn)),))


# ---------------------------------------------------------------------------
# cluster reports

@dataclass(frozen=True)
class ClusterPoint:
    value: Num
    witnesses: tuple          # class labels or coordinate tags
    recurring: bool           # attained along an infinite index family

    def to_dict(self):
        return {"value": format_scalar(self.value),
                "witnesses": list(self.witnesses),
                "recurring": self.recurring}


@dataclass(frozen=True)
class ClusterReport:
    points: tuple
    liminf: Optional[Num]
    contains_zero: bool
    unbounded: bool = False
    note: str = ""

    def values(self, recurring_only: bool = False):
        return tuple(p.value for p in self.points
                     if p.recurring or not recurring_only)

    def to_dict(self):
        return {"points": [p.to_dict() for p in self.points],
                "liminf": None if self.liminf is None else format_scalar(self.liminf),
                "contains_zero": self.contains_zero,
                "unbounded": self.unbounded,
                "note": self.note}


def _merge_points(raw, mode: str):
    """Group (value, witness, recurring) triples into cluster points.

    Rational mode groups by exact equality; float mode merges values
    within 1e-9.
    """
    out = []
    for value, witness, recurring in sorted(raw, key=lambda t: float(t[0])):
        if out:
            prev = out[-1]
            same = (value == prev[0]) if mode == RATIONAL \
                else abs(float(value) - float(prev[0])) <= FINITE_CLUSTER_TOL
            if same:
                prev[1].append(witness)
                prev[2] = prev[2] or recurring
                continue
        out.append([value, [witness], recurring])
    return tuple(ClusterPoint(v, tuple(dict.fromkeys(w)), r) for v, w, r in out)


def cluster_set_M_i(vs: ValidatedScheme, symbol: int) -> ClusterReport:
    """Cluster points of the weight ratios of ``symbol`` against symbol 0.

    Computed per class from template limits; only infinite classes
    whose alphabets contain the symbol contribute.
    """
    if symbol < 0:
        raise SpecError("symbols are 0-indexed")
    if not vs.symbol_recurs(symbol):
        raise SymbolFinite(f"symbol {symbol} appears in only finitely many coordinates")
    raw = []
    labels = vs.class_labels()
    for k, cls in vs.infinite_classes():
        m = cls.template.max_alphabet()
        if m is not None and symbol >= m:
            continue
        raw.append((cls.template.ratio_limit(symbol), labels[k], True))
    if not raw:
        raise SymbolFinite(f"symbol {symbol} appears in only finitely many coordinates")
    points = _merge_points(raw, vs.mode)
    liminf = min(p.value for p in points)
    return ClusterReport(points, liminf,
                         contains_zero=any(p.value <= ZERO_FLAG_TOL for p in points),
                         note=f"ratios of symbol {symbol} against symbol 0")


def cluster_set_M_F(vs: ValidatedScheme) -> ClusterReport:
    """Ratio values of symbols that appear only finitely often.

    These come from prefix coordinates and finite classes, so the data
    is finite; groups are reported with ``recurring=False`` and never
    count as genuine cluster points downstream.  Empty when every
    symbol recurs infinitely.
    """
    sup = vs.limsup_alphabet()
    raw = []
    if sup is not None:
        for v, vec in enumerate(vs.prefix, start=1):
            for i in range(sup, len(vec)):
                raw.append((_div(vec[i], vec[0]), f"prefix[{v}]", False))
        labels = vs.class_labels()
        for k, cls in enumerate(vs.classes):
            if cls.indices.infinite:
                continue
            for n in cls.indices.members:
                pos = cls.indices.position_of(n)
                w = cls.template.weights_at(n, pos, vs.mode)
                for i in range(sup, len(w)):
                    raw.append((_div(w[i], w[0]), labels[k], False))
    points = _merge_points(raw, vs.mode)
    liminf = min((p.value for p in points), default=None)
    return ClusterReport(points, liminf,
                         contains_zero=any(p.value <= ZERO_FLAG_TOL for p in points),
                         note="finite-data ratio groups of transiently appearing symbols")


def union_cluster_report(vs: ValidatedScheme) -> ClusterReport:
    """Genuine cluster points of all symbol ratios (symbol 0 excluded).

    This is the classifier's combined cluster set: the union over every
    infinitely recurring symbol i >= 1 of the per-symbol reports, plus
    the transient-symbol report, keeping only points attained along an
    infinite index family.  When some class has an infinite alphabet the
    set is infinite and the report carries ``unbounded=True``.
    """
    if vs.has_infinite_alphabet():
        return ClusterReport((), None, contains_zero=True, unbounded=True,
                             note="infinite alphabet: ratio values accumulate at 0")
    raw = []
    labels = vs.class_labels()
    for k, cls in vs.infinite_classes():
        m = cls.template.max_alphabet()
        sizes = range(1, m) if m is not None else None
        if sizes is None:
            # capped templates: unbounded sizes, finitely many distinct ratios
            distinct = set()
            i = 1
            while True:
                r = cls.template.ratio_limit(i)
                if r in distinct:
                    break
                distinct.add(r)
                raw.append((r, labels[k], True))
                i += 1
        else:
            for i in sizes:
                raw.append((cls.template.ratio_limit(i), labels[k], True))
    points = _merge_points(raw, vs.mode)
    liminf = min((p.value for p in points), default=None)
    return ClusterReport(points, liminf,
                         contains_zero=any(p.value <= ZERO_FLAG_TOL for p in points),
                         note="union of per-symbol cluster sets, symbol 0 excluded")


def inf_liminf(vs: ValidatedScheme) -> Num:
    """Infimum over recurring symbols of the liminf of each ratio sequence.

    Infinite alphabets drive this to 0 (the tail ratios vanish over the
    symbol index); finite alphabets give the minimum cluster point.
    Symbol 0 (ratios identically 1) is excluded.
    """
    best = None
    for _, cls in vs.infinite_classes():
        v = cls.template.liminf_ratios()
        if best is None or v < best:
            best = v
    if best is None:
        raise SpecError("no infinite class")
    return best


# ---------------------------------------------------------------------------
# the two-point view

@dataclass(frozen=True)
class LambdaGroup:
    """One cluster value of the lambda sequence with its index classes."""

    limit: Num
    classes: tuple            # class labels
    deviations: tuple         # one Deviation per class, comparable to the
                              # multiplicative deviation of lambda_n from the limit

    def to_dict(self):
        return {"limit": format_scalar(self.limit),
                "classes": list(self.classes),
                "deviations": [d.describe() for d in self.deviations]}


@dataclass(frozen=True)
class LambdaReport:
    clusters: ClusterReport
    groups: tuple
    ignored_prefix: int

    def limits(self):
        return tuple(g.limit for g in self.groups)

    def to_dict(self):
        return {"clusters": self.clusters.to_dict(),
                "groups": [g.to_dict() for g in self.groups],
                "ignored_prefix": self.ignored_prefix}


def _two_point_limit_and_deviation(tpl) -> tuple:
    if isinstance(tpl, TwoPoint):
        return tpl.lam_limit(), tpl.deviation
    if isinstance(tpl, ExplicitWeights) and len(tpl.weights) == 2:
        return _div(tpl.weights[1], tpl.weights[0]), ZERO_DEVIATION
    if isinstance(tpl, Perturbed) and len(tpl.limit) == 2:
        return _div(tpl.limit[1], tpl.limit[0]), tpl.deviation
    raise NotTwoPoint(f"template {tpl.describe()} is not two-point")


def lambda_clusters(vs: ValidatedScheme) -> LambdaReport:
    """Cluster values of lambda_n = mu_n(1)/mu_n(0) with the class partition.

    Requires every infinite class to be two-point.  Prefix coordinates
    and finite classes are finitely many and cannot create cluster
    values; they are ignored and counted in ``ignored_prefix``.
    """
    ignored = len(vs.prefix)
    groups = {}
    labels = vs.class_labels()
    raw = []
    for k, cls in enumerate(vs.classes):
        if not cls.indices.infinite:
            ignored += len(cls.indices.members)
            continue
        limit, dev = _two_point_limit_and_deviation(cls.template)
        raw.append((limit, labels[k], True))
        key = None
        for existing in groups:
            same = (existing == limit) if vs.mode == RATIONAL \
                else abs(float(existing) - float(limit)) <= FINITE_CLUSTER_TOL
            if same:
                key = existing
                break
        if key is None:
            groups[limit] = ([labels[k]], [dev])
        else:
            groups[key][0].append(labels[k])
            groups[key][1].append(dev)
    points = _merge_points(raw, vs.mode)
    liminf = min((p.value for p in points), default=None)
    report = ClusterReport(points, liminf,
                           contains_zero=any(p.value <= ZERO_FLAG_TOL for p in points),
                           note="cluster values of the lambda sequence")
    out = tuple(LambdaGroup(limit, tuple(cs), tuple(ds))
                for limit, (cs, ds) in sorted(groups.items(), key=lambda t: float(t[0])))
    return LambdaReport(report, out, ignored)
