"""Closed multiplicative group generated by finitely many reals in (0,1].

A finite point set generates a closed multiplicative group that is
trivial {1}, cyclic {lambda**k}, or dense in (0,infinity).  Which one
is decided by pairwise log-commensurability.

Two decision paths exist:

* exact (rational points): a and b are commensurable iff their prime
  valuation vectors are parallel, because the logs of distinct primes
  are linearly independent over the rationals.  This decides the
  question outright and the certificate confidence is ``exact``.
* float path: continued-fraction convergents of log(a)/log(b) up to a
  denominator bound Q, each candidate verified by checking
  a**q = b**p to 1e-12 relative error.  A miss only certifies
  incommensurability *up to Q*, so the confidence is
  ``bounded_denominator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import sympy

from .exact import Num, format_scalar, is_exact

DEFAULT_MAX_DENOMINATOR = 10 ** 6

EXACT = "exact"
BOUNDED = "bounded_denominator"

TRIVIAL = "trivial"
CYCLIC = "cyclic"
DENSE = "dense"


class DomainError(ValueError):
    pass


class ZeroInSet(ValueError):
    """0 must be stripped and handled by the caller."""


@dataclass(frozen=True)
class GroupStructure:
    kind: str                      # trivial | cyclic | dense
    generator: Optional[Num]       # cyclic generator in (0,1)
    confidence: str                # exact | bounded_denominator
    max_denominator: Optional[int]
    evidence: tuple

    def to_dict(self):
        return {"kind": self.kind,
                "generator": None if self.generator is None else format_scalar(self.generator),
                "confidence": self.confidence,
                "max_denominator": self.max_denominator,
                "evidence": list(self.evidence)}


# ---------------------------------------------------------------------------
# prime valuation vectors (exact path)

def _valuation_vector(x: Fraction) -> dict:
    """Exponent of every prime in x = prod p**e, as a dict prime -> e."""
    vec = {}
    for p, e in sympy.factorint(x.numerator).items():
        vec[int(p)] = vec.get(int(p), 0) + e
    for p, e in sympy.factorint(x.denominator).items():
        vec[int(p)] = vec.get(int(p), 0) - e
    return {p: e for p, e in vec.items() if e != 0}


def _parallel_ratio(va: dict, vb: dict) -> Optional[Fraction]:
    """t with va = t*vb when the vectors are parallel, else None."""
    if set(va) != set(vb):
        return None
    p0 = next(iter(vb))
    t = Fraction(va[p0], vb[p0])
    for p, e in vb.items():
        if va[p] * t.denominator != e * t.numerator:
            return None
    return t


def _vector_content(vec: dict) -> int:
    g = 0
    for e in vec.values():
        g = math.gcd(g, abs(e))
    return g


def _vector_to_value(vec: dict) -> Fraction:
    num = 1
    den = 1
    for p, e in vec.items():
        if e > 0:
            num *= p ** e
        else:
            den *= p ** (-e)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# continued fractions (float path, also the test-side falsification oracle)

def convergents(x: float, max_denominator: int):
    """Continued-fraction convergents (p, q) of x with q <= max_denominator."""
    h0, h1 = 1, 0
    k0, k1 = 0, 1
    value = x
    for _ in range(64):
        a = math.floor(value)
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        if k0 > max_denominator:
            break
        yield h0, k0
        frac = value - a
        if frac <= 1e-18:
            break
        value = 1.0 / frac


def _verify_power_equation(a: Num, b: Num, p: int, q: int, rel_tol: float = 1e-12) -> bool:
    """Check a**q = b**p, exactly for rationals, else to rel_tol."""
    if is_exact(a) and is_exact(b):
        return Fraction(a) ** q == Fraction(b) ** p
    if max(p, q) > 64:
        with mpmath.workdps(60):
            err = q * mpmath.log(a) - p * mpmath.log(b)
            return abs(err) <= rel_tol
    return abs(q * math.log(a) - p * math.log(b)) <= rel_tol


def commensurable(a: Num, b: Num,
                  max_denominator: int = DEFAULT_MAX_DENOMINATOR) -> Optional[tuple]:
    """Coprime (p, q) with log(a)/log(b) = p/q, or None.

    None means "incommensurable up to max_denominator" on the float
    path; on the exact path (both arguments rational) None is a proof
    of incommensurability.  Returned pairs always satisfy a**q = b**p.
    """
    for x in (a, b):
        if not (0 < x < 1):
            raise DomainError(f"commensurable needs arguments in (0,1), got {x}")
    if a == b:
        return (1, 1)
    if is_exact(a) and is_exact(b):
        t = _parallel_ratio(_valuation_vector(Fraction(a)), _valuation_vector(Fraction(b)))
        if t is None:
            return None
        return (t.numerator, t.denominator)
    t = math.log(a) / math.log(b)
    for p, q in convergents(t, max_denominator):
        if p <= 0 or q <= 0:
            continue
        if max(p, q) > max_denominator:
            break
        if _verify_power_equation(a, b, p, q):
            g = math.gcd(p, q)
            return (p // g, q // g)
    return None


# ---------------------------------------------------------------------------
# group structure

def _strip_ones(points):
    out = []
    for x in points:
        if x == 1 or (not is_exact(x) and abs(float(x) - 1.0) <= 1e-12):
            continue
        out.append(x)
    return out


def mult_group(points, max_denominator: int = DEFAULT_MAX_DENOMINATOR) -> GroupStructure:
    """Structure of the closed multiplicative group generated by the points.

    Points must be a finite non-empty subset of (0,1].  A cyclic result
    reports the largest generator in (0,1); exact inputs are decided by
    prime valuation vectors (Euclid on exponents), float inputs by
    iterated continued-fraction reduction.
    """
    pts = list(points)
    if not pts:
        raise DomainError("empty point set")
    if any(x == 0 for x in pts):
        raise ZeroInSet("0 in point set; strip it and handle it separately")
    if any(not (0 < x <= 1) for x in pts):
        raise DomainError("points must lie in (0,1]")
    pts = _strip_ones(pts)
    if not pts:
        return GroupStructure(TRIVIAL, None, EXACT, None,
                              ("all points equal 1",))
    if all(is_exact(x) for x in pts):
        return _mult_group_exact(pts)
    return _mult_group_float([float(x) for x in pts], max_denominator)


def _mult_group_exact(pts) -> GroupStructure:
    vectors = [_valuation_vector(Fraction(x)) for x in pts]
    base = vectors[0]
    for x, vec in zip(pts[1:], vectors[1:]):
        if _parallel_ratio(vec, base) is None:
            return GroupStructure(
                DENSE, None, EXACT, None,
                (f"log {format_scalar(x)} / log {format_scalar(pts[0])} is irrational "
                 "(prime valuation vectors not parallel)",))
    # every vector is an integer multiple of the primitive direction of base
    content = _vector_content(base)
    unit = {p: e // content for p, e in base.items()}
    h = _vector_to_value(unit)
    if h > 1:
        h = 1 / h
        unit = {p: -e for p, e in unit.items()}
    p0 = next(iter(unit))
    exponents = [vec[p0] // unit[p0] for vec in vectors]
    g = 0
    for k in exponents:
        g = math.gcd(g, k)
    lam = h ** g
    for x, k in zip(pts, exponents):
        assert Fraction(x) == h ** k, "exponent reconstruction failed"
    return GroupStructure(
        CYCLIC, lam, EXACT, None,
        (f"common generator {format_scalar(h)} with exponents "
         f"{tuple(exponents)}, gcd {g}",))


def _mult_group_float(pts, max_denominator: int) -> GroupStructure:
    gen = pts[0]
    evidence = []
    for x in pts[1:]:
        pair = commensurable(x, gen, max_denominator)
        if pair is None:
            return GroupStructure(
                DENSE, None, BOUNDED, max_denominator,
                (f"no convergent p/q of log({x})/log({gen}) with denominator <= "
                 f"{max_denominator} satisfies the power equation",))
        p, q = pair
        evidence.append(f"log({x})/log({gen}) = {p}/{q}")
        gen = math.exp(math.log(gen) / q)
    exponents = [round(math.log(x) / math.log(gen)) for x in pts]
    g = 0
    for k in exponents:
        g = math.gcd(g, k)
    lam = math.exp(g * math.log(gen))
    for x, k0 in zip(pts, exponents):
        k = round(math.log(x) / math.log(lam))
        if abs(x - lam ** k) > 1e-9:
            return GroupStructure(
                DENSE, None, BOUNDED, max_denominator,
                (f"generator verification failed for {x}",))
    return GroupStructure(CYCLIC, lam, BOUNDED, max_denominator,
                          tuple(evidence + [f"exponents {tuple(exponents)}, gcd {g}"]))
