"""Exact finite-block cocycle arithmetic and its empirical probes.

The density ratio of changing a finite word x to y over a block of
coordinates is the product of per-coordinate weight ratios
``D(x -> y) = prod mu_k(y_k) / mu_k(x_k)`` (this orientation, y over x,
is the value compared against search targets throughout).  Everything
here works with true weights: truncating an infinite alphabet keeps the
surviving ratios exact and can only remove candidate words, never
create spurious ones.

Contents: a meet-in-the-middle witness search over achievable log
values, a brute-force enumeration oracle for it, witness composition
over disjoint blocks, seeded Monte Carlo sampling of log-cocycle
increments, and a real-gcd lattice detector for the sampled values.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .exact import Num, format_scalar, is_exact
from .scheme import SpecError, ValidatedScheme, truncate_alphabet

DEFAULT_STATE_CAP = 10 ** 8
ORACLE_STATE_CAP = 10 ** 7
DEFAULT_DELTA = Fraction(1, 1000)
LATTICE_TOL = 1e-6

# 64-bit default seed: the ASCII bytes of "B3RN0U11"
DEFAULT_SEED = int.from_bytes(b"B3RN0U11", "big")

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class WordLengthMismatch(SpecError):
    pass


class SymbolOutOfRange(SpecError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


class BlockTooLarge(RuntimeError):
    pass


class OverlappingBlocks(SpecError):
    pass


class InsufficientSamples(ValueError):
    pass


# ---------------------------------------------------------------------------
# blocks and the cocycle

@dataclass(frozen=True)
class Block:
    """Finitely many coordinates with true (unrenormalized) weights."""

    coordinates: tuple          # strictly increasing coordinate indices
    alphabets: tuple            # per coordinate: tuple of true weights
    retained: tuple             # per coordinate: retained mass (1 when full)
    delta: Num                  # truncation budget used

    def __len__(self):
        return len(self.coordinates)

    def sizes(self):
        return tuple(len(a) for a in self.alphabets)


def block_for(vs: ValidatedScheme, start: int, length: int,
              delta: Num = DEFAULT_DELTA) -> Block:
    """The block of coordinates start+1 .. start+length."""
    if length < 1:
        raise SpecError("block length must be >= 1")
    if start < 0:
        raise SpecError("block start must be >= 0")
    coords = tuple(range(start + 1, start + length + 1))
    alphabets = []
    retained = []
    for n in coords:
        t = truncate_alphabet(vs, n, delta)
        alphabets.append(t.weights)
        retained.append(t.retained_mass)
    return Block(coords, tuple(alphabets), tuple(retained), delta)


def _check_words(block: Block, x: Sequence[int], y: Sequence[int]):
    if len(x) != len(block) or len(y) != len(block):
        raise WordLengthMismatch(
            f"words must have length {len(block)}, got {len(x)} and {len(y)}")
    for k, (a, b) in enumerate(zip(x, y)):
        size = len(block.alphabets[k])
        if not (0 <= a < size) or not (0 <= b < size):
            raise SymbolOutOfRange(
                f"symbol out of range at block position {k} (alphabet size {size})")


def cocycle_ratio(block: Block, x: Sequence[int], y: Sequence[int]) -> Num:
    """D(x -> y) = prod over the block of mu_k(y_k)/mu_k(x_k).

    Exact (a Fraction) whenever the weights are rational.
    """
    _check_words(block, x, y)
    num = Fraction(1) if all(is_exact(w) for a in block.alphabets for w in a) else 1.0
    for k in range(len(block)):
        w = block.alphabets[k]
        num = num * w[y[k]] / w[x[k]]
    return num


def log_cocycle(block: Block, x: Sequence[int], y: Sequence[int]) -> float:
    """log D(x -> y) as a float; exactness lives in :func:`cocycle_ratio`."""
    _check_words(block, x, y)
    total = 0.0
    for k in range(len(block)):
        w = block.alphabets[k]
        total += _log_of(w[y[k]]) - _log_of(w[x[k]])
    return total


def _log_of(w: Num) -> float:
    if is_exact(w):
        f = Fraction(w)
        return math.log(f.numerator) - math.log(f.denominator)
    return math.log(w)


# ---------------------------------------------------------------------------
# witnesses

@dataclass(frozen=True)
class Witness:
    """A word pair certifying an achievable cocycle value near a target."""

    coordinates: tuple
    x: tuple
    y: tuple
    value: Num            # exact D(x -> y)
    target: Num
    eps: Num
    delta: Num            # truncation budget under which it was found

    def __post_init__(self):
        if not abs(self.value - self.target) < self.eps:
            raise SpecError("witness does not certify its target within eps")

    def log_value(self) -> float:
        if is_exact(self.value):
            f = Fraction(self.value)
            return math.log(f.numerator) - math.log(f.denominator)
        return math.log(self.value)

    def to_dict(self):
        return {"coordinates": list(self.coordinates),
                "x": list(self.x), "y": list(self.y),
                "value": format_scalar(self.value),
                "target": format_scalar(self.target),
                "eps": format_scalar(self.eps),
                "delta": format_scalar(self.delta)}


def replay_witness(vs: ValidatedScheme, w: Witness) -> Num:
    """Recompute the witness value from the spec (must equal w.value)."""
    alphabets = []
    retained = []
    for n in w.coordinates:
        t = truncate_alphabet(vs, n, w.delta)
        alphabets.append(t.weights)
        retained.append(t.retained_mass)
    block = Block(tuple(w.coordinates), tuple(alphabets), tuple(retained), w.delta)
    return cocycle_ratio(block, w.x, w.y)


# ---------------------------------------------------------------------------
# achievable-value enumeration

def _ratio_moves(weights) -> list:
    """Distinct per-coordinate ratios w[j]/w[i] with one representative each."""
    out = {}
    for i, wi in enumerate(weights):
        for j, wj in enumerate(weights):
            r = wj / wi if not is_exact(wi) else Fraction(wj) / Fraction(wi)
            if r not in out:
                out[r] = (i, j)
    return sorted(out.items(), key=lambda kv: float(kv[0]))


def _product_values(alphabets, state_cap: int, counter: list) -> dict:
    """All achievable block values with one representative word pair each.

    Deduplicates by exact value after every coordinate; ``counter``
    accumulates the number of enumerated states against the cap.
    """
    values = {_one_for(alphabets): ((), ())}
    for weights in alphabets:
        moves = _ratio_moves(weights)
        counter[0] += len(values) * len(moves)
        if counter[0] > state_cap:
            raise SearchBudgetExceeded(
                f"enumeration exceeded the state cap of {state_cap}")
        nxt = {}
        for value, (xw, yw) in values.items():
            for r, (i, j) in moves:
                v = value * r
                if v not in nxt:
                    nxt[v] = (xw + (i,), yw + (j,))
        values = nxt
    return values


def _one_for(alphabets) -> Num:
    exact = all(is_exact(w) for a in alphabets for w in a)
    return Fraction(1) if exact else 1.0


def _half_values(vs: ValidatedScheme, coords, delta, state_cap, counter):
    key = ("half", coords, str(delta))
    hit = vs._cache.get(key)
    if hit is not None:
        return hit
    alphabets = []
    for n in coords:
        alphabets.append(truncate_alphabet(vs, n, delta).weights)
    values = _product_values(alphabets, state_cap, counter)
    items = sorted(values.items(), key=lambda kv: kv[0])
    out = ([kv[0] for kv in items], [kv[1] for kv in items])
    vs._cache[key] = out
    return out


def witness_search(vs: ValidatedScheme, target: Num, eps: Num,
                   start: int = 0, max_block: int = 8,
                   delta: Num = DEFAULT_DELTA,
                   state_cap: int = DEFAULT_STATE_CAP) -> Optional[Witness]:
    """Search for a word pair with |D(x->y) - target| < eps.

    Meet in the middle over log space: achievable half-block values are
    enumerated exactly (reusable across targets), one half sorted and
    the complementary interval binary-searched.  Returns a witness on
    the smallest block length admitting one, or None.  None is a
    bounded-scope statement over (max_block, delta, state_cap), not a
    proof that the target is outside the achievable closure.
    """
    if not target > 0:
        raise SpecError("target must be positive")
    if not (0 < eps < target):
        raise SpecError("eps must lie in (0, target)")
    counter = [0]
    for length in range(1, max_block + 1):
        coords = tuple(range(start + 1, start + length + 1))
        mid = (length + 1) // 2
        left_vals, left_words = _half_values(vs, coords[:mid], delta, state_cap, counter)
        right_vals, right_words = _half_values(vs, coords[mid:], delta, state_cap, counter)
        best = None
        for lv, lw in zip(left_vals, left_words):
            # nearest achievable completion to target/lv, checked exactly
            idx = bisect_right(right_vals, target / lv)
            for j in (idx - 1, idx):
                if 0 <= j < len(right_vals):
                    value = lv * right_vals[j]
                    dist = abs(value - target)
                    if dist < eps and (best is None or dist < best[0]):
                        best = (dist, value, lw, right_words[j])
        if best is not None:
            _, value, lw, rw = best
            return Witness(coords, lw[0] + rw[0], lw[1] + rw[1],
                           value, target, eps, delta)
    return None


def witness_search_extremes(vs: ValidatedScheme, eps: Num,
                            start: int = 0, max_block: int = 8,
                            delta: Num = DEFAULT_DELTA,
                            state_cap: int = DEFAULT_STATE_CAP) -> Optional[Witness]:
    """Search for a word pair x != y with min(|D - 1|, |D|) < eps.

    The endpoint-collapse form of the witness search: instead of a
    target ratio it hunts for achievable values next to 0 or next to 1
    through a genuinely changed word.  The returned witness carries
    target 0 or 1, whichever band was hit.  None is scope-bounded, as
    in :func:`witness_search`.
    """
    if not (0 < eps < 1):
        raise SpecError("eps must lie in (0, 1)")
    counter = [0]
    for length in range(1, max_block + 1):
        coords = tuple(range(start + 1, start + length + 1))
        alphabets = [truncate_alphabet(vs, n, delta).weights for n in coords]
        values, alt_one = _product_values_alt(alphabets, state_cap, counter)
        best = None
        for v, (xw, yw) in values.items():
            if xw == yw:
                if alt_one is None:
                    continue
                xw, yw = alt_one
            score = min(abs(v - 1), abs(v))
            if score < eps and (best is None or score < best[0]):
                near_one = abs(v - 1) <= abs(v)
                if is_exact(v):
                    target = Fraction(1) if near_one else Fraction(0)
                else:
                    target = 1.0 if near_one else 0.0
                best = (score, v, xw, yw, target)
        if best is not None:
            _, v, xw, yw, target = best
            return Witness(coords, xw, yw, v, target, eps, delta)
    return None


def _product_values_alt(alphabets, state_cap: int, counter: list):
    """Like :func:`_product_values`, also tracking a representative of the
    value 1 with x != y when one exists (the plain dict always keeps the
    identity pair for 1, which the endpoint search must not use)."""
    one = _one_for(alphabets)
    values = {one: ((), ())}
    alt = None
    for weights in alphabets:
        moves = _ratio_moves(weights)
        counter[0] += len(values) * len(moves)
        if counter[0] > state_cap:
            raise SearchBudgetExceeded(
                f"enumeration exceeded the state cap of {state_cap}")
        nxt = {}
        new_alt = None
        if alt is not None:
            new_alt = (alt[0] + (0,), alt[1] + (0,))
        for value, (xw, yw) in values.items():
            for r, (i, j) in moves:
                v = value * r
                rep = (xw + (i,), yw + (j,))
                if v not in nxt:
                    nxt[v] = rep
                if new_alt is None and v == one and rep[0] != rep[1]:
                    new_alt = rep
        values = nxt
        alt = new_alt
    return values, alt


def brute_force_block(vs: ValidatedScheme, block: Block, targets: Iterable[Num],
                      state_cap: int = ORACLE_STATE_CAP) -> list:
    """Exact minimum of |target - D(x,y)| over all word pairs, per target.

    Serves as the independence oracle for :func:`witness_search`: a
    direct product enumeration of every achievable value (deduplicated
    exactly), then a linear scan.  Raises BlockTooLarge beyond the
    state cap.
    """
    counter = [0]
    try:
        values = _product_values(block.alphabets, state_cap, counter)
    except SearchBudgetExceeded as exc:
        raise BlockTooLarge(str(exc)) from None
    out = []
    for t in targets:
        best = None
        best_pair = None
        for v, pair in values.items():
            d = abs(t - v)
            if best is None or d < best:
                best, best_pair = d, pair
        out.append({"target": t, "distance": best,
                    "x": best_pair[0], "y": best_pair[1]})
    return out


def compose_witnesses(w1: Witness, w2: Witness) -> Witness:
    """Concatenate witnesses on disjoint blocks: the product group law.

    The composed witness certifies target r1*r2 with tolerance
    eps' = eps1*r2 + eps2*r1 + eps1*eps2.
    """
    if set(w1.coordinates) & set(w2.coordinates):
        raise OverlappingBlocks("witnesses share coordinates")
    merged = sorted(zip(w1.coordinates, w1.x, w1.y))
    merged += sorted(zip(w2.coordinates, w2.x, w2.y))
    merged.sort()
    coords = tuple(m[0] for m in merged)
    x = tuple(m[1] for m in merged)
    y = tuple(m[2] for m in merged)
    if w1.delta != w2.delta:
        raise SpecError("witnesses were found under different truncation budgets")
    eps = w1.eps * abs(w2.target) + w2.eps * abs(w1.target) + w1.eps * w2.eps
    return Witness(coords, x, y, w1.value * w2.value,
                   w1.target * w2.target, eps, w1.delta)


# ---------------------------------------------------------------------------
# seeded Monte Carlo sampling

@dataclass(frozen=True)
class CocycleSampleSet:
    seed: int
    start: int
    window: int
    delta: Num
    coordinates: tuple
    log_values: tuple            # floats
    ratios: Optional[tuple]      # exact Fractions in rational mode, else None
    moves: tuple                 # (x word, y word) per sample

    def export_lines(self):
        """Records ``index, log_D, D_num, D_den`` (num/den in rational mode)."""
        lines = []
        for i, s in enumerate(self.log_values):
            if self.ratios is not None:
                f = self.ratios[i]
                lines.append(f"{i}, {s:.17g}, {f.numerator}, {f.denominator}")
            else:
                lines.append(f"{i}, {s:.17g}")
        return lines


def _derived_seed(seed: int, stream: int) -> int:
    return (seed ^ ((stream + 1) * _GOLDEN)) & _MASK64


def _cumulative(weights) -> list:
    out = []
    acc = 0
    for w in weights:
        acc = acc + w
        out.append(acc)
    return out


def _draw_symbol(rng: random.Random, cums, retained) -> int:
    # smallest i with u*retained < cums[i], by binary search
    u = rng.random()
    if is_exact(retained):
        target = Fraction(u) * retained
    else:
        target = u * retained
    i = bisect_right(cums, target)
    return min(i, len(cums) - 1)


def mc_sample_cocycle(vs: ValidatedScheme, seed: int = DEFAULT_SEED,
                      n_samples: int = 1000, window: int = 20,
                      start: int = 0, delta: Num = DEFAULT_DELTA) -> CocycleSampleSet:
    """Sample log D between independent product-measure draws on a window.

    x-words and y-words are drawn independently from the (truncated,
    renormalized) product measure; the recorded ratio uses true weights
    and is exact in rational mode.  Fully deterministic given the seed:
    sample i uses a seed derived from (seed, i), so the stream does not
    depend on evaluation order or parallelism.
    """
    if n_samples < 1:
        raise SpecError("n_samples must be >= 1")
    block = block_for(vs, start, window, delta)
    exact = all(is_exact(w) for a in block.alphabets for w in a)
    cums = [_cumulative(a) for a in block.alphabets]
    logs = []
    ratios = [] if exact else None
    moves = []
    for i in range(n_samples):
        rng = random.Random(_derived_seed(seed, i))
        x = tuple(_draw_symbol(rng, cums[k], block.retained[k])
                  for k in range(window))
        y = tuple(_draw_symbol(rng, cums[k], block.retained[k])
                  for k in range(window))
        if exact:
            # log of the reduced exact ratio: 0.0 exactly when D = 1
            d = cocycle_ratio(block, x, y)
            ratios.append(d)
            logs.append(_log_of(d))
        else:
            logs.append(log_cocycle(block, x, y))
        moves.append((x, y))
    return CocycleSampleSet(seed, start, window, delta, block.coordinates,
                            tuple(logs), None if ratios is None else tuple(ratios),
                            tuple(moves))


# ---------------------------------------------------------------------------
# lattice detection

ALL_ZERO = "all_zero"
LATTICE = "lattice"
NO_LATTICE = "no_lattice"


@dataclass(frozen=True)
class LatticeVerdict:
    kind: str
    period: Optional[float] = None

    def to_dict(self):
        return {"kind": self.kind, "period": self.period}


def _real_gcd(a: float, b: float, tol: float) -> float:
    a, b = abs(a), abs(b)
    if a < b:
        a, b = b, a
    steps = 0
    while b > tol and steps < 200:
        a, b = b, abs(a - b * round(a / b))
        steps += 1
    return a if b <= tol else b


def lattice_detect(samples: Union[CocycleSampleSet, Iterable[float]],
                   tol: float = LATTICE_TOL) -> LatticeVerdict:
    """Classify sampled log-cocycle values as {0}, c*Z, or non-lattice.

    The candidate period is the real gcd of the nonzero samples by an
    iterated-remainder cascade with cutoff ``tol``.  A lattice verdict
    requires c > tol and every sample within min(tol, c/1000) of c*Z;
    the relative part of that bound rejects the near-tol pseudo-periods
    that the cascade produces on incommensurable inputs (where, by
    construction, the plain absolute bound would always pass).  Needs
    two nonzero samples to discriminate lattice from non-lattice.
    """
    values = list(samples.log_values) if isinstance(samples, CocycleSampleSet) \
        else [float(s) for s in samples]
    nonzero = [abs(s) for s in values if abs(s) > tol]
    if not nonzero:
        return LatticeVerdict(ALL_ZERO)
    if len(nonzero) < 2:
        raise InsufficientSamples(
            "need at least two nonzero samples to discriminate lattice from "
            "non-lattice")
    g = nonzero[0]
    for s in nonzero[1:]:
        g = _real_gcd(g, s, tol)
        if g <= tol:
            return LatticeVerdict(NO_LATTICE)
    bound = min(tol, g / 1000.0)
    for s in values:
        if abs(s - g * round(s / g)) > bound:
            return LatticeVerdict(NO_LATTICE)
    return LatticeVerdict(LATTICE, period=g)


# ---------------------------------------------------------------------------
# empirical ratio-set estimate

ZERO_BAND = 0.05
FAR_BAND = 5.0


def estimate_ratio_set(vs: ValidatedScheme, seed: int = DEFAULT_SEED,
                       n_samples: int = 1000, window: int = 20,
                       start: int = 1000, delta: Num = DEFAULT_DELTA,
                       tol: float = LATTICE_TOL, grid_eps: float = 1e-3,
                       grid_depth: int = 3, search_block: int = 8) -> dict:
    """Empirical subtype estimate from sampling plus witness probes.

    Heuristic, reported side by side with the analytic verdict and never
    overriding it.  Labels: ``II-like`` when every fiber increment is
    zero (consistent with type I or II), ``III_0-like`` when nonzero
    increments exist but all have magnitude >= FAR_BAND (achievable
    ratios collapse toward 0 and 1), ``III_lambda-like`` on a detected
    lattice, ``III_1-like`` otherwise.
    """
    samples = mc_sample_cocycle(vs, seed=seed, n_samples=n_samples,
                                window=window, start=start, delta=delta)
    values = samples.log_values
    significant = [abs(s) for s in values if abs(s) > ZERO_BAND]
    evidence = {
        "n_samples": n_samples, "window": window, "start": start,
        "seed": seed, "zero_band": ZERO_BAND, "far_band": FAR_BAND,
        "significant": len(significant),
    }
    label = None
    lam = None
    lattice = None
    if not significant:
        label = "II-like"
        if all(abs(s) <= tol for s in values):
            lattice = LatticeVerdict(ALL_ZERO)
        evidence["note"] = ("all fiber increments vanish at this scope; "
                            "consistent with type I or type II")
    elif min(significant) >= FAR_BAND:
        label = "III_0-like"
        evidence["note"] = ("every substantial increment has magnitude >= far_band; "
                            "achievable ratios collapse toward 0 and 1")
    else:
        try:
            lattice = lattice_detect(samples, tol)
        except InsufficientSamples:
            lattice = None
        if lattice is not None and lattice.kind == LATTICE:
            label = "III_lambda-like"
            lam = math.exp(-lattice.period)
        else:
            label = "III_1-like"
    out = {
        "label": label,
        "lambda": lam,
        "lattice": None if lattice is None else lattice.to_dict(),
        "evidence": evidence,
        "witness_grid": [],
        "scope": {"max_block": search_block, "delta": format_scalar(delta),
                  "note": "a missing witness is a bounded-scope statement"},
    }
    if label in ("III_lambda-like", "III_1-like"):
        c = lattice.period if (lattice is not None and lattice.kind == LATTICE) \
            else math.log(2.0)
        for k in range(1, grid_depth + 1):
            target = math.exp(-c * k)
            eps = min(grid_eps, target / 2)
            try:
                w = witness_search(vs, target, eps, start=start,
                                   max_block=search_block, delta=delta)
            except SearchBudgetExceeded:
                w = None
            out["witness_grid"].append({
                "target": target, "eps": eps,
                "found": w is not None,
                "block_length": None if w is None else len(w.coordinates)})
    return out
