"""Concrete-valuation oracle and counting formulas.

Valuations are dicts of :class:`fractions.Fraction`.  Since a single
valuation cannot tell in which order unbounded clocks crossed their maximum
constant, that order travels alongside as a tag per unbounded clock:
smaller tags crossed earlier, equal tags crossed together.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .kinematics import immediate_delay_successor, ordered_partitions
from .model import ClockConstraint
from .region import Region


class OracleError(ValueError):
    pass


def _loc(location) -> tuple:
    return (location,) if isinstance(location, str) else tuple(location)


def abstract(valuation: Mapping[str, Fraction], location, cmax: Mapping[str, int],
             tags: Optional[Mapping[str, object]] = None) -> Region:
    """The region holding ``valuation``; ``tags`` orders the unbounded clocks."""
    h, unit = {}, []
    fracs = {}
    unbounded = []
    for c, v in valuation.items():
        v = Fraction(v)
        if v < 0:
            raise OracleError(f"negative clock value {c}={v}")
        if v > cmax[c]:
            h[c] = cmax[c]
            unbounded.append(c)
            continue
        h[c] = math.floor(v)
        f = v - h[c]
        if f == 0:
            unit.append(c)
        else:
            fracs.setdefault(f, []).append(c)
    if len(unbounded) >= 2 and (tags is None or any(c not in tags for c in unbounded)):
        raise OracleError("an unbounding-order tag is needed for every unbounded clock")
    groups = {}
    for c in unbounded:
        groups.setdefault(tags[c] if tags and c in tags else 0, []).append(c)
    unb_sets = [groups[t] for t in sorted(groups)]
    frac_sets = [fracs[f] for f in sorted(fracs)]
    return Region(_loc(location), h, cmax, unb_sets, unit, frac_sets)


def sample_with_tags(region: Region) -> tuple:
    """A representative valuation of ``region`` and its unbounding tags."""
    r = region.r
    val, tags = {}, {}
    for c in region.unit:
        val[c] = Fraction(region.h[c])
    for i, s in enumerate(region.fractional, start=1):
        for c in s:
            val[c] = region.h[c] + Fraction(i, r + 1)
    for k, s in enumerate(region.unbounded, start=1):
        for c in s:
            val[c] = Fraction(region.cmax[c] + k)
            tags[c] = k
    return val, tags


def sample(region: Region) -> dict:
    return sample_with_tags(region)[0]


def all_regions(location, cmax: Mapping[str, int]) -> list:
    """Every valid region over the given clocks at one location."""
    clocks = sorted(cmax)
    res = []
    for status in itertools.product(("unit", "frac", "unb"), repeat=len(clocks)):
        unb = [c for c, s in zip(clocks, status) if s == "unb"]
        frac = [c for c, s in zip(clocks, status) if s == "frac"]
        unit = [c for c, s in zip(clocks, status) if s == "unit"]
        if any(cmax[c] == 0 for c in frac):
            continue
        ranges = [range(cmax[c] + 1) for c in unit] + [range(cmax[c]) for c in frac]
        for hs in itertools.product(*ranges):
            h = dict(zip(unit + frac, hs))
            h.update({c: cmax[c] for c in unb})
            for up in ordered_partitions(unb):
                for fp in ordered_partitions(frac):
                    res.append(Region(_loc(location), h, cmax, up, unit, fp))
    return sorted(set(res))


def grid_valuations(cmax: Mapping[str, int], denominator: int) -> Iterable[dict]:
    """Valuations on a grid of step ``1/denominator`` up to ``c_m + 1``."""
    clocks = sorted(cmax)
    axes = [[Fraction(j, denominator) for j in range((cmax[c] + 1) * denominator + 1)]
            for c in clocks]
    for point in itertools.product(*axes):
        yield dict(zip(clocks, point))


def tag_choices(valuation: Mapping[str, Fraction], cmax: Mapping[str, int]) -> list:
    """Every way to order the unbounded clocks of ``valuation``."""
    unb = sorted(c for c, v in valuation.items() if v > cmax[c])
    out = []
    for blocks in ordered_partitions(unb):
        out.append({c: k for k, block in enumerate(blocks) for c in block})
    return out


# ---------------------------------------------------------------------------
# time elapse

def delay_sweep(region: Region) -> list:
    """Regions crossed while letting time pass from a sample of ``region``.

    Stops once every clock is unbounded (or right away for a region with no
    bounded clocks).
    """
    val, tags = sample_with_tags(region)
    cmax = region.cmax
    bounded = [c for c in val if val[c] <= cmax[c]]
    events = set()
    for c in bounded:
        for k in range(math.ceil(val[c]), cmax[c] + 1):
            events.add(k - val[c])
    points = sorted(events | {Fraction(0)})
    probes = []
    for i, t in enumerate(points):
        probes.append(t)
        nxt = points[i + 1] if i + 1 < len(points) else t + 1
        probes.append((t + nxt) / 2)
    chain = []
    for d in probes:
        now = {c: v + d for c, v in val.items()}
        now_tags = {c: (0, tags[c]) for c in tags}
        for c in bounded:
            if now[c] > cmax[c]:
                now_tags[c] = (1, cmax[c] - val[c])
        reg = abstract(now, region.location, cmax, now_tags)
        if not chain or chain[-1] != reg:
            chain.append(reg)
    return chain


def successor_chain(region: Region) -> list:
    chain = [region]
    while True:
        nxt = immediate_delay_successor(chain[-1])
        if nxt is None:
            return chain
        chain.append(nxt)


# ---------------------------------------------------------------------------
# concrete replay of a forward witness

class Replay:
    """Concrete run that follows a forward witness step by step.

    Delays are chosen so that each step lands in the next witness region;
    a mismatch raises :class:`OracleError`.  After :meth:`run`, ``times``
    holds the global time at each step and ``values`` the valuation right
    after it.
    """

    def __init__(self, cmax: Mapping[str, int]):
        self.cmax = dict(cmax)
        self.val = {c: Fraction(0) for c in cmax}
        self.tags = {}
        self.now = Fraction(0)
        self.times = []
        self.values = []

    def _abstract(self, location) -> Region:
        return abstract(self.val, location, self.cmax, self.tags)

    def _delay_to(self, target: Region):
        bounded = [c for c, v in self.val.items() if v <= self.cmax[c]]
        if not bounded:
            raise OracleError("no delay possible once every clock is unbounded")
        fr = {c: self.val[c] - math.floor(self.val[c]) for c in bounded}
        if any(f == 0 for f in fr.values()):
            # leave the unit: go halfway to the next integer crossing
            gap = min(1 - f for f in fr.values() if f > 0) if any(fr.values()) else Fraction(1)
            d = gap / 2
        else:
            d = 1 - max(fr.values())
        self.now += d
        for c in self.val:
            before = self.val[c]
            self.val[c] = before + d
            if before <= self.cmax[c] < self.val[c]:
                self.tags[c] = self.now
        got = self._abstract(target.location)
        if got != target:
            raise OracleError(f"delay replay reached {got}, witness says {target}")

    def _jump_to(self, target: Region):
        for c in self.val:
            if target.is_exact_zero(c):
                self.val[c] = Fraction(0)
                self.tags.pop(c, None)
        got = self._abstract(target.location)
        if got != target:
            raise OracleError(f"discrete replay reached {got}, witness says {target}")

    def run(self, steps: Sequence[tuple]) -> "Replay":
        """``steps`` is a list of ``(label, region)``; the first is the start."""
        first = steps[0][1]
        if self._abstract(first.location) != first:
            raise OracleError("witness does not start at the zero valuation")
        self.times.append(self.now)
        self.values.append(dict(self.val))
        for label, region in steps[1:]:
            if label.startswith("delay"):
                self._delay_to(region)
            else:
                self._jump_to(region)
            self.times.append(self.now)
            self.values.append(dict(self.val))
        return self


# ---------------------------------------------------------------------------
# discrete predecessors by brute force

def brute_discrete_predecessors(region: Region, transition, cmax: Mapping[str, int],
                                denominator: Optional[int] = None) -> list:
    """``{ alpha(v) : v |= guard and v[Y := 0] lies in region }`` over a grid."""
    n = len(cmax)
    den = denominator or (n + 1)
    resets = set(transition.resets)
    guard = transition.guard.clock_atoms
    res = set()
    for v in grid_valuations(cmax, den):
        if not all(a.holds(v[a.clock]) for a in guard):
            continue
        for tags in tag_choices(v, cmax):
            after = {c: (Fraction(0) if c in resets else x) for c, x in v.items()}
            after_tags = {c: t for c, t in tags.items() if c not in resets}
            if abstract(after, region.location, cmax, after_tags) != region:
                continue
            res.add(abstract(v, (transition.source,), cmax, tags))
    return sorted(res)


def guard_holds_on_region(region: Region, atom: ClockConstraint) -> bool:
    """Decide ``atom`` on the sample of ``region`` (used to check the decision table)."""
    return atom.holds(sample(region)[atom.clock])


# ---------------------------------------------------------------------------
# counting

@lru_cache(maxsize=None)
def fubini(n: int) -> int:
    """Number of ordered set partitions of an ``n``-set."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1
    return sum(math.comb(n, i) * fubini(n - i) for i in range(1, n + 1))


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind via the alternating sum."""
    if n < 0 or k < 0:
        raise ValueError("arguments must be non-negative")
    total = sum((-1) ** d * math.comb(k, d) * (k - d) ** n for d in range(k + 1))
    return total // math.factorial(k)


def lemma1_bound(n: int, cm: int, literal: bool = False) -> int:
    """Predecessor count for one all-resetting transition with ``n`` clocks.

    The fractional clocks are chosen among the ``n - u`` bounded ones,
    ``C(n-u, n-u-i)``, which makes the count exact.  ``literal=True`` picks
    them among all ``n`` clocks, ``C(n, n-u-i)``: still an upper bound, but
    a looser one once ``n >= 2``.
    """
    if n < 1 or cm < 1:
        raise ValueError("need n >= 1 and c_m >= 1")
    total = 0
    for u in range(n + 1):
        bounded = 0
        for i in range(n - u + 1):
            m = n - u - i
            pick = math.comb(n if literal else n - u, m)
            ordered = sum(math.factorial(k) * stirling2(m, k) for k in range(m + 1))
            bounded += (cm + 1) ** i * cm ** m * pick * ordered
        unb = math.comb(n, u) * sum(math.factorial(w) * stirling2(u, w) for w in range(u + 1))
        total += bounded * unb
    return total
