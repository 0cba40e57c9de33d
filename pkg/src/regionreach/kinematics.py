"""Successor and predecessor computations on single regions.

All functions are pure: they never mutate their input and return results
sorted by canonical key so that callers see a deterministic order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .model import ClockConstraint, ModelError, TimedAutomaton, satisfies_clock_atoms
from .region import Region


def _sorted_unique(regions: Iterable[Region]) -> list:
    return sorted(set(regions))


# ---------------------------------------------------------------------------
# delay

def immediate_delay_successor(region: Region) -> Optional[Region]:
    """The unique next region reached by letting time elapse, or ``None``.

    Class U regions (and regions with no clocks) have no successor.
    """
    if not region.unit and not region.fractional:
        return None
    h, cmax = region.h, region.cmax
    if region.unit:
        oob = [c for c in region.unit if h[c] == cmax[c]]
        tmp = [c for c in region.unit if h[c] != cmax[c]]
        fractional = ((tmp,) if tmp else ()) + region.fractional
        unbounded = region.unbounded + ((oob,) if oob else ())
        return Region(region.location, h, cmax, unbounded, (), fractional)
    last = region.fractional[-1]
    h2 = dict(h)
    for c in last:
        h2[c] += 1
    return Region(region.location, h2, cmax, region.unbounded, last, region.fractional[:-1])


def find_immediate_delay_predecessors(region: Region) -> list:
    """At most three regions whose immediate delay successor is ``region``.

    A region with a clock at exact zero has no delay predecessor.
    """
    if not region.h or region.has_exact_zero():
        return []
    h, cmax = region.h, region.cmax
    loc = region.location
    if not region.unit and not region.fractional:
        # class U: the most recently unbounded clocks were in the unit
        return [Region(loc, h, cmax, region.unbounded[:-1], region.unbounded[-1], ())]
    if region.unit:
        # class Z or M
        h2 = dict(h)
        for c in region.unit:
            h2[c] -= 1
        return [Region(loc, h2, cmax, region.unbounded, (), region.fractional + (region.unit,))]
    # class P
    first = region.fractional[0]
    res = [Region(loc, h, cmax, region.unbounded, first, region.fractional[1:])]
    if region.unbounded:
        recent = region.unbounded[-1]
        res.append(Region(loc, h, cmax, region.unbounded[:-1], recent, region.fractional))
        res.append(Region(loc, h, cmax, region.unbounded[:-1], recent + first,
                          region.fractional[1:]))
    return _sorted_unique(res)


def period(region: Region) -> int:
    """Length of the structural cycle of a bounded delay-predecessor chain."""
    if region.unbounded or not region.fractional:
        raise ValueError("period needs a fully bounded region with fractional clocks")
    if region.unit:
        return 2 * (region.r + 1)
    return 2 * region.r


def max_period_skips(region: Region) -> int:
    """Largest number of whole periods that can be skipped without creating a zero clock."""
    bound = None
    for c in region.h:
        limit = region.h[c] - 1 if region.status(c) == "unit" else region.h[c]
        bound = limit if bound is None else min(bound, limit)
    return max(bound or 0, 0)


def delay_predecessor_skip(region: Region, n: int) -> Optional[Region]:
    """Region reached after ``n // period`` whole periods of delay predecessors.

    Returns ``None`` when the skip would create a clock at exact zero (or a
    negative integer part); the caller then has to step one by one.
    """
    theta = period(region)
    k = n // theta
    if k == 0:
        return region
    if k > max_period_skips(region):
        return None
    h2 = {c: v - k for c, v in region.h.items()}
    return region.replace(h=h2)


def delay_predecessors(region: Region, n: int) -> list:
    """Regions ``n`` immediate delay-predecessor steps back along a bounded chain.

    Uses period skipping when possible, then single steps; stops early (and
    returns the last region reached) if a clock becomes exactly zero.
    """
    current = region
    if n >= 2 and not region.unbounded and region.fractional:
        skipped = delay_predecessor_skip(region, n)
        if skipped is not None:
            n -= (n // period(region)) * period(region)
            current = skipped
    for _ in range(n):
        preds = find_immediate_delay_predecessors(current)
        if len(preds) != 1:
            break
        current = preds[0]
    return [current]


# ---------------------------------------------------------------------------
# discrete successors

def reset_clocks(region: Region, resets: Iterable[str], location: tuple) -> Region:
    """Move ``resets`` to the unit with value zero and relocate."""
    resets = set(resets)
    if not resets:
        return region.replace(location=location)
    h = dict(region.h)
    for c in resets:
        if c not in h:
            raise ModelError(f"reset of unknown clock {c!r}")
        h[c] = 0
    unbounded = [[c for c in s if c not in resets] for s in region.unbounded]
    fractional = [[c for c in s if c not in resets] for s in region.fractional]
    unit = set(region.unit) | resets
    return Region(location, h, region.cmax, unbounded, unit, fractional)


def discrete_successor(region: Region, transition, automaton: TimedAutomaton,
                       index: int = 0) -> Optional[Region]:
    """Fire ``transition`` of component ``index`` if its clock guard holds."""
    if region.location[index] != transition.source:
        return None
    if not satisfies_clock_atoms(region, transition.guard.clock_atoms):
        return None
    loc = list(region.location)
    loc[index] = transition.target
    succ = reset_clocks(region, transition.resets, tuple(loc))
    inv = automaton.location(transition.target).invariant
    if inv.clock_atoms and not satisfies_clock_atoms(succ, inv.clock_atoms):
        return None
    return succ


def find_discrete_successors(region: Region, automaton: TimedAutomaton) -> list:
    res = []
    for t in automaton.outgoing.get(region.location[0], ()):
        succ = discrete_successor(region, t, automaton)
        if succ is not None:
            res.append(succ)
    return _sorted_unique(res)


# ---------------------------------------------------------------------------
# ordered partitions

def _nonempty_subsets(items: tuple) -> Iterator[tuple]:
    for k in range(1, len(items) + 1):
        yield from itertools.combinations(items, k)


def _subsets(items: tuple) -> Iterator[tuple]:
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def _block_sequences(items: tuple) -> Iterator[tuple]:
    """All (blocks, rest) where blocks is a sequence of disjoint non-empty subsets."""
    yield (), items
    for block in _nonempty_subsets(items):
        rest = tuple(x for x in items if x not in block)
        for blocks, left in _block_sequences(rest):
            yield (block,) + blocks, left


def ordered_partitions(items: Sequence) -> Iterator[tuple]:
    """All ordered set partitions of ``items`` (Fubini-many)."""
    for blocks, rest in _block_sequences(tuple(items)):
        if not rest:
            yield blocks


def weave(context: Sequence[tuple], items: Sequence, lead_gap: bool = True) -> Iterator[tuple]:
    """Interleave an ordered partition of ``items`` with ``context``.

    Every result keeps the context sets in order; each new block is either
    merged into a context set or placed as a new set between them.  With
    ``lead_gap=False`` no new set may precede the first context set.
    """
    context = [tuple(s) for s in context]
    m = len(context)

    def from_gap(j, remaining):
        seqs = _block_sequences(remaining) if (j > 0 or lead_gap) else [((), remaining)]
        for blocks, rest in seqs:
            if j == m:
                if not rest:
                    yield blocks
                continue
            for merge in _subsets(rest):
                left = tuple(x for x in rest if x not in merge)
                merged = context[j] + merge
                for tail in from_gap(j + 1, left):
                    yield blocks + (merged,) + tail

    yield from from_gap(0, tuple(items))


def part_regs(region: Region, lo: int, hi: int, clocks: Iterable[str],
              values: Mapping[str, int]) -> list:
    """Insert ``clocks`` into sets ``lo..hi`` of ``region`` in every order-preserving way.

    Indices follow the usual convention: negative indices address unbounded
    sets (``-1`` earliest), ``0`` the unit and positive ones fractional sets.
    Integer parts come from ``values`` clamped at the clock's maximum.
    """
    if lo > hi + 1:
        # lo == hi + 1 is an empty range: insert into the gap there
        raise ValueError("part_regs needs lo <= hi + 1")
    clocks = tuple(sorted(clocks))
    if not clocks:
        return [region]
    cmax = region.cmax
    h = dict(region.h)
    for c in clocks:
        h[c] = min(values[c], cmax[c])
    unit = list(region.unit)
    if lo >= 0:
        direct = tuple(c for c in clocks if values[c] >= cmax[c])
        unit.extend(direct)
        clocks = tuple(c for c in clocks if c not in direct)

    # index-ordered sets X_{-ell} .. X_r; position ``ell`` holds X0
    ell = region.ell
    sets = [tuple(s) for s in reversed(region.unbounded)] + [tuple(unit)] + \
        [tuple(s) for s in region.fractional]
    loc = region.location
    res = []
    if lo < 0:
        if hi >= 0:
            raise ValueError("part_regs ranges must not straddle the unit set")
        if ell == 0:
            lo_pos, hi_pos = 0, -1
        else:
            lo_pos, hi_pos = max(lo + ell, 0), hi + ell
        before, context = sets[:lo_pos], sets[lo_pos:hi_pos + 1]
        after, rest = sets[hi_pos + 1:ell], sets[ell:]
        for woven in weave(context, clocks):
            unb = before + list(woven) + after
            res.append(Region(loc, h, cmax, list(reversed(unb)), rest[0], rest[1:]))
    else:
        if not clocks:
            return [Region(loc, h, cmax, region.unbounded, unit, region.fractional)]
        lo_pos, hi_pos = lo + ell, min(hi + ell, len(sets) - 1)
        before, context, after = sets[:lo_pos], sets[lo_pos:hi_pos + 1], sets[hi_pos + 1:]
        for woven in weave(context, clocks, lead_gap=(lo != 0)):
            full = before + list(woven) + after
            res.append(Region(loc, h, cmax, list(reversed(full[:ell])), full[ell], full[ell + 1:]))
    return _sorted_unique(res)


# ---------------------------------------------------------------------------
# discrete predecessors

def _reset_value_range(atoms: Sequence[ClockConstraint], cm: int):
    """Integer-part range (``cm + 1`` meaning unbounded) allowed by ``atoms``."""
    lo, hi = 0, cm + 1
    for a in atoms:
        if a.relation == "<":
            hi = min(hi, a.bound - 1)
        elif a.relation == "<=":
            hi = min(hi, a.bound)
        elif a.relation == ">":
            lo = max(lo, a.bound)
        elif a.relation == ">=":
            lo = max(lo, a.bound)
    return lo, hi


def discrete_predecessors_over(region: Region, transition, automaton: TimedAutomaton) -> list:
    """Predecessors of ``region`` over one transition of a single automaton."""
    if region.location[0] != transition.target:
        return []
    resets = tuple(sorted(set(transition.resets)))
    for c in resets:
        if not region.is_exact_zero(c):
            return []
    guard = transition.guard
    cmax = region.cmax
    h = dict(region.h)
    unit = [c for c in region.unit if c not in resets]
    oob, bnd, ranges = [], [], []
    for x in resets:
        atoms = guard.atoms_on(x)
        eq = [a for a in atoms if a.relation == "=="]
        if eq:
            h[x] = eq[0].bound
            unit.append(x)
        elif any(a.relation == ">" and a.bound >= cmax[x] for a in atoms):
            h[x] = cmax[x]
            oob.append(x)
        else:
            lo, hi = _reset_value_range(atoms, cmax[x])
            if lo > hi:
                return []
            bnd.append(x)
            ranges.append(range(lo, hi + 1))
    base = Region((transition.source,), h, cmax, region.unbounded, unit, region.fractional)

    res = []
    if not bnd:
        res.extend(part_regs(base, -max(base.ell, 1), -1, oob, h))
    else:
        for combo in itertools.product(*ranges):
            hbar = dict(h)
            delta = []
            for x, v in zip(bnd, combo):
                if v > cmax[x]:
                    delta.append(x)
                hbar[x] = v
            bounded = [x for x in bnd if x not in delta]
            for R in part_regs(base, -max(base.ell, 1), -1, oob + delta, hbar):
                res.extend(part_regs(R, 0, R.r, bounded, hbar))
    res = [R for R in res if satisfies_clock_atoms(R, guard.clock_atoms)]
    return _sorted_unique(res)


def find_discrete_predecessors(region: Region, automaton: TimedAutomaton) -> list:
    res = []
    for t in automaton.incoming.get(region.location[0], ()):
        res.extend(discrete_predecessors_over(region, t, automaton))
    return _sorted_unique(res)


# ---------------------------------------------------------------------------
# region patterns

@dataclass(frozen=True)
class RegionPattern:
    """Per-clock constraints describing a set of target regions.

    ``constraints`` maps a clock to ``("eq", c)``, ``("open", c)`` for
    ``c < x < c + 1`` or ``("unbounded", None)``.  Optional orderings are
    lists of clock groups: ``unbounded_order`` earliest first,
    ``frac_order`` smallest fraction first.
    """

    location: str
    constraints: tuple  # ((clock, kind, value), ...)
    unbounded_order: Optional[tuple] = None
    frac_order: Optional[tuple] = None

    def constraint_map(self) -> dict:
        return {c: (kind, value) for c, kind, value in self.constraints}

    def check(self, automaton: TimedAutomaton) -> list:
        """Diagnostics for contradictory or incomplete patterns."""
        problems = []
        cmax = automaton.max_constants
        if self.location not in automaton.location_map:
            problems.append(f"unknown location {self.location!r}")
        cons = self.constraint_map()
        if len(cons) != len(self.constraints):
            problems.append("a clock is constrained twice")
        for c in cmax:
            if c not in cons:
                problems.append(f"clock {c} is unconstrained")
        for c, (kind, value) in sorted(cons.items()):
            if c not in cmax:
                problems.append(f"unknown clock {c!r}")
                continue
            if kind == "eq" and not 0 <= value <= cmax[c]:
                problems.append(f"{c} = {value} contradicts max({c}) = {cmax[c]}")
            if kind == "open" and not 0 <= value <= cmax[c] - 1:
                problems.append(f"{c} in ({value},{value + 1}) contradicts max({c}) = {cmax[c]}")
        for name, order, kind in (("unbounded", self.unbounded_order, "unbounded"),
                                  ("frac", self.frac_order, "open")):
            if order is None:
                continue
            listed = [c for group in order for c in group]
            expected = sorted(c for c, (k, _) in cons.items() if k == kind)
            if sorted(listed) != expected or any(not g for g in order):
                problems.append(f"order {name} must list exactly the clocks {expected}")
        return problems


def enumerate_pattern(pattern: RegionPattern, automaton: TimedAutomaton,
                      diagnostics: Optional[list] = None) -> list:
    """Expand ``pattern`` into the regions it describes."""
    problems = pattern.check(automaton)
    if problems:
        if diagnostics is not None:
            diagnostics.extend(problems)
        return []
    cmax = automaton.max_constants
    cons = pattern.constraint_map()
    h, unit, opens, unbs = {}, [], [], []
    for c, (kind, value) in cons.items():
        if kind == "eq":
            h[c] = value
            unit.append(c)
        elif kind == "open":
            h[c] = value
            opens.append(c)
        else:
            h[c] = cmax[c]
            unbs.append(c)
    if pattern.unbounded_order is not None:
        unb_choices = [tuple(tuple(g) for g in pattern.unbounded_order)]
    else:
        unb_choices = list(ordered_partitions(sorted(unbs)))
    if pattern.frac_order is not None:
        frac_choices = [tuple(tuple(g) for g in pattern.frac_order)]
    else:
        frac_choices = list(ordered_partitions(sorted(opens)))
    loc = (pattern.location,)
    res = [Region(loc, h, cmax, u, unit, f) for u in unb_choices for f in frac_choices]
    return _sorted_unique(res)
