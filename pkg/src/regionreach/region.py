"""Regions as ordered clock partitions.

A region is a location tuple, an integer part per clock and a partition of
the clocks into

* ``unbounded`` sets, earliest-unbounded first (``X-1, X-2, ...``),
* the ``unit`` set ``X0`` of bounded clocks with zero fractional part,
* ``fractional`` sets ordered by increasing fractional part (``X1, X2, ...``).

Unbounded clocks keep ``h = max constant``.  Sets are stored as sorted tuples
and empty sets (other than ``X0``) never appear.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import FRACTIONAL, IN_UNIT, UNBOUNDED, ModelError, Network, TimedAutomaton


class RegionClass(enum.Enum):
    Z = "Z"
    P = "P"
    M = "M"
    U = "U"

    def __str__(self):
        return self.value


def _norm_sets(sets) -> tuple:
    return tuple(tuple(sorted(s)) for s in sets if s)


class Region:
    __slots__ = ("location", "h", "cmax", "unbounded", "unit", "fractional", "_key", "_status")

    def __init__(self, location, h: Mapping[str, int], cmax: Mapping[str, int],
                 unbounded=(), unit=(), fractional=()):
        if isinstance(location, str):
            location = (location,)
        self.location = tuple(location)
        self.h = h if isinstance(h, dict) else dict(h)
        self.cmax = cmax
        self.unbounded = _norm_sets(unbounded)
        self.unit = tuple(sorted(unit))
        self.fractional = _norm_sets(fractional)
        self._key = None
        self._status = None

    # -- structure ---------------------------------------------------------
    @property
    def ell(self) -> int:
        return len(self.unbounded)

    @property
    def r(self) -> int:
        return len(self.fractional)

    @property
    def clocks(self) -> tuple:
        return tuple(sorted(self.h))

    @property
    def klass(self) -> RegionClass:
        return classify(self)

    @property
    def key(self):
        if self._key is None:
            self._key = (self.location, tuple(sorted(self.h.items())),
                         self.unbounded, self.unit, self.fractional)
        return self._key

    def status(self, clock: str) -> str:
        if self._status is None:
            st = {}
            for s in self.unbounded:
                for c in s:
                    st[c] = UNBOUNDED
            for c in self.unit:
                st[c] = IN_UNIT
            for s in self.fractional:
                for c in s:
                    st[c] = FRACTIONAL
            self._status = st
        return self._status[clock]

    def is_exact_zero(self, clock: str) -> bool:
        return self.h[clock] == 0 and self.status(clock) == IN_UNIT

    def has_exact_zero(self) -> bool:
        return any(self.h[c] == 0 for c in self.unit)

    def is_initial_valuation(self) -> bool:
        return not self.unbounded and not self.fractional and all(v == 0 for v in self.h.values())

    @property
    def bounded(self) -> bool:
        return not self.unbounded

    def replace(self, **kw) -> "Region":
        args = dict(location=self.location, h=self.h, cmax=self.cmax, unbounded=self.unbounded,
                    unit=self.unit, fractional=self.fractional)
        args.update(kw)
        return Region(**args)

    def validate(self):
        """Raise ``ValueError`` if the structural invariants do not hold."""
        seen = []
        for s in self.unbounded + (self.unit,) + self.fractional:
            seen.extend(s)
        if sorted(seen) != sorted(self.h) or len(set(seen)) != len(seen):
            raise ValueError(f"sets do not partition the clocks: {self}")
        if not set(self.h) <= set(self.cmax):
            raise ValueError("unknown clocks in region")
        for s in self.fractional:
            for c in s:
                if not 0 <= self.h[c] <= self.cmax[c] - 1:
                    raise ValueError(f"fractional clock {c} has h={self.h[c]}")
        for s in self.unbounded:
            for c in s:
                if self.h[c] != self.cmax[c]:
                    raise ValueError(f"unbounded clock {c} has h={self.h[c]}")
        for c in self.unit:
            if not 0 <= self.h[c] <= self.cmax[c]:
                raise ValueError(f"unit clock {c} has h={self.h[c]}")
        return self

    # -- value semantics ---------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Region) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Region({render_region(self)})"

    def __str__(self):
        return render_region(self)


@dataclass(frozen=True)
class SearchState:
    region: Region
    vars: tuple = ()

    @property
    def key(self):
        return (self.region.key, self.vars)

    def __lt__(self, other):
        return self.key < other.key


def classify(region: Region) -> RegionClass:
    if region.fractional:
        return RegionClass.M if region.unit else RegionClass.P
    if region.unit:
        return RegionClass.Z
    if region.unbounded:
        return RegionClass.U
    raise ValueError("a region without clocks has no class")


def canonicalize(region: Region) -> Region:
    return Region(region.location, dict(region.h), region.cmax,
                  [set(s) for s in region.unbounded], set(region.unit),
                  [set(s) for s in region.fractional])


def canonical_key(region: Region):
    return region.key


def _clock_setup(model):
    if isinstance(model, TimedAutomaton):
        return (model,), model.max_constants
    if isinstance(model, Network):
        return model.qualified, model.max_constants
    raise TypeError(f"expected TimedAutomaton or Network, got {type(model).__name__}")


def initial_region(model, locations: Optional[Sequence[str]] = None) -> Region:
    """All clocks exactly zero at the (given) initial locations."""
    automata, cmax = _clock_setup(model)
    if locations is None:
        locations = []
        for ta in automata:
            if not ta.initial_locations:
                raise ModelError(f"{ta.name}: no initial location")
            locations.append(ta.initial_locations[0])
    elif isinstance(locations, str):
        locations = (locations,)
    if len(locations) != len(automata):
        raise ModelError("location tuple does not match the number of components")
    for ta, loc in zip(automata, locations):
        if not ta.location(loc).initial:
            raise ModelError(f"{ta.name}: location {loc!r} is not initial")
    h = {c: 0 for c in cmax}
    return Region(tuple(locations), h, cmax, unit=tuple(cmax))


def initial_regions(model) -> list:
    """One initial region per combination of initial locations."""
    import itertools

    automata, _ = _clock_setup(model)
    combos = itertools.product(*(ta.initial_locations for ta in automata))
    return [initial_region(model, combo) for combo in combos]


# ---------------------------------------------------------------------------
# rendering

def _fmt_set(s) -> str:
    return "{" + ",".join(s) + "}"


def render_region(region: Region) -> str:
    if len(region.location) == 1:
        loc = region.location[0]
    else:
        loc = "(" + ",".join(region.location) + ")"
    unb = set(c for s in region.unbounded for c in s)
    hs = " ".join(f"h({c})={region.h[c]}" for c in sorted(region.h) if c not in unb)
    parts = []
    for i, s in enumerate(reversed(region.unbounded)):
        parts.append(f"X-{region.ell - i}={_fmt_set(s)}")
    parts.append(f"X0={_fmt_set(region.unit)}")
    for i, s in enumerate(region.fractional, start=1):
        parts.append(f"X{i}={_fmt_set(s)}")
    body = ", ".join(p for p in (loc, hs, " ".join(parts)) if p)
    return "{" + body + "}"
