"""Forward and backward reachability over regions.

Both engines keep a visited store keyed by canonical key (plus the integer
valuation going forward), mark states when they are pushed and remember one
parent per state so that a witness can be rebuilt.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from .kinematics import (RegionPattern, enumerate_pattern, find_discrete_predecessors,
                         find_immediate_delay_predecessors, max_period_skips)
from .model import BoolAtom, ModelError, Query, TimedAutomaton, VerificationError, eval_query
from .network import (as_network, initial_states, network_delay_successor,
                      network_discrete_moves)
from .region import Region

log = logging.getLogger(__name__)

REACHABLE = "reachable"
UNREACHABLE = "unreachable"
LIMIT = "limit-exceeded"
ERROR = "error"

FULL_SPACE = Query((BoolAtom(False),))


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "dfs"
    direction: str = "forward"
    max_regions: Optional[int] = None
    max_millis: Optional[float] = None
    # backward only: jump over whole delay periods where that is sound
    period_skip: bool = False
    # DFS only: expand the delay successor before the discrete ones
    delay_first: bool = False

    def __post_init__(self):
        if self.strategy not in ("dfs", "bfs"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass
class SearchStats:
    verdict: str
    regions_stored: int
    states_stored: int
    elapsed_ms: float
    strategy: str
    direction: str
    # list of (label, state) pairs from an initial state to the hit
    witness: Optional[list] = None
    message: str = ""
    diagnostics: list = field(default_factory=list)
    # canonical keys of every stored state
    visited: frozenset = field(default_factory=frozenset, repr=False)


class _Store:
    """Visited set with parent pointers and limit bookkeeping."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.parent = {}
        self.items = {}
        self.start = time.perf_counter()
        self.frontier = deque()
        self.ticks = 0

    def push(self, key, item, parent_key, label) -> bool:
        if key in self.parent:
            return False
        self.parent[key] = (parent_key, label)
        self.items[key] = item
        self.frontier.append(key)
        return True

    def pop(self):
        if self.cfg.strategy == "dfs":
            return self.frontier.pop()
        return self.frontier.popleft()

    def __len__(self):
        return len(self.parent)

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0

    def over_limit(self) -> bool:
        cfg = self.cfg
        if cfg.max_regions is not None and len(self) > cfg.max_regions:
            return True
        if cfg.max_millis is not None:
            self.ticks += 1
            if self.ticks % 64 == 0 and self.elapsed_ms() > cfg.max_millis:
                return True
        return False

    def trace(self, key) -> list:
        out = []
        while key is not None:
            parent, label = self.parent[key]
            out.append((label, self.items[key]))
            key = parent
        out.reverse()
        return out


def _stats(store: _Store, verdict: str, cfg: SearchConfig, regions_of, **kw) -> SearchStats:
    return SearchStats(verdict, len(store), len({regions_of(k) for k in store.parent}),
                       store.elapsed_ms(), cfg.strategy, cfg.direction,
                       visited=frozenset(store.parent), **kw)


# ---------------------------------------------------------------------------
# forward

def forward_reach(model, query: Query, cfg: Optional[SearchConfig] = None) -> SearchStats:
    """Explore from the initial states until ``query`` holds or nothing is left.

    The query is checked when a state is popped.  BFS enqueues the delay
    successor before the discrete successors (declaration order).  DFS
    pushes in that same order, so the last declared discrete successor is
    expanded first and the delay successor last; ``delay_first`` flips this
    to delay, then discrete successors in declaration order.
    """
    cfg = cfg or SearchConfig()
    net = as_network(model)
    store = _Store(cfg)
    for s in initial_states(net):
        store.push(s.key, s, None, "init")

    def region_of(key):
        return key[0]

    while store.frontier:
        if store.over_limit():
            return _stats(store, LIMIT, cfg, region_of)
        key = store.pop()
        state = store.items[key]
        if eval_query(query, state, net):
            return _stats(store, REACHABLE, cfg, region_of, witness=store.trace(key))
        try:
            succs = list(network_discrete_moves(state, net))
        except VerificationError as err:
            log.info("run-time error: %s", err)
            return _stats(store, ERROR, cfg, region_of, witness=store.trace(key),
                          message=str(err))
        delay = network_delay_successor(state, net)
        if delay is not None:
            succs.insert(0, ("delay", delay))
        if cfg.strategy == "dfs" and cfg.delay_first:
            succs.reverse()
        for label, succ in succs:
            store.push(succ.key, succ, key, label)
    return _stats(store, UNREACHABLE, cfg, region_of)


def explore_full(model, cfg: Optional[SearchConfig] = None) -> SearchStats:
    return forward_reach(model, FULL_SPACE, cfg)


# ---------------------------------------------------------------------------
# backward

def _is_initial(region: Region, ta: TimedAutomaton) -> bool:
    return region.is_initial_valuation() and ta.location(region.location[0]).initial


def _skip_allowed(ta: TimedAutomaton) -> dict:
    """Locations whose every incoming transition resets at least one clock."""
    return {loc.name: all(t.resets for t in ta.incoming.get(loc.name, ()))
            for loc in ta.locations}


def _period_jump(region: Region) -> Optional[Region]:
    if region.unbounded or not region.fractional or region.has_exact_zero():
        return None
    k = max_period_skips(region)
    if k < 1:
        return None
    return region.replace(h={c: v - k for c, v in region.h.items()})


def backward_reach(model, pattern, cfg: Optional[SearchConfig] = None) -> SearchStats:
    """Search predecessors of the regions described by ``pattern``.

    ``pattern`` is a :class:`RegionPattern` or an iterable of regions.  The
    verdict is reachable as soon as a region with every clock exactly zero
    at an initial location is stored.
    """
    cfg = cfg or SearchConfig(direction="backward")
    if cfg.direction != "backward":
        cfg = replace(cfg, direction="backward")
    if not isinstance(model, TimedAutomaton):
        net = as_network(model)
        if len(net.components) != 1:
            raise ModelError("backward search supports a single automaton only")
        model = net.components[0]
    ta = model
    if ta.variables:
        raise ModelError("backward search does not support integer variables")
    diagnostics = []
    if isinstance(pattern, RegionPattern):
        seeds = enumerate_pattern(pattern, ta, diagnostics)
    else:
        seeds = sorted(set(pattern))
    store = _Store(cfg)

    def region_of(key):
        return key

    if not seeds:
        return _stats(store, UNREACHABLE, cfg, region_of, diagnostics=diagnostics,
                      message="pattern describes no region")
    skippable = _skip_allowed(ta) if cfg.period_skip else {}

    def finish_if_initial(region):
        if _is_initial(region, ta):
            # parents point towards the pattern; flip into a forward run where
            # each label says how the step was taken
            trace = store.trace(region.key)[::-1]
            steps = [("init", trace[0][1])]
            steps += [(trace[i - 1][0], trace[i][1]) for i in range(1, len(trace))]
            return _stats(store, REACHABLE, cfg, region_of, witness=steps)
        return None

    for seed in seeds:
        store.push(seed.key, seed, None, "pattern")
        done = finish_if_initial(seed)
        if done:
            return done
    while store.frontier:
        if store.over_limit():
            return _stats(store, LIMIT, cfg, region_of)
        key = store.pop()
        region = store.items[key]
        preds = []
        jump = _period_jump(region) if skippable.get(region.location[0]) else None
        if jump is not None:
            preds.append(("delay*", jump))
        else:
            preds.extend(("delay", p) for p in find_immediate_delay_predecessors(region))
        preds.extend(("discrete", p) for p in find_discrete_predecessors(region, ta))
        if cfg.strategy == "dfs" and cfg.delay_first:
            preds.reverse()
        for label, pred in preds:
            if store.push(pred.key, pred, key, label):
                done = finish_if_initial(pred)
                if done:
                    return done
    return _stats(store, UNREACHABLE, cfg, region_of)
