"""Product semantics for networks of timed automata.

A network state is one global region over the union of all (qualified)
component clocks plus a tuple of integer-variable values.  Components move
independently or by binary handshake on a channel.
"""
from __future__ import annotations

from typing import Iterator, Optional

from .kinematics import immediate_delay_successor, reset_clocks
from .model import (Network, TimedAutomaton, VerificationError, apply_updates,
                    satisfies_clock_atoms, satisfies_invariant)
from .region import SearchState, initial_regions


def as_network(model) -> Network:
    if isinstance(model, Network):
        return model
    if isinstance(model, TimedAutomaton):
        return Network.of([model])
    raise TypeError(f"expected TimedAutomaton or Network, got {type(model).__name__}")


def initial_states(model) -> list:
    net = as_network(model)
    vals = net.initial_valuation()
    return [SearchState(r, vals) for r in initial_regions(net)]


def network_delay_successor(state: SearchState, model) -> Optional[SearchState]:
    """Let time pass, unless some component is urgent or an invariant breaks."""
    net = as_network(model)
    region = state.region
    automata = net.qualified
    for ta, loc in zip(automata, region.location):
        if ta.location(loc).urgent:
            return None
    succ = immediate_delay_successor(region)
    if succ is None or not satisfies_invariant(succ, automata):
        return None
    return SearchState(succ, state.vars)


def _enabled(region, env, index, t) -> bool:
    if region.location[index] != t.source:
        return False
    if not satisfies_clock_atoms(region, t.guard.clock_atoms):
        return False
    return all(a.holds(env) for a in t.guard.int_atoms)


def _fire(state: SearchState, net: Network, env: dict, moves) -> Optional[SearchState]:
    """Apply ``moves`` (pairs of component index and transition) in order."""
    region = state.region
    loc = list(region.location)
    resets = []
    for index, t in moves:
        loc[index] = t.target
        resets.extend(t.resets)
    for _, t in moves:
        try:
            env = apply_updates(t.updates, env, net)
        except VerificationError as err:
            raise VerificationError(str(err), state) from None
    succ = reset_clocks(region, resets, tuple(loc))
    if not satisfies_invariant(succ, net.qualified):
        return None
    return SearchState(succ, tuple(env[name] for name in net.variable_names()))


def network_discrete_moves(state: SearchState, model) -> Iterator[tuple]:
    """Yield ``(label, successor)`` in declaration order.

    Internal moves of each component come first (components in order,
    transitions in file order), then handshakes with the emitting component
    driving the order.
    """
    net = as_network(model)
    region = state.region
    env = net.env(state.vars)
    automata = net.qualified
    for i, ta in enumerate(automata):
        for t in ta.outgoing.get(region.location[i], ()):
            if t.sync is not None or not _enabled(region, env, i, t):
                continue
            succ = _fire(state, net, env, [(i, t)])
            if succ is not None:
                yield f"{ta.name}: {t.label}", succ
    for i, ta in enumerate(automata):
        for t in ta.outgoing.get(region.location[i], ()):
            if t.sync is None or t.polarity != "!" or not _enabled(region, env, i, t):
                continue
            for j, other in enumerate(automata):
                if j == i:
                    continue
                for u in other.outgoing.get(region.location[j], ()):
                    if u.sync != t.sync or u.polarity != "?":
                        continue
                    if not _enabled(region, env, j, u):
                        continue
                    succ = _fire(state, net, env, [(i, t), (j, u)])
                    if succ is not None:
                        label = f"{ta.name}: {t.label} {t.sync}! / {other.name}: {u.label} {u.sync}?"
                        yield label, succ


def network_discrete_successors(state: SearchState, model) -> list:
    """All discrete successors, duplicates collapsed, sorted by key."""
    seen = {}
    for _, succ in network_discrete_moves(state, model):
        seen.setdefault(succ.key, succ)
    return [seen[k] for k in sorted(seen)]


__all__ = ["as_network", "initial_states", "network_delay_successor",
           "network_discrete_moves", "network_discrete_successors"]
