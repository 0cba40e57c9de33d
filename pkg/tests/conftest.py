import itertools

import pytest
from hypothesis import strategies as st

from regionreach.model import ClockConstraint, Guard, Location, TimedAutomaton, Transition
from regionreach.oracle import all_regions

RELS = ("<", "<=", "==", ">=", ">")


def clock_universes(max_clocks, max_cm, min_cm=0):
    """Every assignment of maximum constants to up to ``max_clocks`` clocks."""
    for n in range(1, max_clocks + 1):
        for ms in itertools.product(range(min_cm, max_cm + 1), repeat=n):
            yield {f"c{i}": m for i, m in enumerate(ms)}


def every_region(max_clocks, max_cm, location="q"):
    for cm in clock_universes(max_clocks, max_cm):
        yield from all_regions(location, cm)


@st.composite
def random_ta(draw, max_clocks=3, max_locs=4, max_cm=2, max_edges=6):
    n = draw(st.integers(1, max_clocks))
    clocks = tuple((f"x{i}", draw(st.integers(1, max_cm))) for i in range(n))
    cm = dict(clocks)
    nlocs = draw(st.integers(1, max_locs))
    locs = tuple(Location(f"l{i}", initial=(i == 0)) for i in range(nlocs))
    edges = []
    for _ in range(draw(st.integers(1, max_edges))):
        src = draw(st.integers(0, nlocs - 1))
        dst = draw(st.integers(0, nlocs - 1))
        atoms = []
        for c, m in clocks:
            if draw(st.booleans()):
                atoms.append(ClockConstraint(c, draw(st.sampled_from(RELS)), draw(st.integers(0, m))))
        resets = tuple(c for c, _ in clocks if draw(st.booleans()))
        edges.append(Transition(f"l{src}", f"l{dst}", Guard(tuple(atoms)), resets))
    return TimedAutomaton("R", locs, clocks, tuple(edges))


@pytest.fixture
def flower4():
    from regionreach.bench import gen_flower
    return gen_flower(4)


def duality_violations(ta):
    """Count broken successor/predecessor duality facts on every region of ``ta``."""
    from regionreach.kinematics import (discrete_predecessors_over, discrete_successor,
                                        find_immediate_delay_predecessors,
                                        immediate_delay_successor)
    bad = 0
    cm = ta.max_constants
    for loc in ta.locations:
        for region in all_regions(loc.name, cm):
            # delay, both ways
            succ = immediate_delay_successor(region)
            if succ is not None and region not in find_immediate_delay_predecessors(succ):
                bad += 1
            for p in find_immediate_delay_predecessors(region):
                if immediate_delay_successor(p) != region:
                    bad += 1
            # discrete, both ways
            for t in ta.outgoing.get(loc.name, ()):
                s = discrete_successor(region, t, ta)
                if s is not None and region not in discrete_predecessors_over(s, t, ta):
                    bad += 1
            for t in ta.incoming.get(loc.name, ()):
                for p in discrete_predecessors_over(region, t, ta):
                    if discrete_successor(p, t, ta) != region:
                        bad += 1
    return bad


def seeded_ta(rng, max_clocks=3, max_locs=4, max_cm=2, max_edges=6):
    """Same shape as ``random_ta`` but driven by a ``random.Random``."""
    n = rng.randint(1, max_clocks)
    clocks = tuple((f"x{i}", rng.randint(1, max_cm)) for i in range(n))
    nlocs = rng.randint(1, max_locs)
    locs = tuple(Location(f"l{i}", initial=(i == 0)) for i in range(nlocs))
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        atoms = tuple(ClockConstraint(c, rng.choice(RELS), rng.randint(0, m))
                      for c, m in clocks if rng.random() < 0.5)
        resets = tuple(c for c, _ in clocks if rng.random() < 0.5)
        edges.append(Transition(f"l{rng.randrange(nlocs)}", f"l{rng.randrange(nlocs)}",
                                Guard(atoms), resets))
    return TimedAutomaton("R", locs, clocks, tuple(edges))


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
