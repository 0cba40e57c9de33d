import math

import pytest

from regionreach.bench import (FAMILIES, canonical_query, gen_boolean, gen_flower, gen_gates,
                               gen_ring, generate)
from regionreach.explore import REACHABLE, forward_reach
from regionreach.model import validate_model
from regionreach.oracle import Replay
from regionreach.textio import parse_query


def test_flower_structure():
    ta = gen_flower(4)
    assert len(ta.clocks) == 5 and len(ta.transitions) == 5
    assert ta.max_constants == {"x1": 1, "x2": 2, "x3": 3, "x4": 4, "y": 1}
    assert [l.name for l in ta.locations] == ["q0", "Goal"]


def test_other_families():
    b = gen_boolean(2)
    assert len(b.components) == 2 and len(b.variables) == 2
    r = gen_ring(2)
    assert all(len(c.locations) == 6 and len(c.transitions) == 6 for c in r.components)
    g = gen_gates(3)
    gate = g.variable_map["gate"]
    assert (gate.low, gate.high) == (0, 2)
    last = g.components[-1].transitions[-1]
    assert str(last.guard) == "x == 2 && gate == 2"


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", range(2, 9))
def test_generated_models_validate(family, k):
    assert validate_model(generate(family, k).model) == []


@pytest.mark.parametrize("family", FAMILIES)
def test_bad_sizes(family):
    with pytest.raises(ValueError):
        generate(family, 0)
    with pytest.raises(ValueError):
        canonical_query("nope", 2)


def goal_time(n, **cfg):
    from regionreach.explore import SearchConfig
    ta = gen_flower(n)
    s = forward_reach(ta, parse_query("E<> (Flower.Goal)", ta), SearchConfig(**cfg))
    assert s.verdict == REACHABLE
    steps = [(label, st.region) for label, st in s.witness]
    rp = Replay(steps[0][1].cmax).run(steps)
    return rp.values[-1]["Flower.y"]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lcm(n):
    assert goal_time(n) == math.lcm(*range(1, n + 1))
    assert goal_time(n, strategy="bfs") == math.lcm(*range(1, n + 1))


@pytest.mark.parametrize("family,k", [("boolean", 2), ("gates", 3), ("boolean", 4)])
def test_small_sizes_reachable(family, k):
    b = generate(family, k)
    assert forward_reach(b.model, parse_query(b.query, b.model)).verdict == REACHABLE
