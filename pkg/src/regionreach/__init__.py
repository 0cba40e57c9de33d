"""Region-based forward and backward reachability for timed automata."""
from .bench import Benchmark, gen_boolean, gen_flower, gen_gates, gen_ring, generate
from .explore import (ERROR, LIMIT, REACHABLE, UNREACHABLE, SearchConfig, SearchStats,
                      backward_reach, explore_full, forward_reach)
from .kinematics import (RegionPattern, delay_predecessor_skip, enumerate_pattern,
                         find_discrete_predecessors, find_discrete_successors,
                         find_immediate_delay_predecessors, immediate_delay_successor,
                         part_regs)
from .model import (ClockConstraint, Guard, Location, ModelError, Network, Query,
                    TimedAutomaton, Transition, VerificationError, validate_model)
from .region import Region, RegionClass, SearchState, canonical_key, classify, initial_region
from .textio import (ParseError, load_model, parse_model, parse_pattern, parse_query,
                     render_automaton, render_stats)

__version__ = "0.1.0"
