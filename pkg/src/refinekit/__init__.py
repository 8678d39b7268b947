"""Trace, stable-failures and failures-divergences refinement checking for finite LTSs."""
from .antichain import Antichain, ProductPair, insert, leq, member
from .engine import (BudgetExceeded, ExplorationConfig, Metrics, UnsoundConfigError, Verdict,
                     refines, refines_improved, refines_legacy, refusals_included,
                     run_with_instrumentation)
from .generators import gen_ladder, gen_random, random_pair
from .lts import (DivergenceMarking, Lts, ParseError, build_lts, enabled, is_stable, mark_divergent,
                  parse_aut, read_aut, tau_closure, weak_step, write_aut)
from .minimise import Partition, dpbb_partition, minimise, quotient
from .normalization import BLOCKED, NormState, Normalizer, norm_initial, norm_successor, normfdr_successor
from .oracle import (Observation, OracleTooLarge, WitnessDistance, observe, oracle_refines,
                     shortest_witness_distance)

__version__ = "0.1.0"
