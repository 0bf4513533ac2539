"""Region discharge min-cut/max-flow: ARD and PRD in streaming and parallel modes."""

from .network import CutResult, Network, Preflow, cut_cost, extract_cut, init, verify_preflow
from .partition import Partition, build_region_network, partition_by_id, partition_grid
from .engine import Solver, SolverConfig, SweepStats, run_parallel, run_sequential
from .generators import gen_adversarial_prd, gen_grid
from .oracle import oracle_maxflow, oracle_mincut_sets
from .reduction import reduce_network, region_reduce
from .dimacs import parse_dimacs, write_dimacs

__all__ = [
    "CutResult", "Network", "Preflow", "cut_cost", "extract_cut", "init", "verify_preflow",
    "Partition", "build_region_network", "partition_by_id", "partition_grid",
    "Solver", "SolverConfig", "SweepStats", "run_parallel", "run_sequential",
    "gen_adversarial_prd", "gen_grid", "oracle_maxflow", "oracle_mincut_sets",
    "reduce_network", "region_reduce", "parse_dimacs", "write_dimacs",
]
