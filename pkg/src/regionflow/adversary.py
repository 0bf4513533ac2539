"""Replay of a slow but valid PRD schedule on the chain family.

Every region discharge here is a plain push-relabel discharge (one active
vertex at a time, no gap heuristics) whose only freedom is the choice among
admissible arcs.  The choice always moves the excess toward node 6 and, at
node 1, enters the chains in round-robin order.  The resulting sweep count
grows with the number of chains, while ARD on the same instance needs a
constant number of sweeps.
"""

from __future__ import annotations

from .discharge import DischargeResult, finish, snapshot
from .engine import Solver, SolverConfig, SweepStats
from .generators import AdversarialInstance
from .partition import RegionNetwork
from .prd import push, relabel


def generic_discharge(rn: RegionNetwork, choose) -> DischargeResult:
    """Push-relabel on the lowest-id active vertex until none is active.

    ``choose(rn, u, arcs)`` picks one of the admissible arcs out of ``u``.
    """
    cap0, lab0, sink0 = snapshot(rn)
    pushes = relabels = 0
    while True:
        u = next((v for v in range(rn.r) if rn.active(v)), None)
        if u is None:
            break
        du = rn.label[u]
        arcs = [a for a in rn.out[u] if rn.cap[a] > 0 and rn.label[rn.head[a]] == du - 1]
        if arcs:
            push(rn, u, choose(rn, u, arcs))
            pushes += 1
        else:
            relabel(rn, u)
            relabels += 1
    return finish(rn, cap0, lab0, sink0, pushes=pushes, relabels=relabels)


class ChainAdversary:
    """Arc choice rule for :func:`generic_discharge` on the chain family."""

    def __init__(self, inst: AdversarialInstance):
        self.inst = inst
        self.next_chain = 0
        k = inst.k
        self.rank = {inst.node1: 0, inst.node5: 4, inst.node6: 5}
        self.chain_of = {}
        for i in range(k):
            for j, v in enumerate(inst.chain(i)):
                self.rank[v] = j + 1
                self.chain_of[v] = i

    def __call__(self, rn: RegionNetwork, u: int, arcs: list[int]) -> int:
        k = self.inst.k

        def key(a):
            g = rn.gid[rn.head[a]]
            ring = (self.chain_of[g] - self.next_chain) % k if g in self.chain_of else 0
            return (-self.rank.get(g, -1), ring)

        a = min(arcs, key=key)
        if rn.gid[u] == self.inst.node1:
            g = rn.gid[rn.head[a]]
            if g in self.chain_of:
                self.next_chain = (self.chain_of[g] + 1) % k
        return a


def replay_adversarial_prd(inst: AdversarialInstance, check: bool = False) -> SweepStats:
    """Sequential PRD sweeps driven by the adversarial arc choice."""
    adv = ChainAdversary(inst)
    cfg = SolverConfig(variant="prd", global_gap=False, region_gap=False, check=check,
                       discharge=lambda rn, sweep: generic_discharge(rn, adv))
    _, stats = Solver(inst.net, inst.part, cfg).run()
    return stats
