"""Synthetic instances: random grids and the PRD worst-case chain family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network
from .partition import Partition

# Relative displacements; connectivity c uses the first c/2 of them.
DISPLACEMENTS = ((0, 1), (1, 0), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2),
                 (0, 2), (2, 0), (2, 2), (3, 3), (3, 4), (4, 2))
EXCESS_RANGE = (-500, 500)


def gen_grid(w: int, h: int, connectivity: int = 8, strength: int = 150,
             seed: int = 0, displacements=DISPLACEMENTS) -> Network:
    """Grid network with ids ``y*w + x``, source ``w*h`` and sink ``w*h + 1``.

    The excesses are drawn from PCG64(seed) in one call, in vertex id
    order.  A positive draw becomes excess at the vertex, a negative one a
    sink arc of that magnitude.  Every grid edge is one arc pair with
    capacity ``strength`` in both directions.
    """
    if connectivity % 2 or not 2 <= connectivity <= 2 * len(displacements):
        raise ValueError(f"connectivity must be even and at most {2 * len(displacements)}")
    if w < 1 or h < 1 or strength < 0:
        raise ValueError("bad grid size or strength")
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = EXCESS_RANGE
    draws = rng.integers(lo, hi + 1, size=w * h).tolist()
    N = w * h
    net = Network(N + 2, N, N + 1)
    for y in range(h):
        for x in range(w):
            v = y * w + x
            for dx, dy in displacements[:connectivity // 2]:
                xx, yy = x + dx, y + dy
                if xx < w and yy < h:
                    net.add_arc(v, yy * w + xx, strength, strength)
    for v, e in enumerate(draws):
        if e > 0:
            net.excess[v] = e
        elif e < 0:
            net.add_arc(v, net.t, -e)
    return net


@dataclass
class AdversarialInstance:
    net: Network
    part: Partition
    k: int
    node1: int = 0
    node5: int = 1
    node6: int = 2

    def chain(self, i: int) -> tuple[int, int, int]:
        return (3 + 3 * i, 4 + 3 * i, 5 + 3 * i)


def gen_adversarial_prd(k: int, excess: int = 1) -> AdversarialInstance:
    """Shared nodes 1, 5, 6 joined by ``k`` chains 1-2i-3i-4i-5, plus 5-6 and 6->1.

    Ids: node 1 is 0, node 5 is 1, node 6 is 2, chain ``i`` is
    ``3+3i..5+3i``.  Chain and 5-6 edges are symmetric with a capacity
    above any possible flow; the arc 6->1 is one-way.  All excess sits at
    node 1.  Regions: node 6 alone, everything else together.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = 3 * k + 5
    s, t = n - 2, n - 1
    big = excess + 1
    net = Network(n, s, t)
    net.excess[0] = excess
    for i in range(k):
        a, b, c = 3 + 3 * i, 4 + 3 * i, 5 + 3 * i
        net.add_arc(0, a, big, big)
        net.add_arc(a, b, big, big)
        net.add_arc(b, c, big, big)
        net.add_arc(c, 1, big, big)
    net.add_arc(1, 2, big, big)
    net.add_arc(2, 0, big, 0)
    assert big > net.total_excess()
    region_of = [0] * n
    region_of[2] = 1
    region_of[s] = region_of[t] = -1
    return AdversarialInstance(net, Partition(region_of, 2), k)
