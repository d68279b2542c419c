"""Maximum clique search on small dense graphs.

Vertex sets are Python ints used as bitsets over positions ``0..m-1``.
"""

import numpy as np

from fadingnet import rng
from fadingnet.rng import Seed

EXACT_CAP = 150


def _neighbour_masks(adjacency: np.ndarray) -> list:
    masks = []
    for row in np.asarray(adjacency, dtype=bool):
        bits = 0
        for j in np.flatnonzero(row):
            bits |= 1 << int(j)
        masks.append(bits)
    return masks


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _colour_sort(candidates: int, order: list, nbrs: list):
    """Greedy sequential colouring of ``candidates``.

    Returns vertices and colour numbers in nondecreasing colour order; the
    colour of a vertex bounds the clique size reachable through it.
    """
    vertices, colours = [], []
    uncoloured = candidates
    colour = 0
    while uncoloured:
        colour += 1
        available = uncoloured
        while available:
            v = next(v for v in order if available >> v & 1)
            available &= ~nbrs[v] & ~(1 << v)
            uncoloured &= ~(1 << v)
            vertices.append(v)
            colours.append(colour)
    return vertices, colours


def max_clique_positions(adjacency: np.ndarray, cap: int = EXACT_CAP) -> list:
    """Positions of one maximum clique (branch and bound with colouring bounds)."""
    m = len(adjacency)
    if m > cap:
        raise ValueError(f"exact clique search is capped at {cap} vertices, graph has {m}")
    if m == 0:
        return []
    nbrs = _neighbour_masks(adjacency)
    degree = [bin(x).count("1") for x in nbrs]
    order = sorted(range(m), key=lambda v: (-degree[v], v))
    best = [order[0]]

    def expand(current: list, candidates: int):
        nonlocal best
        vertices, colours = _colour_sort(candidates, order, nbrs)
        for v, c in zip(reversed(vertices), reversed(colours)):
            if len(current) + c <= len(best):
                return
            current.append(v)
            sub = candidates & nbrs[v]
            if sub:
                expand(current, sub)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            candidates &= ~(1 << v)

    expand([], (1 << m) - 1)
    return sorted(best)


def greedy_clique_positions(adjacency: np.ndarray, restarts: int, seed: Seed) -> list:
    """Best clique over randomized degree-ordered greedy passes.

    Each pass repeatedly adds the candidate with the most neighbours among
    the remaining candidates.  Restart 0 breaks ties by index; later
    restarts add uniform noise in [0, 1) to the degrees so equal-degree
    vertices shuffle.  Ties between equally large cliques go to the
    lexicographically smallest member list.
    """
    m = len(adjacency)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if m == 0:
        return []
    adj = np.asarray(adjacency, dtype=bool)
    best = None
    for r in range(restarts):
        if r == 0:
            noise = np.zeros(m)
        else:
            bits = rng.random_bits(seed, np.arange(m) + r * m, lane=rng.LANE_GREEDY)
            noise = rng.uniform_open(bits)
        members = []
        cand = np.arange(m)
        while len(cand):
            score = adj[np.ix_(cand, cand)].sum(axis=1) + noise[cand]
            # argmax returns the first maximum, i.e. the lowest index on ties
            v = int(cand[np.argmax(score)])
            members.append(v)
            cand = cand[adj[v, cand]]
        members.sort()
        if best is None or len(members) > len(best) or (len(members) == len(best) and members < best):
            best = members
    return best


def is_clique(adjacency: np.ndarray, positions) -> bool:
    adj = np.asarray(adjacency, dtype=bool)
    pos = list(positions)
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            if not adj[pos[a], pos[b]]:
                return False
    return True
