"""Brute-force reference computations shared by the tests.

Everything here is deliberately naive: full enumeration of edge labelings,
explicit scalar loops and plain bisection, with no code shared with the
package under test.
"""

import itertools
import math

import numpy as np

DEPTH = 3


def binary_tree_paths(depth=DEPTH):
    """Root paths of the depth-``depth`` binary tree as lists of edge indices.

    Edges are numbered level by level; the children of edge ``e`` at level
    ``k`` are the two edges with in-level positions ``2j`` and ``2j+1``.
    """
    offsets = [sum(2**j for j in range(1, k + 1)) for k in range(depth)]
    paths = []
    for bits in itertools.product((0, 1), repeat=depth):
        pos, path = 0, []
        for level, b in enumerate(bits):
            pos = 2 * pos + b
            path.append(offsets[level] + pos)
        paths.append(path)
    return paths


def all_labelings(probs, depth=DEPTH):
    """Every assignment of labels 1..N to the tree edges, with its probability."""
    n_edges = sum(2**k for k in range(1, depth + 1))
    n = len(probs)
    grid = np.array(list(itertools.product(range(n), repeat=n_edges)), dtype=np.int64)
    weight = np.prod(np.asarray(probs)[grid], axis=1)
    return grid + 1, weight


def carried(labels, paths, word):
    """Boolean mask of labelings in which some root path spells ``word``."""
    k = len(word)
    hit = np.zeros(len(labels), dtype=bool)
    for path in paths:
        ok = np.ones(len(labels), dtype=bool)
        for level in range(k):
            ok &= labels[:, path[level]] == word[level]
        hit |= ok
    return hit


def occupancy_by_enumeration(probs, word, depth=DEPTH):
    labels, weight = all_labelings(probs, depth)
    return float(weight[carried(labels, binary_tree_paths(depth), word)].sum())


def stopped_count_distribution(probs, words, depth=DEPTH):
    """Exact law of the number of ``words`` carried by at least one path."""
    labels, weight = all_labelings(probs, depth)
    paths = binary_tree_paths(depth)
    total = np.zeros(len(labels), dtype=np.int64)
    for w in words:
        total += carried(labels, paths, w)
    law = np.zeros(len(words) + 1)
    np.add.at(law, total, weight)
    return law


def moran_by_bisection(ratios, weights=None, target=1.0):
    """Root of ``sum w_i r_i^s = target`` by 200 plain bisection steps."""
    if weights is None:
        weights = [1.0] * len(ratios)

    def f(s):
        return sum(w * r**s for w, r in zip(weights, ratios)) - target

    lo, hi = -50.0, 50.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stopping_set_by_levels(ratios, n):
    """Enumerate all words up to a safe length and keep those that stop at ``n``."""
    scale = math.exp(-n) * (1 + 1e-11)
    max_len = int(math.ceil(n / -math.log(max(ratios)))) + 1
    out = []
    for k in range(1, max_len + 1):
        for w in itertools.product(range(1, len(ratios) + 1), repeat=k):
            prod = math.prod(ratios[i - 1] for i in w)
            parent = math.prod(ratios[i - 1] for i in w[:-1])
            if prod <= scale and parent > scale:
                out.append(w)
    return sorted(out)


def objective_by_hand(ratios, probs, branching, x):
    """psi + min(0, phi) on the point ``x`` rescaled onto h = 1."""
    hx = sum(-xi * math.log(r) for xi, r in zip(x, ratios))
    x = [xi / hx for xi in x]
    total = sum(x)
    psi = -sum(xi * math.log(xi / total) for xi in x if xi > 0)
    phi = sum(xi * math.log(branching * p) for xi, p in zip(x, probs))
    return psi + min(0.0, phi)


def simplex_grid_max(ratios, probs, branching, resolution):
    """Maximum of :func:`objective_by_hand` over a plain simplex grid."""
    n = len(ratios)
    best = -math.inf
    for c in itertools.product(range(resolution + 1), repeat=n - 1):
        last = resolution - sum(c)
        if last < 0:
            continue
        x = [v / resolution for v in c] + [last / resolution]
        best = max(best, objective_by_hand(ratios, probs, branching, x))
    return best
