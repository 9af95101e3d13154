"""Exact finite-instance reference: true margins and minimum paving size.

Everything here works on the stored truncation only; no envelope or tail
reasoning is involved.  The searches are exponential by design (they exist
to validate the certified pipeline on desk-scale instances, not to run in
production), so instance size is capped.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .errors import Infeasible, IndexOutOfRange
from .gram import GramSystem
from .partition import Paving

_EPS = float(np.finfo(np.float64).eps)

DEFAULT_SIZE_CAP = 16


def exact_margin(g: GramSystem, members: Sequence[int]) -> float:
    """min over n in the class of entry(n,n) - sum_{m in class, m != n} entry(n,m).

    Sums are compensated (math.fsum), so the result is exact up to one final
    rounding.  Negative margins are legal outputs; an empty class has margin
    +inf (vacuous).
    """
    cls = sorted(set(int(i) for i in members))
    if not cls:
        return math.inf
    if cls[0] < 1 or cls[-1] > g.size:
        raise IndexOutOfRange(
            f"class members must lie within the truncation 1..{g.size}")
    sub = g.submatrix(cls)
    out = math.inf
    for i in range(len(cls)):
        row = [float(sub[i, j]) for j in range(len(cls)) if j != i]
        out = min(out, float(sub[i, i]) - math.fsum(row))
    return out


def _dfs(G: np.ndarray, n_limit: int, epsilon: float, slack: float,
         classes: list[list[int]], margins: list[list[float]], start: int):
    """Depth-first assignment of indices start..T-1; returns class lists or None.

    Classes only open in index order and a new index may only join a class
    whose running margins all stay above epsilon - slack: entries are
    nonnegative, so margins only decrease as a class grows and such branches
    can never recover.  Complete assignments are re-checked with compensated
    sums before acceptance, making the slack purely protective.
    """
    size = G.shape[0]
    if start == size:
        for cls in classes:
            for i in range(len(cls)):
                row = [float(G[cls[i], j]) for j in cls if j != cls[i]]
                if float(G[cls[i], cls[i]]) - math.fsum(row) < epsilon:
                    return None
        return [list(c) for c in classes]
    limit = min(len(classes) + 1, n_limit)
    for c in range(limit):
        if c == len(classes):
            if G[start, start] < epsilon - slack:
                continue
            classes.append([start])
            margins.append([float(G[start, start])])
            hit = _dfs(G, n_limit, epsilon, slack, classes, margins, start + 1)
            classes.pop()
            margins.pop()
            if hit is not None:
                return hit
            continue
        mem = classes[c]
        new_margin = float(G[start, start]) - sum(float(G[start, j]) for j in mem)
        if new_margin < epsilon - slack:
            continue
        updated = [margins[c][k] - float(G[j, start]) for k, j in enumerate(mem)]
        if any(m < epsilon - slack for m in updated):
            continue
        saved = margins[c]
        margins[c] = updated + [new_margin]
        mem.append(start)
        hit = _dfs(G, n_limit, epsilon, slack, classes, margins, start + 1)
        mem.pop()
        margins[c] = saved
        if hit is not None:
            return hit
    return None


def _seed_state(G: np.ndarray, prefix: Sequence[int]):
    """Build classes/margins for a forced assignment of the first indices."""
    classes: list[list[int]] = []
    margins: list[list[float]] = []
    for i, c in enumerate(prefix):
        if c == len(classes):
            classes.append([])
            margins.append([])
        new_margin = float(G[i, i]) - sum(float(G[i, j]) for j in classes[c])
        margins[c] = [m - float(G[j, i]) for m, j in zip(margins[c], classes[c])]
        classes[c].append(i)
        margins[c].append(new_margin)
    return classes, margins


def min_partition(g: GramSystem, epsilon: float = 1e-12,
                  cap: int = DEFAULT_SIZE_CAP,
                  parallel: bool = False) -> tuple[int, Paving]:
    """Smallest number of classes paving 1..size with every exact margin >= epsilon.

    Exhaustive backtracking with symmetry breaking: index 1 is pinned to
    class 1 and a new class may only be opened in index order, which
    enumerates each set partition exactly once.  Iterative deepening over
    the class count keeps the first witness found lexicographically minimal
    among minimum-size pavings, so identical inputs give identical output.

    ``parallel=True`` splits the search on the class of index 2 and reduces
    the branch results deterministically; it changes scheduling, never the
    answer.
    """
    size = g.size
    if size > cap:
        raise ValueError(f"instance size {size} exceeds the search cap {cap}")
    if epsilon < 0.0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite nonnegative, got {epsilon}")
    G = g.dense()
    low_diag = [n + 1 for n in range(size) if G[n, n] < epsilon]
    if low_diag:
        raise Infeasible(
            f"indices {low_diag} have diagonal below epsilon={epsilon}; "
            "no paving can certify them even as singletons")
    mass = float(G.sum(axis=1).max()) + float(G.diagonal().max())
    slack = 64.0 * _EPS * (mass + 1.0) * size

    for n_limit in range(1, size + 1):
        if parallel and size >= 2 and n_limit >= 2:
            prefixes = ([0, 0], [0, 1])
            with ThreadPoolExecutor(max_workers=2) as pool:
                futures = [
                    pool.submit(_dfs, G, n_limit, epsilon, slack, *
                                _seed_state(G, p), 2)
                    for p in prefixes
                ]
                results = [f.result() for f in futures]
            # Prefix [0, 0] yields the lexicographically smaller witness.
            hit = results[0] if results[0] is not None else results[1]
        else:
            hit = _dfs(G, n_limit, epsilon, slack, [], [], 0)
        if hit is not None:
            classes = tuple(tuple(i + 1 for i in cls) for cls in hit)
            return n_limit, Paving(classes=classes, modulus=None, range_end=size)
    raise Infeasible("no paving found at any class count")  # pragma: no cover
