"""Few cells, many intercalates: the extremal profile and its bounds.

I*(m) is the maximum number of intercalates a partial Latin square with
m filled cells can carry, and Phi(N) = min{m : I*(m) >= N} is the least
number of cells achieving N intercalates.  The exact oracle searches all
m-cell configurations up to relabeling: in a configuration where every
cell lies in an intercalate each used row, column and symbol occurs at
least twice, so floor(m/2) labels per class suffice, and configurations
with idle cells are covered by monotonicity I*(m) >= I*(m-1).  The
search enumerates cells in lexicographic order with gap-free labels
(over-generating isomorphic copies is harmless for a maximum) and prunes
with the fact that the i-th cell closes at most floor((i-1)/3) new
intercalates: two intercalates through one cell share no other cell.

The lower bound floor((4N)^(1/3))^2 comes from triangle counting in the
tripartite graph of a configuration: an intercalate spans an octahedron,
four of whose eight faces are triangles beyond the cells themselves, so
a configuration Q has at least |Q| + 4 N(Q) triangles while a graph with
3|Q| edges cannot carry more than roughly (|Q|)^(3/2).  The upper bound
takes the XOR table of the smallest power of two whose cube exceeds
4N + N^(3/4) (its n^2(n-1)/4 intercalates usually suffice) and adds one
disjoint smaller XOR block when N lands between table values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .core import LatinSquare, TripleSystem, group_table, to_triples, validate
from .counting import count_intercalates

ORACLE_CELL_CAP = 8


# ---------------------------------------------------------------------------
# exact oracle


def _new_intercalates(cells: list[tuple[int, int, int]],
                      by_rc: dict, by_cs: dict,
                      r: int, c: int, s: int) -> int:
    made = 0
    for (r0, c0, s0) in cells:
        if r0 != r or c0 == c or s0 == s:
            continue
        r2 = by_cs.get((c, s0))
        if r2 is not None and by_rc.get((r2, c0)) == s:
            made += 1
    return made


@lru_cache(maxsize=None)
def max_intercalates_oracle(m: int) -> tuple[int, TripleSystem]:
    """Exact I*(m) with a maximizing configuration, m <= 8."""
    if not 0 <= m <= ORACLE_CELL_CAP:
        raise ValueError(f"oracle supports 0 <= m <= {ORACLE_CELL_CAP}")
    if m < 4:
        # an intercalate needs 4 cells; any clash-free placement works
        return 0, TripleSystem(max(m, 1), ((i, i, i) for i in range(m)))
    prev_best, prev_witness = max_intercalates_oracle(m - 1)
    cap = m // 2
    # potential[i] = most intercalates cells i+1..m-1 can still add
    tail = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        tail[i] = tail[i + 1] + i // 3

    best = prev_best
    best_cells: list[tuple[int, int, int]] | None = None
    cells: list[tuple[int, int, int]] = [(0, 0, 0)]
    by_rc = {(0, 0): 0}
    by_rs = {(0, 0): 0}
    by_cs = {(0, 0): 0}

    def search(count: int, maxr: int, maxc: int, maxs: int) -> None:
        nonlocal best, best_cells
        i = len(cells)
        if i == m:
            if count > best:
                best = count
                best_cells = list(cells)
            return
        if count + tail[i] <= best:
            return
        last = cells[-1]
        for r in range(last[0], min(maxr + 1, cap - 1) + 1):
            for c in range(min(maxc + 1, cap - 1) + 1):
                if (r, c) <= last[:2]:
                    continue
                if (r, c) in by_rc:
                    continue
                for s in range(min(maxs + 1, cap - 1) + 1):
                    if (r, s) in by_rs or (c, s) in by_cs:
                        continue
                    made = _new_intercalates(cells, by_rc, by_cs, r, c, s)
                    cells.append((r, c, s))
                    by_rc[r, c] = s
                    by_rs[r, s] = c
                    by_cs[c, s] = r
                    search(count + made, max(maxr, r), max(maxc, c), max(maxs, s))
                    del by_rc[r, c], by_rs[r, s], by_cs[c, s]
                    cells.pop()

    search(0, 0, 0, 0)
    if best_cells is None:
        return prev_best, prev_witness
    n = max(max(t) for t in best_cells) + 1
    return best, TripleSystem(n, best_cells)


def phi_exact(N: int, max_cells: int = ORACLE_CELL_CAP) -> int | None:
    """min{m : I*(m) >= N} when it is within the oracle range."""
    if N < 1:
        raise ValueError("need N >= 1")
    for m in range(1, min(max_cells, ORACLE_CELL_CAP) + 1):
        if max_intercalates_oracle(m)[0] >= N:
            return m
    return None


# ---------------------------------------------------------------------------
# bounds


def _icbrt(x: int) -> int:
    r = round(x ** (1 / 3))
    while r**3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def phi_lower_bound(N: int) -> int:
    """floor((4N)^(1/3))^2 cells are needed for N intercalates."""
    if N < 1:
        raise ValueError("need N >= 1")
    return _icbrt(4 * N) ** 2


def _xor_block_intercalates(k: int) -> int:
    return (8**k - 4**k) // 4


def phi_upper_bound(N: int) -> tuple[int, TripleSystem]:
    """Cell count and witness from XOR tables, >= N intercalates."""
    if N < 1:
        raise ValueError("need N >= 1")
    k = 1
    while 8**k <= 4 * N + N**0.75:
        k += 1
    triples = list(to_triples(group_table("elementary-abelian-2", k)).triples)
    cells = 4**k
    deficit = N - _xor_block_intercalates(k)
    if deficit > 0:
        j = 1
        while _xor_block_intercalates(j) < deficit:
            j += 1
        off = 1 << k
        block = to_triples(group_table("elementary-abelian-2", j)).triples
        triples += [(r + off, c + off, s + off) for r, c, s in block]
        cells += 4**j
        off += 1 << j
    else:
        off = 1 << k
    witness = TripleSystem(off, triples)
    assert count_intercalates(witness) >= N
    return cells, witness


@dataclass
class PhiRecord:
    N: int
    lower_bound: int
    upper_bound: int
    exact: int | None
    witness: TripleSystem
    ratio_lower: float
    ratio_upper: float


def phi_report(N: int, max_cells: int = ORACLE_CELL_CAP) -> PhiRecord:
    """Bounds, the exact value when the oracle reaches it, and the
    ratios against the (4N)^(2/3) growth rate."""
    lower = phi_lower_bound(N)
    upper, witness = phi_upper_bound(N)
    exact = phi_exact(N, max_cells)
    if exact is not None:
        _, witness = max_intercalates_oracle(exact)
        # the oracle witness maximizes I*(exact) so it carries >= N
        upper = min(upper, exact)
    scale = (4 * N) ** (2 / 3)
    return PhiRecord(
        N=N,
        lower_bound=lower,
        upper_bound=upper,
        exact=exact,
        witness=witness,
        ratio_lower=lower / scale,
        ratio_upper=upper / scale,
    )


# ---------------------------------------------------------------------------
# triangle counting behind the lower bound


def graph_triangles(ts: TripleSystem) -> int:
    """Triangles of the tripartite graph of ts (cells plus spurious ones).

    Every configuration satisfies triangles >= |Q| + 4 N(Q): each
    intercalate's octahedron has four triangle faces besides its cells.
    """
    rc: dict[int, set[int]] = {}
    cs: dict[int, set[int]] = {}
    sr: dict[int, set[int]] = {}
    for r, c, s in ts.triples:
        rc.setdefault(r, set()).add(c)
        cs.setdefault(c, set()).add(s)
        sr.setdefault(s, set()).add(r)
    total = 0
    for r, cols in rc.items():
        for c in cols:
            for s in cs.get(c, ()):
                if r in sr.get(s, ()):
                    total += 1
    return total
