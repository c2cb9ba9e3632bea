"""Slow reference counters used only by the test suite.

Everything here is written for transparency, not speed: quadruples are
materialized explicitly and pairs are compared with dense boolean
matrices, so results are easy to audit and serve as oracles for the
fast per-class counters in the package.
"""

from __future__ import annotations

import itertools

import numpy as np

from latinlab.core import LatinRectangle, LatinSquare, TripleSystem, to_triples
from latinlab.counting import DEGENERACY_LABELS


def _filled_cells(obj):
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        obj = to_triples(obj)
    return obj.n, list(obj.triples)


def brute_intercalates(obj) -> int:
    """All 2-row, 2-column submatrices checked directly."""
    n, cells = _filled_cells(obj)
    grid = {(r, c): s for r, c, s in cells}
    rows = sorted({r for r, _, _ in cells})
    cols = sorted({c for _, c, _ in cells})
    count = 0
    for r1, r2 in itertools.combinations(rows, 2):
        for c1, c2 in itertools.combinations(cols, 2):
            a = grid.get((r1, c1))
            b = grid.get((r1, c2))
            c = grid.get((r2, c1))
            d = grid.get((r2, c2))
            if a is None or b is None or c is None or d is None:
                continue
            if a == d and b == c and a != b:
                count += 1
    return count


def _proper_quadruple_arrays(obj):
    """Arrays (r1, r2, c1, c2, a, b, c, d) over every ordered quadruple
    with r1 != r2, c1 != c2 and all four cells filled."""
    n, cells = _filled_cells(obj)
    grid = {(r, c): s for r, c, s in cells}
    recs = []
    rows = sorted({r for r, _, _ in cells})
    cols = sorted({c for _, c, _ in cells})
    for r1 in rows:
        for r2 in rows:
            if r1 == r2:
                continue
            for c1 in cols:
                for c2 in cols:
                    if c1 == c2:
                        continue
                    try:
                        pat = (
                            grid[r1, c1],
                            grid[r1, c2],
                            grid[r2, c1],
                            grid[r2, c2],
                        )
                    except KeyError:
                        continue
                    recs.append((r1, r2, c1, c2) + pat)
    return np.array(recs, dtype=np.int64).reshape(-1, 8), n


def brute_cuboctahedra(obj) -> dict[str, int]:
    """Pairwise comparison of all same-pattern quadruple pairs.

    Returns totals for the proper-by-proper part plus the nondegenerate
    count; degenerate shapes (collapsed rows or columns) are counted
    separately by brute_total below.
    """
    recs, n = _proper_quadruple_arrays(obj)
    if len(recs) == 0:
        return {"proper_pairs": 0, "nondegenerate": 0}
    pat = (
        ((recs[:, 4] * n + recs[:, 5]) * n + recs[:, 6]) * n + recs[:, 7]
    )
    eq = pat[:, None] == pat[None, :]
    proper_pairs = int(eq.sum())

    syms_distinct = (recs[:, 4] != recs[:, 7]) & (recs[:, 5] != recs[:, 6])
    r1, r2, c1, c2 = recs[:, 0], recs[:, 1], recs[:, 2], recs[:, 3]
    row_disjoint = (
        (r1[:, None] != r1[None, :])
        & (r1[:, None] != r2[None, :])
        & (r2[:, None] != r1[None, :])
        & (r2[:, None] != r2[None, :])
    )
    col_disjoint = (
        (c1[:, None] != c1[None, :])
        & (c1[:, None] != c2[None, :])
        & (c2[:, None] != c1[None, :])
        & (c2[:, None] != c2[None, :])
    )
    good = (
        eq
        & row_disjoint
        & col_disjoint
        & syms_distinct[:, None]
        & syms_distinct[None, :]
    )
    return {"proper_pairs": proper_pairs, "nondegenerate": int(good.sum())}


def brute_total(obj) -> int:
    """Same-pattern pairs over all quadruples, degenerate shapes included."""
    n, cells = _filled_cells(obj)
    grid = {(r, c): s for r, c, s in cells}
    rows = sorted({r for r, _, _ in cells})
    cols = sorted({c for _, c, _ in cells})
    pats: dict[tuple, int] = {}
    for r1 in rows:
        for r2 in rows:
            for c1 in cols:
                for c2 in cols:
                    try:
                        pat = (
                            grid[r1, c1],
                            grid[r1, c2],
                            grid[r2, c1],
                            grid[r2, c2],
                        )
                    except KeyError:
                        continue
                    # shape must match for two quadruples to be compared
                    key = (r1 == r2, c1 == c2) + pat
                    pats[key] = pats.get(key, 0) + 1
    return sum(v * v for v in pats.values())


def _pair_label(same_row: bool, same_col: bool, pat, q1, q2) -> str:
    """Degeneracy class of one ordered quadruple pair, by case analysis."""
    identical = q1 == q2
    if same_row and same_col:
        return "same-cell-twice" if identical else "two-cells-same-symbol"
    if same_col:
        return "same-2x1-twice" if identical else "two-2x1-same-symbols"
    if same_row:
        return "same-1x2-twice" if identical else "two-1x2-same-symbols"
    a, b, c, d = pat
    if a != d and b != c:
        if identical:
            return "same-2x2-distinct-symbols"
        rows_apart = not ({q1[0], q1[1]} & {q2[0], q2[1]})
        cols_apart = not ({q1[2], q1[3]} & {q2[2], q2[3]})
        if rows_apart and cols_apart:
            return "nondegenerate"
        return "row-or-column-sharing"
    if identical:
        return "same-2x2-repeated-symbol"
    cells1 = {(q1[0], q1[2]), (q1[0], q1[3]), (q1[1], q1[2]), (q1[1], q1[3])}
    cells2 = {(q2[0], q2[2]), (q2[0], q2[3]), (q2[1], q2[2]), (q2[1], q2[3])}
    if len(cells1 & cells2) == 1:
        return "opposite-face-overlap"
    return "repeated-symbol-other"


def brute_report(obj) -> dict[str, int]:
    """Per-class census: every same-shape same-pattern ordered pair of
    quadruples is labeled one at a time.  Keys are the degeneracy labels
    plus "nondegenerate" and "total"."""
    n, cells = _filled_cells(obj)
    grid = {(r, c): s for r, c, s in cells}
    rows = sorted({r for r, _, _ in cells})
    cols = sorted({c for _, c, _ in cells})
    groups: dict[tuple, list] = {}
    for r1 in rows:
        for r2 in rows:
            for c1 in cols:
                for c2 in cols:
                    try:
                        pat = (
                            grid[r1, c1],
                            grid[r1, c2],
                            grid[r2, c1],
                            grid[r2, c2],
                        )
                    except KeyError:
                        continue
                    key = (r1 == r2, c1 == c2) + pat
                    groups.setdefault(key, []).append((r1, r2, c1, c2))
    out = {label: 0 for label in DEGENERACY_LABELS}
    out["nondegenerate"] = 0
    for key, quads in groups.items():
        same_row, same_col, pat = key[0], key[1], key[2:]
        for q1 in quads:
            for q2 in quads:
                out[_pair_label(same_row, same_col, pat, q1, q2)] += 1
    out["total"] = sum(out.values())
    return out


def brute_subsquares(square: LatinSquare, k: int) -> int:
    """Check every k-subset of rows and columns for the subsquare property."""
    n = square.n
    g = square.grid
    count = 0
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.combinations(range(n), k):
            block = g[np.ix_(rows, cols)]
            syms = set(block.ravel().tolist())
            if len(syms) != k:
                continue
            ok = all(
                len(set(block[i].tolist())) == k for i in range(k)
            ) and all(len(set(block[:, j].tolist())) == k for j in range(k))
            if ok:
                count += 1
    return count


def brute_girth(obj, g_max: int = 8) -> int | None:
    """Girth by exhausting all small triple subsets."""
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        obj = to_triples(obj)
    n = obj.n
    tris = [frozenset((("r", r), ("c", c), ("s", s))) for r, c, s in obj.triples]
    best = None
    # j vertices spanning j-2 triples means some i-subset of triples,
    # i >= 2, covers exactly i+2 vertices
    for i in range(2, g_max - 1):
        if best is not None:
            break
        for sub in itertools.combinations(tris, i):
            verts = frozenset().union(*sub)
            if len(verts) == i + 2 and len(verts) <= g_max:
                v = len(verts)
                best = v if best is None else min(best, v)
    return best


def brute_embeddings(parts, edges, host) -> int:
    """Color-preserving injective embeddings, checked by raw enumeration."""
    if isinstance(host, (LatinSquare, LatinRectangle)):
        host = to_triples(host)
    n = host.n
    tripleset = set(host.triples)
    h1, h2, h3 = parts
    count = 0
    for rmap in itertools.permutations(range(n), h1):
        for cmap in itertools.permutations(range(n), h2):
            for smap in itertools.permutations(range(n), h3):
                if all(
                    (rmap[i], cmap[j], smap[k]) in tripleset for i, j, k in edges
                ):
                    count += 1
    return count
