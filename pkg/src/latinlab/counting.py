"""Exact substructure counters.

Intercalates (2 x 2 Latin subsquares) are counted through row-pair
permutations: rows i and j induce the permutation sigma = pos_j o sym_i
on columns, and each 2-cycle of sigma is exactly one intercalate on that
row pair.  O(n^3) overall.

A cuboctahedron is an ordered pair of quadruples (r1, r2, c1, c2) and
(r1', r2', c1', c2') whose 2 x 2 symbol patterns agree position by
position; degenerate coincidences (equal rows, equal columns, repeated
symbols, shared cells) are allowed.  The total count is sum of class^2
over quadruples grouped by pattern; group tables hit exactly n^5 by the
quadrangle condition.  Nondegenerate copies (four distinct rows, columns
and symbols) are extracted per pattern class by inclusion-exclusion over
the possible row/column coincidences, which the Latin property reduces
to dictionary lookups: within a class, each of r1, r2, c1, c2 determines
the member.

Girth here is the triple-system girth: the smallest g > 3 such that some
g vertices of the tripartite vertex set span g - 2 triples.  Girth
greater than 6 is equivalent to having no intercalate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import LatinRectangle, LatinSquare, TripleSystem, to_triples

DEGENERACY_LABELS = (
    "same-2x2-distinct-symbols",
    "same-2x2-repeated-symbol",
    "two-2x1-same-symbols",
    "same-2x1-twice",
    "two-1x2-same-symbols",
    "same-1x2-twice",
    "two-cells-same-symbol",
    "same-cell-twice",
    "opposite-face-overlap",
    "row-or-column-sharing",
    "repeated-symbol-other",
)


# ---------------------------------------------------------------------------
# intercalates


def count_intercalates(obj) -> int:
    """Number of 2 x 2 Latin subsquares (unordered)."""
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        return _intercalates_grid(obj.grid, obj.n)
    if isinstance(obj, TripleSystem):
        return _intercalates_triples(obj)
    raise TypeError(f"cannot count intercalates of {type(obj).__name__}")


def _intercalates_grid(grid: np.ndarray, n: int) -> int:
    k = grid.shape[0]
    g = grid.astype(np.intp)
    ident = np.arange(n)
    pos = np.empty((k, n), dtype=np.intp)
    for i in range(k):
        pos[i, g[i]] = ident
    total = 0
    for i in range(k):
        for j in range(i + 1, k):
            sigma = pos[j][g[i]]
            two = (sigma != ident) & (sigma[sigma] == ident)
            total += int(two.sum()) // 2
    return total


def _intercalates_triples(ts: TripleSystem) -> int:
    if not ts_is_latin(ts):
        raise ValueError("triple system is not a partial Latin square")
    by_cs = ts.by_cs
    by_rc = ts.by_rc
    rows: dict[int, list[tuple[int, int]]] = {}
    for r, c, s in ts.triples:
        rows.setdefault(r, []).append((c, s))
    total = 0
    for r, cells in rows.items():
        for ci in range(len(cells)):
            x, a = cells[ci]
            for cj in range(len(cells)):
                if ci == cj:
                    continue
                y, b = cells[cj]
                if x > y:
                    continue
                j = by_cs.get((x, b))
                # completing cells must sit in a common later row
                if j is not None and j > r and by_rc.get((j, y)) == a:
                    total += 1
    return total


# ---------------------------------------------------------------------------
# quadruple enumeration shared by the cuboctahedron counters


def _cells_of(obj) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        k, n = obj.grid.shape
        rr, cc = np.meshgrid(np.arange(k), np.arange(n), indexing="ij")
        return (
            rr.ravel().astype(np.int64),
            cc.ravel().astype(np.int64),
            obj.grid.ravel().astype(np.int64),
            n,
        )
    if isinstance(obj, TripleSystem):
        if not ts_is_latin(obj):
            raise ValueError("triple system is not a partial Latin square")
        arr = np.array(obj.triples, dtype=np.int64).reshape(-1, 3)
        return arr[:, 0], arr[:, 1], arr[:, 2], obj.n
    raise TypeError(f"no cell view for {type(obj).__name__}")


def ts_is_latin(ts: TripleSystem) -> bool:
    t = ts.triples
    return (
        len({(r, c) for r, c, _ in t}) == len(t)
        and len({(r, s) for r, _, s in t}) == len(t)
        and len({(c, s) for _, c, s in t}) == len(t)
    )


def _pairs_within_groups(keys: np.ndarray):
    """All ordered index pairs (P, Q), P != Q allowed later, grouped by key.

    Returns (P, Q) global index arrays covering every ordered pair of
    records that share a key, diagonal included.
    """
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    boundaries = np.flatnonzero(np.diff(sk)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(sk)]))
    sizes = ends - starts
    sq = sizes * sizes
    total = int(sq.sum())
    gout = np.repeat(np.arange(len(sizes)), sq)
    base = np.repeat(np.concatenate(([0], np.cumsum(sq)[:-1])), sq)
    rank = np.arange(total) - base
    i = rank // sizes[gout]
    j = rank % sizes[gout]
    P = order[starts[gout] + i]
    Q = order[starts[gout] + j]
    return P, Q


def _column_cell_pairs(rows, cols, syms, n):
    """Ordered pairs of distinct filled cells sharing a column.

    Returns arrays (r1, r2, s1, s2, col); one record per ordered pair.
    """
    key = cols
    P, Q = _pairs_within_groups(key)
    keep = rows[P] != rows[Q]
    P, Q = P[keep], Q[keep]
    return rows[P], rows[Q], syms[P], syms[Q], cols[P]


def _row_cell_pairs(rows, cols, syms, n):
    key = rows
    P, Q = _pairs_within_groups(key)
    keep = cols[P] != cols[Q]
    P, Q = P[keep], Q[keep]
    return cols[P], cols[Q], syms[P], syms[Q], rows[P]


def _proper_quadruples(obj):
    """Ordered quadruples (r1, r2, c1, c2), r1 != r2, c1 != c2, all four
    cells filled, with their patterns (a, b, c, d)."""
    rows, cols, syms, n = _cells_of(obj)
    r1, r2, s1, s2, col = _column_cell_pairs(rows, cols, syms, n)
    # pair up two column records sharing the ordered row pair (r1, r2)
    key = r1 * n + r2
    P, Q = _pairs_within_groups(key)
    keep = col[P] != col[Q]
    P, Q = P[keep], Q[keep]
    return {
        "r1": r1[P],
        "r2": r2[P],
        "c1": col[P],
        "c2": col[Q],
        "a": s1[P],
        "b": s1[Q],
        "c": s2[P],
        "d": s2[Q],
        "n": n,
    }


def _pattern_keys(q) -> np.ndarray:
    n = q["n"]
    return ((q["a"] * n + q["b"]) * n + q["c"]) * n + q["d"]


# ---------------------------------------------------------------------------
# totals


def count_cuboctahedra_total(obj) -> int:
    """Ordered same-pattern quadruple pairs, degeneracies included."""
    if isinstance(obj, LatinSquare):
        return _total_dense(obj)
    return _total_generic(obj)


def _total_dense(sq: LatinSquare) -> int:
    n = sq.n
    if n > 64:
        raise ValueError("dense cuboctahedron totals are desk-capped at n <= 64")
    g = sq.grid.astype(np.uint32)
    a = g[:, None, :, None]
    b = g[:, None, None, :]
    c = g[None, :, :, None]
    d = g[None, :, None, :]
    keys = (((a * n + b) * n + c) * n + d).ravel()
    _, counts = np.unique(keys, return_counts=True)
    return int((counts.astype(np.int64) ** 2).sum())


def _group_square_sum(keys: np.ndarray) -> tuple[int, int]:
    """(sum of class^2, sum of class) over records grouped by key."""
    if len(keys) == 0:
        return 0, 0
    _, counts = np.unique(keys, return_counts=True)
    counts = counts.astype(np.int64)
    return int((counts**2).sum()), int(counts.sum())


def _total_generic(obj) -> int:
    rows, cols, syms, n = _cells_of(obj)
    total = 0
    # 1x1 shape: quadruples (r, r, c, c); classes keyed by the symbol
    sq, _ = _group_square_sum(syms)
    total += sq
    # 2x1 shape: (r1, r2, c, c) with r1 != r2; classes by (s1, s2)
    r1, r2, s1, s2, _c = _column_cell_pairs(rows, cols, syms, n)
    sq, _ = _group_square_sum(s1 * n + s2)
    total += sq
    # 1x2 shape: (r, r, c1, c2); classes by (s1, s2)
    c1, c2, s1, s2, _r = _row_cell_pairs(rows, cols, syms, n)
    sq, _ = _group_square_sum(s1 * n + s2)
    total += sq
    # proper 2x2 shape
    q = _proper_quadruples(obj)
    sq, _ = _group_square_sum(_pattern_keys(q))
    total += sq
    return total


# ---------------------------------------------------------------------------
# nondegenerate copies and the degeneracy breakdown


def _class_slices(keys: np.ndarray):
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    boundaries = np.flatnonzero(np.diff(sk)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(sk)]))
    return order, starts, ends


def _class_nondeg_pairs(R1, R2, C1, C2) -> int:
    """Ordered pairs in one pattern class with disjoint rows and columns.

    The class comes from a distinct-symbol pattern, so each coordinate is
    injective across members and every coincidence event pins its partner.
    """
    m = len(R1)
    if m == 1:
        return 0
    idx_r1 = {int(v): i for i, v in enumerate(R1)}
    idx_r2 = {int(v): i for i, v in enumerate(R2)}
    idx_c1 = {int(v): i for i, v in enumerate(C1)}
    e1 = e1e2 = e1f1 = e1f2 = e1e2f1 = e1e2f2 = e1f1f2 = e1e2f1f2 = 0
    e2f1 = e2f2 = e2f1f2 = 0
    f1 = f1f2 = 0
    for i in range(m):
        j = idx_r1.get(int(R2[i]))
        if j is not None:  # E1: r1' = r2
            e1 += 1
            be2 = R2[j] == R1[i]
            bf1 = C1[j] == C2[i]
            bf2 = C2[j] == C1[i]
            e1e2 += be2
            e1f1 += bf1
            e1f2 += bf2
            e1e2f1 += be2 and bf1
            e1e2f2 += be2 and bf2
            e1f1f2 += bf1 and bf2
            e1e2f1f2 += be2 and bf1 and bf2
        j = idx_r2.get(int(R1[i]))
        if j is not None:  # E2: r2' = r1
            e2f1 += C1[j] == C2[i]
            e2f2 += C2[j] == C1[i]
            e2f1f2 += C1[j] == C2[i] and C2[j] == C1[i]
        j = idx_c1.get(int(C2[i]))
        if j is not None:  # F1: c1' = c2
            f1 += 1
            f1f2 += C2[j] == C1[i]
    e2 = e1
    f2 = f1
    row_overlap = m + e1 + e2 - e1e2
    col_overlap = m + f1 + f2 - f1f2
    both = (
        m
        + (e1f1 + e1f2 + e2f1 + e2f2)
        - (e1e2f1 + e1e2f2 + e1f1f2 + e2f1f2)
        + e1e2f1f2
    )
    bad = row_overlap + col_overlap - both
    return m * m - bad


def count_cuboctahedra_nondegenerate(obj) -> int:
    """Same-pattern quadruple pairs with 4 distinct rows, columns, symbols."""
    q = _proper_quadruples(obj)
    a, b, c, d = q["a"], q["b"], q["c"], q["d"]
    distinct = (a != d) & (b != c)  # a!=b, a!=c, b!=d, c!=d hold by Latin
    keys = _pattern_keys(q)[distinct]
    R1, R2 = q["r1"][distinct], q["r2"][distinct]
    C1, C2 = q["c1"][distinct], q["c2"][distinct]
    order, starts, ends = _class_slices(keys)
    total = 0
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        idx = order[s:e]
        total += _class_nondeg_pairs(R1[idx], R2[idx], C1[idx], C2[idx])
    return total


@dataclass
class CuboctahedronReport:
    n: int
    total: int
    nondegenerate: int
    breakdown: dict[str, int] = field(default_factory=dict)

    def degenerate_total(self) -> int:
        return sum(self.breakdown.values())


def cuboctahedron_report(obj) -> CuboctahedronReport:
    """Full cuboctahedron census with the degenerate classes labeled.

    The breakdown plus the nondegenerate count partitions the total:
    point/column/row collapses, the same proper submatrix taken twice,
    opposite-face overlaps (same repeated-symbol pattern sharing exactly
    one cell), proper distinct-symbol pairs sharing a row or column, and
    a residual class for the remaining repeated-symbol coincidences.
    """
    rows, cols, syms, n = _cells_of(obj)
    out = {label: 0 for label in DEGENERACY_LABELS}

    sq, lin = _group_square_sum(syms)
    out["same-cell-twice"] = lin
    out["two-cells-same-symbol"] = sq - lin

    r1, r2, s1, s2, _c = _column_cell_pairs(rows, cols, syms, n)
    sq, lin = _group_square_sum(s1 * n + s2)
    out["same-2x1-twice"] = lin
    out["two-2x1-same-symbols"] = sq - lin

    c1, c2, s1, s2, _r = _row_cell_pairs(rows, cols, syms, n)
    sq, lin = _group_square_sum(s1 * n + s2)
    out["same-1x2-twice"] = lin
    out["two-1x2-same-symbols"] = sq - lin

    q = _proper_quadruples(obj)
    a, b, c, d = q["a"], q["b"], q["c"], q["d"]
    keys = _pattern_keys(q)
    distinct = (a != d) & (b != c)
    nondeg = 0

    # distinct-symbol classes: diagonal, clean pairs, and row/column shares
    dk = keys[distinct]
    R1, R2 = q["r1"][distinct], q["r2"][distinct]
    C1, C2 = q["c1"][distinct], q["c2"][distinct]
    order, starts, ends = _class_slices(dk)
    for s, e in zip(starts, ends):
        idx = order[s:e]
        m = e - s
        good = (
            _class_nondeg_pairs(R1[idx], R2[idx], C1[idx], C2[idx]) if m > 1 else 0
        )
        nondeg += good
        out["same-2x2-distinct-symbols"] += m
        out["row-or-column-sharing"] += m * m - m - good

    # repeated-symbol classes: small, classified pair by pair
    rep = ~distinct
    rk = keys[rep]
    R1, R2 = q["r1"][rep], q["r2"][rep]
    C1, C2 = q["c1"][rep], q["c2"][rep]
    order, starts, ends = _class_slices(rk)
    for s, e in zip(starts, ends):
        idx = order[s:e]
        m = e - s
        out["same-2x2-repeated-symbol"] += m
        if m < 2:
            continue
        members = [
            (int(R1[i]), int(R2[i]), int(C1[i]), int(C2[i])) for i in idx
        ]
        cellsets = [
            {(t[0], t[2]), (t[0], t[3]), (t[1], t[2]), (t[1], t[3])}
            for t in members
        ]
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                shared = len(cellsets[i] & cellsets[j])
                if shared == 1:
                    out["opposite-face-overlap"] += 1
                else:
                    out["repeated-symbol-other"] += 1

    total = nondeg + sum(out.values())
    return CuboctahedronReport(n=n, total=total, nondegenerate=nondeg, breakdown=out)


# ---------------------------------------------------------------------------
# order-k subsquares


def count_subsquares(square: LatinSquare, k: int) -> int:
    """Number of k x k Latin subsquares (row set, column set pairs), k in 2..4.

    For the first two rows of a candidate row set, the column set must be
    a union of cycles of the induced permutation (fixed points cannot
    occur), which reduces the column search to 2-cycles, 3-cycles, or
    4-cycles / pairs of 2-cycles.
    """
    n = square.n
    if not 2 <= k <= 4:
        raise ValueError("supported subsquare orders are 2, 3, 4")
    if n > 40:
        raise ValueError("subsquare counting is desk-capped at n <= 40")
    if k == 2:
        return count_intercalates(square)
    g = square.grid.astype(np.intp)
    ident = np.arange(n)
    pos = np.empty((n, n), dtype=np.intp)
    for i in range(n):
        pos[i, g[i]] = ident

    def cycles_of(i: int, j: int):
        sigma = pos[j][g[i]]
        seen = np.zeros(n, dtype=bool)
        out = []
        for x in range(n):
            if seen[x]:
                continue
            cyc = [x]
            seen[x] = True
            y = int(sigma[x])
            while y != x:
                cyc.append(y)
                seen[y] = True
                y = int(sigma[y])
            out.append(cyc)
        return out

    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            cycles = [c for c in cycles_of(i, j)]
            if k == 3:
                candidates = [c for c in cycles if len(c) == 3]
            else:
                twos = [c for c in cycles if len(c) == 2]
                candidates = [c for c in cycles if len(c) == 4]
                for t1 in range(len(twos)):
                    for t2 in range(t1 + 1, len(twos)):
                        candidates.append(twos[t1] + twos[t2])
            for cols in candidates:
                colarr = np.array(cols)
                symbols = g[i][colarr]
                # deeper rows must use exactly these k symbols on these columns
                ok = np.isin(g[j + 1 :, colarr], symbols).all(axis=1)
                w = int(ok.sum())
                if k == 3:
                    total += w
                else:
                    total += w * (w - 1) // 2
    return total


# ---------------------------------------------------------------------------
# girth


def girth(obj, g_max: int = 12) -> int | None:
    """Smallest g in (3, g_max] with g vertices spanning g - 2 triples.

    Returns None when every configuration on at most g_max vertices is
    strictly sparser, i.e. the girth exceeds g_max.  Search is a DFS over
    connected triple sets rooted at each triple (extensions restricted to
    larger indices, so each configuration is generated from its minimal
    member), pruning any state that spans too many vertices.
    """
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        obj = to_triples(obj)
    if not isinstance(obj, TripleSystem):
        raise TypeError(f"girth undefined for {type(obj).__name__}")
    if g_max > 12:
        raise ValueError("girth search is desk-capped at g_max <= 12")
    n = obj.n
    tris = [(r, n + c, 2 * n + s) for r, c, s in obj.triples]
    incident: dict[int, list[int]] = {}
    for t, tri in enumerate(tris):
        for v in tri:
            incident.setdefault(v, []).append(t)

    best: int | None = None

    def search(root: int) -> None:
        nonlocal best
        stack = [(frozenset([root]), frozenset(tris[root]))]
        seen = {frozenset([root])}
        while stack:
            members, verts = stack.pop()
            bound = (best if best is not None else g_max + 1) - 1
            cands = set()
            for v in verts:
                for t in incident.get(v, ()):
                    if t > root and t not in members:
                        cands.add(t)
            for t in cands:
                nv = verts | frozenset(tris[t])
                if len(nv) > min(g_max, bound):
                    continue
                nm = members | {t}
                if nm in seen:
                    continue
                seen.add(nm)
                if len(nv) == len(nm) + 2:
                    best = len(nv) if best is None else min(best, len(nv))
                    continue
                stack.append((nm, nv))

    for root in range(len(tris)):
        if best == 4:
            break
        search(root)
    return best


# ---------------------------------------------------------------------------
# configuration counting


@dataclass(frozen=True)
class ColoredTripleSystem:
    """Small configuration: parts of sizes (h1, h2, h3), triples one
    vertex per part, given as class-local indices."""

    parts: tuple[int, int, int]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        h1, h2, h3 = self.parts
        for e in self.edges:
            i, j, k = e
            if not (0 <= i < h1 and 0 <= j < h2 and 0 <= k < h3):
                raise ValueError(f"edge {e} escapes parts {self.parts}")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("repeated edge")

    def order(self) -> int:
        return sum(self.parts)


def intercalate_configuration() -> ColoredTripleSystem:
    return ColoredTripleSystem(
        (2, 2, 2),
        ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)),
    )


def cuboctahedron_configuration() -> ColoredTripleSystem:
    """Nondegenerate cuboctahedron: 12 vertices, 8 triples.  Symbol
    vertices are shared between the two quadruples; rows and columns are
    not."""
    edges = []
    for block in (0, 2):  # rows 0,1 vs 2,3; columns likewise
        for i in (0, 1):
            for j in (0, 1):
                edges.append((block + i, block + j, 2 * i + j))
    return ColoredTripleSystem((4, 4, 4), tuple(edges))


def count_configuration(config: ColoredTripleSystem, host) -> int:
    """Labeled color-preserving embeddings of ``config`` into ``host``.

    Vertices map injectively within each class (rows to rows, columns to
    columns, symbols to symbols); every configuration triple must land on
    a host triple.  Isolated configuration vertices contribute falling
    factorials.
    """
    if isinstance(host, (LatinSquare, LatinRectangle)):
        host = to_triples(host)
    if not isinstance(host, TripleSystem):
        raise TypeError(f"cannot embed into {type(host).__name__}")
    if config.order() > 14 or len(config.edges) > 10:
        raise ValueError("configuration too large (desk cap: 14 vertices, 10 edges)")
    n = host.n
    triples = host.triples
    by_r: dict[int, list] = {}
    by_c: dict[int, list] = {}
    by_s: dict[int, list] = {}
    for tr in triples:
        by_r.setdefault(tr[0], []).append(tr)
        by_c.setdefault(tr[1], []).append(tr)
        by_s.setdefault(tr[2], []).append(tr)
    tripleset = set(triples)
    by_rc, by_rs, by_cs = host.by_rc, host.by_rs, host.by_cs

    h1, h2, h3 = config.parts
    assign: list[list[int | None]] = [[None] * h1, [None] * h2, [None] * h3]
    used: list[set[int]] = [set(), set(), set()]
    edges = list(config.edges)

    in_some_edge = [set(), set(), set()]
    for i, j, k in edges:
        in_some_edge[0].add(i)
        in_some_edge[1].add(j)
        in_some_edge[2].add(k)

    def candidates(edge):
        i, j, k = edge
        mi, mj, mk = assign[0][i], assign[1][j], assign[2][k]
        known = (mi is not None, mj is not None, mk is not None)
        if all(known):
            return [(mi, mj, mk)] if (mi, mj, mk) in tripleset else []
        if known == (True, True, False):
            s = by_rc.get((mi, mj))
            return [(mi, mj, s)] if s is not None else []
        if known == (True, False, True):
            c = by_rs.get((mi, mk))
            return [(mi, c, mk)] if c is not None else []
        if known == (False, True, True):
            r = by_cs.get((mj, mk))
            return [(r, mj, mk)] if r is not None else []
        if known == (True, False, False):
            return by_r.get(mi, [])
        if known == (False, True, False):
            return by_c.get(mj, [])
        if known == (False, False, True):
            return by_s.get(mk, [])
        return triples

    def known_count(edge):
        i, j, k = edge
        return (
            (assign[0][i] is not None)
            + (assign[1][j] is not None)
            + (assign[2][k] is not None)
        )

    def extend(remaining):
        if not remaining:
            ways = 1
            for cls in range(3):
                free = config.parts[cls] - len(in_some_edge[cls])
                avail = n - len(used[cls])
                for t in range(free):
                    ways *= avail - t
            return ways
        edge = max(remaining, key=known_count)
        rest = [e for e in remaining if e is not edge]
        total = 0
        i, j, k = edge
        for tr in candidates(edge):
            newly = []
            ok = True
            for cls, hvert, hostv in ((0, i, tr[0]), (1, j, tr[1]), (2, k, tr[2])):
                cur = assign[cls][hvert]
                if cur is None:
                    if hostv in used[cls]:
                        ok = False
                        break
                    assign[cls][hvert] = hostv
                    used[cls].add(hostv)
                    newly.append((cls, hvert, hostv))
                elif cur != hostv:
                    ok = False
                    break
            if ok:
                total += extend(rest)
            for cls, hvert, hostv in newly:
                assign[cls][hvert] = None
                used[cls].discard(hostv)
        return total

    return extend(edges)
