"""Core types: Latin squares and rectangles, triple systems, tripartite graphs.

An order-n Latin square is held as a dense n x n array over symbols
0..n-1 (bytes when n <= 256, words above).  The triple-system view of the
same object is the set of n^2 triples (r, c, s) with L[r][c] = s; a
*partial* Latin square is any triple set in which no two triples agree in
two coordinates.  Triples double as the triangles of a tripartite graph
on parts R, C, S, which is the representation the decomposition and
absorber modules work with.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


def _grid_dtype(n: int):
    return np.uint8 if n <= 256 else np.uint32


def _as_grid(values, n: int) -> np.ndarray:
    g = np.asarray(values, dtype=_grid_dtype(n))
    g = np.ascontiguousarray(g)
    g.flags.writeable = False
    return g


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    message: str = "ok"
    where: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


class LatinSquare:
    """Complete order-n Latin square over symbols 0..n-1."""

    __slots__ = ("n", "grid")

    def __init__(self, grid):
        g = np.asarray(grid)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"square grid required, got shape {g.shape}")
        n = int(g.shape[0])
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "grid", _as_grid(g, n))

    def __setattr__(self, *a):  # immutable by convention, grid is read-only
        raise AttributeError("LatinSquare is immutable")

    def __eq__(self, other):
        return isinstance(other, LatinSquare) and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return hash((self.n, self.grid.tobytes()))

    def __repr__(self):
        return f"LatinSquare(n={self.n})"

    def key(self) -> bytes:
        return self.grid.tobytes()


class LatinRectangle:
    """k x n array whose rows are permutations and whose columns repeat no symbol."""

    __slots__ = ("k", "n", "grid")

    def __init__(self, grid):
        g = np.asarray(grid)
        if g.ndim != 2:
            raise ValueError(f"2-d grid required, got shape {g.shape}")
        k, n = (int(g.shape[0]), int(g.shape[1]))
        if k > n:
            raise ValueError(f"rectangle needs k <= n, got {k} x {n}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "grid", _as_grid(g, n))

    def __setattr__(self, *a):
        raise AttributeError("LatinRectangle is immutable")

    def __eq__(self, other):
        return isinstance(other, LatinRectangle) and np.array_equal(
            self.grid, other.grid
        )

    def __hash__(self):
        return hash((self.k, self.n, self.grid.tobytes()))

    def __repr__(self):
        return f"LatinRectangle(k={self.k}, n={self.n})"


class TripleSystem:
    """Partial Latin square as a sorted set of (row, column, symbol) triples.

    Secondary indexes (cell -> symbol, row/symbol -> column,
    column/symbol -> row) are built on first use; they exist exactly when
    the system is Latin, so ``validate`` is the place that reports clashes.
    """

    __slots__ = ("n", "triples", "_by_rc", "_by_rs", "_by_cs")

    def __init__(self, n: int, triples: Iterable[tuple[int, int, int]]):
        ts = tuple(sorted({(int(r), int(c), int(s)) for r, c, s in triples}))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "triples", ts)
        object.__setattr__(self, "_by_rc", None)
        object.__setattr__(self, "_by_rs", None)
        object.__setattr__(self, "_by_cs", None)

    def __setattr__(self, *a):
        raise AttributeError("TripleSystem is immutable")

    def __len__(self):
        return len(self.triples)

    def __eq__(self, other):
        return (
            isinstance(other, TripleSystem)
            and self.n == other.n
            and self.triples == other.triples
        )

    def __hash__(self):
        return hash((self.n, self.triples))

    def __repr__(self):
        return f"TripleSystem(n={self.n}, m={len(self.triples)})"

    def _build(self):
        by_rc, by_rs, by_cs = {}, {}, {}
        for r, c, s in self.triples:
            by_rc[r, c] = s
            by_rs[r, s] = c
            by_cs[c, s] = r
        object.__setattr__(self, "_by_rc", by_rc)
        object.__setattr__(self, "_by_rs", by_rs)
        object.__setattr__(self, "_by_cs", by_cs)

    @property
    def by_rc(self) -> dict:
        if self._by_rc is None:
            self._build()
        return self._by_rc

    @property
    def by_rs(self) -> dict:
        if self._by_rs is None:
            self._build()
        return self._by_rs

    @property
    def by_cs(self) -> dict:
        if self._by_cs is None:
            self._build()
        return self._by_cs

    def cell_grid(self) -> np.ndarray:
        """n x n int matrix of symbols, -1 on empty cells."""
        g = np.full((self.n, self.n), -1, dtype=np.int32)
        for r, c, s in self.triples:
            g[r, c] = s
        return g


class TripartiteGraph:
    """Graph on parts V1, V2, V3 with edges only between distinct parts.

    Adjacency is three dense boolean matrices; ``adj12[u, v]`` is the edge
    between u in V1 and v in V2, and so on cyclically.
    """

    __slots__ = ("parts", "adj12", "adj23", "adj31")

    def __init__(self, parts: Sequence[int], edges_12=(), edges_23=(), edges_31=()):
        n1, n2, n3 = (int(x) for x in parts)
        object.__setattr__(self, "parts", (n1, n2, n3))
        a12 = np.zeros((n1, n2), dtype=bool)
        a23 = np.zeros((n2, n3), dtype=bool)
        a31 = np.zeros((n3, n1), dtype=bool)
        for u, v in edges_12:
            a12[u, v] = True
        for u, v in edges_23:
            a23[u, v] = True
        for u, v in edges_31:
            a31[u, v] = True
        for a in (a12, a23, a31):
            a.flags.writeable = False
        object.__setattr__(self, "adj12", a12)
        object.__setattr__(self, "adj23", a23)
        object.__setattr__(self, "adj31", a31)

    @classmethod
    def from_adjacency(cls, adj12, adj23, adj31) -> "TripartiteGraph":
        g = cls.__new__(cls)
        a12 = np.ascontiguousarray(np.asarray(adj12, dtype=bool))
        a23 = np.ascontiguousarray(np.asarray(adj23, dtype=bool))
        a31 = np.ascontiguousarray(np.asarray(adj31, dtype=bool))
        if a12.shape[1] != a23.shape[0] or a23.shape[1] != a31.shape[0] \
                or a31.shape[1] != a12.shape[0]:
            raise ValueError("inconsistent adjacency shapes")
        for a in (a12, a23, a31):
            a.flags.writeable = False
        object.__setattr__(g, "parts", (a12.shape[0], a12.shape[1], a23.shape[1]))
        object.__setattr__(g, "adj12", a12)
        object.__setattr__(g, "adj23", a23)
        object.__setattr__(g, "adj31", a31)
        return g

    @classmethod
    def complete(cls, n: int) -> "TripartiteGraph":
        one = np.ones((n, n), dtype=bool)
        return cls.from_adjacency(one, one.copy(), one.copy())

    def __setattr__(self, *a):
        raise AttributeError("TripartiteGraph is immutable")

    def edge_count(self) -> int:
        return int(self.adj12.sum() + self.adj23.sum() + self.adj31.sum())

    def edges(self):
        """Iterate (pair_index, u, v) over all edges; pair_index in {0,1,2}."""
        for idx, adj in ((0, self.adj12), (1, self.adj23), (2, self.adj31)):
            for u, v in zip(*np.nonzero(adj)):
                yield idx, int(u), int(v)

    def __eq__(self, other):
        return (
            isinstance(other, TripartiteGraph)
            and self.parts == other.parts
            and np.array_equal(self.adj12, other.adj12)
            and np.array_equal(self.adj23, other.adj23)
            and np.array_equal(self.adj31, other.adj31)
        )

    def __repr__(self):
        return f"TripartiteGraph(parts={self.parts}, edges={self.edge_count()})"


# ---------------------------------------------------------------------------
# validation


def validate(obj) -> ValidityReport:
    """Check the defining invariants, reporting the first violation found."""
    if isinstance(obj, LatinSquare):
        return _validate_rect(obj.grid, obj.n, obj.n)
    if isinstance(obj, LatinRectangle):
        return _validate_rect(obj.grid, obj.k, obj.n)
    if isinstance(obj, TripleSystem):
        return _validate_triples(obj)
    if isinstance(obj, TripartiteGraph):
        return ValidityReport(True)
    raise TypeError(f"cannot validate {type(obj).__name__}")


def _validate_rect(grid: np.ndarray, k: int, n: int) -> ValidityReport:
    if grid.size and int(grid.max(initial=0)) >= n:
        where = np.argwhere(grid >= n)[0]
        return ValidityReport(
            False, f"symbol out of range at {tuple(int(x) for x in where)}",
            tuple(int(x) for x in where),
        )
    for i in range(k):
        row = grid[i]
        if len(np.unique(row)) != n:
            s = _first_duplicate(row)
            return ValidityReport(False, f"row {i} repeats symbol {s}", (i, s))
    for j in range(n):
        col = grid[:, j]
        if len(np.unique(col)) != k:
            s = _first_duplicate(col)
            return ValidityReport(False, f"column {j} repeats symbol {s}", (j, s))
    return ValidityReport(True)


def _first_duplicate(vec) -> int:
    seen = set()
    for x in vec.tolist():
        if x in seen:
            return int(x)
        seen.add(x)
    return -1


def _validate_triples(ts: TripleSystem) -> ValidityReport:
    n = ts.n
    seen_rc, seen_rs, seen_cs = set(), set(), set()
    for r, c, s in ts.triples:
        if not (0 <= r < n and 0 <= c < n and 0 <= s < n):
            return ValidityReport(False, f"coordinate out of range in {(r, c, s)}",
                                  (r, c, s))
        if (r, c) in seen_rc:
            return ValidityReport(False, f"cell ({r},{c}) holds two symbols", (r, c))
        if (r, s) in seen_rs:
            return ValidityReport(False, f"row {r} repeats symbol {s}", (r, s))
        if (c, s) in seen_cs:
            return ValidityReport(False, f"column {c} repeats symbol {s}", (c, s))
        seen_rc.add((r, c))
        seen_rs.add((r, s))
        seen_cs.add((c, s))
    return ValidityReport(True)


# ---------------------------------------------------------------------------
# constructions


def group_table(kind: str, order_param: int) -> LatinSquare:
    """Multiplication table of Z/nZ ('cyclic', param n) or (Z/2Z)^k
    ('elementary-abelian-2', param k, order 2^k)."""
    if kind == "cyclic":
        n = int(order_param)
        if n < 1:
            raise ValueError("cyclic order must be >= 1")
        r = np.arange(n)
        return LatinSquare((r[:, None] + r[None, :]) % n)
    if kind == "elementary-abelian-2":
        k = int(order_param)
        if k < 0:
            raise ValueError("exponent must be >= 0")
        n = 1 << k
        r = np.arange(n)
        return LatinSquare(r[:, None] ^ r[None, :])
    raise ValueError(f"unknown group kind {kind!r}")


def to_triples(obj) -> TripleSystem:
    if isinstance(obj, (LatinSquare, LatinRectangle)):
        k = obj.grid.shape[0]
        n = obj.n
        rr, cc = np.meshgrid(np.arange(k), np.arange(n), indexing="ij")
        return TripleSystem(
            n, zip(rr.ravel().tolist(), cc.ravel().tolist(),
                   obj.grid.ravel().tolist())
        )
    raise TypeError(f"cannot view {type(obj).__name__} as triples")


def from_triples(ts: TripleSystem):
    """Rebuild the densest array the triples describe.

    A full n x n system becomes a LatinSquare; a system whose filled rows
    0..k-1 are each complete becomes a LatinRectangle.  Anything else is
    genuinely partial and stays a TripleSystem, which is an error here.
    """
    rep = validate(ts)
    if not rep:
        raise ValueError(f"not a partial Latin square: {rep.message}")
    n = ts.n
    grid = ts.cell_grid()
    filled_rows = [i for i in range(n) if (grid[i] >= 0).all()]
    if len(ts.triples) == n * n:
        return LatinSquare(grid)
    if filled_rows == list(range(len(filled_rows))) and \
            len(ts.triples) == len(filled_rows) * n:
        return LatinRectangle(grid[: len(filled_rows)])
    raise ValueError("triples do not fill a leading block of rows")


def restrict_rows(square: LatinSquare, k: int) -> LatinRectangle:
    if not 1 <= k <= square.n:
        raise ValueError(f"need 1 <= k <= {square.n}, got {k}")
    return LatinRectangle(square.grid[:k])


def tripartite_of(ts) -> TripartiteGraph:
    """The graph G(Q): an edge per covered row/column, row/symbol,
    column/symbol pair.  Triples become triangles."""
    if isinstance(ts, (LatinSquare, LatinRectangle)):
        ts = to_triples(ts)
    n = ts.n
    a12 = np.zeros((n, n), dtype=bool)
    a23 = np.zeros((n, n), dtype=bool)
    a31 = np.zeros((n, n), dtype=bool)
    for r, c, s in ts.triples:
        a12[r, c] = True   # row-column
        a23[c, s] = True   # column-symbol
        a31[s, r] = True   # symbol-row
    return TripartiteGraph.from_adjacency(a12, a23, a31)


# ---------------------------------------------------------------------------
# text and JSON formats


def serialize_square(sq: LatinSquare) -> str:
    lines = [str(sq.n)]
    lines += [" ".join(str(int(x)) for x in row) for row in sq.grid]
    return "\n".join(lines) + "\n"


def serialize_rectangle(rect: LatinRectangle) -> str:
    lines = [f"{rect.k} {rect.n}"]
    lines += [" ".join(str(int(x)) for x in row) for row in rect.grid]
    return "\n".join(lines) + "\n"


def serialize_partial(ts: TripleSystem) -> str:
    """Grid form with '.' on empty cells; header is the order n."""
    grid = ts.cell_grid()
    lines = [str(ts.n)]
    for row in grid:
        lines.append(" ".join("." if x < 0 else str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_grid(text: str):
    """Parse the grid format.

    Header 'n' gives an order-n square (or partial square when '.' cells
    appear); header 'k n' gives a k x n rectangle.  Returns LatinSquare,
    LatinRectangle, or TripleSystem accordingly.  Structures are checked.
    """
    numbered = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in numbered if ln]
    if not lines:
        raise ValueError("empty input")
    head_no, head_ln = lines[0]
    head = head_ln.split()
    try:
        if len(head) == 1:
            k = n = int(head[0])
        elif len(head) == 2:
            k, n = int(head[0]), int(head[1])
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"line {head_no}: bad header {head_ln!r}") from None
    if len(lines) != 1 + k:
        raise ValueError(f"expected {k} rows, found {len(lines) - 1}")
    cells: list[list[int]] = []
    holes = False
    for no, ln in lines[1:]:
        row = []
        toks = ln.split()
        if len(toks) != n:
            raise ValueError(
                f"line {no}: expected {n} entries per row, got {len(toks)}")
        for t in toks:
            if t == ".":
                row.append(-1)
                holes = True
            else:
                try:
                    row.append(int(t))
                except ValueError:
                    raise ValueError(f"line {no}: bad cell {t!r}") from None
        cells.append(row)
    if holes:
        if len(head) != 1:
            raise ValueError("partial grids must be square (header 'n')")
        ts = TripleSystem(
            n,
            ((r, c, cells[r][c]) for r in range(n) for c in range(n)
             if cells[r][c] >= 0),
        )
        rep = validate(ts)
        if not rep:
            raise ValueError(rep.message)
        return ts
    obj = LatinSquare(cells) if len(head) == 1 else LatinRectangle(cells)
    rep = validate(obj)
    if not rep:
        raise ValueError(rep.message)
    return obj


def serialize_triples(ts: TripleSystem) -> str:
    lines = [str(ts.n)]
    lines += [f"{r} {c} {s}" for r, c, s in ts.triples]
    return "\n".join(lines) + "\n"


def parse_triples(text: str) -> TripleSystem:
    numbered = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in numbered if ln]
    if not lines:
        raise ValueError("empty input")
    head_no, head_ln = lines[0]
    try:
        n = int(head_ln)
    except ValueError:
        raise ValueError(f"line {head_no}: bad header {head_ln!r}") from None
    triples = []
    for no, ln in lines[1:]:
        try:
            r, c, s = (int(t) for t in ln.split())
        except ValueError:
            raise ValueError(f"line {no}: bad triple {ln!r}") from None
        triples.append((r, c, s))
    ts = TripleSystem(n, triples)
    if len(ts.triples) != len(triples):
        raise ValueError("duplicate triple in input")
    rep = validate(ts)
    if not rep:
        raise ValueError(rep.message)
    return ts


def serialize_tripartite(g: TripartiteGraph) -> str:
    def pairs(adj):
        return [[int(u), int(v)] for u, v in zip(*np.nonzero(adj))]

    return json.dumps(
        {
            "parts": list(g.parts),
            "edges_12": pairs(g.adj12),
            "edges_23": pairs(g.adj23),
            "edges_31": pairs(g.adj31),
        }
    )


def parse_tripartite(text: str) -> TripartiteGraph:
    data = json.loads(text)
    return TripartiteGraph(
        data["parts"],
        edges_12=data.get("edges_12", ()),
        edges_23=data.get("edges_23", ()),
        edges_31=data.get("edges_31", ()),
    )
