"""Regularity boosting via an iterated fractional triangle decomposition.

Given a balanced tripartite graph and a triangle collection 𝒯 whose
per-edge counts are only weakly regular, the boosting procedure builds
triangle weights that are exactly vertex-balanced, iterates a linear
adjustment map that contracts per-edge discrepancies, normalizes, and
rounds: independent inclusion with the normalized weights as
probabilities yields a subcollection 𝒯' whose per-edge counts
concentrate near p^2 q n / 4.

The weight gadgets are the classical ones.  chi_{u,v} averages the two
triangle stars of a K_{2,1,1} through two same-part vertices and moves
one unit of vertex weight from v to u.  psi_e averages, over 6-cycles J
through an edge e (alternating between e's two parts), the function
psi_{J,e} that places alternating signs on the triangles hanging off J;
every psi_{J,e} has identically zero vertex weights, so the adjustment
map A(phi) = phi - sum_e phi^disc(e) psi_e preserves vertex balance
exactly while cancelling edge discrepancies to first order.

Cycle enumeration is exact by default: the 6-cycles through e = (a1, b1)
are in bijection with ordered tuples (a2, b2, a3, b3) of distinct
vertices avoiding a1, b1, giving (n-1)^2 (n-2)^2 cycles per edge in the
complete case.  For speed a uniform sample of cycles may be used
instead; the estimator averages psi_{J,e} over valid sampled cycles and
keeps zero vertex weights exactly, only the off-e edge weights become
noisy.  Apex sets are intersected through 64-bit masks, so hosts are
capped at part size 64, which covers the desk regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TripartiteGraph
from .rng import RandomStream

MASK_CAP = 64

# edge kinds: (part of i, part of j, apex part), matching the host's
# adjacency matrices adj12, adj23, adj31
KIND_COLS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
KIND_NAMES = ("12", "23", "31")


def _canonical(kind: int, i, j, w):
    if kind == 0:
        return i, j, w
    if kind == 1:
        return w, i, j
    return j, w, i


class TriangleSet:
    """A triangle collection over a balanced tripartite host.

    Triangles are rows (v1, v2, v3).  Per-edge and per-vertex indexes
    are kept as dense arrays: triangle counts, 64-bit apex masks (bit w
    of apex_masks[k][i, j] says the triangle with kind-k edge (i, j) and
    apex w is present), and the id grid mapping (v1, v2, v3) back to a
    row of ``tris``.
    """

    __slots__ = ("host", "n", "tris", "id3", "apex_masks", "edge_counts",
                 "vertex_counts", "deg", "edges_per_pair", "_cycle_cache")

    def __init__(self, host: TripartiteGraph, triangles):
        n1, n2, n3 = host.parts
        if not (n1 == n2 == n3):
            raise ValueError("host must be balanced")
        if n1 > MASK_CAP:
            raise ValueError(f"apex masks cap part size at {MASK_CAP}")
        self.host = host
        self.n = n = n1
        tris = np.asarray(sorted(set(map(tuple, triangles))), dtype=np.int64)
        if tris.size == 0:
            tris = tris.reshape(0, 3)
        if tris.size and (tris.min() < 0 or tris.max() >= n):
            raise ValueError("triangle vertex out of range")
        adjs = (host.adj12, host.adj23, host.adj31)
        for k, (ci, cj, _) in enumerate(KIND_COLS):
            if tris.size and not adjs[k][tris[:, ci], tris[:, cj]].all():
                raise ValueError("triangle edge missing from host")
        self.tris = tris
        m = len(tris)
        id3 = np.full((n, n, n), -1, dtype=np.int64)
        id3[tris[:, 0], tris[:, 1], tris[:, 2]] = np.arange(m)
        self.id3 = id3
        self.apex_masks = []
        self.edge_counts = []
        for ci, cj, cw in KIND_COLS:
            am = np.zeros((n, n), dtype=np.uint64)
            np.bitwise_or.at(
                am, (tris[:, ci], tris[:, cj]),
                np.uint64(1) << tris[:, cw].astype(np.uint64))
            ec = np.zeros((n, n), dtype=np.int64)
            np.add.at(ec, (tris[:, ci], tris[:, cj]), 1)
            self.apex_masks.append(am)
            self.edge_counts.append(ec)
        vc = np.zeros((3, n), dtype=np.int64)
        for p in range(3):
            np.add.at(vc[p], tris[:, p], 1)
        self.vertex_counts = vc
        # degree of vertex u in part p, and cross-pair edge totals
        deg = np.zeros((3, n), dtype=np.int64)
        deg[0] = host.adj12.sum(axis=1) + host.adj31.sum(axis=0)
        deg[1] = host.adj23.sum(axis=1) + host.adj12.sum(axis=0)
        deg[2] = host.adj31.sum(axis=1) + host.adj23.sum(axis=0)
        self.deg = deg
        self.edges_per_pair = tuple(int(a.sum()) for a in adjs)
        self._cycle_cache = None

    def __len__(self) -> int:
        return len(self.tris)

    @property
    def edge_total(self) -> int:
        return sum(self.edges_per_pair)

    def adj(self, kind: int) -> np.ndarray:
        return (self.host.adj12, self.host.adj23, self.host.adj31)[kind]

    def tri_id(self, v1: int, v2: int, v3: int) -> int:
        return int(self.id3[v1, v2, v3])

    def tris_with_edge(self, kind: int, i: int, j: int) -> np.ndarray:
        mask = int(self.apex_masks[kind][i, j])
        ws = [w for w in range(self.n) if mask >> w & 1]
        ids = [self.tri_id(*_canonical(kind, i, j, w)) for w in ws]
        return np.asarray(ids, dtype=np.int64)

    def tris_through(self, part: int, v: int) -> np.ndarray:
        return np.flatnonzero(self.tris[:, part] == v)

    def subset(self, keep) -> "TriangleSet":
        return TriangleSet(self.host, self.tris[np.asarray(keep)])

    def verify_indexes(self) -> None:
        """Rebuild every index from the triangle list and compare."""
        fresh = TriangleSet(self.host, self.tris)
        assert np.array_equal(fresh.tris, self.tris)
        assert np.array_equal(fresh.id3, self.id3)
        for k in range(3):
            assert np.array_equal(fresh.apex_masks[k], self.apex_masks[k])
            assert np.array_equal(fresh.edge_counts[k], self.edge_counts[k])
        assert np.array_equal(fresh.vertex_counts, self.vertex_counts)

    def _canonical_cycle_tuples(self):
        # ordered distinct pairs over [0, n-2]; skip-mapped per edge
        if self._cycle_cache is None:
            n = self.n
            r = np.arange(n - 1, dtype=np.int64)
            x, y = np.meshgrid(r, r, indexing="ij")
            keep = x != y
            pa, pb = x[keep], y[keep]
            npairs = len(pa)
            a2 = np.repeat(pa, npairs)
            a3 = np.repeat(pb, npairs)
            b2 = np.tile(pa, npairs)
            b3 = np.tile(pb, npairs)
            self._cycle_cache = (a2, a3, b2, b3)
        return self._cycle_cache


def complete_host(n: int) -> TripartiteGraph:
    full = np.ones((n, n), dtype=bool)
    return TripartiteGraph.from_adjacency(full, full, full)


def all_triangles(host: TripartiteGraph) -> TriangleSet:
    n = host.parts[0]
    cube = (host.adj12[:, :, None]
            & host.adj23[None, :, :]
            & host.adj31.T[:, None, :])
    return TriangleSet(host, np.argwhere(cube))


def conforming_instance(n: int, layers: int = 3) -> TriangleSet:
    """All triangles of K_{n,n,n} minus ``layers`` disjoint cyclic-shift
    squares: every edge lies in exactly n - layers triangles, so the
    instance is regular with xi = 0 at q = 1 - layers/n."""
    if not 0 <= layers < n:
        raise ValueError("need 0 <= layers < n")
    host = complete_host(n)
    cube = np.ones((n, n, n), dtype=bool)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    for d in range(layers):
        cube[i, j, (i + j + d) % n] = False
    return TriangleSet(host, np.argwhere(cube))


def thinned_instance(n: int, q: float, rng: RandomStream) -> TriangleSet:
    """All triangles of K_{n,n,n}, kept independently with probability q."""
    keep = rng.generator.random(n**3) < q
    grid = keep.reshape(n, n, n)
    return TriangleSet(complete_host(n), np.argwhere(grid))


# ---------------------------------------------------------------------------
# weight functions


class WeightFunction:
    """Triangle weights with cached vertex weights, edge weights, and
    total.  The caches are derived once from ``values``; ``verify``
    recomputes them from scratch.  The total uses compensated summation,
    discrepancies are differences of dense per-edge sums."""

    __slots__ = ("tset", "values", "vertex", "edge", "total")

    def __init__(self, tset: TriangleSet, values):
        self.tset = tset
        values = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
        if values.shape != (len(tset),):
            raise ValueError("one weight per triangle required")
        self.values = values
        self.total = math.fsum(values)
        tris = tset.tris
        n = tset.n
        vertex = np.zeros((3, n))
        edge = []
        for k, (ci, cj, _) in enumerate(KIND_COLS):
            ek = np.zeros((n, n))
            np.add.at(ek, (tris[:, ci], tris[:, cj]), values)
            edge.append(ek)
            np.add.at(vertex[k], tris[:, k], values)
        self.vertex = vertex
        self.edge = edge

    def scale(self) -> float:
        return max(abs(self.total) / max(self.tset.edge_total, 1), 1.0)

    def disc(self, kind: int) -> np.ndarray:
        """Edge discrepancy phi^edge(e) - 3 phi^sum / |E| on kind-k
        host edges (zero off the host)."""
        target = 3.0 * self.total / self.tset.edge_total
        return np.where(self.tset.adj(kind), self.edge[kind] - target, 0.0)

    def max_disc(self) -> float:
        return max(float(np.abs(self.disc(k)).max()) for k in range(3))

    def vertex_residual(self) -> float:
        """Largest deviation from vertex balance,
        max_u |phi^vtx(u) - (3 deg(u) / 2|E|) phi^sum|."""
        bal = 3.0 * self.tset.deg * self.total / (2.0 * self.tset.edge_total)
        return float(np.abs(self.vertex - bal).max())

    def is_vertex_balanced(self, rel: float = 1e-9) -> bool:
        return self.vertex_residual() <= rel * self.scale()

    def verify(self, rel: float = 1e-9) -> None:
        """Caches must equal a from-scratch recomputation."""
        tol = rel * max(np.abs(self.values).max(), 1.0) * max(len(self.tset), 1)
        fresh = WeightFunction(self.tset, self.values.copy())
        assert abs(fresh.total - self.total) <= tol
        assert np.abs(fresh.vertex - self.vertex).max() <= tol
        for k in range(3):
            assert np.abs(fresh.edge[k] - self.edge[k]).max() <= tol


def _chi_uv_raw(tset: TriangleSet, part: int, u: int, v: int) -> np.ndarray:
    if u == v:
        raise ValueError("need two distinct vertices")
    n = tset.n
    grid_u = tset.id3 if part == 0 else np.moveaxis(tset.id3, part, 0)
    pu, pv = grid_u[u], grid_u[v]
    both = (pu >= 0) & (pv >= 0)
    m = int(both.sum())
    if m == 0:
        raise ValueError("no K_{2,1,1} copies through the pair")
    out = np.zeros(len(tset))
    out[pu[both]] += 1.0 / m
    out[pv[both]] -= 1.0 / m
    return out


def chi_uv(tset: TriangleSet, part: int, u: int, v: int) -> WeightFunction:
    """chi_{u,v}: average of the two triangle stars of each K_{2,1,1}
    through same-part vertices u, v.  Vertex weights are +1 at u, -1 at
    v, zero elsewhere."""
    return WeightFunction(tset, _chi_uv_raw(tset, part, u, v))


def part_imbalance(tset: TriangleSet, part: int) -> np.ndarray:
    """f_u = |T_u| - (3 deg(u) / 2|E|) |T| over the part's vertices."""
    return (tset.vertex_counts[part]
            - 3.0 * tset.deg[part] * len(tset) / (2.0 * tset.edge_total))


def chi_part(tset: TriangleSet, part: int) -> WeightFunction:
    """chi_{V^j} = -(1/2n) sum_{u != v} (f_u - f_v) chi_{u,v}."""
    n = tset.n
    f = part_imbalance(tset, part)
    out = np.zeros(len(tset))
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            coef = -(f[u] - f[v]) / (2.0 * n)
            if coef != 0.0:
                out += coef * _chi_uv_raw(tset, part, u, v)
    return WeightFunction(tset, out)


def phi0(tset: TriangleSet) -> WeightFunction:
    """The vertex-balanced seed 1 + chi_{V^1} + chi_{V^2} + chi_{V^3}."""
    out = np.ones(len(tset))
    for part in range(3):
        out += chi_part(tset, part).values
    return WeightFunction(tset, out)


# ---------------------------------------------------------------------------
# psi gadgets


# sign of a cycle edge is (-1)^{distance to e} around the 6-cycle
# a1 - b1 - a2 - b2 - a3 - b3 - a1 with e = (a1, b1)
_SLOT_SIGNS = ((0, 0, +1.0), (1, 0, -1.0), (1, 2, +1.0),
               (2, 2, -1.0), (2, 3, +1.0), (0, 3, -1.0))
# slot spec: (a-index, b-index, sign) with a-index into (a1, a2, a3)
# and b-index into (b1, _, b2, b3)


def psi_cycle(tset: TriangleSet, kind: int, e: tuple[int, int],
              tail: tuple[int, int, int, int]) -> WeightFunction:
    """psi_{J,e} for the single 6-cycle J given by e = (a1, b1) and the
    path tail (a2, b2, a3, b3).  Weight (-1)^{d_J(f, e)} / |W| on the
    triangles of each cycle edge f, where W is the common apex set."""
    a1, b1 = e
    a2, b2, a3, b3 = tail
    if len({a1, a2, a3}) < 3 or len({b1, b2, b3}) < 3:
        raise ValueError("cycle vertices must be distinct per part")
    am = tset.apex_masks[kind]
    aa = (a1, a2, a3)
    bb = (b1, None, b2, b3)
    edges = [(aa[ia], bb[ib], sg) for ia, ib, sg in _SLOT_SIGNS]
    adjk = tset.adj(kind)
    w_mask = np.uint64(~np.uint64(0))
    for x, y, _ in edges:
        if not adjk[x, y]:
            raise ValueError("cycle edge missing from host")
        w_mask &= am[x, y]
    ws = [w for w in range(tset.n) if int(w_mask) >> w & 1]
    if not ws:
        raise ValueError("cycle has no common apex in the triangle set")
    out = np.zeros(len(tset))
    for x, y, sg in edges:
        for w in ws:
            out[tset.tri_id(*_canonical(kind, x, y, w))] += sg / len(ws)
    return WeightFunction(tset, out)


def _accumulate_psi(tset: TriangleSet, kind: int,
                    ii: np.ndarray, jj: np.ndarray, coefs: np.ndarray,
                    out: np.ndarray, samples: int | None,
                    rng: RandomStream | None, rows_cap: int = 2_000_000):
    """Add sum_e coefs[e] * psi_e over the given kind-k edges into out.

    Exact mode (samples None) enumerates all (n-1)^2 (n-2)^2 cycle
    tuples per edge; sampled mode draws ``samples`` uniform tuples and
    averages over the valid ones.  Either way the vertex weights of the
    added function are exactly zero.
    """
    n = tset.n
    one = np.uint64(1)
    am = tset.apex_masks[kind]
    adjk = tset.adj(kind)
    if samples is None:
        ca2, ca3, cb2, cb3 = tset._canonical_cycle_tuples()
        per_edge = len(ca2)
        chunk = max(1, rows_cap // max(per_edge, 1))
    else:
        if rng is None:
            raise ValueError("sampled psi needs an rng")
        per_edge = samples
        chunk = max(1, rows_cap // max(per_edge, 1))

    for lo in range(0, len(ii), chunk):
        i = ii[lo:lo + chunk][:, None]
        j = jj[lo:lo + chunk][:, None]
        c = coefs[lo:lo + chunk]
        if samples is None:
            a2 = ca2[None, :] + (ca2[None, :] >= i)
            a3 = ca3[None, :] + (ca3[None, :] >= i)
            b2 = cb2[None, :] + (cb2[None, :] >= j)
            b3 = cb3[None, :] + (cb3[None, :] >= j)
        else:
            gen = rng.generator
            shape = (len(c), per_edge)
            a2 = gen.integers(0, n - 1, shape)
            a2 += a2 >= i
            b2 = gen.integers(0, n - 1, shape)
            b2 += b2 >= j
            a3 = gen.integers(0, n - 2, shape)
            lo_a = np.minimum(i, a2)
            hi_a = np.maximum(i, a2)
            a3 += a3 >= lo_a
            a3 += a3 >= hi_a
            b3 = gen.integers(0, n - 2, shape)
            lo_b = np.minimum(j, b2)
            hi_b = np.maximum(j, b2)
            b3 += b3 >= lo_b
            b3 += b3 >= hi_b
        ii_b = np.broadcast_to(i, a2.shape)
        jj_b = np.broadcast_to(j, a2.shape)
        valid = (adjk[a2, jj_b] & adjk[a2, b2] & adjk[a3, b2]
                 & adjk[a3, b3] & adjk[ii_b, b3])
        w = (am[ii_b, jj_b] & am[a2, jj_b] & am[a2, b2]
             & am[a3, b2] & am[a3, b3] & am[ii_b, b3])
        wc = np.bitwise_count(w).astype(np.int64)
        valid &= wc > 0
        nvalid = valid.sum(axis=1)
        if (nvalid == 0).any():
            bad = int(np.flatnonzero(nvalid == 0)[0])
            raise ValueError(
                f"edge ({int(i[bad, 0])}, {int(j[bad, 0])}) of pair "
                f"{KIND_NAMES[kind]} has no usable 6-cycle")
        base = np.where(valid, (c / nvalid)[:, None] / np.maximum(wc, 1), 0.0)
        avecs = (ii_b, a2, a3)
        bvecs = (jj_b, None, b2, b3)
        for ia, ib, sg in _SLOT_SIGNS:
            x, y = avecs[ia], bvecs[ib]
            for wbit in range(n):
                sel = valid & ((w >> np.uint64(wbit) & one).astype(bool))
                if not sel.any():
                    continue
                v1, v2, v3 = _canonical(kind, x[sel], y[sel], wbit)
                np.add.at(out, tset.id3[v1, v2, v3], sg * base[sel])


def psi_e(tset: TriangleSet, kind: int, i: int, j: int,
          samples: int | None = None,
          rng: RandomStream | None = None) -> WeightFunction:
    """psi_e: the average of psi_{J,e} over 6-cycles J through the
    kind-k edge (i, j).  Zero vertex weights exactly, and edge weight 1
    at e itself even under sampling."""
    if not tset.adj(kind)[i, j]:
        raise ValueError("edge not in host")
    out = np.zeros(len(tset))
    _accumulate_psi(tset, kind,
                    np.asarray([i]), np.asarray([j]), np.asarray([1.0]),
                    out, samples, rng)
    return WeightFunction(tset, out)


def adjust(wf: WeightFunction, samples: int | None = None,
           rng: RandomStream | None = None,
           balance_rel: float = 1e-9) -> WeightFunction:
    """One step of the adjustment map
    A(phi) = phi - sum_e phi^disc(e) psi_e."""
    if not wf.is_vertex_balanced(balance_rel):
        raise ValueError("adjust requires a vertex-balanced input")
    tset = wf.tset
    corr = np.zeros(len(tset))
    eps = 1e-12 * wf.scale()
    for kind in range(3):
        d = wf.disc(kind)
        ii, jj = np.nonzero(np.abs(d) > eps)
        if len(ii):
            _accumulate_psi(tset, kind, ii, jj, d[ii, jj], corr,
                            samples, rng)
    return WeightFunction(tset, wf.values - corr)


# ---------------------------------------------------------------------------
# condition checking


@dataclass
class Violation:
    condition: int
    pair: str
    where: tuple
    observed: float
    low: float
    high: float


@dataclass
class ConditionReport:
    n: int
    checked: dict[int, int]
    violation_counts: dict[int, int]
    sample: list[Violation]

    MAX_STORED = 20

    @property
    def ok(self) -> bool:
        return not any(self.violation_counts.values())

    def fraction(self, condition: int) -> float:
        if not self.checked.get(condition):
            return 0.0
        return self.violation_counts[condition] / self.checked[condition]

    def _add(self, v: Violation) -> None:
        self.violation_counts[v.condition] += 1
        if len(self.sample) < self.MAX_STORED:
            self.sample.append(v)


@dataclass
class RegParams:
    """Parameters of the boosting lemma; xi defaults to C^-8."""

    p: float
    q: float
    C: float = 4.0
    xi: float | None = None
    iters: int | None = None
    report: ConditionReport | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0 and 0.0 < self.q <= 1.0):
            raise ValueError("need p, q in (0, 1]")
        if self.xi is None:
            self.xi = self.C ** -8.0


def check_conditions(tset: TriangleSet, params: RegParams,
                     rng: RandomStream | None = None,
                     sample_budget: int = 300) -> ConditionReport:
    """The four quasirandomness conditions behind the boosting step.

    (1) every host edge in (1 +- xi) p^2 q n triangles; (2) common
    graph neighborhoods of vertex sets S, |S| <= 6, drawn from two
    parts, of size (1 +- xi) p^{|S|} n in the third; (3) joint triangle
    extensions of edge sets Q, |Q| <= 6, within [C^-1, C] p^{|V(Q)|} n;
    (4) equal cross-pair edge counts and per-vertex degree gaps at most
    n^(2/3).  Sizes 1 and 2 are exhaustive, larger sets are sampled.
    Violations are collected, never raised.
    """
    n = tset.n
    p, q, xi, C = params.p, params.q, params.xi, params.C
    rng = rng or RandomStream(0)
    gen = rng.generator
    rep = ConditionReport(n, {k: 0 for k in (1, 2, 3, 4)},
                          {k: 0 for k in (1, 2, 3, 4)}, [])

    target1 = p * p * q * n
    for kind in range(3):
        adjk = tset.adj(kind)
        counts = tset.edge_counts[kind]
        rep.checked[1] += int(adjk.sum())
        lo, hi = (1 - xi) * target1, (1 + xi) * target1
        bad = adjk & ((counts < lo) | (counts > hi))
        for i, j in zip(*np.nonzero(bad)):
            rep._add(Violation(1, KIND_NAMES[kind], (int(i), int(j)),
                               float(counts[i, j]), lo, hi))

    # condition 2: adjacency rows, by part of the target
    row_toward = {
        # (part of vertex, target part) -> rows of the adjacency matrix
        (0, 1): tset.host.adj12, (1, 0): tset.host.adj12.T,
        (1, 2): tset.host.adj23, (2, 1): tset.host.adj23.T,
        (2, 0): tset.host.adj31, (0, 2): tset.host.adj31.T,
    }

    def common_count(members: list[tuple[int, int]], target: int) -> int:
        rows = [row_toward[part, target][v] for part, v in members]
        out = rows[0].copy()
        for r in rows[1:]:
            out &= r
        return int(out.sum())

    for target in range(3):
        pa, pb = (target + 1) % 3, (target + 2) % 3
        verts = [(pa, v) for v in range(n)] + [(pb, v) for v in range(n)]
        sets2 = [[verts[a], verts[b]]
                 for a in range(2 * n) for b in range(a + 1, 2 * n)]
        pools: list[list] = [[[v] for v in verts], sets2]
        for size in range(3, 7):
            picked = [[verts[t] for t in gen.choice(2 * n, size,
                                                    replace=False)]
                      for _ in range(sample_budget)]
            pools.append(picked)
        for pool in pools:
            for members in pool:
                size = len(members)
                lo = (1 - xi) * p**size * n
                hi = (1 + xi) * p**size * n
                got = common_count(members, target)
                rep.checked[2] += 1
                if not lo <= got <= hi:
                    rep._add(Violation(2, str(target), tuple(members),
                                       float(got), lo, hi))

    for kind in range(3):
        adjk = tset.adj(kind)
        am = tset.apex_masks[kind]
        eis, ejs = np.nonzero(adjk)
        edge_pool = list(zip(eis.tolist(), ejs.tolist()))
        groups: list[list[list[tuple[int, int]]]] = [[[e] for e in edge_pool]]
        for size in range(2, 7):
            if len(edge_pool) < size:
                break
            picked = [[edge_pool[t] for t in gen.choice(len(edge_pool), size,
                                                        replace=False)]
                      for _ in range(sample_budget)]
            groups.append(picked)
        for pool in groups:
            for edges in pool:
                mask = np.uint64(~np.uint64(0))
                vs = set()
                for (i, j) in edges:
                    mask &= am[i, j]
                    vs.add(("i", i))
                    vs.add(("j", j))
                got = int(mask).bit_count()
                lo = p ** len(vs) * n / C
                hi = p ** len(vs) * n * C
                rep.checked[3] += 1
                if not lo <= got <= hi:
                    rep._add(Violation(3, KIND_NAMES[kind], tuple(edges),
                                       float(got), lo, hi))

    rep.checked[4] += 1
    if len(set(tset.edges_per_pair)) > 1:
        rep._add(Violation(4, "all", ("cross-pair counts",),
                           float(max(tset.edges_per_pair)),
                           float(min(tset.edges_per_pair)),
                           float(min(tset.edges_per_pair))))
    gap_cap = n ** (2 / 3)
    # degree toward the two other parts, per vertex
    toward = {
        0: (tset.host.adj12.sum(axis=1), tset.host.adj31.sum(axis=0)),
        1: (tset.host.adj23.sum(axis=1), tset.host.adj12.sum(axis=0)),
        2: (tset.host.adj31.sum(axis=1), tset.host.adj23.sum(axis=0)),
    }
    for part, (d_next, d_prev) in toward.items():
        rep.checked[4] += n
        gaps = np.abs(d_next.astype(np.int64) - d_prev.astype(np.int64))
        for v in np.flatnonzero(gaps > gap_cap):
            rep._add(Violation(4, str(part), (int(v),),
                               float(gaps[v]), 0.0, gap_cap))
    return rep


# ---------------------------------------------------------------------------
# the boost


class BoostDiverged(RuntimeError):
    """Discrepancy grew on two consecutive iterations."""


@dataclass
class TraceRow:
    iteration: int
    max_disc: float
    vertex_residual: float


@dataclass
class BoostResult:
    phi_star: np.ndarray
    selected: TriangleSet
    chosen: np.ndarray
    trace: list[TraceRow]
    beta: float
    final: WeightFunction


def boost(tset: TriangleSet, params: RegParams, rng: RandomStream,
          psi_samples: int | None = None,
          force: bool = False) -> BoostResult:
    """Iterate the adjustment map, normalize, and round.

    Runs k = ceil((log n)^2) iterations by default, rescales by
    beta = 4 * mean_e phi_k^edge(e) / (p^2 q n), clamps to [0, 1], and
    includes each triangle independently with probability phi_*(T).
    Raises BoostDiverged when the discrepancy grows twice in a row,
    which signals a non-conforming input.
    """
    n = tset.n
    if not force:
        rep = params.report or check_conditions(tset, params, rng)
        params.report = rep
        if not rep.ok:
            raise ValueError(
                "conditions fail "
                f"(violations {rep.violation_counts}); pass force=True "
                "to boost anyway")
    k = params.iters if params.iters is not None else math.ceil(
        math.log(n) ** 2)
    wf = phi0(tset)
    trace = [TraceRow(0, wf.max_disc(), wf.vertex_residual())]
    grew = 0
    for it in range(1, k + 1):
        wf = adjust(wf, psi_samples, rng)
        d = wf.max_disc()
        prev = trace[-1].max_disc
        grew = grew + 1 if d > prev * (1 + 1e-9) + 1e-12 else 0
        trace.append(TraceRow(it, d, wf.vertex_residual()))
        if grew >= 2:
            raise BoostDiverged(
                f"discrepancy grew twice in a row at iteration {it}")
    # the edge average of phi^edge is 3 phi^sum / |E|: each triangle
    # feeds exactly three edges
    beta = 4.0 * (3.0 * wf.total / tset.edge_total) / (params.p**2
                                                       * params.q * n)
    phi_star = np.clip(wf.values / beta, 0.0, 1.0)
    chosen = rng.generator.random(len(tset)) < phi_star
    return BoostResult(phi_star, tset.subset(chosen), chosen, trace,
                       beta, wf)
