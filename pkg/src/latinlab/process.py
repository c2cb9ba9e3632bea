"""Sequential random construction of partial Latin squares.

The removal process fills an empty n x n square one triple at a time,
each step choosing uniformly among the triples (r, c, s) that are still
*available*: cell empty, symbol unused in the row and in the column.
With the girth constraint switched on (girth = 6), a triple is also
required to be *safe*: placing it must not complete an intercalate with
three triples already present, which keeps the girth of the partial
system above 6 for the whole run.

Both the available count and the safe count are maintained exactly and
incrementally.  Availability loses one cell line, one row line and one
column line per placement, so the update is three popcounts over line
bitmasks.  Safety is tracked through a danger table: placing T creates a
new near-intercalate for every pair (T, T') sharing a row or column
whose two completing cells are half-filled, and a scan of the at most
3(n - |row|) newly created patterns keeps the table current.  The count
of dangerous-but-available triples then falls out of the same line scans
that update availability.

The expected trajectory of the safe count is

    A(t) = n^3 (1 - t/n^2)^3 exp(-t^3/n^6),

the product of the pair-survival factor cubed and the intercalate
discount; without the constraint the exponential factor is absent.  Over
a full run the per-cell log-availability sum approaches
3 log n - 13/4, which is the enumeration exponent driving counting
applications, and ``log_density_target`` returns it.

``sample_sparse_system`` and ``collision_filter`` build the Bernoulli
random triple system and its Latinized subsystem: every triple agreeing
with another in two coordinates is deleted, simultaneously, so the
survivors form a partial Latin square whose small-structure statistics
are predictable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TripleSystem
from .rng import RandomStream


@dataclass(frozen=True)
class ProcessConfig:
    girth: int = 0              # 0 (unconstrained) or 6
    max_steps: int | None = None
    rejection_tries: int = 200  # uniform-candidate draws before list fallback
    list_threshold: int = 5000  # build the explicit candidate list below this


@dataclass
class ProcessResult:
    n: int
    girth: int
    steps: int
    stalled: bool
    placed: TripleSystem
    order: np.ndarray            # (steps, 3) placements in the order made
    trace: np.ndarray            # safe-candidate count before each step
    available_trace: np.ndarray  # plain available count before each step

    @property
    def coverage(self) -> float:
        return self.steps / self.n**2

    def log_density(self) -> float:
        """(1/n^2) sum of log candidate counts over the run."""
        return float(np.log(self.trace.astype(float)).sum()) / self.n**2


def predicted_available(n: int, t: float, girth: int = 6) -> float:
    """Model trajectory A(t); girth < 6 drops the intercalate discount."""
    x = t / n**2
    base = n**3 * (1.0 - x) ** 3
    if girth >= 6:
        base *= math.exp(-(x**3))
    return base


def log_density_target(n: int) -> float:
    """Full-run limit of ProcessResult.log_density for the girth-6 process."""
    return 3.0 * math.log(n) - 13.0 / 4.0


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


class ProcessState:
    """Mutable fill state with exact availability and danger bookkeeping."""

    def __init__(self, n: int, girth: int = 0):
        if girth not in (0, 6):
            raise ValueError("girth constraint must be 0 or 6")
        self.n = n
        self.girth = girth
        self.full = (1 << n) - 1
        self.cell = [[-1] * n for _ in range(n)]
        self.col_of = [[-1] * n for _ in range(n)]   # [r][s] -> column
        self.row_of = [[-1] * n for _ in range(n)]   # [c][s] -> row
        self.row_syms = [0] * n    # symbols present in row r
        self.col_syms = [0] * n
        self.row_cols = [0] * n    # filled columns of row r
        self.col_rows = [0] * n
        self.sym_cols = [0] * n    # columns containing symbol s
        self.sym_rows = [0] * n
        self.available = n**3
        self.dangerous_available = 0
        self.danger: dict[int, int] = {}
        self.steps = 0

    # -- predicates ---------------------------------------------------------

    def is_available(self, r: int, c: int, s: int) -> bool:
        return (
            self.cell[r][c] < 0
            and not ((self.row_syms[r] | self.col_syms[c]) >> s) & 1
        )

    def is_safe(self, r: int, c: int, s: int) -> bool:
        return self.danger.get((r * self.n + c) * self.n + s, 0) == 0

    @property
    def safe_count(self) -> int:
        return self.available - self.dangerous_available

    # -- the update ---------------------------------------------------------

    def place(self, r: int, c: int, s: int) -> None:
        if not self.is_available(r, c, s):
            raise ValueError(f"triple ({r},{c},{s}) is not available")
        n, full = self.n, self.full
        free_syms = ~(self.row_syms[r] | self.col_syms[c]) & full
        free_cols = ~(self.row_cols[r] | self.sym_cols[s]) & full
        free_rows = ~(self.col_rows[c] | self.sym_rows[s]) & full
        self.available -= (
            free_syms.bit_count() + free_cols.bit_count() + free_rows.bit_count() - 2
        )
        if self.girth:
            danger = self.danger
            drop = 0
            for s2 in _bits(free_syms):
                if danger.get((r * n + c) * n + s2, 0):
                    drop += 1
            for c2 in _bits(free_cols):
                if c2 != c and danger.get((r * n + c2) * n + s, 0):
                    drop += 1
            for r2 in _bits(free_rows):
                if r2 != r and danger.get((r2 * n + c) * n + s, 0):
                    drop += 1
            self.dangerous_available -= drop

        self.cell[r][c] = s
        self.col_of[r][s] = c
        self.row_of[c][s] = r
        self.row_syms[r] |= 1 << s
        self.col_syms[c] |= 1 << s
        self.row_cols[r] |= 1 << c
        self.col_rows[c] |= 1 << r
        self.sym_cols[s] |= 1 << c
        self.sym_rows[s] |= 1 << r
        self.steps += 1

        if self.girth:
            # near-intercalates created by the new triple, one per partner
            # sharing its row or column with the right completing cell
            add = self._add_danger
            cell, col_of, row_of = self.cell, self.col_of, self.row_of
            for c2 in _bits(self.row_cols[r] & ~(1 << c)):
                s2 = cell[r][c2]
                r3 = row_of[c][s2]
                if r3 >= 0:          # new triple plays the opposite corner
                    add(r3, c2, s)
                r3 = row_of[c2][s]
                if r3 >= 0:          # new triple is the side cell
                    add(r3, c, s2)
            for r2 in _bits(self.col_rows[c] & ~(1 << r)):
                s2 = cell[r2][c]
                c3 = col_of[r2][s]
                if c3 >= 0:          # new triple is the symbol-matching cell
                    add(r, c3, s2)

    def _add_danger(self, r: int, c: int, s: int) -> None:
        key = (r * self.n + c) * self.n + s
        prev = self.danger.get(key, 0)
        self.danger[key] = prev + 1
        if prev == 0 and self.is_available(r, c, s):
            self.dangerous_available += 1

    # -- candidate selection ------------------------------------------------

    def safe_candidates(self) -> list[tuple[int, int, int]]:
        n, full = self.n, self.full
        need_safe = bool(self.girth)
        out = []
        for r in range(n):
            for c in _bits(~self.row_cols[r] & full):
                for s in _bits(~(self.row_syms[r] | self.col_syms[c]) & full):
                    if not need_safe or self.is_safe(r, c, s):
                        out.append((r, c, s))
        return out

    def to_triples(self) -> TripleSystem:
        return TripleSystem(
            self.n,
            (
                (r, c, self.cell[r][c])
                for r in range(self.n)
                for c in range(self.n)
                if self.cell[r][c] >= 0
            ),
        )

    # -- slow recount for tests ---------------------------------------------

    def brute_counts(self) -> tuple[int, int]:
        """(available, dangerous-and-available) by direct scan."""
        n = self.n
        avail = 0
        dang = 0
        for r in range(n):
            for c in range(n):
                for s in range(n):
                    if not self.is_available(r, c, s):
                        continue
                    avail += 1
                    if self._completes_intercalate(r, c, s):
                        dang += 1
        return avail, dang

    def _completes_intercalate(self, r: int, c: int, s: int) -> bool:
        both = self.row_syms[r] & self.col_syms[c]
        for s2 in _bits(both):
            c2 = self.col_of[r][s2]
            r2 = self.row_of[c][s2]
            if self.cell[r2][c2] == s:
                return True
        return False


def run_process(
    n: int, rng: RandomStream, config: ProcessConfig | None = None
) -> ProcessResult:
    """Run the process to stall (or max_steps) and record exact counts."""
    cfg = config or ProcessConfig()
    state = ProcessState(n, cfg.girth)
    limit = n * n if cfg.max_steps is None else min(cfg.max_steps, n * n)
    trace: list[int] = []
    avail_trace: list[int] = []
    order: list[tuple[int, int, int]] = []
    randrange = rng.randrange
    stalled = False
    while state.steps < limit:
        safe = state.safe_count
        if safe <= 0:
            stalled = True
            break
        trace.append(safe)
        avail_trace.append(state.available)
        placed = False
        if safe >= cfg.list_threshold:
            for _ in range(cfg.rejection_tries):
                r = randrange(n)
                c = randrange(n)
                s = randrange(n)
                if state.is_available(r, c, s) and (
                    not cfg.girth or state.is_safe(r, c, s)
                ):
                    state.place(r, c, s)
                    order.append((r, c, s))
                    placed = True
                    break
        if not placed:
            cands = state.safe_candidates()
            r, c, s = cands[randrange(len(cands))]
            state.place(r, c, s)
            order.append((r, c, s))
    return ProcessResult(
        n=n,
        girth=cfg.girth,
        steps=state.steps,
        stalled=stalled,
        placed=state.to_triples(),
        order=np.array(order, dtype=np.int64).reshape(-1, 3),
        trace=np.array(trace, dtype=np.int64),
        available_trace=np.array(avail_trace, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# Bernoulli triple systems and the collision filter


def sample_sparse_system(n: int, alpha: float, rng: RandomStream) -> TripleSystem:
    """Each of the n^3 triples kept independently with probability alpha/n.

    The result is generally not a partial Latin square; see
    ``collision_filter``.
    """
    p = alpha / n
    if not 0 <= p <= 1:
        raise ValueError(f"alpha/n = {p} is not a probability")
    draws = rng.generator.random(n**3)
    idx = np.flatnonzero(draws < p)
    r, rem = np.divmod(idx, n * n)
    c, s = np.divmod(rem, n)
    return TripleSystem(n, zip(r.tolist(), c.tolist(), s.tolist()))


def collision_filter(ts: TripleSystem) -> TripleSystem:
    """Delete, simultaneously, every triple that agrees with another in
    at least two coordinates.  The survivors form a partial Latin square."""
    if len(ts.triples) == 0:
        return ts
    arr = np.array(ts.triples, dtype=np.int64)
    n = ts.n
    keep = np.ones(len(arr), dtype=bool)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        key = arr[:, i] * n + arr[:, j]
        _, inverse, counts = np.unique(key, return_inverse=True, return_counts=True)
        keep &= counts[inverse] == 1
    return TripleSystem(n, (tuple(t) for t in arr[keep].tolist()))
