"""
Exact branch-and-bound search for independent queen placements on Z_n^d.

Cells are visited in lexicographic order, first coordinate outermost. The
board is cut into axis lines along the last coordinate; at each line the
search either places one queen on an admissible cell of it or skips it.
A cell is admissible iff none of its (3^d - 1)/2 line keys is occupied.

The bound only uses the trivial capacity n^(m-1) of an m-dimensional axis
slab, so the search never relies on the values it is meant to confirm.
"""
import itertools
import json
import logging
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool, Value
from typing import List, Optional

from .certificates import known_max_2d
from .core import ConstructionError, require
from .lines import Placement, diagonal_maps, verify_by_maps, verify_pairwise

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 100000
CLOCK_CHECK_EVERY = 1024


class Status(str, Enum):
    OPTIMAL = 'Optimal'
    LOWER_BOUND_ONLY = 'LowerBoundOnly'
    INFEASIBLE = 'Infeasible'

    def __str__(self):
        return self.value


class Decision(str, Enum):
    YES = 'Yes'
    NO = 'No'
    UNKNOWN = 'Unknown'

    def __str__(self):
        return self.value


class BudgetExhausted(Exception):
    """Raised inside the search when the node or time budget runs out."""


class _TargetReached(Exception):
    pass


@dataclass
class SolverResult(object):
    n: int
    d: int
    best: Placement
    best_count: int
    status: Status
    target: Optional[int] = None
    nodes_explored: int = 0
    elapsed_ms: int = 0

    def to_dict(self):
        return {
            'n': self.n,
            'd': self.d,
            'best_count': self.best_count,
            'status': str(self.status),
            'target': self.target,
            'nodes_explored': self.nodes_explored,
            'elapsed_ms': self.elapsed_ms,
            'queens': [list(q) for q in self.best.queens],
        }


@dataclass
class DecisionResult(object):
    n: int
    d: int
    k: int
    status: Decision
    witness: Optional[Placement] = None
    nodes_explored: int = 0
    elapsed_ms: int = 0

    def to_dict(self):
        return {
            'n': self.n,
            'd': self.d,
            'target': self.k,
            'decision': str(self.status),
            'nodes_explored': self.nodes_explored,
            'elapsed_ms': self.elapsed_ms,
            'queens': None if self.witness is None else [list(q) for q in self.witness.queens],
        }


def _label_index(label, n):
    index = 0
    for c in label:
        index = index * n + c
    return index


class SearchState(object):
    """
    Line occupancy per family, the current partial placement and the queen
    count of every axis slab along the current path.
    """

    def __init__(self, n, d, node_budget=None, time_budget=None, shared=None,
                 progress=None, progress_every=PROGRESS_EVERY, perfect=False):
        self.n = n
        self.d = d
        self.pow = [n ** k for k in range(d + 1)]
        self.num_lines = self.pow[d - 1]

        maps = diagonal_maps(d)
        stride = self.pow[d - 1]
        self.cells = list(itertools.product(range(n), repeat=d))
        self.keys = [
            tuple(f * stride + _label_index(m.apply(c, n), n) for f, m in enumerate(maps))
            for c in self.cells
        ]
        self.occupied = bytearray(len(maps) * stride)
        self.slab_counts = [[0] * self.pow[k] for k in range(d)]

        self.queens = []
        self.best_count = 0
        self.best = []

        self.node_budget = node_budget
        self.time_budget = time_budget
        self.shared = shared
        self.progress = progress
        self.progress_every = progress_every
        self.perfect = perfect
        self.stop_at = None

        self.nodes = 0
        self.started = time.monotonic()

    @property
    def elapsed_ms(self):
        return int((time.monotonic() - self.started) * 1000)

    # -----------------------------
    # STATE UPDATES
    # -----------------------------

    def admissible(self, cell):
        occupied = self.occupied
        return not any(occupied[k] for k in self.keys[cell])

    def place(self, cell):
        line = cell // self.n
        for k in self.keys[cell]:
            self.occupied[k] = 1
        for level in range(self.d - 1):
            self.slab_counts[level][line // self.pow[self.d - 1 - level]] += 1
        self.queens.append(cell)

    def unplace(self, cell):
        line = cell // self.n
        for k in self.keys[cell]:
            self.occupied[k] = 0
        for level in range(self.d - 1):
            self.slab_counts[level][line // self.pow[self.d - 1 - level]] -= 1
        self.queens.pop()

    def remaining_bound(self, line):
        """
        Most queens that still fit from the start of this line on, walking the
        slab hierarchy outwards: a level-k slab holds at most its capacity minus
        what it already has, and at most what remains of the current sub-slab
        plus full capacity for every later one
        """
        n, d, pw = self.n, self.d, self.pow
        bound = 1
        for k in range(d - 2, -1, -1):
            slab = line // pw[d - 1 - k]
            c_next = (line // pw[d - 2 - k]) % n
            cap_here = pw[d - 1 - k]
            cap_sub = pw[d - 2 - k]
            bound = min(cap_here - self.slab_counts[k][slab], bound + (n - c_next - 1) * cap_sub)
        return bound

    def forward_feasible(self, line):
        # every remaining line needs an admissible cell when the board must be full
        n = self.n
        for later in range(line, self.num_lines):
            if not any(self.admissible(cell) for cell in range(later * n, later * n + n)):
                return False
        return True

    # -----------------------------
    # SEARCH
    # -----------------------------

    def _tick(self, line):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExhausted()
        if self.nodes % CLOCK_CHECK_EVERY == 0 and self.time_budget is not None:
            if time.monotonic() - self.started > self.time_budget:
                raise BudgetExhausted()
        if self.progress is not None and self.nodes % self.progress_every == 0:
            self.progress.write(json.dumps({
                'nodes': self.nodes,
                'depth': line,
                'incumbent': self.best_count,
                'elapsed_ms': self.elapsed_ms,
            }) + '\n')

    def _record(self):
        placed = len(self.queens)
        if placed <= self.best_count:
            return
        self.best_count = placed
        self.best = list(self.queens)
        if self.shared is not None:
            with self.shared.get_lock():
                if placed > self.shared.value:
                    self.shared.value = placed
        if self.stop_at is not None and placed >= self.stop_at:
            raise _TargetReached()

    def _pruned(self, line):
        reachable = len(self.queens) + self.remaining_bound(line)
        if reachable <= self.best_count:
            return True
        # other workers' incumbent only prunes strictly worse branches
        return self.shared is not None and reachable < self.shared.value

    def search(self, line):
        self._tick(line)
        self._record()
        if line >= self.num_lines or self._pruned(line):
            return
        if self.perfect and not self.forward_feasible(line):
            return

        base = line * self.n
        for cell in range(base, base + self.n):
            if not self.admissible(cell):
                continue
            self.place(cell)
            self.search(line + 1)
            self.unplace(cell)

        if not self.perfect:
            self.search(line + 1)

    def run(self, prefix=(), start_line=0):
        """
        Searches the subtree below the forced queens in prefix
        :return: True when the subtree was exhausted
        """
        for cell in prefix:
            self.place(cell)
        try:
            self.search(start_line)
        except BudgetExhausted:
            return False
        finally:
            while self.queens:
                self.unplace(self.queens[-1])
        return True

    def placement(self, cells):
        return Placement(self.n, self.d, tuple(self.cells[c] for c in sorted(cells)))


def _check_witness(pl):
    if not (verify_by_maps(pl).independent and verify_pairwise(pl).independent):
        raise ConstructionError('solver produced a dependent placement for n={} d={}'.format(pl.n, pl.d))
    return pl


def _subtrees(state, fix_origin):
    """
    (forced cells, start line) roots in DFS order: one per cell of the next
    queen, then the root without it
    """
    n = state.n
    if fix_origin:
        head, first_line = [0], 1
    else:
        head, first_line = [], 0

    roots = []
    for cell in range(first_line * n, state.num_lines * n):
        line = cell // n
        if all(not (set(state.keys[cell]) & set(state.keys[h])) for h in head):
            roots.append((tuple(head) + (cell,), line + 1))
    roots.append((tuple(head), state.num_lines))
    return roots


# called by the Pool when a process starts
def _init_worker(shared):
    global g_incumbent
    g_incumbent = shared


def _run_until(state, prefix, start_line):
    """
    :return: (exhausted, reached) where reached means stop_at was hit
    """
    try:
        return state.run(prefix, start_line), False
    except _TargetReached:
        return False, True


def _search_subtree(args):
    n, d, prefix, start_line, node_budget, time_budget, target = args
    state = SearchState(n, d, node_budget=node_budget, time_budget=time_budget, shared=g_incumbent)
    state.stop_at = target
    exhausted, reached = _run_until(state, prefix, start_line)
    return state.best_count, state.best, state.nodes, exhausted, reached


def _max_parallel(n, d, node_budget, time_budget, fix_origin, workers, target, progress):
    root = SearchState(n, d)
    roots = _subtrees(root, fix_origin)
    shared = Value('i', 0)

    # each subtree gets its own budget slice so the result does not depend on scheduling
    slice_budget = None if node_budget is None else max(1, node_budget // len(roots))
    tasks = [(n, d, prefix, start, slice_budget, time_budget, target) for prefix, start in roots]

    best_count, best = 0, []
    nodes = 0
    exhausted, reached = True, False
    with Pool(processes=workers, initializer=_init_worker, initargs=(shared,)) as pool:
        # imap keeps subtree order, so the merge is the same as with map
        for i, (count, cells, used, done, hit) in enumerate(pool.imap(_search_subtree, tasks)):
            nodes += used
            exhausted = exhausted and done
            reached = reached or hit
            if count > best_count:
                best_count, best = count, cells
            if progress is not None:
                progress.write(json.dumps({
                    'nodes': nodes,
                    'depth': len(roots[i][0]),
                    'incumbent': best_count,
                    'elapsed_ms': root.elapsed_ms,
                    'subtree': i,
                    'subtrees': len(roots),
                }) + '\n')
    return root, best_count, best, nodes, exhausted, reached


def max_independent(n, d, node_budget=None, time_budget=None, fix_origin=True, workers=1,
                    progress=None, progress_every=PROGRESS_EVERY, target=None):
    """
    Largest independent placement on Z_n^d by exhaustive branch-and-bound

    >>> max_independent(5, 2).best_count
    5

    :param n: n >= 1
    :param d: d >= 2
    :param node_budget: stop after this many search nodes (reproducible mode)
    :param time_budget: stop after this many seconds
    :param fix_origin: put the first queen on the origin (translation invariance)
    :param workers: > 1 splits the tree by the next queen across processes; progress
        then gets one line per finished subtree
    :param progress: stream receiving JSON progress lines
    :param target: stop as soon as this many queens are placed
    :return: SolverResult. Optimal iff the search space was exhausted; Infeasible
        when it was exhausted below target (best is then still the maximum);
        LowerBoundOnly when the budget ran out or target was reached below n^(d-1)
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(d >= 2, 'd must be at least 2, got {}'.format(d))
    if target is not None:
        require(1 <= target <= n ** (d - 1), 'target must lie in [1, {}], got {}'.format(n ** (d - 1), target))
    started = time.monotonic()

    if workers > 1:
        state, best_count, best, nodes, exhausted, reached = _max_parallel(
            n, d, node_budget, time_budget, fix_origin, workers, target, progress)
    else:
        state = SearchState(n, d, node_budget=node_budget, time_budget=time_budget,
                            progress=progress, progress_every=progress_every)
        state.stop_at = target
        prefix, start = ((0,), 1) if fix_origin else ((), 0)
        exhausted, reached = _run_until(state, prefix, start)
        best_count, best, nodes = state.best_count, state.best, state.nodes

    pl = _check_witness(state.placement(best))
    if reached:
        status = Status.OPTIMAL if best_count == n ** (d - 1) else Status.LOWER_BOUND_ONLY
    elif exhausted:
        status = Status.INFEASIBLE if target is not None and best_count < target else Status.OPTIMAL
    else:
        status = Status.LOWER_BOUND_ONLY
    elapsed_ms = int((time.monotonic() - started) * 1000)
    logger.info('max_independent n=%d d=%d: %d (%s) after %d nodes', n, d, best_count, status, nodes)
    return SolverResult(n, d, pl, best_count, status, target, nodes, elapsed_ms)


def exists_independent(n, d, k, node_budget=None, time_budget=None, fix_origin=True, perfect=False,
                       progress=None, progress_every=PROGRESS_EVERY):
    """
    Decides whether k independent queens fit on Z_n^d
    :param n:
    :param d:
    :param k: 0 <= k <= n^(d-1)
    :param perfect: require k = n^(d-1) and never skip an axis line; also checks
        that every remaining line keeps an admissible cell
    :return: DecisionResult, No only when the search space was exhausted
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(d >= 2, 'd must be at least 2, got {}'.format(d))
    require(0 <= k <= n ** (d - 1), 'k must lie in [0, n^(d-1)] = [0, {}], got {}'.format(n ** (d - 1), k))
    if perfect:
        require(k == n ** (d - 1), 'perfect mode needs k = n^(d-1) = {}, got {}'.format(n ** (d - 1), k))

    if k == 0:
        return DecisionResult(n, d, k, Decision.YES, Placement(n, d, ()), 0, 0)

    state = SearchState(n, d, node_budget=node_budget, time_budget=time_budget,
                        progress=progress, progress_every=progress_every, perfect=perfect)
    # anything with fewer than k queens is pruned
    state.best_count = k - 1
    state.stop_at = k

    prefix, start = ((0,), 1) if fix_origin else ((), 0)
    try:
        exhausted = state.run(prefix, start)
    except _TargetReached:
        witness = _check_witness(state.placement(state.best))
        logger.info('exists_independent n=%d d=%d k=%d: yes after %d nodes', n, d, k, state.nodes)
        return DecisionResult(n, d, k, Decision.YES, witness, state.nodes, state.elapsed_ms)

    status = Decision.NO if exhausted else Decision.UNKNOWN
    logger.info('exists_independent n=%d d=%d k=%d: %s after %d nodes', n, d, k, status, state.nodes)
    return DecisionResult(n, d, k, status, None, state.nodes, state.elapsed_ms)


# -----------------------------
# RANDOMIZED PLANE SEARCH
# -----------------------------

WITNESS_NODE_BUDGET = 100000
# nodes of the first restart, per unit of n
RESTART_NODES = 32


try:
    _popcount = int.bit_count
except AttributeError:
    # python < 3.10
    def _popcount(v):
        return bin(v).count('1')


def _bits(v):
    cells = []
    while v:
        low = v & -v
        cells.append(low.bit_length() - 1)
        v ^= low
    return cells


def _plane_lines(x, y, n):
    return x, y, (x + y) % n, (x - y) % n


class PlaneSearch(object):
    """
    Backtracking for k queens on Z_n^2 over the four line families (columns,
    rows, x+y, x-y). Free cells are the bits of one integer. Each node branches
    on the line with the fewest free cells, trying its cells in random order
    and leaving it empty last; a family with fewer live lines than queens still
    to place is a dead end. Without a node limit the search is complete.
    """

    def __init__(self, n, k, rng):
        self.n = n
        self.k = k
        self.rng = rng
        self.masks = [[0] * n for _ in range(4)]
        for x in range(n):
            for y in range(n):
                bit = 1 << (x * n + y)
                for f, label in enumerate(_plane_lines(x, y, n)):
                    self.masks[f][label] |= bit
        self.order = self.masks
        self.nodes = 0
        self.limit = None

    def attack(self, cell):
        x, y = divmod(cell, self.n)
        masks = self.masks
        cols, rows, sums, diffs = _plane_lines(x, y, self.n)
        return masks[0][cols] | masks[1][rows] | masks[2][sums] | masks[3][diffs]

    def search(self, free, placed):
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise BudgetExhausted()
        remaining = self.k - len(placed)
        if remaining == 0:
            return list(placed)

        fewest, line = None, None
        for family in self.order:
            live = 0
            for mask in family:
                count = _popcount(free & mask)
                if count:
                    live += 1
                    if fewest is None or count < fewest:
                        fewest, line = count, mask
            if live < remaining:
                return None

        cells = _bits(free & line)
        self.rng.shuffle(cells)
        for cell in cells:
            placed.append(cell)
            found = self.search(free & ~self.attack(cell), placed)
            if found is not None:
                return found
            placed.pop()
        return self.search(free & ~line, placed)

    def run(self, limit=None):
        """
        One restart with freshly shuffled line order
        :return: (cells or None, True when the search space was exhausted)
        """
        self.nodes = 0
        self.limit = limit
        self.order = []
        for family in self.masks:
            family = list(family)
            self.rng.shuffle(family)
            self.order.append(family)
        try:
            cells = self.search((1 << (self.n * self.n)) - 1, [])
        except BudgetExhausted:
            return None, False
        return cells, cells is None


def find_plane_witness(n, k, seed=0, node_budget=WITNESS_NODE_BUDGET):
    """
    k independent queens on Z_n^2 by restarted randomized PlaneSearch, each
    restart allowed half as many nodes again as the one before

    :param n: n >= 1
    :param k: 0 <= k <= n
    :param seed: seeds the cell and line orders, so results are reproducible
    :param node_budget: total nodes over all restarts
    :return: DecisionResult, No only when one restart exhausted the search space
    """
    require(n >= 1, 'n must be positive, got {}'.format(n))
    require(0 <= k <= n, 'k must lie in [0, n] = [0, {}], got {}'.format(n, k))
    started = time.monotonic()
    search = PlaneSearch(n, k, random.Random(seed))

    spent = 0
    limit = RESTART_NODES * n
    status = Decision.UNKNOWN
    while spent < node_budget:
        limit = min(limit, node_budget - spent)
        cells, exhausted = search.run(limit)
        spent += min(search.nodes, limit)
        if cells is not None:
            witness = _check_witness(Placement(n, 2, tuple(sorted(divmod(c, n) for c in cells))))
            elapsed_ms = int((time.monotonic() - started) * 1000)
            logger.info('find_plane_witness n=%d k=%d: yes after %d nodes', n, k, spent)
            return DecisionResult(n, 2, k, Decision.YES, witness, spent, elapsed_ms)
        if exhausted:
            status = Decision.NO
            break
        limit = limit * 3 // 2

    logger.info('find_plane_witness n=%d k=%d: %s after %d nodes', n, k, status, spent)
    return DecisionResult(n, 2, k, status, None, spent, int((time.monotonic() - started) * 1000))


@dataclass
class Discrepancy(object):
    n: int
    expected: int
    found: int
    status: Status
    witness: Placement


@dataclass
class ConfirmationReport(object):
    results: List[SolverResult] = field(default_factory=list)
    discrepancies: List[Discrepancy] = field(default_factory=list)
    unfinished: List[int] = field(default_factory=list)

    @property
    def confirmed(self):
        return not self.discrepancies and not self.unfinished


def confirm_certificates(n_max_2d, node_budget=None, time_budget=None):
    """
    Runs max_independent(n, 2) for 2 <= n <= n_max_2d against known_max_2d(n).
    A witness above the known value, or an exhausted search below it, is a
    discrepancy.
    :param n_max_2d: 14 or less keeps this at desk scale
    :return: ConfirmationReport
    """
    require(n_max_2d >= 2, 'n_max_2d must be at least 2, got {}'.format(n_max_2d))
    report = ConfirmationReport()
    for n in range(2, n_max_2d + 1):
        result = max_independent(n, 2, node_budget=node_budget, time_budget=time_budget)
        report.results.append(result)
        expected = known_max_2d(n)

        exceeded = result.best_count > expected
        fell_short = result.status is Status.OPTIMAL and result.best_count != expected
        if exceeded or fell_short:
            logger.error('n=%d: solver found %d (%s), expected %d', n, result.best_count, result.status, expected)
            report.discrepancies.append(Discrepancy(n, expected, result.best_count, result.status, result.best))
        elif result.status is not Status.OPTIMAL:
            report.unfinished.append(n)
    return report
