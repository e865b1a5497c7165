"""Linear-Gaussian Bayesian network structure learning over daily post counts.

Each node is regressed on its parents by least squares; a DAG is scored by
BIC, the sum over nodes of the family score::

    loglik(child | parents) - (k / 2) log N,   k = |parents| + 2

and searched by greedy hill climbing over single-edge additions, removals
and reversals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import CATEGORIES, Dataset, FoodCategory, TimeSlot
from .errors import EmptyWindow, InsufficientRows, SingularDesignWarning

VARIANCE_FLOOR = 1e-9
MIN_IMPROVEMENT = 1e-9
TIE_RTOL = 1e-9
CATEGORY_NODES = tuple(c.label for c in CATEGORIES)


@dataclass(frozen=True)
class CountTable:
    """Day-by-category post counts for one time slot."""

    slot: TimeSlot | None
    days: tuple
    values: np.ndarray
    columns: tuple = CATEGORY_NODES

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.shape[1] != len(self.columns):
            raise ValueError(f"values must have shape (N, {len(self.columns)})")
        if np.any(vals < 0):
            raise ValueError("counts must be non-negative")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name) -> np.ndarray:
        return self.values[:, _node_index(self.columns, name)]


def build_count_table(dataset: Dataset, slot: TimeSlot) -> CountTable:
    """One row per day of the analysis window, one column per food category.

    Days without posts stay in the table as zero rows. Dinner posts made
    after midnight count toward the previous day.
    """
    if slot not in (TimeSlot.BREAKFAST, TimeSlot.LUNCH, TimeSlot.DINNER):
        raise ValueError(f"count tables are built for named slots only, not {slot}")
    days = dataset.days()
    if not days:
        raise EmptyWindow("analysis window has no days")
    row_of = {d: i for i, d in enumerate(days)}
    counts = np.zeros((len(days), len(CATEGORIES)), dtype=np.int64)
    for p in dataset.posts:
        if p.slot is slot and p.day in row_of:
            counts[row_of[p.day], p.category.index] += 1
    if counts.sum() == 0:
        raise EmptyWindow(f"no {slot.value} posts in the analysis window")
    counts.setflags(write=False)
    return CountTable(slot, tuple(days), counts)


def _node_index(nodes, node) -> int:
    if isinstance(node, (int, np.integer)):
        return int(node)
    if isinstance(node, FoodCategory):
        node = node.label
    return nodes.index(node)


def _matrix(table) -> np.ndarray:
    vals = table.values if isinstance(table, CountTable) else table
    return np.asarray(vals, dtype=float)


def _family_terms(data: np.ndarray, child: int, parents: Sequence[int]):
    """Gaussian log-likelihood of one family at the (floored) MLE, and its parameter count."""
    n = data.shape[0]
    k = len(parents) + 2
    if n < len(parents) + 3:
        raise InsufficientRows(f"{n} rows cannot support a family with {len(parents)} parents")
    y = data[:, child]
    X = np.column_stack([np.ones(n)] + [data[:, p] for p in parents])
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        warnings.warn(f"collinear parents {tuple(parents)} for node {child}; using pseudo-inverse",
                      SingularDesignWarning, stacklevel=3)
    resid = y - X @ coef
    rss = float(resid @ resid)
    var = max(rss / n, VARIANCE_FLOOR)
    loglik = -0.5 * n * math.log(2.0 * math.pi * var) - rss / (2.0 * var)
    return loglik, k


def family_bic(table, child, parents=()) -> float:
    """BIC contribution of ``child`` given ``parents``.

    ``table`` is a CountTable or any 2-D array; nodes may be given as column
    indices, category members or column labels.
    """
    cols = table.columns if isinstance(table, CountTable) else None
    c = _node_index(cols, child) if cols else int(child)
    ps = tuple(sorted(_node_index(cols, p) if cols else int(p) for p in parents))
    if c in ps:
        raise ValueError("a node cannot be its own parent")
    data = _matrix(table)
    loglik, k = _family_terms(data, c, ps)
    return loglik - 0.5 * k * math.log(data.shape[0])


class Move(NamedTuple):
    kind: str  # "add" | "remove" | "reverse"
    parent: int
    child: int


@dataclass(frozen=True)
class Dag:
    """DAG over named nodes; ``edges`` holds (parent, child) index pairs."""

    nodes: tuple = CATEGORY_NODES
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in self.edges))
        n = len(self.nodes)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references a missing node")
            if a == b:
                raise ValueError(f"self-loop on {self.nodes[a]}")
            if (b, a) in self.edges:
                raise ValueError(f"edges in both directions between {self.nodes[a]} and {self.nodes[b]}")
        if self.topological_order() is None:
            raise ValueError("graph has a directed cycle")

    @classmethod
    def empty(cls, nodes=CATEGORY_NODES) -> "Dag":
        return cls(tuple(nodes))

    @classmethod
    def full(cls, nodes=CATEGORY_NODES) -> "Dag":
        n = len(nodes)
        return cls(tuple(nodes), frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def from_labels(cls, pairs, nodes=CATEGORY_NODES) -> "Dag":
        nodes = tuple(nodes)
        return cls(nodes, frozenset((_node_index(nodes, a), _node_index(nodes, b)) for a, b in pairs))

    def parents(self, child: int) -> tuple:
        return tuple(sorted(a for a, b in self.edges if b == child))

    def children(self, parent: int) -> tuple:
        return tuple(sorted(b for a, b in self.edges if a == parent))

    def topological_order(self):
        """Kahn's algorithm; ``None`` if the edges contain a cycle."""
        indeg = [0] * len(self.nodes)
        for _, b in self.edges:
            indeg[b] += 1
        ready = [i for i, d in enumerate(indeg) if d == 0]
        order = []
        while ready:
            u = ready.pop(0)
            order.append(u)
            for v in self.children(u):
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        return order if len(order) == len(self.nodes) else None

    def has_path(self, src: int, dst: int, skip=None) -> bool:
        """Directed path src -> dst, optionally ignoring the edge ``skip``."""
        stack, seen = [src], {src}
        while stack:
            u = stack.pop()
            for a, b in self.edges:
                if a != u or (a, b) == skip or b in seen:
                    continue
                if b == dst:
                    return True
                seen.add(b)
                stack.append(b)
        return False

    def skeleton(self) -> frozenset:
        return frozenset(frozenset(e) for e in self.edges)

    def apply(self, move: Move) -> "Dag":
        e = (move.parent, move.child)
        if move.kind == "add":
            edges = self.edges | {e}
        elif move.kind == "remove":
            edges = self.edges - {e}
        elif move.kind == "reverse":
            edges = (self.edges - {e}) | {(move.child, move.parent)}
        else:
            raise ValueError(f"unknown move kind {move.kind!r}")
        return Dag(self.nodes, edges)

    def legal_moves(self) -> list[Move]:
        """All single-edge moves that keep the graph acyclic, in tie-break order."""
        n = len(self.nodes)
        adds = [Move("add", i, j) for i in range(n) for j in range(n)
                if i != j and (i, j) not in self.edges and (j, i) not in self.edges
                and not self.has_path(j, i)]
        ordered = sorted(self.edges)
        removes = [Move("remove", a, b) for a, b in ordered]
        reverses = [Move("reverse", a, b) for a, b in ordered if not self.has_path(a, b, skip=(a, b))]
        return adds + removes + reverses


def to_edge_list(dag: Dag) -> list[tuple[str, str]]:
    """Edges as (parent, child) labels, sorted by node index."""
    return [(dag.nodes[a], dag.nodes[b]) for a, b in sorted(dag.edges)]


def format_edges(dag: Dag) -> str:
    return ", ".join(f"({a} → {b})" for a, b in to_edge_list(dag))


@dataclass(frozen=True)
class ScoreReport:
    total_bic: float
    family_scores: dict
    log_likelihood: float
    penalty: float
    d: int
    n_rows: int


class _Scorer:
    """Family scores memoized by (child, parent set)."""

    def __init__(self, table):
        self.data = _matrix(table)
        self.log_n = math.log(self.data.shape[0])
        self._cache = {}

    def terms(self, child, parents):
        key = (child, tuple(sorted(parents)))
        if key not in self._cache:
            self._cache[key] = _family_terms(self.data, key[0], key[1])
        return self._cache[key]

    def family(self, child, parents) -> float:
        loglik, k = self.terms(child, parents)
        return loglik - 0.5 * k * self.log_n

    def families(self, dag: Dag) -> list[float]:
        return [self.family(j, dag.parents(j)) for j in range(len(dag.nodes))]

    def move_delta(self, dag: Dag, move: Move) -> float:
        a, b = move.parent, move.child
        pb = set(dag.parents(b))
        if move.kind == "add":
            return self.family(b, pb | {a}) - self.family(b, pb)
        if move.kind == "remove":
            return self.family(b, pb - {a}) - self.family(b, pb)
        pa = set(dag.parents(a))
        return (self.family(b, pb - {a}) - self.family(b, pb)
                + self.family(a, pa | {b}) - self.family(a, pa))


def _check_nodes(table, dag):
    width = _matrix(table).shape[1]
    if width != len(dag.nodes):
        raise ValueError(f"table has {width} columns but the DAG has {len(dag.nodes)} nodes")


def bic_score(table, dag: Dag) -> ScoreReport:
    """Decomposed BIC of ``dag`` on ``table``."""
    _check_nodes(table, dag)
    sc = _Scorer(table)
    fams, logliks, d = {}, [], 0
    for j, name in enumerate(dag.nodes):
        loglik, k = sc.terms(j, dag.parents(j))
        fams[name] = loglik - 0.5 * k * sc.log_n
        logliks.append(loglik)
        d += k
    return ScoreReport(
        total_bic=math.fsum(fams.values()),
        family_scores=fams,
        log_likelihood=math.fsum(logliks),
        penalty=0.5 * d * sc.log_n,
        d=d,
        n_rows=sc.data.shape[0],
    )


class Step(NamedTuple):
    move: Move
    score_before: float
    score_after: float

    @property
    def delta(self) -> float:
        return self.score_after - self.score_before


@dataclass(frozen=True)
class SearchTrace:
    initial_graph: Dag
    final_graph: Dag
    iterations: tuple = field(default=())
    converged: bool = True


def best_move(table, dag: Dag, min_improvement=MIN_IMPROVEMENT, _scorer=None):
    """Best strictly improving single-edge move and its score delta, or ``(None, 0.0)``.

    Ties go to the earliest move in ``Dag.legal_moves`` order. Deltas within
    ``TIE_RTOL`` relative of each other count as tied, so score-equivalent
    moves (e.g. ``a -> b`` versus ``b -> a`` between two parentless nodes)
    are decided by move order rather than by rounding noise.
    """
    sc = _scorer or _Scorer(table)
    best, best_delta = None, 0.0
    for move in dag.legal_moves():
        delta = sc.move_delta(dag, move)
        if delta <= min_improvement:
            continue
        if best is None or delta > best_delta + TIE_RTOL * max(1.0, abs(best_delta)):
            best, best_delta = move, delta
    return best, best_delta


def hill_climb(table, init: Dag | None = None, max_iters: int = 1000,
               min_improvement: float = MIN_IMPROVEMENT) -> tuple[Dag, SearchTrace]:
    """Greedy single-edge search from ``init`` (empty graph by default).

    Each iteration applies the move with the largest score gain above
    ``min_improvement``; the search stops at a local optimum or after
    ``max_iters`` moves (``SearchTrace.converged`` is False in that case).
    Only the families touched by a move are re-scored.
    """
    cols = table.columns if isinstance(table, CountTable) else None
    width = _matrix(table).shape[1]
    if init is None:
        init = Dag.empty(cols or tuple(str(i) for i in range(width)))
    _check_nodes(table, init)
    sc = _Scorer(table)
    dag = init
    score = math.fsum(sc.families(dag))
    steps = []
    converged = False
    for _ in range(max_iters):
        move, _delta = best_move(table, dag, min_improvement, sc)
        if move is None:
            converged = True
            break
        dag = dag.apply(move)
        new = math.fsum(sc.families(dag))
        steps.append(Step(move, score, new))
        score = new
    else:
        converged = best_move(table, dag, min_improvement, sc)[0] is None
    return dag, SearchTrace(init, dag, tuple(steps), converged)


def dag_to_dict(dag: Dag, report: ScoreReport, trace: SearchTrace | None = None, slot=None) -> dict:
    out = {
        "slot": slot.value if isinstance(slot, TimeSlot) else slot,
        "score": report.total_bic,
        "log_likelihood": report.log_likelihood,
        "penalty": report.penalty,
        "d": report.d,
        "n_rows": report.n_rows,
        "nodes": list(dag.nodes),
        "edges": [{"parent": a, "child": b} for a, b in to_edge_list(dag)],
        "edge_text": format_edges(dag),
        "family_scores": report.family_scores,
    }
    if trace is not None:
        out["converged"] = trace.converged
        out["trace"] = [
            {
                "move": s.move.kind,
                "edge": [dag.nodes[s.move.parent], dag.nodes[s.move.child]],
                "delta": s.delta,
                "score_before": s.score_before,
                "score_after": s.score_after,
            }
            for s in trace.iterations
        ]
    return out


def dag_to_dot(dag: Dag, name="G") -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    lines += [f'  "{node}";' for node in dag.nodes]
    lines += [f'  "{a}" -> "{b}";' for a, b in to_edge_list(dag)]
    lines.append("}")
    return "\n".join(lines) + "\n"
