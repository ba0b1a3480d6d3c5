"""Immutable simple-graph core: adjacency storage, traversal, subgraphs, text I/O."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .errors import GraphParseError

# Vertex sets are plain frozensets of ints over the ground set 0..n-1.
VertexSet = frozenset


class Graph:
    """Undirected simple graph on vertex set {0..n-1}.

    Instances are immutable after construction.  Adjacency lists are kept
    sorted so every traversal (and everything built on top) is
    deterministic.
    """

    __slots__ = ("n", "edges", "adj", "_masks")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        canon = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        self.n = n
        self.edges = frozenset(canon)
        lists: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            lists[u].append(v)
            lists[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in lists)
        self._masks = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    @property
    def adj_masks(self) -> tuple[int, ...]:
        """Per-vertex neighbor bitmasks; built lazily, used by the exact solvers."""
        if self._masks is None:
            self._masks = tuple(sum(1 << u for u in nbrs) for nbrs in self.adj)
        return self._masks

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def bfs_ball(g: Graph, center: int, radius: int) -> frozenset:
    """All vertices at hop distance <= radius from center."""
    if not 0 <= center < g.n:
        raise ValueError(f"center {center} out of range for n={g.n}")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for w in g.adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return frozenset(seen)


def bfs_levels(g: Graph, root: int) -> list[list[int]]:
    """BFS levels from root (level 0 is [root]); covers only root's component."""
    seen = [False] * g.n
    seen[root] = True
    levels = [[root]]
    while True:
        nxt = []
        for u in levels[-1]:
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    nxt.append(w)
        if not nxt:
            return levels
        levels.append(sorted(nxt))


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Induced subgraph on s, relabeled to 0..|s|-1.

    Returns (subgraph, old_ids) where old_ids[i] is the original id of the
    subgraph's vertex i; old_ids is sorted ascending, so the relabeling is
    a bijection onto 0..|s|-1.
    """
    members = sorted(set(s))
    if not members:
        raise ValueError("cannot induce a subgraph on an empty vertex set")
    if members[0] < 0 or members[-1] >= g.n:
        raise ValueError("vertex set not within 0..n-1")
    index = {v: i for i, v in enumerate(members)}
    keep = set(members)
    edges = [(index[u], index[v]) for u, v in g.edges if u in keep and v in keep]
    return Graph(len(members), edges), tuple(members)


def components(g: Graph) -> list[frozenset]:
    """Connected components as vertex sets, ordered by smallest member."""
    seen = [False] * g.n
    out = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        out.append(frozenset(comp))
    return out


def read_graph(text: str) -> Graph:
    """Parse the edge-list format: header ``n m``, then m lines ``u v``.

    Requires 0 <= u < v < n on every edge line; rejects self-loops and
    duplicate edges.  Lines starting with '#' and blank lines are ignored.
    Errors carry the offending 1-based line number.
    """
    header_line = None
    n = m = 0
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header_line is None:
            if len(fields) != 2:
                raise GraphParseError("expected header 'n m'", line=lineno)
            try:
                n, m = int(fields[0]), int(fields[1])
            except ValueError:
                raise GraphParseError("non-integer header fields", line=lineno) from None
            if n < 0 or m < 0:
                raise GraphParseError("negative header values", line=lineno)
            header_line = lineno
            continue
        if len(fields) != 2:
            raise GraphParseError("expected edge line 'u v'", line=lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError("non-integer edge endpoints", line=lineno) from None
        if u == v:
            raise GraphParseError(f"self-loop {u} {v}", line=lineno)
        if not (0 <= u < v < n):
            raise GraphParseError(f"edge {u} {v} violates 0 <= u < v < n", line=lineno)
        if (u, v) in seen:
            raise GraphParseError(f"duplicate edge {u} {v}", line=lineno)
        seen.add((u, v))
        edges.append((u, v))
        if len(edges) > m:
            raise GraphParseError(f"more than the {m} promised edges", line=lineno)
    if header_line is None:
        raise GraphParseError("empty input: missing header", line=1)
    if len(edges) != m:
        raise GraphParseError(f"header promised {m} edges, found {len(edges)}", line=header_line)
    return Graph(n, edges)


def write_graph(g: Graph) -> str:
    """Canonical edge-list text: header, then edges sorted lexicographically, LF newlines."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"
