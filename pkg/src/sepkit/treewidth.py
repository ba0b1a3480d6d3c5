"""Tree decompositions: validation, exact width, separator conversions.

The exact solver is the subset dynamic program over elimination prefixes
(feasible to n = 14); the constructive direction turns any balanced
separator provider into a decomposition of width O(separator order * log n),
and the extractive direction walks a decomposition to a balanced separator
of order at most width + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalLimitError, SizeLimitError, ValidationError
from .graphs import Graph, components, induced_subgraph

EXACT_TW_LIMIT = 14


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def to_json_dict(self) -> dict:
        return {
            "bags": [sorted(b) for b in self.bags],
            "tree": [list(e) for e in self.tree_edges],
            "width": self.width,
        }


def validate_decomposition(g: Graph, td: TreeDecomposition) -> list[str]:
    """All violations of the three decomposition invariants (empty list = ok).

    Violations name the failing vertex or edge; the tree shape itself
    (connected, |edges| = |bags| - 1, indices in range) is checked first.
    """
    out: list[str] = []
    nb = len(td.bags)
    if nb == 0:
        return ["decomposition has no bags"]
    for i, j in td.tree_edges:
        if not (0 <= i < nb and 0 <= j < nb) or i == j:
            return [f"tree edge ({i},{j}) out of range"]
    if len(td.tree_edges) != nb - 1:
        out.append(f"tree has {len(td.tree_edges)} edges for {nb} bags")
    # connectivity of the bag tree
    adj: list[list[int]] = [[] for _ in range(nb)]
    for i, j in td.tree_edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != nb:
        out.append("bag tree is disconnected")
    if out:
        return out

    where: list[list[int]] = [[] for _ in range(g.n)]
    for idx, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                return [f"bag {idx} contains out-of-range vertex {v}"]
            where[v].append(idx)
    for v in range(g.n):
        if not where[v]:
            out.append(f"vertex {v} appears in no bag")
    for u, v in sorted(g.edges):
        if not any(u in td.bags[i] and v in td.bags[i] for i in range(nb)):
            out.append(f"edge ({u},{v}) is contained in no bag")
    for v in range(g.n):
        bags_v = set(where[v])
        if not bags_v:
            continue
        start = min(bags_v)
        seen_v = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in bags_v and w not in seen_v:
                    seen_v.add(w)
                    stack.append(w)
        if seen_v != bags_v:
            out.append(f"bags containing vertex {v} do not induce a subtree")
    return out


# ---------------------------------------------------------------------------
# exact treewidth
# ---------------------------------------------------------------------------


def _q_mask(masks, W: int, v: int) -> int:
    """Vertices outside W reachable from v through W (v's clique at elimination time)."""
    comp = masks[v] & W
    seen = comp | (1 << v)
    out = masks[v] & ~W
    while comp:
        nxt = 0
        mm = comp
        while mm:
            b = mm & -mm
            nxt |= masks[b.bit_length() - 1]
            mm ^= b
        nxt &= ~seen
        seen |= nxt
        out |= nxt & ~W
        comp = nxt & W
    return out & ~(1 << v)


def exact_treewidth(g: Graph) -> tuple[int, TreeDecomposition]:
    """Exact treewidth with a witnessing decomposition (n <= 14 enforced).

    Dynamic program over elimination prefixes: dp[S] is the best width
    eliminating S first, with the clique size of v over prefix W computed as
    the through-W reachability neighborhood.  The decomposition is rebuilt
    from the optimal ordering by simulated elimination with fill-in.
    """
    n = g.n
    if n > EXACT_TW_LIMIT:
        raise SizeLimitError(f"exact treewidth capped at n <= {EXACT_TW_LIMIT}")
    if n == 0:
        return -1, TreeDecomposition((frozenset(),), ())
    masks = g.adj_masks
    full = (1 << n) - 1
    dp = [0] * (full + 1)
    choice = [0] * (full + 1)
    for S in range(1, full + 1):
        best = n + 1
        bestv = -1
        mm = S
        while mm:
            b = mm & -mm
            v = b.bit_length() - 1
            mm ^= b
            W = S ^ b
            q = _q_mask(masks, W, v).bit_count()
            w = dp[W] if dp[W] > q else q
            if w < best:
                best = w
                bestv = v
        dp[S] = best
        choice[S] = bestv

    order: list[int] = []
    S = full
    while S:
        v = choice[S]
        order.append(v)
        S ^= 1 << v
    order.reverse()

    # rebuild bags by simulated elimination with fill-in
    alive = set(range(n))
    nbr: list[set[int]] = [set(a) for a in g.adj]
    pos = {v: i for i, v in enumerate(order)}
    bags: list[frozenset] = []
    later: list[set[int]] = []
    for v in order:
        cur = {u for u in nbr[v] if u in alive and u != v}
        bags.append(frozenset(cur | {v}))
        later.append(cur)
        lst = sorted(cur)
        for i in range(len(lst)):
            for j in range(i + 1, len(lst)):
                nbr[lst[i]].add(lst[j])
                nbr[lst[j]].add(lst[i])
        alive.discard(v)

    edges: list[tuple[int, int]] = []
    parentless: list[int] = []
    for i, cur in enumerate(later):
        if cur:
            edges.append((i, min(pos[u] for u in cur)))
        else:
            parentless.append(i)
    for a, b in zip(parentless, parentless[1:]):
        edges.append((a, b))

    td = TreeDecomposition(tuple(bags), tuple(edges))
    if td.width != dp[full]:
        raise InternalLimitError(f"decomposition width {td.width} disagrees with dp value {dp[full]}")
    return dp[full], td


# ---------------------------------------------------------------------------
# separators -> decomposition
# ---------------------------------------------------------------------------


def decomposition_from_separators(g: Graph, separator_provider, k_hint: float = 1.0) -> TreeDecomposition:
    """Recursive decomposition from any certified balanced-separator provider.

    Each node's bag is its inherited boundary plus the separator of its
    part; sides recurse with the boundary restricted to their neighborhoods.
    Balancedness shrinks parts by 2/3 per level, so the achieved width is
    on the order of (separator order) * log n.  k_hint is only a reference
    scale echoed by callers; it does not steer the construction.
    """
    del k_hint  # reference value for reporting; the recursion never needs it
    from .separators import separator_violations  # local import to avoid a cycle

    bags: list[frozenset] = []
    edges: list[tuple[int, int]] = []

    def add_bag(s: frozenset) -> int:
        bags.append(s)
        return len(bags) - 1

    def build(members: tuple[int, ...], boundary: frozenset, level: int) -> int:
        if level > g.n + 2:
            raise InternalLimitError("separator recursion failed to shrink its parts")
        if len(members) <= 2:
            return add_bag(boundary | set(members))
        sub, ids = induced_subgraph(g, members)
        sep = separator_provider(sub)
        bad = separator_violations(sub, sep)
        if bad:
            raise ValidationError(f"separator provider returned an invalid separator: {bad[0]}")
        mid = frozenset(ids[i] for i in (sep.a & sep.b))
        sab = 3 * len(sep.a - sep.b) <= 2 * sub.n
        sba = 3 * len(sep.b - sep.a) <= 2 * sub.n
        if not (sab and sba):
            raise ValidationError("separator provider returned an unbalanced separator")
        root = add_bag(boundary | mid)
        for side in (sep.a - sep.b, sep.b - sep.a):
            if not side:
                continue
            part = sorted(ids[i] for i in side)
            part_set = set(part)
            nb = {w for v in part for w in g.adj[v] if w not in part_set}
            child_boundary = frozenset((boundary | mid) & nb)
            child = build(tuple(part), child_boundary, level + 1)
            edges.append((root, child))
        return root

    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    build(tuple(range(g.n)), frozenset(), 0)
    return TreeDecomposition(tuple(bags), tuple(edges))


# ---------------------------------------------------------------------------
# decomposition -> separator
# ---------------------------------------------------------------------------


def _pack_descending(items: list[frozenset], n: int):
    """Greedy two-bin packing, largest first into the lighter bin.

    Succeeds whenever every item is <= 2n/3 (and the total is <= n), which
    is exactly the situation both callers are in.  Returns (side1, side2)
    or None when a bin would exceed 2n/3.
    """
    bins: list[set[int]] = [set(), set()]
    for item in sorted(items, key=lambda s: (-len(s), min(s) if s else -1)):
        tgt = 0 if len(bins[0]) <= len(bins[1]) else 1
        bins[tgt] |= item
    if any(3 * len(b) > 2 * n for b in bins):
        return None
    return frozenset(bins[0]), frozenset(bins[1])


def separator_from_decomposition(g: Graph, td: TreeDecomposition):
    """Balanced separator of order <= width + 1 by the centroid-bag walk.

    Walks the decomposition tree toward the heaviest component left by the
    current bag until the components pack into balanced sides; a full scan
    over bags backs the walk up if it ever revisits a node.
    """
    from .separators import Separator, separator_violations

    bad = validate_decomposition(g, td)
    if bad:
        raise ValidationError(f"invalid decomposition: {bad[0]}")
    n = g.n
    tree: list[list[int]] = [[] for _ in range(len(td.bags))]
    for i, j in td.tree_edges:
        tree[i].append(j)
        tree[j].append(i)

    def try_bag(idx: int):
        bag = td.bags[idx]
        rest = [v for v in range(n) if v not in bag]
        comps: list[frozenset] = []
        if rest:
            sub, ids = induced_subgraph(g, rest)
            comps = [frozenset(ids[i] for i in comp) for comp in components(sub)]
        packed = _pack_descending(comps, n)
        if packed is None:
            return None, comps
        side1, side2 = packed
        return Separator(frozenset(side1 | bag), frozenset(side2 | bag)), comps

    def heaviest_branch(idx: int, comps) -> int:
        big = max(comps, key=len)
        target = min(big)
        # the bags holding the heavy component lie in exactly one branch
        for nbr in sorted(tree[idx]):
            stack = [nbr]
            seen = {idx, nbr}
            while stack:
                u = stack.pop()
                if target in td.bags[u]:
                    return nbr
                for w in tree[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return sorted(tree[idx])[0] if tree[idx] else idx

    cur = 0
    visited = set()
    while cur not in visited:
        visited.add(cur)
        sep, comps = try_bag(cur)
        if sep is not None:
            break
        cur = heaviest_branch(cur, comps)
    else:
        # walk cycled; fall back to the bag minimizing the largest component
        best_idx = min(
            range(len(td.bags)),
            key=lambda i: (max((len(c) for c in try_bag(i)[1]), default=0), i),
        )
        sep, _ = try_bag(best_idx)
        if sep is None:
            raise InternalLimitError("no bag of a valid decomposition yields a balanced separator")

    bad = separator_violations(g, sep)
    if bad:
        raise InternalLimitError(f"centroid-bag separator failed validation: {bad[0]}")
    return sep


def expander_tw_lower_bound(alpha: float, n: int) -> float:
    """Treewidth lower bound alpha/(3*(1+alpha)) * n - 1 for an alpha-expander on n vertices."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    return alpha / (3.0 * (1.0 + alpha)) * n - 1.0
