"""Balanced-separator algorithms.

The engine realizes the minor-or-separator dichotomy by region growing.
BFS balls are grown inside the unprocessed region; a ball whose next level
is at most a 1/l fraction of the ball is banked (the level goes to the
separator, the ball becomes a chunk on one side), while a ball that keeps
expanding by the (1 + 1/l) factor past a third of the graph is expander
material and triggers a clique-minor attempt instead.  Separator candidates
come from three sources, all certified by the same independent validator,
and the smallest order wins:

* the banked chunk assembly (the region-growing account above),
* BFS level cuts: a level with balanced in/out prefix sums, plus the
  globally thinnest levels with component repacking (which handles stars
  and other single-cut-vertex shapes),
* the trivial cut (V, S) with S one third of the vertices, which always
  certifies and caps the order at ceil(n/3).

Everything is deterministic: roots, tie-breaks, and the seeded clique
search derive from the inputs alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import CertificationError, InternalLimitError, RetryCapError, SizeLimitError, ValidationError
from .graphs import Graph, bfs_ball, bfs_levels, components, induced_subgraph
from .minors import BranchModel, contract_model, greedy_shallow_clique

ORACLE_LIMIT = 18
VERIFY_EXHAUSTIVE_LIMIT = 14


@dataclass(frozen=True)
class Separator:
    """Vertex separator as a covering pair; its order is |a & b|."""

    a: frozenset
    b: frozenset

    @property
    def order(self) -> int:
        return len(self.a & self.b)

    def to_json_dict(self, n: int) -> dict:
        cert = balance_certificate_sizes(self, n)
        return {
            "a": sorted(self.a),
            "b": sorted(self.b),
            "order": self.order,
            "balanced": cert.balanced,
        }


@dataclass(frozen=True)
class BalanceCertificate:
    size_a_minus_b: int
    size_b_minus_a: int
    n: int

    @property
    def balanced(self) -> bool:
        return 3 * self.size_a_minus_b <= 2 * self.n and 3 * self.size_b_minus_a <= 2 * self.n


@dataclass(frozen=True)
class DichotomyResult:
    """Exactly one arm: a certified balanced separator, or a clique branch model."""

    arm: str  # "separator" | "minor"
    separator: Separator | None
    certificate: BalanceCertificate | None
    minor_witness: BranchModel | None
    depth: int
    budget: float

    def __post_init__(self):
        if self.arm == "separator":
            if self.separator is None or self.minor_witness is not None:
                raise ValueError("separator arm must carry exactly the separator")
        elif self.arm == "minor":
            if self.minor_witness is None or self.separator is not None:
                raise ValueError("minor arm must carry exactly the witness")
        else:
            raise ValueError(f"unknown arm {self.arm!r}")


def balance_certificate_sizes(sep: Separator, n: int) -> BalanceCertificate:
    return BalanceCertificate(len(sep.a - sep.b), len(sep.b - sep.a), n)


def balance_certificate(g: Graph, sep: Separator) -> BalanceCertificate:
    return balance_certificate_sizes(sep, g.n)


def separator_violations(g: Graph, sep: Separator) -> list[str]:
    """Independent validity check: cover, range, and no crossing edge."""
    out: list[str] = []
    if any(v < 0 or v >= g.n for v in sep.a | sep.b):
        out.append("separator contains out-of-range vertices")
        return out
    if sep.a | sep.b != frozenset(range(g.n)):
        out.append("a | b does not cover the vertex set")
    aonly = sep.a - sep.b
    bonly = sep.b - sep.a
    for u, v in g.edges:
        if (u in aonly and v in bonly) or (v in aonly and u in bonly):
            out.append(f"edge ({u},{v}) joins a-only to b-only")
            break
    return out


def check_certified_balanced(g: Graph, sep: Separator) -> None:
    """Raise ValidationError unless sep is a valid balanced separator of g."""
    bad = separator_violations(g, sep)
    if bad:
        raise ValidationError(bad[0])
    if not balance_certificate(g, sep).balanced:
        raise ValidationError("separator is not balanced")


# ---------------------------------------------------------------------------
# candidate generation
# ---------------------------------------------------------------------------


def _pack_sides(items: list[frozenset], n: int, seeds=(frozenset(), frozenset())):
    """Descending greedy packing into two sides; None if either exceeds 2n/3."""
    bins = [set(seeds[0]), set(seeds[1])]
    for item in sorted(items, key=lambda s: (-len(s), min(s) if s else -1)):
        tgt = 0 if len(bins[0]) <= len(bins[1]) else 1
        bins[tgt] |= item
    if any(3 * len(b) > 2 * n for b in bins):
        return None
    return frozenset(bins[0]), frozenset(bins[1])


def _candidate_from_cut(g: Graph, cut: frozenset) -> Separator | None:
    """Separator with middle `cut`, sides = repacked components of g - cut."""
    rest = [v for v in range(g.n) if v not in cut]
    comps: list[frozenset] = []
    if rest:
        sub, ids = induced_subgraph(g, rest)
        comps = [frozenset(ids[i] for i in c) for c in components(sub)]
    packed = _pack_sides(comps, g.n)
    if packed is None:
        return None
    s1, s2 = packed
    return Separator(frozenset(s1 | cut), frozenset(s2 | cut))


def _chunk_pass(g: Graph, l: int):
    """Region growing: returns (chunks, fences, dense_region | None).

    Balls grow inside the unprocessed region from the smallest remaining
    vertex.  A ball is banked at the first level of size <= |ball|/l; its
    level is separator material and the ball becomes a chunk.  A ball that
    would pass n/3 vertices while still expanding faster than that is the
    dense signal, aborting the pass.
    """
    n = g.n
    remaining = set(range(n))
    chunks: list[frozenset] = []
    fences: list[frozenset] = []
    while remaining:
        root = min(remaining)
        ball = {root}
        while True:
            lvl = {w for u in ball for w in g.adj[u] if w in remaining and w not in ball}
            if len(lvl) * l <= len(ball):
                chunks.append(frozenset(ball))
                fences.append(frozenset(lvl))
                remaining -= ball
                remaining -= lvl
                break
            if 3 * (len(ball) + len(lvl)) > n:
                return chunks, fences, frozenset(ball | lvl)
            ball |= lvl
    return chunks, fences, None


def _chunks_candidate(g: Graph, chunks, fences) -> Separator | None:
    cut = frozenset().union(*fences) if fences else frozenset()
    items = [c for c in chunks]
    packed = _pack_sides(items, g.n)
    if packed is None:
        return None
    s1, s2 = packed
    return Separator(frozenset(s1 | cut), frozenset(s2 | cut))


def _level_candidates(g: Graph, roots, thin_levels: int = 12):
    """Level cuts from each root.

    Inside the balanced window, (ball(j-1), rest) are usable sides directly
    since consecutive-level edges never skip the cut.  The globally
    thinnest levels additionally get full component repacking, which is
    what rescues shapes like stars where no window level exists.
    """
    n = g.n
    out: list[Separator] = []
    seen_cuts: set[frozenset] = set()
    all_levels: list[frozenset] = []
    for root in roots:
        levels = [frozenset(lv) for lv in bfs_levels(g, root)]
        all_levels.extend(levels)
        prefix = [0]
        for lv in levels:
            prefix.append(prefix[-1] + len(lv))
        covered = prefix[-1]
        outside_extra = n - covered  # other components, all beyond the cut
        for j, lv in enumerate(levels):
            inside = prefix[j]
            outside = covered - prefix[j + 1] + outside_extra
            if 3 * inside <= 2 * n and 3 * outside <= 2 * n:
                inner = frozenset().union(*levels[:j]) if j else frozenset()
                rest = frozenset(range(n)) - inner - lv
                out.append(Separator(inner | lv, rest | lv))
    for lv in sorted(all_levels, key=lambda s: (len(s), sorted(s)))[:thin_levels]:
        if lv in seen_cuts:
            continue
        seen_cuts.add(lv)
        cand = _candidate_from_cut(g, lv)
        if cand is not None:
            out.append(cand)
    return out


def _trivial_candidate(g: Graph) -> Separator:
    """(V, S) with S the first ceil(n/3) vertices: always valid and balanced."""
    k = -(-g.n // 3)
    s = frozenset(range(k))
    return Separator(frozenset(range(g.n)), s)


def _candidate_roots(g: Graph) -> list[int]:
    roots: list[int] = []
    comps = sorted(components(g), key=lambda c: (-len(c), min(c)))
    for comp in comps[:2]:
        r0 = min(comp)
        roots.append(r0)
        levels = bfs_levels(g, r0)
        far = min(levels[-1])
        if far != r0:
            roots.append(far)
    return roots


def engine_separator_candidates(g: Graph, l: int):
    """All certified candidates plus the dense region (if the chunk pass hit one)."""
    chunks, fences, dense = _chunk_pass(g, l)
    candidates: list[Separator] = []
    if dense is None:
        cand = _chunks_candidate(g, chunks, fences)
        if cand is not None:
            candidates.append(cand)
    comps = components(g)
    if len(comps) > 1:
        packed = _pack_sides(comps, g.n)
        if packed is not None:
            candidates.append(Separator(packed[0], packed[1]))
    candidates.extend(_level_candidates(g, _candidate_roots(g)))
    candidates.append(_trivial_candidate(g))
    certified = []
    for cand in candidates:
        if separator_violations(g, cand):
            continue
        if not balance_certificate(g, cand).balanced:
            continue
        certified.append(cand)
    certified.sort(key=lambda s: (s.order, tuple(sorted(s.a & s.b))))
    return certified, dense


def engine_balanced_separator(g: Graph, l: int | None = None) -> Separator:
    """Best certified balanced separator the engine can produce (always exists)."""
    if g.n == 0:
        raise ValueError("empty graph")
    if g.n == 1:
        return Separator(frozenset({0}), frozenset({0}))
    if l is None:
        l = max(1, math.ceil(math.sqrt(g.n)))
    certified, _dense = engine_separator_candidates(g, l)
    return certified[0]


# ---------------------------------------------------------------------------
# the dichotomy
# ---------------------------------------------------------------------------


def prs_dichotomy(g: Graph, l: int, h: int, budget_const: float = 8.0, seed: int = 0) -> DichotomyResult:
    """Clique minor at depth l*ceil(log2 n), or a budgeted balanced separator.

    The separator budget is budget_const * (n/l + l*h^2*log2(n)) with the
    logarithm clamped below by 1.  A dense region found while chunking
    routes through the greedy clique search first; with no dense region the
    chunk assembly already fits inside the n/l part of the budget.  Both
    arms are certified before being returned; exhausting every route is an
    internal defect, not a result.
    """
    if g.n < 2:
        raise ValueError("dichotomy needs n >= 2")
    if l < 1:
        raise ValueError("l must be >= 1")
    if h < 2:
        raise ValueError("h must be >= 2")
    n = g.n
    clog = max(1.0, math.log2(n))
    depth = l * max(1, math.ceil(math.log2(n)))
    budget = budget_const * (n / l + l * h * h * clog)

    certified, dense = engine_separator_candidates(g, l)

    if dense is not None:
        model = greedy_shallow_clique(g, h, depth, seed=seed)
        if model is not None:
            result = contract_model(model)
            if result.minor.m == h * (h - 1) // 2:
                return DichotomyResult("minor", None, None, model, depth, budget)

    for cand in certified:
        if cand.order <= budget:
            return DichotomyResult(
                "separator", cand, balance_certificate(g, cand), None, depth, budget
            )
    raise InternalLimitError(
        f"no certified arm within budget {budget:.2f} (n={n}, l={l}, h={h}, "
        f"best separator order {certified[0].order if certified else 'none'})"
    )


def separator_from_expansion(
    g: Graph,
    k: float,
    d: float,
    c_out: float,
    budget_const: float = 8.0,
    retry_cap: int = 5,
    seed: int = 0,
) -> Separator:
    """Balanced separator of order <= c_out * n^(1-delta), delta = 1/(4d+3).

    Caller asserts the expansion of g is bounded by k*(r+1)**d (uncheckable
    in general; k only documents the promise).  Runs the dichotomy with the
    schedule l = ceil(n^delta), h = ceil(n^(1/4 - delta/2)); a minor arm
    means h was too small for the promise, so h doubles up to the retry
    cap, after which the found clique minor is reported as evidence.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if d < 0 or k <= 0 or c_out <= 0:
        raise ValueError("need k > 0, d >= 0, c_out > 0")
    if g.n == 1:
        return Separator(frozenset({0}), frozenset({0}))
    n = g.n
    delta = 1.0 / (4.0 * d + 3.0)
    # the 1e-9 nudge keeps exact powers (64^(1/3), ...) from ceiling upward
    l = max(1, math.ceil(n**delta - 1e-9))
    h = max(2, math.ceil(n ** (0.25 - delta / 2.0) - 1e-9))
    last_minor = None
    for attempt in range(retry_cap + 1):
        res = prs_dichotomy(g, l, h, budget_const=budget_const, seed=seed + attempt)
        if res.arm == "separator":
            sep = res.separator
            bound = c_out * n ** (1.0 - delta)
            if sep.order > bound:
                raise CertificationError(
                    f"separator order {sep.order} exceeds c_out * n^(1-delta) = {bound:.3f}"
                )
            return sep
        last_minor = res.minor_witness
        h *= 2
    raise RetryCapError(
        f"clique minors kept appearing up to h={h // 2}; the expansion promise looks violated",
        minor_witness=last_minor,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------


def optimal_balanced_separator(g: Graph) -> Separator:
    """Minimum-order balanced separator by exhaustive search (n <= 18 enforced).

    Candidate middles S are enumerated by increasing size; for each, the
    components of g - S are distributed over the two sides by a subset-sum
    dynamic program, and S is rejected when no distribution balances.
    """
    n = g.n
    if n > ORACLE_LIMIT:
        raise SizeLimitError(f"exhaustive separator search capped at n <= {ORACLE_LIMIT}")
    if n == 0:
        raise ValueError("empty graph")
    two_thirds = (2 * n) // 3  # side size cap: 3*size <= 2n
    verts = list(range(n))
    for size in range(n + 1):
        for s_tuple in combinations(verts, size):
            cut = frozenset(s_tuple)
            rest = [v for v in verts if v not in cut]
            comps: list[frozenset] = []
            if rest:
                sub, ids = induced_subgraph(g, rest)
                comps = [frozenset(ids[i] for i in c) for c in components(sub)]
            if any(3 * len(c) > 2 * n for c in comps):
                continue
            sizes = [len(c) for c in comps]
            total = sum(sizes)
            # subset-sum over component sizes
            reachable = 1
            for sz in sizes:
                reachable |= reachable << sz
            target = None
            for x in range(max(0, total - two_thirds), two_thirds + 1):
                if reachable >> x & 1:
                    target = x
                    break
            if target is None:
                continue
            side1: set[int] = set()
            # reconstruct one subset achieving the target sum
            remaining = list(range(len(sizes)))
            x = target
            while x > 0:
                for idx in remaining:
                    if sizes[idx] <= x:
                        rest_reach = 1
                        for j in remaining:
                            if j != idx:
                                rest_reach |= rest_reach << sizes[j]
                        if rest_reach >> (x - sizes[idx]) & 1:
                            side1 |= comps[idx]
                            x -= sizes[idx]
                            remaining.remove(idx)
                            break
                else:
                    raise InternalLimitError("subset-sum reconstruction failed")
            side2 = set().union(*(comps[i] for i in remaining)) if remaining else set()
            return Separator(frozenset(side1 | cut), frozenset(side2 | cut))
    raise InternalLimitError("exhaustive search exhausted all middles")  # unreachable: S = V works


# ---------------------------------------------------------------------------
# separator-profile verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CBViolation:
    subgraph_vertices: tuple[int, ...]
    optimal_order: int
    bound: float

    def to_json_dict(self) -> dict:
        return {
            "subgraph_vertices": list(self.subgraph_vertices),
            "optimal_order": self.optimal_order,
            "bound": self.bound,
        }


@dataclass(frozen=True)
class CBReport:
    c: float
    beta: float
    mode: str
    checked: int
    violations: tuple[CBViolation, ...]
    note: str

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "c": self.c,
            "beta": self.beta,
            "mode": self.mode,
            "checked": self.checked,
            "consistent": self.consistent,
            "violations": [v.to_json_dict() for v in self.violations],
            "note": self.note,
        }


def _connected_masks(g: Graph):
    n = g.n
    masks = g.adj_masks
    for mask in range(1, 1 << n):
        v = (mask & -mask).bit_length() - 1
        seen = 1 << v
        frontier = seen
        while frontier:
            nxt = 0
            mm = frontier
            while mm:
                b = mm & -mm
                nxt |= masks[b.bit_length() - 1]
                mm ^= b
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        if seen == mask:
            yield mask


def verify_cb_separators(g: Graph, c: float, beta: float, mode: str = "exhaustive", seed: int = 0, samples: int = 48) -> CBReport:
    """Check the separator profile: every subgraph H should have a balanced
    separator of order at most c * |V(H)|**beta.

    Exhaustive mode (n <= 14) runs the optimal oracle on every connected
    induced subgraph; an empty violation list is consistency, not proof of
    the profile for larger graphs.  Sampled mode checks all small BFS balls
    plus random connected induced subgraphs and is labeled as evidence only.
    """
    if not 0 <= beta < 1:
        raise ValueError("beta must lie in [0, 1)")
    if c <= 0:
        raise ValueError("c must be positive")
    violations: list[CBViolation] = []
    checked = 0

    def check(members: tuple[int, ...]):
        nonlocal checked
        sub, _ids = induced_subgraph(g, members)
        opt = optimal_balanced_separator(sub)
        checked += 1
        bound = c * len(members) ** beta
        if opt.order > bound + 1e-9:
            violations.append(CBViolation(members, opt.order, bound))

    if mode == "exhaustive":
        if g.n > VERIFY_EXHAUSTIVE_LIMIT:
            raise SizeLimitError(f"exhaustive verification capped at n <= {VERIFY_EXHAUSTIVE_LIMIT}")
        for mask in _connected_masks(g):
            members = tuple(v for v in range(g.n) if mask >> v & 1)
            check(members)
        note = "exhaustive over all connected induced subgraphs"
    elif mode == "sampled":
        import random as _random

        rng = _random.Random(seed)
        seen: set[tuple[int, ...]] = set()
        for v in range(g.n):
            for r in range(g.n):
                ball = bfs_ball(g, v, r)
                if len(ball) > ORACLE_LIMIT:
                    break
                members = tuple(sorted(ball))
                if members not in seen:
                    seen.add(members)
                    check(members)
                if len(ball) == g.n:
                    break
        for _ in range(samples):
            start = rng.randrange(g.n)
            target = rng.randint(1, min(g.n, ORACLE_LIMIT))
            grown = {start}
            frontier = set(g.adj[start])
            while len(grown) < target and frontier:
                v = rng.choice(sorted(frontier))
                grown.add(v)
                frontier.discard(v)
                frontier |= set(g.adj[v]) - grown
            members = tuple(sorted(grown))
            if members not in seen:
                seen.add(members)
                check(members)
        note = "sampled mode: consistency evidence only, not a certificate"
    else:
        raise ValueError("mode must be 'exhaustive' or 'sampled'")

    return CBReport(c, beta, mode, checked, tuple(violations), note)
