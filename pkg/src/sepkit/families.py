"""Instance generators and expansion certificates.

Benchmark families (paths, cycles, grids, trees, cliques), random cubic
graphs built from three rejected-until-simple perfect matchings, and the
subdivided-cubic family whose separators scale like n^(1-delta).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import GenerationRetryError, SizeLimitError
from .graphs import Graph, bfs_ball, components

EXACT_EXPANSION_LIMIT = 22

# Smallest size at which the random-cubic sweep is expected to certify a
# 1/7-expander; a configuration default, re-examined empirically by the
# sweep script rather than derived.
DEFAULT_EXPANDER_N0 = 14


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(side: int) -> Graph:
    """side x side grid; vertex (r, c) is r*side + c."""
    if side < 1:
        raise ValueError("grid needs side >= 1")
    edges = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            if c + 1 < side:
                edges.append((v, v + 1))
            if r + 1 < side:
                edges.append((v, v + side))
    return Graph(side * side, edges)


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_graph(leaves: int) -> Graph:
    """Center 0 joined to `leaves` leaves."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_tree(n: int, seed: int) -> Graph:
    """Uniform labeled tree from a random Pruefer sequence."""
    if n < 1:
        raise ValueError("tree needs n >= 1")
    if n == 1:
        return Graph(1)
    if n == 2:
        return Graph(2, [(0, 1)])
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    leaves = sorted(v for v in range(n) if degree[v] == 1)
    import heapq

    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return Graph(n, edges)


def random_cubic(n: int, seed: int, max_retries: int = 1000) -> Graph:
    """3-regular simple connected graph: union of three random perfect matchings.

    Resamples until the union is simple and connected; with a bounded retry
    cap that is practically unreachable for any seed.
    """
    if n < 4 or n % 2:
        raise ValueError("cubic graphs need even n >= 4")
    rng = random.Random(seed)
    verts = list(range(n))
    for _ in range(max_retries):
        edge_set: set[tuple[int, int]] = set()
        ok = True
        for _ in range(3):
            rng.shuffle(verts)
            for i in range(0, n, 2):
                u, v = verts[i], verts[i + 1]
                e = (u, v) if u < v else (v, u)
                if e in edge_set:
                    ok = False
                    break
                edge_set.add(e)
            if not ok:
                break
        if not ok:
            continue
        g = Graph(n, edge_set)
        if len(components(g)) == 1:
            return g
    raise GenerationRetryError(f"no simple connected cubic graph after {max_retries} retries (n={n}, seed={seed})")


def subdivide_every_edge(g: Graph, times: int) -> Graph:
    """Replace each edge by a path with `times` internal vertices.

    Original vertices keep their ids; subdivision vertices are appended in
    the lexicographic order of the edges they split.
    """
    if times < 0:
        raise ValueError("subdivision count must be nonnegative")
    edges = []
    nxt = g.n
    for u, v in sorted(g.edges):
        prev = u
        for _ in range(times):
            edges.append((min(prev, nxt), max(prev, nxt)))
            prev = nxt
            nxt += 1
        edges.append((min(prev, v), max(prev, v)))
    return Graph(nxt, edges)


def c_delta_graph(n: int, delta: float, seed: int, certify_base: bool = True) -> Graph:
    """Cubic graph on n vertices with every edge subdivided floor(n^(delta/(1-delta))) times.

    The base is resampled (deterministically from seed) until it certifies
    as a 1/7-expander whenever the exact scan is feasible: subdividing a
    poorly connected base inherits its tiny separators and the family loses
    the n^(1-delta) separator scaling it exists to exhibit.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1) for the subdivided family")
    base = None
    if certify_base and n <= EXACT_EXPANSION_LIMIT:
        for attempt in range(256):
            cand = random_cubic(n, seed + 1000003 * attempt)
            if certify_expansion_at_least(cand, 1, 7):
                base = cand
                break
        if base is None:
            raise GenerationRetryError(f"no certified cubic expander base after 256 attempts (n={n}, seed={seed})")
    else:
        base = random_cubic(n, seed)
    # float-noise nudge so exact powers (10^1, 9^0.5, ...) floor correctly
    times = int(n ** (delta / (1.0 - delta)) + 1e-9)
    return subdivide_every_edge(base, times)


@dataclass(frozen=True)
class FamilySpec:
    """Parsed family selector, e.g. ``c-delta:n=10,delta=0.5,seed=1``."""

    family: str
    n: int
    delta: float | None = None
    seed: int | None = None

    def label(self) -> str:
        parts = [f"n={self.n}"]
        if self.delta is not None:
            parts.append(f"delta={self.delta:g}")
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        return f"{self.family}:{','.join(parts)}"


FAMILIES = ("path", "cycle", "grid", "tree", "clique", "cubic-random", "c-delta")


def parse_family_spec(text: str) -> FamilySpec:
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    kwargs: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"malformed family parameter {item!r}")
            kwargs[key.strip()] = value.strip()
    if "n" not in kwargs:
        raise ValueError("family spec needs n=<size>")
    n = int(kwargs.pop("n"))
    delta = float(kwargs.pop("delta")) if "delta" in kwargs else None
    seed = int(kwargs.pop("seed")) if "seed" in kwargs else None
    if kwargs:
        raise ValueError(f"unknown family parameters: {sorted(kwargs)}")
    return FamilySpec(name, n, delta, seed)


def generate_family(spec: FamilySpec) -> Graph:
    """Deterministic instance for a family spec (same spec + seed -> same graph)."""
    fam, n = spec.family, spec.n
    if n < 1:
        raise ValueError("family size must be positive")
    if fam == "path":
        return path_graph(n)
    if fam == "cycle":
        return cycle_graph(n)
    if fam == "grid":
        return grid_graph(n)
    if fam == "clique":
        return complete_graph(n)
    if fam == "tree":
        return random_tree(n, spec.seed or 0)
    if fam == "cubic-random":
        return random_cubic(n, spec.seed or 0)
    if fam == "c-delta":
        if spec.delta is None:
            raise ValueError("c-delta family needs delta")
        return c_delta_graph(n, spec.delta, spec.seed or 0)
    raise ValueError(f"unknown family {fam!r}")


@dataclass(frozen=True)
class ExpansionCertificate:
    """Result of an expansion scan.

    Exact mode enumerates every nonempty A with |A| <= n/2, so alpha is the
    true vertex expansion and violating_set attains it.  Sampled mode only
    reports the best candidate found: an upper-bound estimate, never a
    certificate.
    """

    alpha: float
    alpha_num: int
    alpha_den: int
    mode: str
    violating_set: frozenset
    n: int

    @property
    def is_certificate(self) -> bool:
        return self.mode == "exact"

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "alpha_ratio": [self.alpha_num, self.alpha_den],
            "mode": self.mode,
            "violating_set": sorted(self.violating_set),
            "n": self.n,
            "note": "exact enumeration certificate" if self.mode == "exact" else "estimate, not certificate",
        }


def _boundary_size(g: Graph, a: set[int]) -> int:
    out = set()
    for v in a:
        out.update(g.adj[v])
    return len(out - a)


def _exact_scan(g: Graph, abort_num: int | None = None, abort_den: int = 1):
    """Gray-code walk over all subsets, tracking |N(A)\\A| incrementally.

    Returns (num, den, argmin_mask), or None early if some subset has
    ratio < abort_num/abort_den (used for fast non-certification).
    """
    n = g.n
    adj = g.adj
    in_a = [False] * n
    cnt = [0] * n
    size = 0
    boundary = 0
    cur = 0
    half = n // 2
    best_num = best_den = None
    best_mask = 0
    for i in range(1, 1 << n):
        v = (i & -i).bit_length() - 1
        bit = 1 << v
        if in_a[v]:
            in_a[v] = False
            cur ^= bit
            size -= 1
            if cnt[v] > 0:
                boundary += 1
            for u in adj[v]:
                cnt[u] -= 1
                if cnt[u] == 0 and not in_a[u]:
                    boundary -= 1
        else:
            in_a[v] = True
            cur ^= bit
            size += 1
            if cnt[v] > 0:
                boundary -= 1
            for u in adj[v]:
                if cnt[u] == 0 and not in_a[u]:
                    boundary += 1
                cnt[u] += 1
        if 1 <= size <= half:
            if abort_num is not None and boundary * abort_den < abort_num * size:
                return None
            if best_num is None or boundary * best_den < best_num * size:
                best_num, best_den, best_mask = boundary, size, cur
    return best_num, best_den, best_mask


def certify_expansion_at_least(g: Graph, num: int, den: int) -> bool:
    """Exact decision: does every A with |A| <= n/2 satisfy |N(A)\\A| >= (num/den)|A|?

    Same enumeration as exact `expansion_of`, but aborts at the first
    violating subset, which makes non-expanders cheap to reject.
    """
    if g.n > EXACT_EXPANSION_LIMIT:
        raise SizeLimitError(f"exact expansion scan capped at n <= {EXACT_EXPANSION_LIMIT}")
    if g.n < 2:
        raise ValueError("expansion needs n >= 2")
    return _exact_scan(g, abort_num=num, abort_den=den) is not None


def expansion_of(g: Graph, mode: str = "exact", seed: int = 0, samples: int = 200) -> ExpansionCertificate:
    """Vertex expansion: min over nonempty A, |A| <= n/2, of |N(A)\\A| / |A|.

    Exact mode enumerates all subsets (n <= 22 enforced).  Sampled mode
    takes the minimum over random subsets, all small BFS balls, and greedy
    single-vertex descents; the result is an estimate only.
    """
    if g.n < 2:
        raise ValueError("expansion needs n >= 2")
    if mode == "exact":
        if g.n > EXACT_EXPANSION_LIMIT:
            raise SizeLimitError(f"exact expansion scan capped at n <= {EXACT_EXPANSION_LIMIT}")
        num, den, mask = _exact_scan(g)
        witness = frozenset(v for v in range(g.n) if mask >> v & 1)
        return ExpansionCertificate(num / den, num, den, "exact", witness, g.n)
    if mode != "sampled":
        raise ValueError("mode must be 'exact' or 'sampled'")

    rng = random.Random(seed)
    half = g.n // 2
    best: tuple[int, int, frozenset] | None = None

    def consider(a: set[int]):
        nonlocal best
        if not 1 <= len(a) <= half:
            return
        b = _boundary_size(g, a)
        if best is None or b * best[1] < best[0] * len(a):
            best = (b, len(a), frozenset(a))

    for v in range(g.n):
        for r in range(g.n):
            ball = bfs_ball(g, v, r)
            if len(ball) > half:
                break
            consider(set(ball))
    for _ in range(samples):
        k = rng.randint(1, half)
        consider(set(rng.sample(range(g.n), k)))
    # greedy descent from the best candidate: single vertex moves
    assert best is not None
    a = set(best[2])
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            trial = set(a)
            if v in trial:
                trial.discard(v)
            else:
                trial.add(v)
            if not 1 <= len(trial) <= half:
                continue
            b = _boundary_size(g, trial)
            if b * best[1] < best[0] * len(trial):
                best = (b, len(trial), frozenset(trial))
                a = trial
                improved = True
    num, den, witness = best
    return ExpansionCertificate(num / den, num, den, "sampled", witness, g.n)
