"""Experiment harness: configs, deterministic seed fan-out, CSV/JSONL records, SVG plots.

Every run is reproducible: one top-level seed fans out per (family, size,
repetition) through a stable hash, and records stream to disk as they are
produced, so a killed run leaves a valid CSV prefix.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, replace

from .bounds import BoundParams, FitResult, eval_b, eval_f, eval_p, fit_exponent
from .families import FamilySpec, generate_family
from .minors import NABLA_EXACT_PARTITION_LIMIT, NABLA_EXACT_SUBGRAPH_LIMIT, nabla_exact, nabla_greedy
from .separators import prs_dichotomy, separator_from_expansion

CSV_HEADER = "family,n,seed,metric,value,wall_ms"


@dataclass(frozen=True)
class ExperimentRecord:
    family: str
    n: int
    seed: int
    metric: str
    value: float
    wall_ms: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("record values must be finite")

    def csv_row(self) -> str:
        return f"{self.family},{self.n},{self.seed},{self.metric},{self.value:.12g},{self.wall_ms:.3f}"

    def to_json_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative experiment description; flag overrides replace fields."""

    experiment: str
    family: str = "grid"
    sizes: tuple[int, ...] = ()
    repetitions: int = 5
    seed: int = 0
    algorithm: str = "schedule"  # schedule | prs
    k: float = 1.0
    d: float = 0.0
    c_out: float = 8.0
    budget_const: float = 8.0
    l_exponent: float = 0.5  # prs algorithm: l = ceil(n ** l_exponent)
    h: int = 3
    delta: float | None = None  # family parameter (c-delta)
    r_schedule: tuple[int, ...] = ()
    cs: tuple[float, ...] = (1.0,)
    deltas: tuple[float, ...] = (1.0,)
    out_dir: str = "results"
    greedy_restarts: int = 40

    def __post_init__(self):
        if self.sizes and any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("size schedule must be strictly increasing")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @staticmethod
    def from_json_dict(data: dict) -> "ExperimentConfig":
        data = dict(data)
        for key in ("sizes", "r_schedule", "cs", "deltas"):
            if key in data:
                data[key] = tuple(data[key])
        return ExperimentConfig(**data)

    def to_json_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        for key in ("sizes", "r_schedule", "cs", "deltas"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return replace(self, **kwargs)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ExperimentConfig.from_json_dict(json.load(fh))


def fan_seed(top_seed: int, *parts) -> int:
    """Stable 63-bit sub-seed derived from the top seed and a label tuple."""
    text = f"{top_seed}|" + "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


class RecordWriter:
    """Streams records to CSV (and optionally JSONL), flushing per row."""

    def __init__(self, csv_path=None, jsonl_path=None):
        self.records: list[ExperimentRecord] = []
        self._csv = open(csv_path, "w", encoding="utf-8", newline="\n") if csv_path else None
        self._jsonl = open(jsonl_path, "w", encoding="utf-8", newline="\n") if jsonl_path else None
        if self._csv:
            self._csv.write(CSV_HEADER + "\n")
            self._csv.flush()

    def emit(self, record: ExperimentRecord):
        self.records.append(record)
        if self._csv:
            self._csv.write(record.csv_row() + "\n")
            self._csv.flush()
        if self._jsonl:
            self._jsonl.write(json.dumps(record.to_json_dict(), sort_keys=True) + "\n")
            self._jsonl.flush()

    def close(self):
        if self._csv:
            self._csv.close()
        if self._jsonl:
            self._jsonl.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def records_to_csv(records) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


def _family_spec(cfg: ExperimentConfig, n: int, rep: int) -> FamilySpec:
    seed = fan_seed(cfg.seed, cfg.family, n, rep)
    return FamilySpec(cfg.family, n, delta=cfg.delta, seed=seed % (2**31))


def run_separator_scaling(cfg: ExperimentConfig, writer: RecordWriter | None = None):
    """Separator order vs. instance size for one family.

    Records one separator_order row per (size, repetition); minor-arm
    outcomes are recorded as such and excluded from the fit.  Returns
    (records, fit | None, minor_arm_count).
    """
    records: list[ExperimentRecord] = []
    points: list[tuple[float, float]] = []
    minor_arms = 0

    def emit(rec):
        records.append(rec)
        if writer:
            writer.emit(rec)

    for n in cfg.sizes:
        for rep in range(cfg.repetitions):
            spec = _family_spec(cfg, n, rep)
            g = generate_family(spec)
            t0 = time.perf_counter()
            if cfg.algorithm == "schedule":
                sep = separator_from_expansion(
                    g, cfg.k, cfg.d, cfg.c_out, budget_const=cfg.budget_const, seed=spec.seed or 0
                )
                order = sep.order
            elif cfg.algorithm == "prs":
                l = max(1, math.ceil(g.n**cfg.l_exponent - 1e-9))
                res = prs_dichotomy(g, l, cfg.h, budget_const=cfg.budget_const, seed=spec.seed or 0)
                if res.arm == "minor":
                    minor_arms += 1
                    wall = (time.perf_counter() - t0) * 1000.0
                    emit(ExperimentRecord(cfg.family, g.n, rep, "minor_arm", 1.0, wall))
                    continue
                order = res.separator.order
            else:
                raise ValueError(f"unknown algorithm {cfg.algorithm!r}")
            wall = (time.perf_counter() - t0) * 1000.0
            emit(ExperimentRecord(cfg.family, g.n, rep, "separator_order", float(order), wall))
            if order >= 1:
                points.append((float(g.n), float(order)))

    fit = fit_exponent(points) if len(points) >= 3 and len({x for x, _ in points}) >= 2 else None
    return records, fit, minor_arms


def run_expansion_scaling(cfg: ExperimentConfig, writer: RecordWriter | None = None):
    """Greedy (and, where feasible, exact) depth-r density across the r schedule.

    Emits nabla_greedy per (r, repetition), nabla_exact when the oracle
    limits allow, oracle_skipped rows otherwise, and a knee_r row per
    repetition marking where the density leaves its floor.  Returns
    (records, fit | None) with the fit over the greedy values, r >= 1.
    """
    records: list[ExperimentRecord] = []
    points: list[tuple[float, float]] = []

    def emit(rec):
        records.append(rec)
        if writer:
            writer.emit(rec)

    if not cfg.sizes:
        raise ValueError("expansion scaling needs at least one size")
    for n in cfg.sizes:
        for rep in range(cfg.repetitions):
            spec = _family_spec(cfg, n, rep)
            g = generate_family(spec)
            greedy_by_r: dict[int, float] = {}
            for r in cfg.r_schedule:
                t0 = time.perf_counter()
                result = nabla_greedy(g, r, seed=spec.seed or 0, restarts=cfg.greedy_restarts)
                val = float(result.density)
                wall = (time.perf_counter() - t0) * 1000.0
                emit(ExperimentRecord(cfg.family, g.n, rep, f"nabla_greedy[r={r}]", val, wall))
                greedy_by_r[r] = val
                if r >= 1:
                    points.append((float(r), val))
                limit = NABLA_EXACT_SUBGRAPH_LIMIT if r == 0 else NABLA_EXACT_PARTITION_LIMIT
                if g.n <= limit:
                    t0 = time.perf_counter()
                    exact = nabla_exact(g, r)
                    wall = (time.perf_counter() - t0) * 1000.0
                    emit(ExperimentRecord(cfg.family, g.n, rep, f"nabla_exact[r={r}]", float(exact.density), wall))
                else:
                    emit(ExperimentRecord(cfg.family, g.n, rep, f"oracle_skipped[r={r}]", 1.0, 0.0))
            if greedy_by_r:
                vals = [greedy_by_r[r] for r in sorted(greedy_by_r)]
                lo, hi = min(vals), max(vals)
                knee = float(max(cfg.r_schedule))
                if hi > lo:
                    midpoint = lo + (hi - lo) / 2.0
                    for r in sorted(greedy_by_r):
                        if greedy_by_r[r] >= midpoint:
                            knee = float(r)
                            break
                emit(ExperimentRecord(cfg.family, g.n, rep, "knee_r", knee, 0.0))

    fit = None
    if len(points) >= 3 and len({x for x, _ in points}) >= 2 and all(y > 0 for _, y in points):
        fit = fit_exponent(points)
    return records, fit


def run_bound_table(cfg: ExperimentConfig, writer: RecordWriter | None = None):
    """Coefficient table over (c, delta) grids and the r schedule, plus slope fits.

    Rows carry log10 values (the nominal numbers overflow floats); per
    (c, delta) the slopes of b, p, f over r are fitted and emitted next to
    the reference exponents 4/delta and 5/delta^2.
    """
    records: list[ExperimentRecord] = []
    fits: dict[tuple[float, float], dict[str, FitResult]] = {}

    def emit(rec):
        records.append(rec)
        if writer:
            writer.emit(rec)

    r_schedule = cfg.r_schedule or (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
    for c in cfg.cs:
        for delta in cfg.deltas:
            fam = f"bounds[c={c:g},delta={delta:g}]"
            pts: dict[str, list[tuple[float, float]]] = {"b": [], "p": [], "f": []}
            for r in r_schedule:
                params = BoundParams(c=c, delta=delta, r=r)
                t0 = time.perf_counter()
                b, m, t = eval_b(params)
                p = eval_p(params)
                f = eval_f(params)
                wall = (time.perf_counter() - t0) * 1000.0
                eps = params.effective_epsilon
                emit(ExperimentRecord(fam, r, 0, "eps", float(eps), wall))
                emit(ExperimentRecord(fam, r, 0, "m", float(m), 0.0))
                emit(ExperimentRecord(fam, r, 0, "t_log10", math.log10(t), 0.0))
                emit(ExperimentRecord(fam, r, 0, "b_log10", b.log10, 0.0))
                emit(ExperimentRecord(fam, r, 0, "p_log10", p.log10, 0.0))
                emit(ExperimentRecord(fam, r, 0, "f_log10", f.log10, 0.0))
                pts["b"].append((float(r), b.log10))
                pts["p"].append((float(r), p.log10))
                pts["f"].append((float(r), f.log10))
            local: dict[str, FitResult] = {}
            for name in ("b", "p", "f"):
                xs = [x for x, _ in pts[name]]
                ys = [y for _, y in pts[name]]
                slope = _log10_slope(xs, ys)
                local[name] = slope
                emit(ExperimentRecord(fam, 0, 0, f"slope_{name}", slope.exponent, 0.0))
            emit(ExperimentRecord(fam, 0, 0, "ref_4_over_delta", 4.0 / delta, 0.0))
            emit(ExperimentRecord(fam, 0, 0, "ref_5_over_delta_sq", 5.0 / delta**2, 0.0))
            fits[(c, delta)] = local
    return records, fits


def _log10_slope(rs, log10_values) -> FitResult:
    """Least squares of log10(value) against log10(r): values arrive already logged."""
    lx = [math.log10(r) for r in rs]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(log10_values) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    if sxx == 0:
        raise ValueError("degenerate slope fit")
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, log10_values))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(lx, log10_values))
    ss_tot = sum((y - my) ** 2 for y in log10_values)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(slope, 10.0**intercept, r2, tuple(zip(rs, log10_values)))


# ---------------------------------------------------------------------------
# SVG output
# ---------------------------------------------------------------------------


def write_svg_scatter(path: str, points, fit: FitResult | None, title: str, xlabel: str = "n", ylabel: str = "order"):
    """Minimal deterministic log-log scatter with the fitted line."""
    width, height = 640, 480
    ml, mr, mt, mb = 70, 20, 40, 50
    pts = [(math.log10(x), math.log10(y)) for x, y in points if x > 0 and y > 0]
    if not pts:
        pts = [(0.0, 0.0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">log10 {xlabel}</text>',
        f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 18 {height / 2:.1f})">log10 {ylabel}</text>',
    ]
    for x, y in pts:
        parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="steelblue"/>')
    if fit is not None:
        lx0, lx1 = x0, x1
        ly0 = fit.exponent * lx0 + math.log10(fit.constant)
        ly1 = fit.exponent * lx1 + math.log10(fit.constant)
        parts.append(
            f'<line x1="{px(lx0):.2f}" y1="{py(ly0):.2f}" x2="{px(lx1):.2f}" y2="{py(ly1):.2f}" '
            f'stroke="firebrick" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - mr - 4}" y="{mt + 14}" text-anchor="end" font-size="12">'
            f"slope={fit.exponent:.3f} r2={fit.r_squared:.3f}</text>"
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
