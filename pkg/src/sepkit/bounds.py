"""Closed-form growth bounds and their numeric evaluation.

Scalar machinery used across the experiments:

* ``solve_a``      -- fixed point of  a**delta = 4*c*ln(e*a)**2,  a >= 1
* ``eval_b``       -- depth coefficient  2 * 32**m * t**4  with
                      m = ceil(1/(2*eps**2)) and t the smallest even
                      integer above max(n0, (42000*c*4**m*r)**(1/delta))
* ``eval_p``       -- separator coefficient  316*c*(b*r)**(1-delta)
* ``eval_f``       -- density ceiling  a_{5*delta/6}(p)
* ``fit_exponent`` -- least-squares slope of log y against log x

The b/p/f values overflow IEEE doubles for realistic parameters, so every
result carries its log10 alongside the nominal float, and the fixed-point
solver runs in log space (mpmath) whenever the coefficient magnitude calls
for it.  Logarithms inside the fixed point are natural: the expression
ln(e*a) = 1 + ln(a) only simplifies that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from .families import DEFAULT_EXPANDER_N0

_MAX_LOG10_FLOAT = math.log10(float("1e308"))


@dataclass(frozen=True)
class BoundParams:
    """Parameter bundle for the bound functions.

    epsilon=None means "derive it": min(1, delta/(6*(1-delta))), the value
    the separator coefficient pins.  n0 is the configured smallest certified
    expander size.
    """

    c: float = 1.0
    delta: float = 1.0
    epsilon: float | None = None
    r: int = 1
    n0: int = DEFAULT_EXPANDER_N0

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be >= 1")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.epsilon is not None and not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")

    @property
    def effective_epsilon(self) -> Fraction:
        """min(1, delta/(6*(1-delta))) as an exact fraction of the binary delta."""
        if self.epsilon is not None:
            return Fraction(self.epsilon)
        d = Fraction(self.delta)
        if d == 1:
            return Fraction(1)
        return min(Fraction(1), d / (6 * (1 - d)))


@dataclass(frozen=True)
class BoundValue:
    """A possibly astronomically large positive quantity.

    ``value`` is the nominal float (inf once it exceeds float range, with
    ``overflow`` set); ``log10`` is always finite and is what the slope
    fits consume.  ``exact`` carries the integer value when one exists.
    """

    log10: float
    value: float
    exact: int | None = None
    mode: str = "nominal"

    @property
    def overflow(self) -> bool:
        return not math.isfinite(self.value)

    def to_json_dict(self) -> dict:
        return {
            "log10": self.log10,
            "value": None if self.overflow else self.value,
            "overflow": self.overflow,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of log y = exponent * log x + log constant."""

    exponent: float
    constant: float
    r_squared: float
    points: tuple[tuple[float, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "constant": self.constant,
            "r_squared": self.r_squared,
            "points": [list(p) for p in self.points],
        }


def _solve_y(delta: float, ln4c):
    """Root of  delta*y = ln(4c) + 2*ln(1+y)  in y = ln(a), y >= 0.

    g(y) = delta*y - ln4c - 2*ln(1+y) starts negative at y=0 (c >= 1),
    decreases to a single minimum, then increases without bound, so the
    positive crossing is unique; bisection from a doubling bracket finds it.
    """

    def g(y):
        return delta * y - ln4c - 2 * mpmath.log(1 + y)

    lo = mpmath.mpf(0)
    hi = mpmath.mpf(max(8.0, 4.0 / delta))
    guard = 0
    while g(hi) <= 0:
        hi *= 2
        guard += 1
        if guard > 200:
            raise ValueError("fixed-point bracket search overflowed; inputs out of range")
    for _ in range(300):
        mid = (lo + hi) / 2
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < mpmath.mpf("1e-40") * (1 + hi):
            break
    return (lo + hi) / 2


def solve_a(delta: float, c: float, tol: float = 1e-9, max_iter: int = 500) -> float:
    """Smallest a >= 1 with |a**delta - 4*c*ln(e*a)**2| <= tol.

    The residual is negative at a=1 for c >= 1 and positive for large a,
    so a bracket always exists; bisection (run at high precision so the
    absolute tolerance is meaningful even when a**delta is ~1e6) converges
    to the crossing.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if c < 1:
        raise ValueError("c must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    with mpmath.workdps(60):
        resid = lambda y: mpmath.e ** (delta * y) - 4 * c * (1 + y) ** 2
        lo = mpmath.mpf(0)  # a = 1: residual 1 - 4c < 0
        hi = mpmath.mpf(max(8.0, 4.0 / delta))
        guard = 0
        while resid(hi) <= 0:
            hi *= 2
            guard += 1
            if guard > 200:
                raise ValueError("bracket search overflowed; inputs out of range")
        y = None
        for _ in range(max_iter):
            mid = (lo + hi) / 2
            r = resid(mid)
            if abs(r) <= tol / 4:
                y = mid
                break
            if r < 0:
                lo = mid
            else:
                hi = mid
        if y is None:
            y = (lo + hi) / 2
        a = float(mpmath.e ** y)
    return a


def eval_b(params: BoundParams) -> tuple[BoundValue, int, int]:
    """Depth coefficient 2*32**m*t**4; returns (b, m, t).

    m and t are computed in exact integer/rational arithmetic whenever
    1/delta is an integer (it is for every delta used in the experiment
    grids); otherwise t falls back to high-precision rounding.  b itself is
    always an exact integer (Python bigint), with float/log10 views.
    """
    eps = params.effective_epsilon
    m = -((-1) * eps.denominator**2 // (2 * eps.numerator**2))  # ceil(1/(2 eps^2)) exactly
    base = Fraction(42000) * Fraction(params.c) * Fraction(4) ** m * params.r
    inv_delta = 1 / Fraction(params.delta)
    if inv_delta.denominator == 1:
        x = base ** int(inv_delta)
        t0 = x.numerator // x.denominator + 1  # smallest integer strictly above x
    else:
        ln_x = (mpmath.log(mpmath.mpf(base.numerator)) - mpmath.log(mpmath.mpf(base.denominator))) / params.delta
        digits = int(ln_x / mpmath.log(10)) + 1
        with mpmath.workdps(max(30, digits + 20)):
            x_mp = mpmath.e ** (mpmath.mpf(ln_x))
            t0 = int(mpmath.floor(x_mp)) + 1
    t0 = max(t0, params.n0 + 1)
    t = t0 if t0 % 2 == 0 else t0 + 1
    b_exact = 2 * 32**m * t**4
    log10 = math.log10(b_exact)
    value = float(b_exact) if log10 < _MAX_LOG10_FLOAT else math.inf
    mode = "nominal" if math.isfinite(value) else "log-space"
    return BoundValue(log10, value, exact=b_exact, mode=mode), m, t


def eval_p(params: BoundParams) -> BoundValue:
    """Separator coefficient 316*c*(b*r)**(1-delta); epsilon is pinned to its derived value."""
    b, _m, _t = eval_b(replace(params, epsilon=None))
    log10 = math.log10(316.0 * params.c) + (1.0 - params.delta) * (b.log10 + math.log10(params.r))
    value = 10.0**log10 if log10 < _MAX_LOG10_FLOAT else math.inf
    mode = "nominal" if math.isfinite(value) else "log-space"
    return BoundValue(log10, value, mode=mode)


def eval_f(params: BoundParams, tol: float = 1e-9) -> BoundValue:
    """Density ceiling: the fixed point solve_a(5*delta/6, p).

    For moderate p this is the plain solver.  Once p leaves float range the
    same fixed point is solved in log space (the solver works on y = ln a,
    so only exponents grow); the result is flagged mode="log-space".
    """
    p = eval_p(params)
    d2 = 5.0 * params.delta / 6.0
    if not p.overflow and p.value < 1e12:
        a = solve_a(d2, max(1.0, p.value), tol=tol)
        return BoundValue(math.log10(a), a, mode="nominal")
    with mpmath.workdps(50):
        ln4c = mpmath.log(4) + p.log10 * mpmath.log(10)
        y = _solve_y(d2, ln4c)
        log10 = float(y / mpmath.log(10))
    value = 10.0**log10 if log10 < _MAX_LOG10_FLOAT else math.inf
    return BoundValue(log10, value, mode="log-space")


def fit_exponent(points) -> FitResult:
    """Least-squares fit of log y against log x.

    Needs >= 3 points with positive coordinates and at least two distinct
    x values.  r_squared is 1 - SS_res/SS_tot, defined as 1.0 when the
    log-y values are constant.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("points must be strictly positive")
    lx = [math.log(x) for x, _ in pts]
    ly = [math.log(y) for _, y in pts]
    n = len(pts)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    if sxx == 0:
        raise ValueError("degenerate fit: all x values equal")
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(lx, ly))
    ss_tot = sum((y - my) ** 2 for y in ly)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(slope, math.exp(intercept), r2, tuple(pts))
