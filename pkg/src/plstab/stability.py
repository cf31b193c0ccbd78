"""End-to-end stability experiments.

Builds log-concave witnesses for near-extremal triples, measures aligned L1
distances at the theorem's two-parameter coupling, runs the sharp
counterexample family, and fits stability exponents on log-log sweeps.

The two-parameter family used for the coupled distances is
    f ~ a^-(1-lambda) * w(x - (1-lambda)*x0),
    g ~ a^lambda      * w(x + lambda*x0),
where w is the chosen log-concave witness.  These exponent/shift pairings are
the ones consistent with the equality case for every lambda (amplitudes must
satisfy A^lambda * B^(1-lambda) = 1 and shifts lambda*u + (1-lambda)*v = 0);
the witness itself is the midpoint sup-convolution of the (hulled, normalized)
pair, recentered and rescaled onto h.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .grids import (
    DomainError,
    GridFunction,
    PreconditionError,
    l1_distance,
    mass,
    normalize,
    scale_amplitude,
    sup_norm,
    translate,
)
from .levelsets import PiecewiseLinear
from .logconcave import is_log_concave, log_concave_hull
from .radial import (
    RadialProfile,
    radial_l1_distance,
    radial_mass,
    radial_pl_deficit,
    radial_sup_convolution,
)
from .supconv import pl_deficit, sup_convolution
from .transport import (
    DeficitReport,
    bad_set_measure,
    midpoint_deficit,
    monotone_transport,
    tail_cut_points,
    transport_deficit,
)


class ReductionCheckError(RuntimeError):
    """A numerically asserted reduction inequality failed."""


# ---------------------------------------------------------------------------
# seeded generators for property suites


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_log_concave(seed, lo: float = -8.0, hi: float = 8.0, n: int = 2048) -> GridFunction:
    """Random log-concave density: log f is a min of 3..6 affine functions.

    One strongly increasing and one strongly decreasing line are always
    present so both tails decay inside the declared window.
    """
    rng = _rng(seed)
    k = int(rng.integers(3, 7))
    slopes = rng.uniform(1.0, 4.0, size=k) * rng.choice([-1.0, 1.0], size=k)
    slopes[0] = abs(slopes[0])
    slopes[1] = -abs(slopes[1])
    pivots = rng.uniform(-2.0, 2.0, size=k)
    heights = rng.uniform(-0.5, 0.5, size=k)
    dx = (hi - lo) / (n - 1)
    xs = lo + dx * np.arange(n)
    logf = np.min(heights[:, None] + slopes[:, None] * (xs[None, :] - pivots[:, None]), axis=0)
    vals = np.exp(logf - np.max(logf))
    return normalize(GridFunction(lo, dx, vals))


def random_log_concave_pair(seed, n: int = 2048):
    rng = _rng(seed)
    return random_log_concave(rng, n=n), random_log_concave(rng, n=n)


def near_equality_pair(seed, delta: float, n: int = 2048):
    """A log-concave pair at controlled small deficit: g multiplies f by the
    exponential of a weak concave quadratic, which preserves log-concavity."""
    rng = _rng(seed)
    f = random_log_concave(rng, n=n)
    xs = f.centers
    c = rng.uniform(-1.0, 1.0)
    kappa = rng.uniform(0.3, 1.0)
    g = normalize(f.with_values(f.values * np.exp(-delta * kappa * (xs - c) ** 2)))
    return f, g


def random_unimodal(seed, lo: float = -4.0, hi: float = 4.0, n: int = 513) -> GridFunction:
    """Random unimodal grid function with its mode at x = 0."""
    rng = _rng(seed)
    if n % 2 == 0:
        n += 1
    mid = n // 2
    peak = rng.uniform(0.5, 1.0)
    left = np.sort(rng.uniform(0.0, peak, size=mid))
    right = -np.sort(-rng.uniform(0.0, peak, size=mid))
    vals = np.concatenate([left, [peak], right])
    dx = (hi - lo) / (n - 1)
    return GridFunction(lo, dx, vals)


def random_piecewise_linear(seed, span: float = 4.0, segments: int = 6) -> PiecewiseLinear:
    """Random piecewise-linear test function anchored at phi(0) = 0."""
    rng = _rng(seed)
    knots = np.unique(np.concatenate([rng.uniform(-span, span, size=segments), [-span, 0.0, span]]))
    vals = rng.uniform(-1.0, 1.0, size=knots.size)
    vals = vals - np.interp(0.0, knots, vals)
    return PiecewiseLinear(knots, vals)


# ---------------------------------------------------------------------------
# aligned distances


def _golden_min(fn, lo: float, hi: float, iters: int = 60):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def aligned_l1_distance(u: GridFunction, v: GridFunction, optimize_scale: bool = False):
    """Minimize the L1 distance between u and a*v(. - s) over the shift s
    (and over a when flagged).

    Coarse shift scan at step 4*dx, ternary refinement to dx/4, golden-section
    amplitude search over [mass_ratio/2, 2*mass_ratio].  Returns
    (distance, shift, scale).
    """
    if mass(u) <= 0 or mass(v) <= 0:
        raise DomainError("zero mass")
    dx = min(u.dx, v.dx)
    ratio = mass(u) / mass(v)

    def dist(s: float, a: float) -> float:
        w = translate(v, s)
        if a != 1.0:
            w = scale_amplitude(w, a)
        return l1_distance(u, w)

    best = {"d": math.inf, "s": 0.0, "a": 1.0}

    def probe(s: float, a: float) -> float:
        d = dist(s, a)
        if d < best["d"]:
            best.update(d=d, s=s, a=a)
        return d

    a_cur = ratio if optimize_scale else 1.0
    span = 0.5 * ((u.n - 1) * u.dx + (v.n - 1) * v.dx)
    center = (u.x0 + 0.5 * (u.n - 1) * u.dx) - (v.x0 + 0.5 * (v.n - 1) * v.dx)
    shifts = center + np.arange(-span, span + 2 * dx, 4.0 * dx)
    vals = [probe(float(s), a_cur) for s in shifts]
    s_cur = float(shifts[int(np.argmin(vals))])
    probe(0.0, a_cur)
    probe(center, a_cur)

    def refine_shift(s0: float, a: float) -> float:
        lo, hi = s0 - 4.0 * dx, s0 + 4.0 * dx
        while hi - lo > dx / 4.0:
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if probe(m1, a) < probe(m2, a):
                hi = m2
            else:
                lo = m1
        return 0.5 * (lo + hi)

    def snap(s: float, a: float) -> None:
        # shift optima of grid data usually sit on half-cell lattice points
        for step in (dx, 0.5 * dx):
            probe(round(s / step) * step, a)

    s_cur = refine_shift(s_cur, a_cur)
    snap(s_cur, a_cur)
    if optimize_scale:
        for _ in range(2):
            a_cur, _ = _golden_min(lambda a: probe(s_cur, a), 0.5 * ratio, 2.0 * ratio)
            s_cur = refine_shift(s_cur, a_cur)
        snap(s_cur, a_cur)
    probe(s_cur, a_cur)
    return best["d"], best["s"], best["a"]


# ---------------------------------------------------------------------------
# stability distances for one triple


@dataclass(frozen=True)
class StabilityReport:
    lambda_: float
    tau: float
    epsilon: float
    distance_f: float
    distance_g: float
    distance_h: float
    shift: float
    scale: float
    witness: GridFunction

    def to_json_dict(self, include_witness: bool = True) -> dict:
        out = {
            "lambda": self.lambda_,
            "tau": self.tau,
            "epsilon": self.epsilon,
            "distance_f": self.distance_f,
            "distance_g": self.distance_g,
            "distance_h": self.distance_h,
            "shift": self.shift,
            "scale": self.scale,
        }
        if include_witness:
            out["witness"] = {
                "x0": self.witness.x0,
                "dx": self.witness.dx,
                "values": [float(v) for v in self.witness.values],
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def stability_distance(f: GridFunction, g: GridFunction, h: GridFunction, lam: float) -> StabilityReport:
    """Distances from (f, g, h) to the extremal family spanned by the witness.

    The witness is the midpoint sup-convolution of the normalized pair (after
    replacing non-log-concave inputs by their normalized log-concave hulls),
    recentered and rescaled onto h.  The pair (a, x0) is optimized on the
    f-distance and reused, coupled, for g.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")
    mf, mg = mass(f), mass(g)
    if mf <= 0 or mg <= 0 or mass(h) <= 0:
        raise DomainError("zero mass")
    tau = min(lam, 1.0 - lam)
    fn = normalize(f)
    gn = normalize(g)
    hn = scale_amplitude(h, 1.0 / (mf ** lam * mg ** (1.0 - lam)))
    epsilon = mass(hn) - 1.0

    ff = fn if is_log_concave(fn)[0] else normalize(log_concave_hull(fn).hull)
    gg = gn if is_log_concave(gn)[0] else normalize(log_concave_hull(gn).hull)
    witness_raw = sup_convolution(ff, gg, 0.5).h

    d_h, mu, c = aligned_l1_distance(hn, witness_raw, optimize_scale=True)
    witness = scale_amplitude(translate(witness_raw, mu), c)

    d_f, s, alpha = aligned_l1_distance(fn, witness, optimize_scale=True)
    x0 = s / (1.0 - lam)
    a = alpha ** (-1.0 / (1.0 - lam))
    g_wit = scale_amplitude(translate(witness, -lam * x0), a ** lam)
    d_g = l1_distance(gn, g_wit)

    return StabilityReport(
        lambda_=lam,
        tau=tau,
        epsilon=epsilon,
        distance_f=d_f,
        distance_g=d_g,
        distance_h=d_h,
        shift=x0,
        scale=a,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# the sharp counterexample family


@dataclass(frozen=True)
class CounterexampleConfig:
    delta: float
    t: float
    grid_n: int = 4096
    phi_id: str = "odd_poly"
    lo: float = -4.0
    hi: float = 4.0

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise DomainError("delta must lie in (0, 1/2)")
        if not 0.0 < self.t < 1.0:
            raise DomainError("t must lie in (0, 1)")
        if not 64 <= self.grid_n <= 2 ** 20:
            raise DomainError("grid_n must lie in [64, 2^20]")
        if self.phi_id not in ("odd_poly", "even_radial"):
            raise DomainError("phi_id must be odd_poly or even_radial")


@dataclass(frozen=True)
class CounterexampleResult:
    f: GridFunction
    g: GridFunction
    h: GridFunction
    epsilon: float
    distance: float


def _odd_bump_peak() -> float:
    """max of x*(1-x^2)^3 on [0, 1], found by ternary search (never hard-coded)."""

    def val(x):
        return x * (1.0 - x * x) ** 3

    lo, hi = 0.0, 1.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if val(m1) < val(m2):
            lo = m1
        else:
            hi = m2
    return val(0.5 * (lo + hi))


def counterexample_family(cfg: CounterexampleConfig) -> CounterexampleResult:
    """Gaussian f = exp(-pi x^2) perturbed by an odd C^2 bump: g = (1+delta*phi) f.

    phi(x) = x (1-x^2)^3 / M on [-1, 1] with M chosen at run time so that
    max phi = 1.  The odd symmetry makes the perturbation mass-neutral, so
    renormalization is a no-op up to rounding.  Returns the triple, its
    deficit under sup-convolution at t, and the translation-aligned L1
    distance between g and f.
    """
    n = cfg.grid_n
    dx = (cfg.hi - cfg.lo) / (n - 1)
    xs = cfg.lo + dx * np.arange(n)
    fvals = np.exp(-math.pi * xs ** 2)
    inside = np.abs(xs) < 1.0
    phi = np.zeros(n)
    phi[inside] = xs[inside] * (1.0 - xs[inside] ** 2) ** 3
    phi /= _odd_bump_peak()
    gvals = (1.0 + cfg.delta * phi) * fvals
    f = normalize(GridFunction(cfg.lo, dx, fvals))
    g = normalize(GridFunction(cfg.lo, dx, gvals))
    ok, idx = is_log_concave(g)
    if not ok:
        raise PreconditionError(f"perturbed density lost log-concavity at cell {idx}")
    h = sup_convolution(f, g, cfg.t).h
    epsilon = pl_deficit(h, f, g, cfg.t)
    distance, _, _ = aligned_l1_distance(g, f, optimize_scale=False)
    return CounterexampleResult(f=f, g=g, h=h, epsilon=epsilon, distance=distance)


def _radial_bump(r: np.ndarray, a: float, b: float) -> np.ndarray:
    out = np.zeros_like(r)
    inside = (r > a) & (r < b)
    out[inside] = ((r[inside] - a) * (b - r[inside])) ** 3
    return out


@dataclass(frozen=True)
class RadialCounterexampleResult:
    f: RadialProfile
    g: RadialProfile
    h: RadialProfile
    epsilon: float
    distance: float


def radial_counterexample_family(cfg: CounterexampleConfig, n_dim: int) -> RadialCounterexampleResult:
    """Radial analogue: an even C^2 bump supported in [1/2, 2], made
    mass-neutral against the r^(n-1) weight by subtracting a projection onto a
    second bump; the distance is minimized over amplitude scalings of f."""
    if n_dim < 2:
        raise DomainError("radial family needs ambient dimension >= 2")
    if cfg.phi_id != "even_radial":
        raise DomainError("radial family requires phi_id = even_radial")
    n = cfg.grid_n
    r_hi = 5.0
    dr = r_hi / n
    r = dr * (0.5 + np.arange(n))
    fvals = np.exp(-math.pi * r ** 2)
    weight = r ** (n_dim - 1)
    psi1 = _radial_bump(r, 0.5, 1.4)
    psi2 = _radial_bump(r, 1.1, 2.0)
    c = float(np.sum(fvals * psi1 * weight) / np.sum(fvals * psi2 * weight))
    phi = psi1 - c * psi2
    phi /= float(np.max(np.abs(phi)))
    gvals = (1.0 + cfg.delta * phi) * fvals

    f = RadialProfile(n_dim, float(r[0]), dr, fvals)
    g = RadialProfile(n_dim, float(r[0]), dr, gvals)
    f = RadialProfile(n_dim, f.r0, f.dr, f.values / radial_mass(f))
    g = RadialProfile(n_dim, g.r0, g.dr, g.values / radial_mass(g))
    ok, idx = is_log_concave(g.as_grid())
    if not ok or not g.is_nonincreasing(tol=1e-9):
        raise PreconditionError(f"perturbed radial profile is not log-concave decreasing (cell {idx})")
    h = radial_sup_convolution(f, g, cfg.t)
    epsilon = radial_pl_deficit(h, f, g, cfg.t)

    def dist(a: float) -> float:
        return radial_l1_distance(g, RadialProfile(f.n, f.r0, f.dr, a * f.values))

    a_best, d_best = _golden_min(dist, 0.5, 2.0)
    return RadialCounterexampleResult(f=f, g=g, h=h, epsilon=epsilon, distance=d_best)


# ---------------------------------------------------------------------------
# exponent fits and probes


def exponent_fit(points):
    """OLS of log(distance) on log(epsilon): returns (slope, intercept, r2)."""
    pts = [(float(e), float(d)) for e, d in points]
    if len(pts) < 3:
        raise DomainError("need at least 3 points")
    if any(e <= 0 or d <= 0 for e, d in pts):
        raise DomainError("epsilon and distance values must be positive")
    x = np.log([e for e, _ in pts])
    y = np.log([d for _, d in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_res <= 1e-28 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r2)


@dataclass(frozen=True)
class ProbeRow:
    t: float
    tau: float
    epsilon: float
    distance: float
    ratio: float


def tau_scaling_probe(t_values, delta: float, grid_n: int = 4096) -> list:
    """Counterexample runs at fixed delta across t; the last column is
    distance / sqrt(epsilon/tau), which the sharp theory keeps bounded."""
    rows = []
    for t in t_values:
        cfg = CounterexampleConfig(delta=delta, t=float(t), grid_n=grid_n)
        res = counterexample_family(cfg)
        tau = min(t, 1.0 - t)
        ratio = res.distance / math.sqrt(res.epsilon / tau) if res.epsilon > 0 else float("nan")
        rows.append(ProbeRow(t=float(t), tau=tau, epsilon=res.epsilon, distance=res.distance, ratio=ratio))
    return rows


def general_lambda_reduction(f: GridFunction, g: GridFunction, lam: float):
    """Bound the midpoint deficit by the lambda-deficit over tau.

    Returns (eps_half_bound, direct_eps_half) and asserts
    direct <= bound + 1e-6 whenever the interpolation hypothesis
    eps_lambda < 2*tau applies.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")
    for name, d in (("f", f), ("g", g)):
        ok, idx = is_log_concave(d)
        if not ok:
            raise PreconditionError(f"{name} is not log-concave (first violation at cell {idx})")
    fn = normalize(f)
    gn = normalize(g)
    tau = min(lam, 1.0 - lam)
    eps_lam = pl_deficit(sup_convolution(fn, gn, lam).h, fn, gn, lam)
    bound = eps_lam / tau
    direct = pl_deficit(sup_convolution(fn, gn, 0.5).h, fn, gn, 0.5)
    if eps_lam < 2.0 * tau and direct > bound + 1e-6:
        raise ReductionCheckError(
            f"midpoint deficit {direct:.3e} exceeds the reduction bound {bound:.3e}"
        )
    return bound, direct


# ---------------------------------------------------------------------------
# assembled scalar report for one pair


def full_deficit_report(f: GridFunction, g: GridFunction, lam: float) -> DeficitReport:
    """DeficitReport for the pair under its own sup-convolution at lambda."""
    fn = normalize(f)
    gn = normalize(g)
    tau = min(lam, 1.0 - lam)
    h = sup_convolution(fn, gn, lam).h
    eps = pl_deficit(h, fn, gn, lam)
    m = monotone_transport(fn, gn)
    eta = math.sqrt(max(eps, 1e-12))
    level = min(max(8.0 * eps, 1e-6), 0.49)
    return DeficitReport(
        lambda_=lam,
        tau=tau,
        epsilon=eps,
        transport_deficit=transport_deficit(fn, gn, lam),
        midpoint_deficit=midpoint_deficit(fn, gn),
        bad_set_measure=bad_set_measure(fn, m, eta=eta),
        tail_cut=tail_cut_points(fn, level),
    )
