"""Numerical oracles: ball measure, sandwich bounds, and expected isolated counts.

The central object is the ball measure

    I(rho, r) = integral of the density over an open ball of radius r whose
                center sits at distance rho from the origin,

reduced by radial symmetry to a two-dimensional integral over the ball slice.
Writing the center direction as the first axis and substituting
y = (rho + r t, r u_vec) with t in (-1, 1), ||u_vec|| <= sqrt(1 - t^2), the
angular part collapses to the radial factor (d-1) * theta_{d-1} * u^(d-2).
We integrate in the angle phi = arccos(t) and the scaled radius s = u/sin(phi),
which removes the root-type endpoint behavior, and pull the dominant factor
exp(-lambda*(rho^alpha - alpha*r*rho^(alpha-1))) out of the integral in log
space so panels only ever exponentiate well-scaled differences:

    q(t, u)     = (rho + r t)^2 + (r u)^2
    dtilde(t,u) = q^(alpha/2) - rho^alpha + alpha*r*rho^(alpha-1)

computed with log1p/expm1 when r << rho.  Exponent underflow far from the
mass (exp of large negative arguments) flushes harmlessly to zero.

The expected number of isolated vertices at cutoff r follows from averaging
exp(-n*I) (Poissonized) or (1 - I)^(n-1) (fixed n) over a density-distributed
center.  For n above a few, the radial variable is transformed to
x = lambda*s^alpha - a_n, under which the weight n*f_R(s)*ds becomes the
bounded kernel g_n(x) dx with g_n(x) = ((x + a_n)/log n)^(d/alpha - 1) e^(-x),
so the integrand stays O(1) at any sample size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import DomainError, QuadratureError
from .model import (
    ModelParams,
    normalizing_constant_A,
    poisson_limit_constant,
    sequence_a,
    unit_ball_volume,
)

__all__ = [
    "BallMeasureBounds",
    "POISSONIZED",
    "BINOMIAL",
    "adaptive_gauss_kronrod",
    "ball_measure",
    "ball_measure_bounds",
    "limit_nI",
    "g_function",
    "expected_isolated",
    "error_term_integral",
    "E_BOUND_COEFFICIENT",
]

POISSONIZED = "poissonized"
BINOMIAL = "binomial"

# Calibrated coefficient C1 for the |E_n| <= C1 / (r * rho^(alpha-1)) error
# bound of the sandwich lemma: twice the maximum of
# |K - Gamma((d+1)/2)| * r * rho^(alpha-1) observed over the acceptance grid.
# Frozen output of scripts/calibrate_e_bound.py; rerun that script to refresh.
E_BOUND_COEFFICIENT = 0.9999

# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 rule (classic QUADPACK abscissae/weights).

_XGK_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG_HALF = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# Full symmetric 15-node arrays in ascending order.
_XGK = np.concatenate([-_XGK_HALF[:7], _XGK_HALF[:8][::-1]])
_WGK = np.concatenate([_WGK_HALF[:7], _WGK_HALF[:8][::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:14:2] = np.concatenate([_WG_HALF[:3], _WG_HALF[:4][::-1]])


def _panel_eval(f, lo: np.ndarray, hi: np.ndarray):
    """Kronrod value and |K15-G7| error for each panel [lo_i, hi_i]."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _XGK[None, :]
    y = np.asarray(f(x.reshape(-1)), dtype=np.float64).reshape(x.shape)
    k = h * (y * _WGK).sum(axis=1)
    g = h * (y * _WG_FULL).sum(axis=1)
    return k, np.abs(k - g)


def adaptive_gauss_kronrod(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    initial_edges=None,
    max_panels: int = 4096,
):
    """Globally adaptive G7/K15 quadrature of a vectorized integrand on [a, b].

    f must accept a 1-D array of abscissae and return the integrand values.
    Panels whose error estimate exceeds their share of the budget are split
    in half until the summed error meets max(abs_tol, rel_tol*|integral|).

    Returns (value, error_estimate).  Raises QuadratureError when the panel
    budget is exhausted, reporting the tolerance actually achieved.
    """
    if initial_edges is None:
        edges = np.linspace(a, b, 9)
    else:
        edges = np.unique(np.clip(np.asarray(initial_edges, dtype=np.float64), a, b))
        if edges[0] > a or edges[-1] < b or len(edges) < 2:
            edges = np.unique(np.concatenate([[a, b], edges]))
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    vals, errs = _panel_eval(f, lo, hi)

    while True:
        total = float(vals.sum())
        err = float(errs.sum())
        tol = max(abs_tol, rel_tol * abs(total))
        if err <= tol or err == 0.0:
            return total, err
        if lo.size >= max_panels:
            raise QuadratureError(
                f"quadrature did not converge with {lo.size} panels: "
                f"error {err:.3e} > tolerance {tol:.3e}",
                achieved=err,
                requested=tol,
            )
        share = 0.5 * tol / lo.size
        split = errs > share
        if not split.any():
            split = errs >= errs.max()
        mid = 0.5 * (lo[split] + hi[split])
        splittable = (mid > lo[split]) & (mid < hi[split])
        if not splittable.any():
            # Panels are at float resolution; report what was achieved.
            raise QuadratureError(
                f"quadrature stalled at float resolution: error {err:.3e} "
                f"> tolerance {tol:.3e}",
                achieved=err,
                requested=tol,
            )
        idx = np.flatnonzero(split)[splittable]
        mid = mid[splittable]
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        new_vals, new_errs = _panel_eval(f, new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


# ---------------------------------------------------------------------------
# Ball measure.


def _exponent_diff(rho, r, alpha, t, u):
    """dtilde = q^(alpha/2) - rho^alpha + alpha*r*rho^(alpha-1), stably."""
    if rho == 0.0:
        return (r * np.hypot(t, u)) ** alpha
    eps = r / rho
    shift = alpha * r * rho ** (alpha - 1.0)
    if eps < 0.5:
        delta = eps * (2.0 * t + eps * (t * t + u * u))
        return rho**alpha * np.expm1(0.5 * alpha * np.log1p(delta)) + shift
    q = (rho + r * t) ** 2 + (r * u) ** 2
    return q ** (0.5 * alpha) - rho**alpha + shift


def _graded_edges(splits: int) -> np.ndarray:
    """Panel edges on [0, 1], geometrically graded toward 0.

    The exponent (rho + r t)^2 + (r s sin phi)^2 raised to alpha/2 is smooth
    except for a root-type feature at s = 0 whose scale can be arbitrarily
    small (it degenerates whenever the slice line passes near the origin for
    non-even alpha).  Dyadic panels resolve that feature at every scale; each
    panel is further split uniformly 2^splits times when refinement is asked.
    """
    base = np.concatenate([[0.0], 4.0 ** np.arange(-23.0, 0.0), [1.0]])
    if splits == 0:
        return base
    k = 2**splits
    steps = np.arange(1, k + 1) / k
    refined = base[:-1, None] + np.diff(base)[:, None] * steps[None, :]
    return np.concatenate([[0.0], refined.reshape(-1)])


def _inner_over_s(params: ModelParams, rho, r, phi: np.ndarray, rel_tol: float):
    """Integral over s in [0,1] of s^(d-2) exp(-lambda*dtilde) for each phi.

    Composite Kronrod panels graded toward s = 0, refined until the embedded
    error estimate is below rel_tol relative to each value.
    """
    d, lam, alpha = params.d, params.lam, params.alpha
    sin_phi = np.sin(phi)[:, None, None]
    cos_phi = np.cos(phi)[:, None, None]
    for splits in range(4):
        edges = _graded_edges(splits)
        c = 0.5 * (edges[:-1] + edges[1:])[:, None]
        h = 0.5 * np.diff(edges)[:, None]
        s = c + h * _XGK[None, :]  # (P, 15)
        u = s[None, :, :] * sin_phi
        t = np.broadcast_to(cos_phi, u.shape)
        vals = np.exp(-lam * _exponent_diff(rho, r, alpha, t, u))
        if d > 2:
            vals = vals * s[None, :, :] ** (d - 2)
        k = (h[None, :, 0] * (vals * _WGK).sum(axis=2))  # (nphi, P)
        g = (h[None, :, 0] * (vals * _WG_FULL).sum(axis=2))
        total = k.sum(axis=1)
        err = np.abs(k - g).sum(axis=1)
        if (err <= rel_tol * np.abs(total) + 1e-300).all():
            return total
    raise QuadratureError(
        "inner radial rule did not converge",
        achieved=float(err.max()),
        requested=float((rel_tol * np.abs(total)).max()),
    )


def _log_prefactor(params: ModelParams, rho: float, r: float) -> float:
    d, lam, alpha = params.d, params.lam, params.alpha
    shift = 0.0 if rho == 0.0 else alpha * r * rho ** (alpha - 1.0)
    return (
        math.log(normalizing_constant_A(params))
        + math.log((d - 1) * unit_ball_volume(d - 1))
        + d * math.log(r)
        - lam * (rho**alpha - shift)
    )


def ball_measure(
    params: ModelParams,
    rho: float,
    r: float,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-12,
) -> float:
    """Probability mass of the density inside the open ball B(rho*e1, r).

    Adaptive two-dimensional quadrature with absolute accuracy well below
    1e-10 on the unit scale and relative accuracy rel_tol elsewhere; raises
    QuadratureError with the achieved tolerance when it cannot converge.
    """
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise DomainError(f"rho must be finite and >= 0, got {rho}")
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be finite and positive, got {r}")
    d, lam, alpha = params.d, params.lam, params.alpha

    log_pref = _log_prefactor(params, rho, r)
    if log_pref < -745.0:  # mass below double-precision resolution
        return 0.0
    pref = math.exp(log_pref)
    inner_tol = 0.1 * rel_tol

    def outer(phi):
        profile = _inner_over_s(params, rho, r, phi, inner_tol)
        return np.sin(phi) ** d * profile

    # Seed extra panel edges around the angles at which the ball crosses the
    # bulk of the radial mass, so narrow features are never missed.
    edges = [np.linspace(0.0, math.pi, 9)]
    x_hi = sc.gammainccinv(d / alpha, 1e-8) / lam
    s_bulk = x_hi ** (1.0 / alpha)
    t_lo = max(-1.0, (-rho - s_bulk) / r)
    t_hi = min(1.0, (-rho + s_bulk) / r)
    if t_lo < t_hi:
        edges.append(np.arccos(np.linspace(t_hi, t_lo, 13)))
    q_total, _ = adaptive_gauss_kronrod(
        outer,
        0.0,
        math.pi,
        rel_tol=rel_tol,
        abs_tol=min(abs_tol / pref, 1e300),
        initial_edges=np.concatenate(edges),
    )
    value = pref * q_total
    return min(max(value, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Sandwich bounds.


@dataclass(frozen=True)
class BallMeasureBounds:
    """Closed-form sandwich for the ball measure far from the origin.

    lower = exp(-lambda*w1) * (gamma_factor - E_bound) * H
    upper = exp(-lambda*w2) * gamma_factor * H
    """

    lower: float
    upper: float
    H: float
    w1: float
    w2: float
    E_bound: float
    gamma_factor: float


def ball_measure_bounds(
    params: ModelParams, rho: float, r: float, corrected: bool = True
) -> BallMeasureBounds:
    """Sandwich bounds valid for rho > 2r with r * rho^(alpha-1) large.

    The common factor is

        H = A_d theta_{d-1} 2^((d-1)/2) r^d
            * exp(-lambda (rho^alpha - alpha r rho^(alpha-1)))
            * (lambda alpha r rho^(alpha-1))^(-(d+1)/2)

    For alpha <= 2 the exponent corrections are

        w1 = alpha/2 * r^2 * (rho^2 - 2 r rho)^(alpha/2 - 1)         >= 0
        w2 = alpha(alpha-2)/2 * (r rho)^2 * (rho^2 - 2 r rho)^(alpha/2 - 2) <= 0

    and for alpha > 2, w2 = 0 with

        w1 = alpha/2 * r^2 * (rho^2 + 2 r rho)^(alpha/2 - 2)
             * ((alpha - 1) rho^2 + 2 r rho).

    corrected=False reproduces a printed variant of the w2 base term,
    (rho - 2 r rho) in place of (rho^2 - 2 r rho); it is dimensionally
    inconsistent and kept only for documentation (NaN when 2r >= 1).
    """
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be finite and positive, got {r}")
    if not rho > 2.0 * r:
        raise DomainError(f"bounds require rho > 2r, got rho={rho:g}, r={r:g}")
    d, lam, alpha = params.d, params.lam, params.alpha

    b = lam * alpha * r * rho ** (alpha - 1.0)
    log_h = (
        math.log(normalizing_constant_A(params))
        + math.log(unit_ball_volume(d - 1))
        + 0.5 * (d - 1) * math.log(2.0)
        + d * math.log(r)
        - lam * (rho**alpha - alpha * r * rho ** (alpha - 1.0))
        - 0.5 * (d + 1) * math.log(b)
    )
    h = math.exp(log_h) if log_h > -745.0 else 0.0

    if alpha <= 2.0:
        w1 = 0.5 * alpha * r * r * (rho * rho - 2.0 * r * rho) ** (0.5 * alpha - 1.0)
        base = (rho * rho - 2.0 * r * rho) if corrected else (rho - 2.0 * r * rho)
        w2 = 0.5 * alpha * (alpha - 2.0) * (r * rho) ** 2 * base ** (0.5 * alpha - 2.0)
    else:
        w1 = (
            0.5
            * alpha
            * r
            * r
            * (rho * rho + 2.0 * r * rho) ** (0.5 * alpha - 2.0)
            * ((alpha - 1.0) * rho * rho + 2.0 * r * rho)
        )
        w2 = 0.0

    gamma_factor = math.gamma(0.5 * (d + 1))
    e_bound = E_BOUND_COEFFICIENT / (r * rho ** (alpha - 1.0))
    lower = math.exp(-lam * w1) * (gamma_factor - e_bound) * h
    upper = math.exp(-lam * w2) * gamma_factor * h
    return BallMeasureBounds(
        lower=lower,
        upper=upper,
        H=h,
        w1=w1,
        w2=w2,
        E_bound=e_bound,
        gamma_factor=gamma_factor,
    )


def error_term_integral(b: float, d: int) -> float:
    """K(b, d) = int_0^{2b} e^-v v^((d-1)/2) (1 - v/(2b))^((d-1)/2) dv.

    The sandwich's H factor times this integral is the exact slice integral;
    K -> Gamma((d+1)/2) as b -> infinity.  Used by the E-bound calibration.
    """
    if b <= 0.0:
        raise DomainError(f"b must be positive, got {b}")
    p = 0.5 * (d - 1)

    def f(v):
        return np.exp(-v) * v**p * np.clip(1.0 - v / (2.0 * b), 0.0, None) ** p

    val, _ = adaptive_gauss_kronrod(f, 0.0, 2.0 * b, rel_tol=1e-12, abs_tol=1e-15)
    return val


# ---------------------------------------------------------------------------
# Palm-type expectations.


def limit_nI(params: ModelParams, beta: float, t: float) -> float:
    """Limit of n * I(rho_n(t), r_n(beta)): poisson_limit_constant * exp(beta - t).

    The quadrature invariants check that n * ball_measure along the
    centering sequences approaches this value with decreasing relative error.
    """
    return poisson_limit_constant(params) * math.exp(beta - t)


def _g_values(params: ModelParams, a_n: float, logn: float, x: np.ndarray) -> np.ndarray:
    m = params.d / params.alpha
    return ((x + a_n) / logn) ** (m - 1.0) * np.exp(-x)


def g_function(params: ModelParams, n: float, t: float) -> float:
    """Transformed radial weight g_n(t) = ((t + a_n)/log n)^(d/alpha-1) e^-t.

    Defined for t >= -a_n; converges to e^-t as n grows.
    """
    a_n = sequence_a(params, n)
    if t < -a_n:
        raise DomainError(f"g_function requires t >= -a_n = {-a_n:.6g}, got {t:g}")
    return float(_g_values(params, a_n, math.log(float(n)), np.asarray(t, dtype=float)))


def _isolation_weight(i_vals: np.ndarray, n: float, mode: str) -> np.ndarray:
    i_vals = np.clip(i_vals, 0.0, 1.0)
    if mode == POISSONIZED:
        return np.exp(-n * i_vals)
    if mode == BINOMIAL:
        with np.errstate(divide="ignore"):
            return np.exp((n - 1.0) * np.log1p(-i_vals))
    raise DomainError(f"mode must be '{POISSONIZED}' or '{BINOMIAL}', got {mode!r}")


def expected_isolated(
    params: ModelParams,
    n: float,
    r: float,
    mode: str = POISSONIZED,
    rel_tol: float = 1e-8,
) -> float:
    """Expected number of isolated vertices in the geometric graph at cutoff r.

    mode="poissonized" evaluates n * E[exp(-n I(R, r))] for a density-
    distributed radius R (the point-process expectation); mode="binomial"
    evaluates n * E[(1 - I(R, r))^(n-1)], exact for n i.i.d. points.  The
    guaranteed absolute accuracy is 1e-6 * (result + 1); non-convergence
    raises QuadratureError.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be finite and positive, got {r}")
    n = float(n)
    d, lam, alpha = params.d, params.lam, params.alpha
    m = d / alpha

    def measure(s: float) -> float:
        # When the ball covers the origin the contained mass alone already
        # drives the isolation weight to zero; skip the expensive quadrature.
        if s < r:
            contained = sc.gammainc(m, lam * (r - s) ** alpha)
            if n * contained > 800.0:
                return float(contained)
        return ball_measure(params, s, r, rel_tol=1e-11, abs_tol=1e-14)

    budget = 1e-6

    if n < 10.0:
        # Direct radial integration; no transformation needed at tiny n.
        s_hi = (sc.gammainccinv(m, 1e-18) / lam) ** (1.0 / alpha)
        c_rad = alpha * lam**m / math.gamma(m)

        def integrand(s):
            i_vals = np.array([measure(v) for v in s])
            dens = c_rad * s ** (d - 1.0) * np.exp(-lam * s**alpha)
            return _isolation_weight(i_vals, n, mode) * dens

        val, err = adaptive_gauss_kronrod(
            integrand, 0.0, s_hi, rel_tol=rel_tol, abs_tol=1e-9,
            initial_edges=np.linspace(0.0, s_hi, 17),
        )
        total, total_err = n * val, n * err + n * sc.gammaincc(m, lam * s_hi**alpha)
    else:
        a_n = sequence_a(params, n)
        logn = math.log(n)

        def rho_of(x):
            return ((x + a_n) / lam) ** (1.0 / alpha)

        def weight(x: np.ndarray) -> np.ndarray:
            i_vals = np.array([measure(rho_of(v)) for v in x])
            return _isolation_weight(i_vals, n, mode)

        x_hi = 40.0
        while n * sc.gammaincc(m, a_n + x_hi) > 1e-9 and x_hi < 800.0:
            x_hi += 10.0
        tail = n * sc.gammaincc(m, a_n + x_hi)

        total = 0.0
        total_err = tail
        x_lo = -a_n
        if m < 1.0:
            # Graded substitution x = -a_n + y^(1/m) flattens the left-edge
            # power singularity of g_n.
            log_c = a_n + (1.0 - m) * math.log(logn)

            def left(y):
                x = -a_n + y ** (1.0 / m)
                return (1.0 / m) * np.exp(log_c - y ** (1.0 / m)) * weight(x)

            val, err = adaptive_gauss_kronrod(
                left, 0.0, 1.0, rel_tol=rel_tol, abs_tol=1e-9,
                initial_edges=np.linspace(0.0, 1.0, 9),
            )
            total += val
            total_err += err
            x_lo = -a_n + 1.0

        def right(x):
            return weight(x) * _g_values(params, a_n, logn, x)

        span = np.linspace(x_lo, x_hi, 33)
        val, err = adaptive_gauss_kronrod(
            right, x_lo, x_hi, rel_tol=rel_tol, abs_tol=1e-9, initial_edges=span
        )
        total += val
        total_err += err

    requested = budget * (abs(total) + 1.0)
    if total_err > requested:
        raise QuadratureError(
            "expected_isolated did not reach its accuracy budget",
            achieved=total_err,
            requested=requested,
        )
    return max(total, 0.0)
