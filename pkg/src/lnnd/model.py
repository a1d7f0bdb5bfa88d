"""Distribution parameters, closed-form constants, and scaling sequences.

The point density under study is

    f(x) = A_d * exp(-lambda * ||x||^alpha),   x in R^d, d >= 2,

with normalizer

    A_d = alpha * lambda^(d/alpha) * Gamma(d/2 + 1)
          / (d * pi^(d/2) * Gamma(d/alpha)).

Everything in this module is a pure function of (d, lambda, alpha) and the
sample size n.  Iterated logarithms are natural logs throughout: log2(n)
means log(log(n)) and log3(n) means log(log(log(n))), never base-2/base-3
logarithms.  Operations that need log3(n) reject n <= e^e with a
:class:`~lnnd.errors.DomainError` rather than returning NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "ModelParams",
    "ScalingConstants",
    "unit_ball_volume",
    "normalizing_constant_A",
    "limit_constant_C",
    "poisson_limit_constant",
    "sequence_a",
    "critical_radius",
    "gumbel_statistic",
    "gumbel_cdf",
    "strong_law_ratio",
    "containment_radius",
]

_E = math.e
_EE = math.exp(math.e)  # domain guard for log3


@dataclass(frozen=True)
class ModelParams:
    """The triple (d, lambda, alpha) defining the density.

    d must be an integer >= 2; lambda and alpha must be positive and finite.
    """

    d: int
    lam: float
    alpha: float

    def __post_init__(self):
        if not isinstance(self.d, int) or isinstance(self.d, bool):
            raise DomainError(f"dimension d must be an integer, got {self.d!r}")
        if self.d < 2:
            raise DomainError(f"dimension d must be >= 2, got {self.d}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lambda must be positive and finite, got {self.lam}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be positive and finite, got {self.alpha}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "alpha", float(self.alpha))


def unit_ball_volume(k: int) -> float:
    """Volume of the k-dimensional unit ball, pi^(k/2) / Gamma(k/2 + 1).

    By convention the 0-dimensional volume is 1.
    """
    if k < 0:
        raise DomainError(f"ball dimension must be >= 0, got {k}")
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def normalizing_constant_A(params: ModelParams) -> float:
    """Density normalizer A_d making f integrate to one.

    A_d = alpha * lambda^(d/alpha) * Gamma(d/2+1) / (d * pi^(d/2) * Gamma(d/alpha)).
    """
    d, lam, alpha = params.d, params.lam, params.alpha
    return (
        alpha
        * lam ** (d / alpha)
        * math.gamma(d / 2.0 + 1.0)
        / (d * math.pi ** (d / 2.0) * math.gamma(d / alpha))
    )


def limit_constant_C(params: ModelParams) -> float:
    """Closed-form constant C_d = alpha * theta_{d-1} * (d-1)!/2 * ((d-1)/(2 pi))^((d-1)/2).

    theta_{d-1} is the volume of the (d-1)-dimensional unit ball.  C_d does
    not depend on lambda.
    """
    d, alpha = params.d, params.alpha
    return (
        alpha
        * unit_ball_volume(d - 1)
        * math.factorial(d - 1)
        / 2.0
        * ((d - 1) / (2.0 * math.pi)) ** ((d - 1) / 2.0)
    )


def poisson_limit_constant(params: ModelParams) -> float:
    """Constant governing the isolated-vertex limit laws; equals C_d / alpha^d.

    The number of isolated vertices at cutoff r_n(beta) converges to a
    Poisson law with mean exp(-beta) divided by this constant, and
    n * I(rho_n(t), r_n(beta)) -> (this constant) * exp(beta - t).  In closed
    form it is Gamma(d/2) * (2(d-1))^((d-1)/2) / (2 sqrt(pi) alpha^(d-1)),
    which equals C_d / alpha^d by the Legendre duplication formula; the two
    coincide when alpha = 1.  The value is the one the exact ball-measure
    asymptotics produce, which the quadrature suite verifies numerically.
    """
    d, alpha = params.d, params.alpha
    return (
        math.gamma(d / 2.0)
        * (2.0 * (d - 1)) ** ((d - 1) / 2.0)
        / (2.0 * math.sqrt(math.pi) * alpha ** (d - 1))
    )


@dataclass(frozen=True)
class ScalingConstants:
    """Closed-form constants for one parameter triple, recomputable bit-for-bit."""

    a_d: float
    c_d: float
    theta: dict[int, float] = field(repr=False)

    @classmethod
    def from_params(cls, params: ModelParams) -> "ScalingConstants":
        d = params.d
        return cls(
            a_d=normalizing_constant_A(params),
            c_d=limit_constant_C(params),
            theta={d - 1: unit_ball_volume(d - 1), d: unit_ball_volume(d)},
        )


def _check_n(n: float, minimum: float, what: str) -> float:
    n = float(n)
    if not math.isfinite(n) or n <= minimum:
        raise DomainError(f"{what} requires n > {minimum:.6g}, got {n}")
    return n


def sequence_a(params: ModelParams, n: float) -> float:
    """Radial centering sequence a_n = log n + (d/alpha - 1) log2 n - log Gamma(d/alpha)."""
    n = _check_n(n, _E, "sequence_a")
    d, alpha = params.d, params.alpha
    logn = math.log(n)
    return logn + (d / alpha - 1.0) * math.log(logn) - math.lgamma(d / alpha)


def _scale_factor(params: ModelParams, logn: float) -> float:
    """The normalization lambda * alpha * (log(n)/lambda)^(1 - 1/alpha)."""
    return params.lam * params.alpha * (logn / params.lam) ** (1.0 - 1.0 / params.alpha)


def critical_radius(params: ModelParams, n: float, beta: float) -> float:
    """Edge-length sequence r_n(beta) at which the isolated-vertex count stabilizes.

    r_n(beta) = [(d-1) log2 n - (d-1)/2 log3 n + beta]
                / (lambda * alpha * (log(n)/lambda)^(1 - 1/alpha))

    The numerator must be positive and n must exceed e^e so that log3 n is
    defined; otherwise a DomainError is raised.
    """
    n = _check_n(n, _EE, "critical_radius")
    d = params.d
    logn = math.log(n)
    log2n = math.log(logn)
    log3n = math.log(log2n)
    num = (d - 1) * log2n - 0.5 * (d - 1) * log3n + beta
    if num <= 0.0:
        raise DomainError(
            f"critical_radius numerator must be positive; got {num:.6g} "
            f"for n={n:g}, beta={beta:g}"
        )
    return num / _scale_factor(params, logn)


def gumbel_statistic(params: ModelParams, n: float, dn: float) -> float:
    """Normalized largest-link statistic with a parameter-free Gumbel limit.

    T_n = lambda * alpha * (log(n)/lambda)^(1-1/alpha) * d_n
          - (d-1) log2 n + (d-1)/2 log3 n + log(poisson_limit_constant),

    chosen so that P[T_n <= beta] -> exp(-exp(-beta)) as n grows: the event
    {T_n <= beta} equals {no isolated vertex at the radius whose expected
    isolated count tends to exp(-beta)}.  Feeding in
    dn = critical_radius(params, n, beta) gives back
    beta + log(poisson_limit_constant) exactly.
    """
    n = _check_n(n, _EE, "gumbel_statistic")
    d = params.d
    logn = math.log(n)
    log2n = math.log(logn)
    log3n = math.log(log2n)
    return (
        _scale_factor(params, logn) * dn
        - (d - 1) * log2n
        + 0.5 * (d - 1) * log3n
        + math.log(poisson_limit_constant(params))
    )


def gumbel_cdf(beta: float) -> float:
    """Standard Gumbel distribution function exp(-exp(-beta))."""
    return math.exp(-math.exp(-beta))


def strong_law_ratio(params: ModelParams, n: float, dn: float) -> float:
    """Normalized link (log(n)/lambda)^(1-1/alpha) * d_n / log2 n.

    Almost surely this ratio is eventually trapped in the band
    [(d-1)/(alpha*lambda), d/(alpha*lambda)].
    """
    n = _check_n(n, _EE, "strong_law_ratio")
    logn = math.log(n)
    return (logn / params.lam) ** (1.0 - 1.0 / params.alpha) * dn / math.log(logn)


def containment_radius(params: ModelParams, n: float, c: float) -> float:
    """Radius R_n(c) with R_n(c)^alpha = (log n + ((c+d-alpha)/alpha) log2 n) / lambda.

    All n points lie inside B(0, R_n(c)) eventually (a.s.) for c > alpha,
    while for c < 0 the shell between R_n(c) and R_n(0) is eventually hit.
    """
    n = _check_n(n, _E, "containment_radius")
    d, lam, alpha = params.d, params.lam, params.alpha
    logn = math.log(n)
    radicand = (logn + (c + d - alpha) / alpha * math.log(logn)) / lam
    if radicand <= 0.0:
        raise DomainError(
            f"containment_radius radicand must be positive; got {radicand:.6g}"
        )
    return radicand ** (1.0 / alpha)
