"""Constants and per-step accounting for the regret guarantee.

The guarantee compares the combiner's total loss against the best fixed
weight in hindsight, inflated by a constant factor.  Everything is driven
by a slack parameter eps > 0, the magnitude cap Y, and the weight floor
lambda_plus, through

    z = (1 - 4*k0) / (1 + 4*k0),      k0 = lambda_plus * (1 - lambda_plus)
    b = eps / Y^2
    a = (1 - z^2) * eps / (Y^2 * (2*eps + 1))
    s = Y^2 / 2 + 1 / (4*b)
    mu = (2 + 2*z) / s

These satisfy 4*a*s = 1 - z^2 and sqrt(1 - 4*a*s) = z exactly, and the
map eps -> mu inverts to eps = mu / (4*c - 2*mu) with c = (2 + 2*z) / Y^2,
valid for 0 < mu < 2*c.

The per-step requirement behind the guarantee is that for every comparator
weight beta,

    a*e_t^2 - b*e_beta^2  <=  beta*ln(l'/l) + (1-beta)*ln((1-l')/(1-l))

whenever the current weight l lies in [lambda_plus, 1 - lambda_plus].
The right side telescopes as a difference of divergences from (beta, 1-beta)
to the weight vector, which is what turns the per-step inequality into a
total-loss bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "TheoremConstants",
    "SufficiencyRoots",
    "RegretBound",
    "z_of",
    "constants_from_eps",
    "eps_from_mu",
    "mu_supremum",
    "constants_from_mu",
    "kl",
    "loss_factor",
    "per_step_margin",
    "per_step_margins",
    "sufficiency_roots",
    "regret_and_bound",
    "constant_identity_errors",
]


@dataclass(frozen=True)
class TheoremConstants:
    """The full constant set of the guarantee for one (eps, Y, lambda_plus)."""

    eps: float
    y_bound: float
    lambda_plus: float
    z: float
    a: float
    b: float
    s: float
    mu: float


def z_of(lambda_plus: float) -> float:
    """Contraction coefficient of the admissible weight range."""
    if not 0.0 < lambda_plus < 0.5:
        raise ValueError(f"weight floor must lie in (0, 1/2), got {lambda_plus}")
    k0 = lambda_plus * (1.0 - lambda_plus)
    return (1.0 - 4.0 * k0) / (1.0 + 4.0 * k0)


def constants_from_eps(eps: float, y_bound: float, lambda_plus: float) -> TheoremConstants:
    """Derive the whole constant set from the slack parameter."""
    if not (math.isfinite(eps) and eps > 0.0):
        raise ValueError(f"slack parameter must be finite and positive, got {eps}")
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")
    z = z_of(lambda_plus)
    y2 = y_bound * y_bound
    b = eps / y2
    a = (1.0 - z * z) * eps / (y2 * (2.0 * eps + 1.0))
    s = y2 / 2.0 + 1.0 / (4.0 * b)
    mu = (2.0 + 2.0 * z) / s
    c = TheoremConstants(eps=eps, y_bound=y_bound, lambda_plus=lambda_plus, z=z, a=a, b=b, s=s, mu=mu)
    bad = constant_identity_errors(c)
    if bad:
        raise ArithmeticError(f"derived constants violate their identities: {bad}")
    return c


def mu_supremum(y_bound: float, lambda_plus: float) -> float:
    """Least upper bound of learning rates reachable by some slack eps > 0."""
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")
    return 2.0 * (2.0 + 2.0 * z_of(lambda_plus)) / (y_bound * y_bound)


def eps_from_mu(mu: float, y_bound: float, lambda_plus: float) -> float:
    """Invert the eps -> mu map: eps = mu / (4*c - 2*mu), c = (2+2z)/Y^2."""
    sup = mu_supremum(y_bound, lambda_plus)
    if not (math.isfinite(mu) and 0.0 < mu < sup):
        raise ValueError(
            f"learning rate must lie in the open interval (0, {sup!r}) "
            f"for this cap and floor, got {mu}"
        )
    c = (2.0 + 2.0 * z_of(lambda_plus)) / (y_bound * y_bound)
    return mu / (4.0 * c - 2.0 * mu)


def constants_from_mu(mu: float, y_bound: float, lambda_plus: float) -> TheoremConstants:
    """Constant set whose learning rate matches ``mu``."""
    return constants_from_eps(eps_from_mu(mu, y_bound, lambda_plus), y_bound, lambda_plus)


def kl(u: Sequence[float], w: Sequence[float]) -> float:
    """Divergence between two-point weight vectors, in nats.

    Terms with u_i = 0 contribute nothing; w_i = 0 against u_i > 0 yields
    an infinite divergence.
    """
    if len(u) != 2 or len(w) != 2:
        raise ValueError("expected two-component weight vectors")
    u0, u1 = float(u[0]), float(u[1])
    w0, w1 = float(w[0]), float(w[1])
    for name, pair in (("first", (u0, u1)), ("second", (w0, w1))):
        if not all(0.0 <= x <= 1.0 for x in pair):
            raise ValueError(f"{name} vector has components outside [0, 1]: {pair}")
        if abs(pair[0] + pair[1] - 1.0) > 1e-12:
            raise ValueError(f"{name} vector does not sum to 1: {pair}")
    total = 0.0
    for ui, wi in ((u0, w0), (u1, w1)):
        if ui > 0.0:
            if wi <= 0.0:
                return math.inf
            total += ui * math.log(ui / wi)
    return max(total, 0.0)


def loss_factor(constants: TheoremConstants) -> float:
    """Multiplier applied to the hindsight loss in the regret definition."""
    return (2.0 * constants.eps + 1.0) / (1.0 - constants.z * constants.z)


def per_step_margin(
    constants: TheoremConstants,
    beta: float,
    lambda_t: float,
    lambda_t1: float,
    e_t: float,
    e_beta_t: float,
) -> float:
    """Slack of the per-step requirement; nonnegative means it held.

    margin = progress - (a*e_t^2 - b*e_beta^2) where progress is the log
    improvement of the weight pair toward (beta, 1-beta).
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"comparator weight must lie in [0, 1], got {beta}")
    for name, lam in (("current", lambda_t), ("updated", lambda_t1)):
        if not 0.0 < lam < 1.0:
            raise ValueError(f"{name} weight must lie strictly inside (0, 1), got {lam}")
    progress = beta * math.log(lambda_t1 / lambda_t) + (1.0 - beta) * math.log(
        (1.0 - lambda_t1) / (1.0 - lambda_t)
    )
    u = (beta, 1.0 - beta)
    via_kl = kl(u, (lambda_t, 1.0 - lambda_t)) - kl(u, (lambda_t1, 1.0 - lambda_t1))
    if abs(progress - via_kl) > 1e-12:
        raise ArithmeticError(
            f"log progress {progress} and divergence difference {via_kl} disagree"
        )
    return progress - (constants.a * e_t * e_t - constants.b * e_beta_t * e_beta_t)


def per_step_margins(
    constants: TheoremConstants,
    betas,
    lambda_t,
    lambda_t1,
    y,
    yhat1,
    yhat2,
) -> np.ndarray:
    """Vectorized margins, one row per comparator weight, one column per step.

    ``betas`` may be a vector of shared weights or a full (k, n) matrix of
    per-step weights.  All weight inputs must lie strictly inside (0, 1).
    """
    betas = np.asarray(betas, dtype=float)
    if betas.ndim == 1:
        betas = betas[:, None]
    l0 = np.asarray(lambda_t, dtype=float)[None, :]
    l1 = np.asarray(lambda_t1, dtype=float)[None, :]
    if np.any(l0 <= 0.0) or np.any(l0 >= 1.0) or np.any(l1 <= 0.0) or np.any(l1 >= 1.0):
        raise ValueError("weights must lie strictly inside (0, 1)")
    y = np.asarray(y, dtype=float)[None, :]
    y1 = np.asarray(yhat1, dtype=float)[None, :]
    y2 = np.asarray(yhat2, dtype=float)[None, :]
    progress = betas * np.log(l1 / l0) + (1.0 - betas) * np.log((1.0 - l1) / (1.0 - l0))
    e = y - (l0 * y1 + (1.0 - l0) * y2)
    e_b = y - (betas * y1 + (1.0 - betas) * y2)
    return progress - (constants.a * e * e - constants.b * e_b * e_b)


class SufficiencyRoots(NamedTuple):
    k1: float
    k2: float
    H: Callable[[float], float]
    k1_at_least_quarter: bool
    k2_within_floor: bool


def sufficiency_roots(constants: TheoremConstants, tol: float = 1e-12) -> SufficiencyRoots:
    """Roots of H(k) = k^2*mu^2*s - mu*k + a and the bracket checks.

    The per-step requirement holds whenever lam*(1-lam) lies between the
    roots, so the checks are k1 >= 1/4 (covers the midpoint) and
    k2 <= lambda_plus*(1-lambda_plus) (covers the floor).
    """
    a, mu, s = constants.a, constants.mu, constants.s
    disc = 1.0 - 4.0 * a * s
    if disc < 0.0:
        raise ValueError(
            f"discriminant 1 - 4*a*s = {disc} is negative; the constants are inconsistent"
        )
    root = math.sqrt(disc)
    k1 = (1.0 + root) / (2.0 * mu * s)
    k2 = (1.0 - root) / (2.0 * mu * s)

    def H(k: float) -> float:
        return k * k * mu * mu * s - mu * k + a

    k0 = constants.lambda_plus * (1.0 - constants.lambda_plus)
    return SufficiencyRoots(k1, k2, H, k1 >= 0.25 - tol, k2 <= k0 + tol)


class RegretBound(NamedTuple):
    regret: float
    bound_total: float
    bound_normalized: float


def regret_and_bound(
    l_alg: float,
    l_best: float,
    constants: TheoremConstants,
    n: int,
    lambda_init: float = 0.5,
    beta: float | None = None,
) -> RegretBound:
    """Regret against the inflated hindsight loss and its guarantee.

    The guarantee is (1/a) times the divergence from the comparator pair
    to the initial weight pair.  Without a comparator weight the worst
    case over beta in [0, 1] is used, which is attained at an endpoint;
    at lambda_init = 1/2 it equals ln(2)/a.
    """
    if l_alg < 0.0 or l_best < 0.0:
        raise ValueError("losses must be nonnegative")
    if n < 1:
        raise ValueError(f"horizon must be at least 1, got {n}")
    if not 0.0 < lambda_init < 1.0:
        raise ValueError(f"initial weight must lie strictly inside (0, 1), got {lambda_init}")
    regret = l_alg - loss_factor(constants) * l_best
    if beta is None:
        div = max(-math.log(lambda_init), -math.log(1.0 - lambda_init))
    else:
        div = kl((beta, 1.0 - beta), (lambda_init, 1.0 - lambda_init))
    bound_total = div / constants.a
    return RegretBound(regret, bound_total, bound_total / n)


def constant_identity_errors(constants: TheoremConstants, tol: float = 1e-12) -> list[str]:
    """Check every internal identity of a constant set; empty list means clean.

    Used defensively at construction time and by the verification CLI,
    where a deliberately perturbed constant must be caught.
    """
    c = constants
    y2 = c.y_bound * c.y_bound
    errors: list[str] = []

    def check(name: str, got: float, want: float):
        scale = max(1.0, abs(want))
        if abs(got - want) > tol * scale:
            errors.append(f"{name}: {got!r} != {want!r}")

    check("z", c.z, z_of(c.lambda_plus))
    check("b", c.b, c.eps / y2)
    check("a", c.a, (1.0 - c.z * c.z) * c.eps / (y2 * (2.0 * c.eps + 1.0)))
    check("s", c.s, y2 / 2.0 + 1.0 / (4.0 * c.b))
    check("mu", c.mu, (2.0 + 2.0 * c.z) / c.s)
    check("mu_alt", c.mu, (4.0 * c.eps / (2.0 * c.eps + 1.0)) * (2.0 + 2.0 * c.z) / y2)
    check("4as", 4.0 * c.a * c.s, 1.0 - c.z * c.z)
    disc = 1.0 - 4.0 * c.a * c.s
    if disc < 0.0:
        errors.append(f"discriminant: 1 - 4*a*s = {disc!r} is negative")
    else:
        check("sqrt(1-4as)", math.sqrt(disc), c.z)
    return errors
