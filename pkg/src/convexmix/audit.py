"""Stress tests for the per-step progress requirement.

A constant triple (a, b, mu) only supports the guarantee if the per-step
inequality

    a*e^2 - b*e_beta^2  <=  beta*ln(l'/l) + (1-beta)*ln((1-l')/(1-l))

survives the worst admissible instance (y, yhat1, yhat2, lam, beta).  This
module evaluates two closed-form worst-case candidates exactly, reports the
classical lower bounds associated with them, and searches a structured grid
plus random draws for counterexamples to arbitrary triples.  Exact
evaluation is authoritative; the closed-form b bounds are conservative (see
:func:`lemma_bounds`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .mixture import SignalSample, multiplicative_lambda

__all__ = [
    "AuditInstance",
    "AuditReport",
    "LemmaBounds",
    "lemma_bounds",
    "construction_instances",
    "evaluate_instance",
    "search_violations",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class AuditInstance:
    """One candidate worst case: a sample, a current weight, a comparator."""

    y: float
    yhat1: float
    yhat2: float
    lambda_t: float
    beta: float


@dataclass(frozen=True)
class AuditReport:
    """Exact evaluation of the requirement at one instance."""

    lhs: float
    progress: float
    margin: float
    violated: bool


class LemmaBounds(NamedTuple):
    mu_min: float
    b_min_via_mu: float
    b_min_combined: float


def lemma_bounds(a: float, mu: float, lambda_plus: float) -> LemmaBounds:
    """Closed-form lower bounds associated with the two constructions.

    The floor-weight construction genuinely forces mu >= a / k0 with
    k0 = lambda_plus*(1-lambda_plus): its progress is capped by
    mu*k0*(1-lambda_plus)^2*Y^2 while the loss side charges
    a*(1-lambda_plus)^2*Y^2.  The b figures — 4*a + mu/4 from a linearized
    reading of the midpoint construction, and 4*a + a/(4*k0) after
    substituting the mu bound — are conservative: exact evaluation of that
    instance (its progress is positive, not negative) admits smaller b, and
    the search confirms triples below these figures can still hold
    everywhere.  They are reported for reference, not enforced.
    """
    if not (a > 0.0 and mu > 0.0):
        raise ValueError(f"a and mu must be positive, got a={a}, mu={mu}")
    if not 0.0 < lambda_plus < 0.5:
        raise ValueError(f"weight floor must lie in (0, 1/2), got {lambda_plus}")
    k0 = lambda_plus * (1.0 - lambda_plus)
    return LemmaBounds(a / k0, 4.0 * a + mu / 4.0, 4.0 * a + a / (4.0 * k0))


def construction_instances(y_bound: float, lambda_plus: float) -> tuple[AuditInstance, AuditInstance]:
    """The two closed-form worst-case candidates.

    First: target and expert 1 at the cap, expert 2 silent, weight at the
    floor, comparator fully on expert 1.  Second: target at -Y/2 between a
    silent expert 1 and expert 2 at the cap, weight at the midpoint,
    comparator fully on expert 1.
    """
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")
    if not 0.0 < lambda_plus < 0.5:
        raise ValueError(f"weight floor must lie in (0, 1/2), got {lambda_plus}")
    first = AuditInstance(y=y_bound, yhat1=y_bound, yhat2=0.0, lambda_t=lambda_plus, beta=1.0)
    second = AuditInstance(y=-y_bound / 2.0, yhat1=0.0, yhat2=y_bound, lambda_t=0.5, beta=1.0)
    return first, second


def evaluate_instance(
    a: float, b: float, mu: float, instance: AuditInstance, tol: float = DEFAULT_TOL
) -> AuditReport:
    """Evaluate the requirement exactly at one instance.

    The updated weight comes from the true multiplicative update, not from
    any bound on it, so a reported violation is a genuine counterexample.
    """
    lam = instance.lambda_t
    beta = instance.beta
    if not 0.0 < lam < 1.0:
        raise ValueError(f"current weight must lie strictly inside (0, 1), got {lam}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"comparator weight must lie in [0, 1], got {beta}")
    sample = SignalSample(instance.y, instance.yhat1, instance.yhat2)
    lam1 = multiplicative_lambda(mu, lam, sample)
    e = instance.y - (lam * instance.yhat1 + (1.0 - lam) * instance.yhat2)
    e_beta = instance.y - (beta * instance.yhat1 + (1.0 - beta) * instance.yhat2)
    progress = beta * math.log(lam1 / lam) + (1.0 - beta) * math.log((1.0 - lam1) / (1.0 - lam))
    lhs = a * e * e - b * e_beta * e_beta
    margin = progress - lhs
    return AuditReport(lhs=lhs, progress=progress, margin=margin, violated=margin < -tol)


def _grid_instances(y_bound: float, lambda_plus: float):
    levels = (-y_bound, -y_bound / 2.0, 0.0, y_bound / 2.0, y_bound)
    lams = (lambda_plus, 0.25, 0.5, 0.75, 1.0 - lambda_plus)
    betas = (0.0, 0.5, 1.0)
    for y, y1, y2, lam, beta in itertools.product(levels, levels, levels, lams, betas):
        yield AuditInstance(y=y, yhat1=y1, yhat2=y2, lambda_t=lam, beta=beta)


def search_violations(
    a: float,
    b: float,
    mu: float,
    lambda_plus: float,
    y_bound: float,
    budget: int,
    seed: int,
    tol: float = DEFAULT_TOL,
) -> list[tuple[AuditInstance, AuditReport]]:
    """Look for counterexamples to the requirement under (a, b, mu).

    Evaluates a structured grid first (level sets of the signals, the floor
    and midpoint weights, endpoint and midpoint comparators), then fills the
    remaining budget with seeded uniform draws.  Fully deterministic for a
    fixed seed.  Returns violating instances sorted worst first.
    """
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    if not (a > 0.0 and b > 0.0 and mu > 0.0):
        raise ValueError(f"a, b, mu must be positive, got a={a}, b={b}, mu={mu}")
    if not 0.0 < lambda_plus < 0.5:
        raise ValueError(f"weight floor must lie in (0, 1/2), got {lambda_plus}")
    if not (math.isfinite(y_bound) and y_bound > 0.0):
        raise ValueError(f"magnitude cap must be finite and positive, got {y_bound}")

    grid = list(itertools.islice(_grid_instances(y_bound, lambda_plus), budget))
    ys = [g.y for g in grid]
    y1s = [g.yhat1 for g in grid]
    y2s = [g.yhat2 for g in grid]
    lams = [g.lambda_t for g in grid]
    betas = [g.beta for g in grid]

    fill = budget - len(grid)
    if fill > 0:
        rng = np.random.default_rng(seed)
        ys.extend(rng.uniform(-y_bound, y_bound, fill))
        y1s.extend(rng.uniform(-y_bound, y_bound, fill))
        y2s.extend(rng.uniform(-y_bound, y_bound, fill))
        lams.extend(rng.uniform(lambda_plus, 1.0 - lambda_plus, fill))
        betas.extend(rng.uniform(0.0, 1.0, fill))

    y = np.array(ys)
    y1 = np.array(y1s)
    y2 = np.array(y2s)
    lam = np.array(lams)
    beta = np.array(betas)

    e = y - (lam * y1 + (1.0 - lam) * y2)
    m = mu * e * lam * (1.0 - lam)
    g1 = m * y1
    g2 = m * y2
    top = np.maximum(g1, g2)
    num = lam * np.exp(g1 - top)
    lam1 = num / (num + (1.0 - lam) * np.exp(g2 - top))
    if np.any(~np.isfinite(lam1)) or np.any(lam1 <= 0.0) or np.any(lam1 >= 1.0):
        raise ArithmeticError("an updated weight saturated during the search; mu too extreme")
    progress = beta * np.log(lam1 / lam) + (1.0 - beta) * np.log((1.0 - lam1) / (1.0 - lam))
    e_beta = y - (beta * y1 + (1.0 - beta) * y2)
    lhs = a * e * e - b * e_beta * e_beta
    margin = progress - lhs

    hits = np.flatnonzero(margin < -tol)
    found = []
    for i in hits:
        inst = AuditInstance(
            y=float(y[i]), yhat1=float(y1[i]), yhat2=float(y2[i]),
            lambda_t=float(lam[i]), beta=float(beta[i]),
        )
        rep = AuditReport(
            lhs=float(lhs[i]), progress=float(progress[i]),
            margin=float(margin[i]), violated=True,
        )
        found.append((inst, rep))
    found.sort(key=lambda pair: (pair[1].margin, pair[0].y, pair[0].yhat1, pair[0].yhat2,
                                 pair[0].lambda_t, pair[0].beta))
    return found
