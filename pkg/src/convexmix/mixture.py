"""Online convex combination of two expert predictors.

The combiner keeps a weight ``lam`` in (0, 1) and predicts
``yhat = lam*yhat1 + (1-lam)*yhat2``.  The weight is parameterized through
an auxiliary variable ``rho`` by the logistic map, and after each
observation ``rho`` moves along the stochastic gradient of the squared
prediction error:

    rho' = rho + mu * e * lam * (1-lam) * (yhat1 - yhat2)

An algebraically equivalent multiplicative update on ``lam`` itself is
provided for cross-checking; the two forms agree to floating-point noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericError",
    "SignalSample",
    "MixtureParams",
    "MixtureState",
    "StepRecord",
    "Trajectory",
    "logistic",
    "logit",
    "predict",
    "step",
    "multiplicative_lambda",
    "step_multiplicative",
    "state_from_lambda",
    "run",
]

MODES = ("monitor", "project")


class NumericError(ArithmeticError):
    """A non-finite value appeared while updating the combiner."""

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SignalSample:
    """One round of the stream: target ``y`` and the two expert outputs."""

    y: float
    yhat1: float
    yhat2: float


@dataclass(frozen=True)
class MixtureParams:
    """Run configuration: learning rate, weight floor, magnitude cap, mode.

    ``lambda_plus`` is the distance kept from the endpoints of (0, 1); the
    admissible weight range is [lambda_plus, 1 - lambda_plus].  ``monitor``
    mode applies the raw update and only flags range violations; ``project``
    mode clamps the weight back into range after each update.
    """

    mu: float
    lambda_plus: float
    y_bound: float
    mode: str = "monitor"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise ValueError(f"learning rate must be finite and positive, got {self.mu}")
        if not 0.0 < self.lambda_plus < 0.5:
            raise ValueError(f"weight floor must lie in (0, 1/2), got {self.lambda_plus}")
        if not (math.isfinite(self.y_bound) and self.y_bound > 0.0):
            raise ValueError(f"magnitude cap must be finite and positive, got {self.y_bound}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class MixtureState:
    """Combiner state before step ``t``; ``lam`` must equal logistic(rho)."""

    rho: float = 0.0
    lam: float = 0.5
    t: int = 1


@dataclass(frozen=True)
class StepRecord:
    """What happened at one step, before and after the update."""

    t: int
    lambda_before: float
    lambda_after: float
    yhat: float
    e: float
    in_range: bool
    projected: bool


def logistic(rho: float) -> float:
    """Map the auxiliary variable to a combination weight in (0, 1)."""
    if not math.isfinite(rho):
        raise ValueError(f"auxiliary variable must be finite, got {rho}")
    if rho >= 0.0:
        return 1.0 / (1.0 + math.exp(-rho))
    # mirrored form avoids overflow in exp for large negative arguments
    ex = math.exp(rho)
    return ex / (1.0 + ex)


def logit(lam: float) -> float:
    """Inverse of :func:`logistic`; defined on the open interval (0, 1)."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"weight must lie strictly inside (0, 1), got {lam}")
    return math.log(lam / (1.0 - lam))


def predict(lam: float, sample: SignalSample) -> float:
    """Convex combination of the two expert outputs under weight ``lam``."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"weight must lie strictly inside (0, 1), got {lam}")
    return lam * sample.yhat1 + (1.0 - lam) * sample.yhat2


def step(params: MixtureParams, state: MixtureState, sample: SignalSample) -> tuple[MixtureState, StepRecord]:
    """Advance the combiner by one observation.

    Returns the next state together with a record of the step.  The range
    flag refers to the weight that produced the prediction, i.e. the weight
    before the update.
    """
    lam = state.lam
    yhat = predict(lam, sample)
    e = sample.y - yhat
    rho_new = state.rho + params.mu * e * lam * (1.0 - lam) * (sample.yhat1 - sample.yhat2)
    if not math.isfinite(rho_new):
        raise NumericError("auxiliary variable became non-finite", step=state.t)
    lam_new = logistic(rho_new)
    projected = False
    if params.mode == "project":
        lo = params.lambda_plus
        hi = 1.0 - params.lambda_plus
        if lam_new < lo:
            lam_new, rho_new, projected = lo, logit(lo), True
        elif lam_new > hi:
            lam_new, rho_new, projected = hi, logit(hi), True
    in_range = params.lambda_plus <= lam <= 1.0 - params.lambda_plus
    record = StepRecord(
        t=state.t,
        lambda_before=lam,
        lambda_after=lam_new,
        yhat=yhat,
        e=e,
        in_range=in_range,
        projected=projected,
    )
    return MixtureState(rho=rho_new, lam=lam_new, t=state.t + 1), record


def multiplicative_lambda(mu: float, lam: float, sample: SignalSample) -> float:
    """Weight after one multiplicative update, equivalent to :func:`step`.

    With m = mu * e * lam * (1-lam), the next weight is

        lam' = lam * exp(m*yhat1) / (lam * exp(m*yhat1) + (1-lam) * exp(m*yhat2))

    computed with the largest exponent subtracted for stability.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError(f"weight must lie strictly inside (0, 1), got {lam}")
    e = sample.y - (lam * sample.yhat1 + (1.0 - lam) * sample.yhat2)
    m = mu * e * lam * (1.0 - lam)
    g1 = m * sample.yhat1
    g2 = m * sample.yhat2
    top = max(g1, g2)
    num = lam * math.exp(g1 - top)
    den = num + (1.0 - lam) * math.exp(g2 - top)
    out = num / den
    # saturation at 0 or 1 (exponent underflow) breaks downstream logs
    if not 0.0 < out < 1.0:
        raise NumericError(f"multiplicative update degenerated to {out}")
    return out


def step_multiplicative(params: MixtureParams, lam: float, sample: SignalSample) -> float:
    """Convenience wrapper over :func:`multiplicative_lambda`."""
    return multiplicative_lambda(params.mu, lam, sample)


def state_from_lambda(lam: float, t: int = 1) -> MixtureState:
    """Build a consistent state whose weight is ``lam``."""
    return MixtureState(rho=logit(lam), lam=lam, t=t)


@dataclass
class Trajectory:
    """Full record of a run: inputs, per-step records, running loss.

    ``rho`` holds the auxiliary variable at the start of each step and
    ``final_state`` the state after the last update, so the weight path
    lambda_1, ..., lambda_{n+1} is available in full.
    """

    samples: list[SignalSample]
    records: list[StepRecord]
    cum_loss: np.ndarray
    rho: np.ndarray
    final_state: MixtureState

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total_loss(self) -> float:
        return float(self.cum_loss[-1])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([r.lambda_before for r in self.records])

    @property
    def lambdas_after(self) -> np.ndarray:
        return np.array([r.lambda_after for r in self.records])

    @property
    def predictions(self) -> np.ndarray:
        return np.array([r.yhat for r in self.records])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.e for r in self.records])

    @property
    def in_range(self) -> np.ndarray:
        return np.array([r.in_range for r in self.records], dtype=bool)

    @property
    def projected(self) -> np.ndarray:
        return np.array([r.projected for r in self.records], dtype=bool)


def _check_samples(samples, y_bound: float):
    for i, s in enumerate(samples):
        for name in ("y", "yhat1", "yhat2"):
            v = getattr(s, name)
            if not math.isfinite(v):
                raise ValueError(f"sample {i + 1}: field {name} is not finite ({v})")
            if abs(v) > y_bound:
                raise ValueError(
                    f"sample {i + 1}: field {name} = {v} exceeds the magnitude cap {y_bound}"
                )


def run(params: MixtureParams, samples, initial_state: MixtureState | None = None) -> Trajectory:
    """Run the combiner over a whole sequence.

    All sample fields must already lie within ``params.y_bound`` in absolute
    value; out-of-cap inputs are rejected rather than silently clipped.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("sequence must be non-empty")
    _check_samples(samples, params.y_bound)
    state = initial_state if initial_state is not None else MixtureState()
    if abs(state.lam - logistic(state.rho)) > 1e-12:
        raise ValueError("initial state is inconsistent: lam must equal logistic(rho)")

    n = len(samples)
    records = []
    cum = np.empty(n)
    rho = np.empty(n)
    total = 0.0
    for i, sample in enumerate(samples):
        rho[i] = state.rho
        state, rec = step(params, state, sample)
        records.append(rec)
        total += rec.e * rec.e
        cum[i] = total
    return Trajectory(samples=samples, records=records, cum_loss=cum, rho=rho, final_state=state)
