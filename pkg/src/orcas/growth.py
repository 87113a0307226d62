"""Per-class failure-rate estimation.

Two estimators are provided. The bounded estimator divides per-class
defect counts by total testing effort; it is conservative and needs no
event timeline. The growth estimator fits a nonhomogeneous Poisson
process to the per-class detection-effort history:

  exponential model      m(t) = a * (1 - exp(-b*t))
  logarithmic model      m(t) = ln(lambda0*theta*t + 1) / theta

and reads the class rate as the fitted intensity m'(t) at the assessment
horizon. Fit trustworthiness is gauged by the stability rule: successive
refits over expanding windows must not move the predicted total by more
than 10% (default).

Maximum likelihood is computed by profiling the likelihood down to one
dimension and solving the resulting score equation with a safeguarded
Newton/bisection iteration on a bracketed root; the second parameter then
follows in closed form. This is deterministic: the same events always
produce bit-identical parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .domain import (
    DefectClass,
    DefectRecord,
    EffortModel,
    RateUnit,
    count_by_class,
    total_effort,
)
from .errors import OrcasError
from .roots import newton_bisection


class RateMethod(str, Enum):
    BOUNDED = "bounded"
    SRGM = "srgm"


class SrgmModel(str, Enum):
    GOEL_OKUMOTO = "goel-okumoto"
    MUSA_OKUMOTO = "musa-okumoto"


DEFAULT_STABILITY_THRESHOLD = 0.10


@dataclass(frozen=True)
class ClassRates:
    """Per-class failure rates, one entry for every defect class."""

    rates: Mapping[DefectClass, float]
    unit: RateUnit
    method: RateMethod

    def __post_init__(self) -> None:
        rates = {}
        for cls in DefectClass:
            value = float(self.rates.get(cls, 0.0))
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"rate for {cls.value} must be finite and >= 0, got {value!r}")
            rates[cls] = value
        object.__setattr__(self, "rates", rates)

    def __getitem__(self, cls: DefectClass) -> float:
        return self.rates[cls]

    def nonzero_classes(self) -> tuple[DefectClass, ...]:
        return tuple(sorted((c for c, r in self.rates.items() if r > 0.0), key=lambda c: c.value))

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "unit": self.unit.value,
            "per_class": {cls.value: self.rates[cls] for cls in sorted(DefectClass, key=lambda c: c.value)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassRates":
        return cls(
            rates={DefectClass(k): v for k, v in data["per_class"].items()},
            unit=RateUnit(data["unit"]),
            method=RateMethod(data["method"]),
        )


@dataclass(frozen=True)
class SrgmFit:
    """A fitted growth model.

    ``params`` holds {"a", "b"} for the exponential model and
    {"lambda0", "theta"} for the logarithmic one. ``predicted_total`` is
    the expected number of defects ever (infinite for the logarithmic
    model, whose mean function is unbounded). An unconverged fit carries
    the boundary parameters the likelihood climbed toward plus a
    ``diagnostic`` explaining why no interior optimum exists; unconverged
    parameters must never be used as point estimates.
    """

    model: SrgmModel
    params: Mapping[str, float]
    predicted_total: float
    current_intensity: float
    log_likelihood: float
    converged: bool
    diagnostic: str | None = None

    def mean_at(self, t: float) -> float:
        if self.model is SrgmModel.GOEL_OKUMOTO:
            return go_mean(t, self.params["a"], self.params["b"])
        return mo_mean(t, self.params["lambda0"], self.params["theta"])

    def intensity_at(self, t: float) -> float:
        if self.model is SrgmModel.GOEL_OKUMOTO:
            return go_intensity(t, self.params["a"], self.params["b"])
        return mo_intensity(t, self.params["lambda0"], self.params["theta"])

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "predicted_total": self.predicted_total,
            "current_intensity": self.current_intensity,
            "log_likelihood": self.log_likelihood,
            "converged": self.converged,
            "diagnostic": self.diagnostic,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SrgmFit":
        return cls(
            model=SrgmModel(data["model"]),
            params=dict(data["params"]),
            predicted_total=float(data["predicted_total"]),
            current_intensity=float(data["current_intensity"]),
            log_likelihood=float(data["log_likelihood"]),
            converged=bool(data["converged"]),
            diagnostic=data.get("diagnostic"),
        )


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the refit-stability check.

    ``series`` pairs each window end with that window's predicted total;
    ``stable`` holds iff no consecutive relative step exceeds the
    threshold.
    """

    series: tuple[tuple[float, float], ...]
    max_relative_step: float
    stable: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "series": [[end, total] for end, total in self.series],
            "max_relative_step": self.max_relative_step,
            "stable": self.stable,
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StabilityVerdict":
        return cls(
            series=tuple((float(e), float(t)) for e, t in data["series"]),
            max_relative_step=float(data["max_relative_step"]),
            stable=bool(data["stable"]),
            threshold=float(data["threshold"]),
        )


# ---------------------------------------------------------------------------
# Bounded estimation
# ---------------------------------------------------------------------------


def bounded_class_rates(defects: Iterable[DefectRecord], effort: EffortModel) -> ClassRates:
    """Defect count per class divided by total testing effort.

    Classes with no detected defects get rate 0: more testing effort can
    only lower these rates, never raise them.
    """
    effort_total = total_effort(effort)
    if effort_total <= 0:
        raise OrcasError(f"total testing effort must be positive, got {effort_total!r}")
    counts = count_by_class(defects)
    return ClassRates(
        rates={cls: count / effort_total for cls, count in counts.items()},
        unit=effort.rate_unit,
        method=RateMethod.BOUNDED,
    )


# ---------------------------------------------------------------------------
# Model functions
# ---------------------------------------------------------------------------


def go_mean(t: float, a: float, b: float) -> float:
    """Exponential-model mean: m(t) = a*(1 - exp(-b*t))."""
    return a * -math.expm1(-b * t)


def go_intensity(t: float, a: float, b: float) -> float:
    """Exponential-model intensity: m'(t) = a*b*exp(-b*t)."""
    return a * b * math.exp(-b * t)


def mo_mean(t: float, lambda0: float, theta: float) -> float:
    """Logarithmic-model mean: m(t) = ln(lambda0*theta*t + 1)/theta."""
    return math.log1p(lambda0 * theta * t) / theta


def mo_intensity(t: float, lambda0: float, theta: float) -> float:
    """Logarithmic-model intensity: m'(t) = lambda0/(lambda0*theta*t + 1)."""
    return lambda0 / (lambda0 * theta * t + 1.0)


def go_log_likelihood(events: Sequence[float], horizon: float, a: float, b: float) -> float:
    """Exact event-time log-likelihood of the exponential model:
    sum(ln(a*b*exp(-b*t_i))) - m(horizon)."""
    if a <= 0 or b <= 0:
        raise ValueError("parameters must be positive")
    n = len(events)
    return n * math.log(a * b) - b * math.fsum(events) - go_mean(horizon, a, b)


def go_gradient(events: Sequence[float], horizon: float, a: float, b: float) -> tuple[float, float]:
    """Analytic gradient of :func:`go_log_likelihood` in (a, b)."""
    n = len(events)
    d_a = n / a + math.expm1(-b * horizon)
    d_b = n / b - math.fsum(events) - a * horizon * math.exp(-b * horizon)
    return (d_a, d_b)


def mo_log_likelihood(events: Sequence[float], horizon: float, lambda0: float, theta: float) -> float:
    """Exact event-time log-likelihood of the logarithmic model."""
    if lambda0 <= 0 or theta <= 0:
        raise ValueError("parameters must be positive")
    n = len(events)
    beta = lambda0 * theta
    return (
        n * math.log(lambda0)
        - math.fsum(math.log1p(beta * t) for t in events)
        - mo_mean(horizon, lambda0, theta)
    )


# ---------------------------------------------------------------------------
# Maximum-likelihood fitting
# ---------------------------------------------------------------------------

# Lower edge of the root bracket, relative to 1/horizon. Below this the
# mean function is numerically indistinguishable from a straight line.
_BRACKET_FLOOR = 1e-12
_BOUNDARY_RATE = 1e-9


def _validate_events(events: Sequence[float], horizon: float | None) -> tuple[list[float], float]:
    events = [float(t) for t in events]
    if len(events) < 2:
        raise OrcasError("insufficient failure data: at least 2 detection events are required")
    previous = 0.0
    for t in events:
        if not math.isfinite(t) or t <= 0.0:
            raise OrcasError(f"detection efforts must be positive and finite, got {t!r}")
        if t < previous:
            raise OrcasError("detection efforts must be nondecreasing")
        previous = t
    if horizon is None:
        horizon = events[-1]
    horizon = float(horizon)
    if horizon < events[-1]:
        raise OrcasError(f"observation horizon {horizon!r} is before the last event {events[-1]!r}")
    return events, horizon


def _no_growth_diagnostic(n: int, total: float, horizon: float) -> str:
    return (
        f"no reliability growth in the event history: mean detection effort "
        f"{total / n:.6g} is not below half the horizon {horizon / 2:.6g}, so the "
        f"likelihood has no interior maximum (constant-rate limit); collect more "
        f"data or use bounded estimation"
    )


def _fit_go(events: list[float], horizon: float) -> SrgmFit:
    n = len(events)
    effort_sum = math.fsum(events)
    T = horizon

    def score(b: float) -> float:
        # Profile score equation in b after substituting a = n/(1 - exp(-bT)).
        # Past bT ~ 700 the expm1 term underflows the sum anyway; skip it
        # instead of overflowing.
        bt = b * T
        tail = n * T / math.expm1(bt) if bt < 700.0 else 0.0
        return n / b - effort_sum - tail

    def score_prime(b: float) -> float:
        bt = b * T
        if bt >= 700.0:
            return -n / (b * b)
        e = math.expm1(bt)
        return -n / (b * b) + n * T * T * math.exp(bt) / (e * e)

    lo = _BRACKET_FLOOR / T
    if n * T / 2.0 - effort_sum <= 0.0 or score(lo) <= 0.0:
        b0 = _BOUNDARY_RATE / T
        a0 = n / -math.expm1(-b0 * T)
        return SrgmFit(
            model=SrgmModel.GOEL_OKUMOTO,
            params={"a": a0, "b": b0},
            predicted_total=a0,
            current_intensity=go_intensity(T, a0, b0),
            log_likelihood=go_log_likelihood(events, T, a0, b0),
            converged=False,
            diagnostic=_no_growth_diagnostic(n, effort_sum, T),
        )
    hi = 1.0 / T
    while score(hi) > 0.0:
        hi *= 2.0
    b = newton_bisection(score, score_prime, lo, hi)
    a = n / -math.expm1(-b * T)
    return SrgmFit(
        model=SrgmModel.GOEL_OKUMOTO,
        params={"a": a, "b": b},
        predicted_total=a,
        current_intensity=go_intensity(T, a, b),
        log_likelihood=go_log_likelihood(events, T, a, b),
        converged=True,
    )


def _fit_mo(events: list[float], horizon: float) -> SrgmFit:
    n = len(events)
    effort_sum = math.fsum(events)
    T = horizon

    def score(beta: float) -> float:
        # Profile score in beta = lambda0*theta after substituting
        # lambda0 = n*beta/ln(beta*T + 1).
        u = math.log1p(beta * T)
        return n / beta - n * T / ((beta * T + 1.0) * u) - math.fsum(t / (beta * t + 1.0) for t in events)

    def score_prime(beta: float) -> float:
        u = beta * T + 1.0
        lu = math.log1p(beta * T)
        return (
            -n / (beta * beta)
            + n * T * T * (lu + 1.0) / (u * lu) ** 2
            + math.fsum((t / (beta * t + 1.0)) ** 2 for t in events)
        )

    lo = _BRACKET_FLOOR / T
    if n * T / 2.0 - effort_sum <= 0.0 or score(lo) <= 0.0:
        beta0 = _BOUNDARY_RATE / T
        lambda0 = n * beta0 / math.log1p(beta0 * T)
        theta0 = math.log1p(beta0 * T) / n
        return SrgmFit(
            model=SrgmModel.MUSA_OKUMOTO,
            params={"lambda0": lambda0, "theta": theta0},
            predicted_total=math.inf,
            current_intensity=mo_intensity(T, lambda0, theta0),
            log_likelihood=mo_log_likelihood(events, T, lambda0, theta0),
            converged=False,
            diagnostic=_no_growth_diagnostic(n, effort_sum, T),
        )
    hi = 1.0 / T
    while score(hi) > 0.0:
        hi *= 2.0
    beta = newton_bisection(score, score_prime, lo, hi)
    lambda0 = n * beta / math.log1p(beta * T)
    theta = math.log1p(beta * T) / n
    return SrgmFit(
        model=SrgmModel.MUSA_OKUMOTO,
        params={"lambda0": lambda0, "theta": theta},
        predicted_total=math.inf,
        current_intensity=mo_intensity(T, lambda0, theta),
        log_likelihood=mo_log_likelihood(events, T, lambda0, theta),
        converged=True,
    )


def fit_srgm(events: Sequence[float], model: SrgmModel, horizon: float | None = None) -> SrgmFit:
    """Maximum-likelihood fit to an ordered detection-effort history.

    ``horizon`` is the total observed effort and defaults to the last
    event. When the history shows no growth signal (events not
    front-loaded), the score equation has no root: the returned fit has
    ``converged=False`` and a diagnostic instead of a fabricated optimum.
    """
    events, horizon = _validate_events(events, horizon)
    if model is SrgmModel.GOEL_OKUMOTO:
        return _fit_go(events, horizon)
    if model is SrgmModel.MUSA_OKUMOTO:
        return _fit_mo(events, horizon)
    raise OrcasError(f"unknown growth model {model!r}")


# ---------------------------------------------------------------------------
# Stability and rate extraction
# ---------------------------------------------------------------------------


def stability(
    series: Sequence[tuple[float, float]],
    threshold: float = DEFAULT_STABILITY_THRESHOLD,
) -> StabilityVerdict:
    """Check consecutive predicted totals for jumps beyond ``threshold``.

    ``series`` pairs each refit's window-end effort with its predicted
    total. Step size is |delta| / previous total; a zero previous total
    makes any nonzero step infinite.
    """
    pairs = [(float(end), float(total)) for end, total in series]
    if len(pairs) < 2:
        raise OrcasError("stability needs at least 2 fits")
    if threshold < 0:
        raise OrcasError(f"stability threshold must be >= 0, got {threshold!r}")
    previous_end = -math.inf
    for end, total in pairs:
        if end <= previous_end:
            raise OrcasError("stability window ends must be strictly increasing")
        if not math.isfinite(total):
            raise OrcasError(
                f"predicted total {total!r} in the stability series is not finite; "
                f"unbounded-model fits have no finite total to track"
            )
        previous_end = end
    max_step = 0.0
    for (_, prev), (_, cur) in zip(pairs, pairs[1:]):
        if prev == 0.0:
            step = 0.0 if cur == 0.0 else math.inf
        else:
            step = abs(cur - prev) / prev
        max_step = max(max_step, step)
    return StabilityVerdict(
        series=tuple(pairs),
        max_relative_step=max_step,
        stable=max_step <= threshold,
        threshold=float(threshold),
    )


def srgm_class_rates(
    per_class_fits: Mapping[DefectClass, SrgmFit],
    horizon: float,
    unit: RateUnit,
) -> ClassRates:
    """Per-class rates from fitted models: the instantaneous fitted
    intensity m'(horizon), i.e. the residual defect-manifestation rate at
    the assessment horizon. Classes without a fit get rate 0."""
    rates: dict[DefectClass, float] = {cls: 0.0 for cls in DefectClass}
    for cls, fit in per_class_fits.items():
        if not fit.converged:
            raise OrcasError(
                f"growth fit for class '{cls.value}' did not converge; "
                f"use bounded estimation for this dataset"
            )
        rates[cls] = fit.intensity_at(horizon)
    return ClassRates(rates=rates, unit=unit, method=RateMethod.SRGM)


def windowed_srgm_stability(
    events: Sequence[float],
    model: SrgmModel,
    horizon: float,
    windows: int,
    threshold: float = DEFAULT_STABILITY_THRESHOLD,
) -> tuple[StabilityVerdict, list[tuple[float, SrgmFit]]]:
    """Refit over expanding effort windows and run the stability check.

    Window k ends at k/windows of the horizon and uses every event up to
    that point. The tracked prediction is the expected total defect count:
    the asymptote for the exponential model, and the mean function
    evaluated at the full horizon for the unbounded logarithmic model.
    """
    if windows < 2:
        raise OrcasError(f"stability needs at least 2 windows, got {windows}")
    events, horizon = _validate_events(events, horizon)
    window_fits: list[tuple[float, SrgmFit]] = []
    series: list[tuple[float, float]] = []
    for k in range(1, windows + 1):
        end = horizon * k / windows
        prefix = [t for t in events if t <= end]
        if len(prefix) < 2:
            raise OrcasError(
                f"stability window ending at effort {end:.6g} contains "
                f"{len(prefix)} event(s); need at least 2 (reduce the window "
                f"count or use bounded estimation)"
            )
        fit = fit_srgm(prefix, model, horizon=end)
        if model is SrgmModel.GOEL_OKUMOTO:
            predicted = fit.predicted_total
        else:
            predicted = fit.mean_at(horizon)
        window_fits.append((end, fit))
        series.append((end, predicted))
    return stability(series, threshold), window_fits
