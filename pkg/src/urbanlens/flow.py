"""Passenger-flow forecasting for station count series.

Method: a blend of seasonal-naive and trailing moving average,
y_hat[t+h] = (1-alpha) * y[t+h-P] + alpha * mean(last k observed values),
with seasonal lags that land in the future resolved against already
forecast values, and outputs clamped at zero. alpha=0 is exactly seasonal
naive; alpha=1 is exactly the trailing moving average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta

from urbanlens.errors import InvalidArgumentError

WEEK = timedelta(days=7)


@dataclass(frozen=True, slots=True)
class FlowSeries:
    station_id: str
    start: datetime
    interval: timedelta
    counts: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.counts, tuple):
            object.__setattr__(self, "counts", tuple(float(c) for c in self.counts))
        if self.interval <= timedelta(0):
            raise InvalidArgumentError("interval must be positive")
        for c in self.counts:
            if not math.isfinite(c) or c < 0:
                raise InvalidArgumentError(f"counts must be finite and >= 0, got {c}")

    def default_period(self) -> int:
        """One week expressed in steps of this series' interval (at least 1)."""
        return max(1, round(WEEK / self.interval))


@dataclass(frozen=True, slots=True)
class Forecast:
    station_id: str
    horizon: int
    predicted: tuple[float, ...]
    method_tag: str


def forecast(series: FlowSeries, horizon: int,
             period: int | None = None, alpha: float = 0.3,
             k: int | None = None) -> Forecast:
    """Forecast `horizon` steps ahead with the seasonal/moving-average blend.

    Series shorter than one period fall back to the moving average alone
    (alpha treated as 1).
    """
    if not series.counts:
        raise InvalidArgumentError("cannot forecast an empty series")
    if horizon < 1:
        raise InvalidArgumentError("horizon must be at least 1")
    if period is None:
        period = series.default_period()
    if period <= 0:
        raise InvalidArgumentError("period must be positive")
    if k is None:
        k = period
    if k <= 0:
        raise InvalidArgumentError("k must be positive")
    if not (0.0 <= alpha <= 1.0):
        raise InvalidArgumentError("alpha must be in [0, 1]")

    values = series.counts
    n = len(values)
    effective_alpha = alpha
    tag = f"seasonal_ma_blend(P={period},alpha={alpha},k={k})"
    if n < period:
        effective_alpha = 1.0
        tag = f"moving_average(k={k}); series shorter than period {period}"

    tail = values[-min(k, n):]
    moving_avg = sum(tail) / len(tail)

    predicted: list[float] = []
    for h in range(1, horizon + 1):
        lag_idx = n + h - 1 - period
        if effective_alpha >= 1.0:
            seasonal = 0.0  # unused: pure moving average
            value = moving_avg
        else:
            seasonal = values[lag_idx] if lag_idx < n else predicted[lag_idx - n]
            value = (1.0 - effective_alpha) * seasonal + effective_alpha * moving_avg
        predicted.append(max(0.0, value))

    return Forecast(
        station_id=series.station_id, horizon=horizon,
        predicted=tuple(predicted), method_tag=tag,
    )


def backtest(series: FlowSeries, horizon_params: dict | None = None,
             holdout: int = 1) -> float:
    """Mean absolute error of forecasting the held-out tail from the prefix."""
    params = horizon_params or {}
    if holdout < 1:
        raise InvalidArgumentError("holdout must be at least 1")
    if holdout >= len(series.counts):
        raise InvalidArgumentError(
            f"holdout {holdout} must be smaller than the series length {len(series.counts)}"
        )
    train = FlowSeries(
        station_id=series.station_id, start=series.start,
        interval=series.interval, counts=series.counts[:-holdout],
    )
    fc = forecast(train, horizon=holdout, **params)
    actual = series.counts[-holdout:]
    return sum(abs(p - a) for p, a in zip(fc.predicted, actual)) / holdout
