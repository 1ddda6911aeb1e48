"""Higher-order sample statistics on real series.

Everything here uses the biased convention: sums are truncated to the indices
that fall inside the record and divided by the full length N regardless of
lag.  Negative lags are allowed throughout; for the second order this makes
``autocorr_biased(y, -lag)`` numerically identical to ``autocorr_biased(y,
lag)`` (the two sums contain the same products in the same order).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SHORT_RECORD = 200  # below this the Gaussianity of multicarrier data degrades


def as_real_series(values) -> np.ndarray:
    """Validate and return a 1-D float64 view of a real series."""
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("series must be 1-D with at least 2 samples")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    return y


def demean(series) -> np.ndarray:
    """Subtract the sample mean."""
    y = as_real_series(series)
    return y - y.mean()


def autocorr_biased(series, lag: int) -> float:
    """Biased autocorrelation estimate ``(1/N) * sum y(i) y(i+lag)``."""
    y = as_real_series(series)
    n = y.size
    k = abs(int(lag))
    if k >= n:
        raise ValueError("|lag| must be < series length")
    return float(np.dot(y[: n - k], y[k:]) / n)


def moment_est(series, lags: Sequence[int]) -> float:
    """Biased joint-moment estimate of order ``len(lags) + 1``.

    ``(1/N) * sum_t y(t) * prod_u y(t + lag_u)`` over every t for which all
    shifted indices stay inside the record; lags may be negative.
    """
    y = as_real_series(series)
    n = y.size
    lags = [int(l) for l in lags]
    if any(abs(l) >= n for l in lags):
        raise ValueError("every |lag| must be < series length")
    lo = min(0, *lags) if lags else 0
    hi = max(0, *lags) if lags else 0
    start, stop = -lo, n - hi
    if stop <= start:
        return 0.0
    acc = y[start:stop].copy()
    for l in lags:
        acc *= y[start + l : stop + l]
    return float(acc.sum() / n)


def cumulant4_diag(series, lag: int) -> float:
    """Fourth-order cumulant estimate at the diagonal lag triple (lag, lag, 0).

    Four-term form: the fourth moment of ``y(t)^2 y(t+lag)^2`` minus the
    square of the lag autocorrelation, minus the product of the +lag and -lag
    autocorrelations, minus the squared full-record power.  At lag 0 this
    reduces to ``m4 - 3 * m2**2``.
    """
    y = as_real_series(series)
    n = y.size
    lam = int(lag)
    if not 0 <= lam < n:
        raise ValueError("lag must lie in [0, N)")
    head, tail = y[: n - lam], y[lam:]
    m4 = float(np.dot(head * head, tail * tail) / n)
    # +lag and -lag autocorrelations coincide under the biased convention,
    # so the two middle terms of the four-term form collapse into one square
    c2 = float(np.dot(head, tail) / n)
    m20 = float(np.dot(y, y) / n)
    return m4 - 2.0 * c2 * c2 - m20 * m20


@dataclass
class CumulantVector:
    """Diagonal-lag fourth-order cumulants for lags 0..m_lags."""

    values: np.ndarray
    m_lags: int
    n_samples: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.m_lags + 1,):
            raise ValueError("cumulant vector length must be m_lags + 1")


def cumulant_vector(series, m_lags: int) -> CumulantVector:
    """Stack :func:`cumulant4_diag` for lags 0..m_lags.

    Records shorter than ``SHORT_RECORD`` samples trigger a reliability
    warning but are still processed.
    """
    y = as_real_series(series)
    if m_lags < 0 or m_lags >= y.size:
        raise ValueError("m_lags must lie in [0, N)")
    if y.size < SHORT_RECORD:
        warnings.warn(
            "record of %d samples is short; Gaussianity-based identification "
            "is unreliable below %d" % (y.size, SHORT_RECORD),
            stacklevel=2,
        )
    vals = np.array([cumulant4_diag(y, lam) for lam in range(m_lags + 1)])
    return CumulantVector(vals, m_lags, y.size)


def lags_for_symbol_duration(symbol_samples: float) -> int:
    """Lag span covering 1.5 symbol durations (in samples)."""
    if symbol_samples <= 0:
        raise ValueError("symbol duration must be positive")
    return int(round(1.5 * symbol_samples))
