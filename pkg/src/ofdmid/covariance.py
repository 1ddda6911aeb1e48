"""Covariance of the diagonal-lag fourth-order cumulant vector.

Each matrix entry is assembled from three parts:

* ``cov_c1`` -- covariance of the two fourth-order moments, a truncated
  lag-tau sum of eighth-order moments minus the product correction;
* ``cov_c2`` -- the cross terms between a fourth-order moment and the
  second-moment products subtracted inside the cumulant.  The bilinear
  expansion of ``cov{m4 - products, m4 - products}`` gives these terms a
  minus sign, and the matrix symmetry lets the (lam, beta) half stand in
  for the mirrored half, which doubles it;
* ``cov_c3`` -- covariance between the two groups of second-moment
  products, expanded to first order around the estimated second moments.

All tau sums run over [-k_n, k_n]; ``select_kn`` picks the truncation from
the autocorrelation decay.  Entries estimate ``cov{c4(lam), c4(beta)}``
directly (they carry the 1/N scaling), so the Gaussianity quadratic form
needs no extra factor of N.

Two estimators share this structure:

* :func:`covariance_matrix` evaluates the interior moment sums empirically
  (products of the data).  It is consistent but its eighth-order summands
  are extremely noisy, so at practical record lengths it is unusable inside
  the detector (see :func:`gaussian_covariance_matrix`).
* :func:`gaussian_covariance_matrix` evaluates the same sums under the
  Gaussian null hypothesis, factoring every moment into sums of
  autocovariance products over connected pair partitions.  Its variance
  comes only from second-order estimates, which keeps the chi-square
  calibration intact; the detector uses it by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hos import as_real_series

DEFAULT_REL_TOL = 0.05
_DECAY_RUN = 4  # consecutive small autocorrelation lags required by select_kn


@dataclass
class CovarianceEstimate:
    """Symmetric (m_lags+1)^2 covariance matrix of the cumulant vector."""

    matrix: np.ndarray
    k_n: int
    n_samples: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance matrix must be square")

    @property
    def m_lags(self) -> int:
        return self.matrix.shape[0] - 1


@dataclass
class CovarianceTerms:
    """Named partial sums entering one (lam, beta) entry.

    ``m4m2_*`` are the tau-sums pairing the fourth-order moment at lam with
    the second moment at +beta / -beta / 0; ``m2m2_xy`` pairs second moments,
    with x, y in {p, n, z} for +lag, -lag and zero lag of (lam, beta).
    """

    m4m2_pos: float
    m4m2_neg: float
    m4m2_zero: float
    m2m2_pp: float
    m2m2_pn: float
    m2m2_pz: float
    m2m2_np: float
    m2m2_nn: float
    m2m2_nz: float
    m2m2_zp: float
    m2m2_zn: float
    m2m2_zz: float


def select_kn(series, m_lags: int, rel_tol: float = DEFAULT_REL_TOL,
              cap: int | None = None) -> int:
    """Truncation limit for the covariance tau-sums.

    Returns one past the smallest lag at which the autocorrelation magnitude
    stays below ``rel_tol`` times the zero-lag value for four consecutive
    lags, clamped to ``[m_lags + 1, min(cap, N // 10)]`` (degenerate inputs
    are absorbed by the clamp).  ``cap`` defaults to ``4 * (m_lags + 1)``.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    y = as_real_series(series)
    n = y.size
    if cap is None:
        cap = 4 * (m_lags + 1)
    upper = max(1, min(cap, n // 10))

    r0 = float(np.dot(y, y) / n)
    chosen = upper
    if r0 > 0.0:
        limit = min(upper + _DECAY_RUN, n - 1)
        r = np.array([np.dot(y[: n - s], y[s:]) / n for s in range(1, limit + 1)])
        small = np.abs(r) < rel_tol * r0
        for tau in range(1, limit - _DECAY_RUN + 2):
            if small[tau - 1 : tau - 1 + _DECAY_RUN].all():
                chosen = tau + 1
                break
    return max(m_lags + 1, min(chosen, upper))


# ---------------------------------------------------------------------------
# empirical path


class _Workspace:
    """Per-series cache of lag-product arrays and their means."""

    def __init__(self, series):
        self.y = as_real_series(series)
        self.n = self.y.size
        self._v: dict[int, np.ndarray] = {}
        self._u: dict[int, np.ndarray] = {}

    def v(self, lag: int) -> np.ndarray:
        if lag not in self._v:
            self._v[lag] = self.y[: self.n - lag] * self.y[lag:] if lag else self.y * self.y
        return self._v[lag]

    def u(self, lag: int) -> np.ndarray:
        if lag not in self._u:
            v = self.v(lag)
            self._u[lag] = v * v
        return self._u[lag]

    def mu(self, lag: int) -> float:
        return float(self.v(lag).sum() / self.n)

    def q4(self, lag: int) -> float:
        return float(self.u(lag).sum() / self.n)


def _window_sums(a: np.ndarray, b: np.ndarray, k_n: int, offsets: tuple[int, ...],
                 n: int) -> dict[int, float]:
    """For each offset c: (1/N) * sum_{tau=-k..k} sum_t a[t] b[t + tau + c]."""
    kmin = -k_n + min(offsets)
    kmax = k_n + max(offsets)
    la, lb = a.size, b.size
    r = np.zeros(kmax - kmin + 1)
    for i, k in enumerate(range(kmin, kmax + 1)):
        t0 = max(0, -k)
        t1 = min(la, lb - k)
        if t1 > t0:
            r[i] = np.dot(a[t0:t1], b[t0 + k : t1 + k])
    return {c: float(r[c - k_n - kmin : c + k_n - kmin + 1].sum() / n) for c in offsets}


def _check_entry_args(n: int, lam: int, beta: int, k_n: int) -> None:
    if lam < 0 or beta < 0:
        raise ValueError("lags must be non-negative")
    if k_n < 1:
        raise ValueError("k_n must be >= 1")
    if k_n + max(lam, beta) >= n:
        raise ValueError("k_n + max(lam, beta) must be < series length")


def _c1(ws: _Workspace, lam: int, beta: int, k_n: int) -> float:
    n, nk = ws.n, 2 * k_n + 1
    s = _window_sums(ws.u(lam), ws.u(beta), k_n, (0,), n)[0]
    return (s - nk * ws.q4(lam) * ws.q4(beta)) / n


def _terms(ws: _Workspace, lam: int, beta: int, k_n: int) -> CovarianceTerms:
    n, nk = ws.n, 2 * k_n + 1
    q4l = ws.q4(lam)
    mu_l, mu_b, mu_0 = ws.mu(lam), ws.mu(beta), ws.mu(0)

    s6 = _window_sums(ws.u(lam), ws.v(beta), k_n, (0, -beta), n)
    s6z = _window_sums(ws.u(lam), ws.v(0), k_n, (0,), n)
    m4m2_pos = (s6[0] - nk * q4l * mu_b) / n
    m4m2_neg = (s6[-beta] - nk * q4l * mu_b) / n
    m4m2_zero = (s6z[0] - nk * q4l * mu_0) / n

    svv = _window_sums(ws.v(lam), ws.v(beta), k_n, (0, -beta, lam, lam - beta), n)
    svz = _window_sums(ws.v(lam), ws.v(0), k_n, (0, lam), n)
    szv = _window_sums(ws.v(0), ws.v(beta), k_n, (0, -beta), n)
    szz = _window_sums(ws.v(0), ws.v(0), k_n, (0,), n)

    def vv(s: float, mp: float, mq: float) -> float:
        return (s - nk * mp * mq) / n

    return CovarianceTerms(
        m4m2_pos=m4m2_pos,
        m4m2_neg=m4m2_neg,
        m4m2_zero=m4m2_zero,
        m2m2_pp=vv(svv[0], mu_l, mu_b),
        m2m2_pn=vv(svv[-beta], mu_l, mu_b),
        m2m2_pz=vv(svz[0], mu_l, mu_0),
        m2m2_np=vv(svv[lam], mu_l, mu_b),
        m2m2_nn=vv(svv[lam - beta], mu_l, mu_b),
        m2m2_nz=vv(svz[lam], mu_l, mu_0),
        m2m2_zp=vv(szv[0], mu_0, mu_b),
        m2m2_zn=vv(szv[-beta], mu_0, mu_b),
        m2m2_zz=vv(szz[0], mu_0, mu_0),
    )


def _c2_from_terms(t: CovarianceTerms, mu_b: float, mu_0: float) -> float:
    # one ordered half of the cross terms, doubled via the matrix symmetry;
    # negative because the cumulant subtracts the second-moment products
    return -2.0 * (3.0 * t.m4m2_pos * mu_b + t.m4m2_neg * mu_b + 2.0 * t.m4m2_zero * mu_0)


def _c3_from_terms(t: CovarianceTerms, mu_l: float, mu_b: float, mu_0: float) -> float:
    # first-order expansion of the nine product-product covariances
    return (
        mu_l * mu_b * (9.0 * t.m2m2_pp + 3.0 * t.m2m2_pn + 3.0 * t.m2m2_np + t.m2m2_nn)
        + mu_l * mu_0 * (6.0 * t.m2m2_pz + 2.0 * t.m2m2_nz)
        + mu_0 * mu_b * (6.0 * t.m2m2_zp + 2.0 * t.m2m2_zn)
        + 4.0 * mu_0 * mu_0 * t.m2m2_zz
    )


def covariance_terms(series, lam: int, beta: int, k_n: int) -> CovarianceTerms:
    """Expose the named partial sums of one entry (empirical estimator)."""
    ws = _Workspace(series)
    _check_entry_args(ws.n, lam, beta, k_n)
    return _terms(ws, lam, beta, k_n)


def cov_c1(series, lam: int, beta: int, k_n: int) -> float:
    """Covariance of the fourth-order moments at lags lam and beta:
    ``(1/N) sum_tau [m8(lam,lam,0,tau,tau+beta,tau+beta,tau) - m4*m4]``."""
    ws = _Workspace(series)
    _check_entry_args(ws.n, lam, beta, k_n)
    return _c1(ws, lam, beta, k_n)


def cov_c2(series, lam: int, beta: int, k_n: int) -> float:
    """Cross-term part of an entry (signed; see module docstring)."""
    ws = _Workspace(series)
    _check_entry_args(ws.n, lam, beta, k_n)
    t = _terms(ws, lam, beta, k_n)
    return _c2_from_terms(t, ws.mu(beta), ws.mu(0))


def cov_c3(series, lam: int, beta: int, k_n: int) -> float:
    """Second-moment-product part of an entry."""
    ws = _Workspace(series)
    _check_entry_args(ws.n, lam, beta, k_n)
    t = _terms(ws, lam, beta, k_n)
    return _c3_from_terms(t, ws.mu(lam), ws.mu(beta), ws.mu(0))


def covariance_matrix(series, m_lags: int, k_n: int) -> CovarianceEstimate:
    """Empirical covariance estimate of the cumulant vector.

    Fills the lower triangle (beta <= lam) and mirrors, so symmetry is exact
    by construction.  Demean the series first; the estimators assume a
    zero-mean record.
    """
    ws = _Workspace(series)
    _check_entry_args(ws.n, m_lags, m_lags, k_n)
    mat = np.zeros((m_lags + 1, m_lags + 1))
    mu_0 = ws.mu(0)
    for lam in range(m_lags + 1):
        mu_l = ws.mu(lam)
        for beta in range(lam + 1):
            t = _terms(ws, lam, beta, k_n)
            entry = (
                _c1(ws, lam, beta, k_n)
                + _c2_from_terms(t, ws.mu(beta), mu_0)
                + _c3_from_terms(t, mu_l, ws.mu(beta), mu_0)
            )
            mat[lam, beta] = mat[beta, lam] = entry
    return CovarianceEstimate(mat, k_n, ws.n)


# ---------------------------------------------------------------------------
# Gaussian-null path


def _matchings(n: int) -> list[tuple[tuple[int, int], ...]]:
    if n == 0:
        return [()]
    out = []
    rest = list(range(1, n))
    for j in rest:
        sub = [x for x in rest if x != j]
        for m in _matchings(n - 2):
            out.append(((0, j),) + tuple((sub[a], sub[b]) for a, b in m))
    return out


_MATCHINGS = {n: _matchings(n) for n in (4, 6, 8)}


@lru_cache(maxsize=None)
def _connected_terms(pos_a: tuple[int, ...], pos_b: tuple[int, ...]):
    """Connected pair partitions of pos_a + (pos_b + tau).

    Returns (const_lags, cross_offsets, count) triples: within-group pairs
    contribute tau-independent autocovariance factors, cross pairs contribute
    r(|tau + offset|).  Partitions with no cross pair estimate the product of
    the two moments and are excluded (the covariance subtracts them).
    """
    na = len(pos_a)
    pos = pos_a + pos_b
    grouped: dict[tuple, int] = {}
    for m in _MATCHINGS[len(pos)]:
        const, cross = [], []
        for a, b in m:
            if (a < na) == (b < na):
                const.append(abs(pos[a] - pos[b]))
            else:
                lo, hi = (a, b) if a < na else (b, a)
                cross.append(pos[hi] - pos[lo])
        if not cross:
            continue
        key = (tuple(sorted(const)), tuple(sorted(cross)))
        grouped[key] = grouped.get(key, 0) + 1
    return tuple((np.array(c), np.array(x), w) for (c, x), w in sorted(grouped.items()))


def _connected_sum(r: np.ndarray, pos_a: tuple[int, ...], pos_b: tuple[int, ...],
                   k_n: int, n: int) -> float:
    """(1/N) * sum_tau over connected partitions of autocovariance products."""
    taus = np.arange(-k_n, k_n + 1)
    total = 0.0
    for const, cross, count in _connected_terms(pos_a, pos_b):
        w = count * float(np.prod(r[const])) if const.size else float(count)
        vec = r[np.abs(taus + cross[0])]
        for c in cross[1:]:
            vec = vec * r[np.abs(taus + c)]
        total += w * vec.sum()
    return total / n


def gaussian_covariance_matrix(series, m_lags: int, k_n: int) -> CovarianceEstimate:
    """Covariance of the cumulant vector under the Gaussian null.

    Identical three-part structure and tau truncation as
    :func:`covariance_matrix`, but every interior moment is factored into
    autocovariance products (zero-mean Gaussian moments factor exactly), so
    the estimate depends on the data only through the sample autocovariance.
    Under the null this is a consistent, low-variance estimate -- the one a
    calibrated constant-false-alarm-rate threshold needs.
    """
    y = as_real_series(series)
    n = y.size
    _check_entry_args(n, m_lags, m_lags, k_n)
    max_lag = k_n + 2 * m_lags + 2
    if max_lag >= n:
        raise ValueError("series too short for the requested lag span")
    r = np.array([np.dot(y[: n - s], y[s:]) / n for s in range(max_lag + 1)])

    def quad(lam: int) -> tuple[int, ...]:
        return (0, lam, lam, 0)

    def omega(a: int, b: int) -> float:
        # tau-sum cov of {m4(a,a,0), m2 at signed lag b}
        return _connected_sum(r, quad(a), (0, b), k_n, n)

    def vv(p: int, q: int) -> float:
        return _connected_sum(r, (0, p), (0, q), k_n, n)

    mat = np.zeros((m_lags + 1, m_lags + 1))
    mu = r[: m_lags + 1]
    for lam in range(m_lags + 1):
        for beta in range(lam + 1):
            c1 = _connected_sum(r, quad(lam), quad(beta), k_n, n)
            # exact six cross terms (both orderings), negative as in cov_c2
            c2 = -(
                3.0 * mu[beta] * omega(lam, beta)
                + mu[beta] * omega(lam, -beta)
                + 2.0 * mu[0] * omega(lam, 0)
                + 3.0 * mu[lam] * omega(beta, lam)
                + mu[lam] * omega(beta, -lam)
                + 2.0 * mu[0] * omega(beta, 0)
            )
            c3 = (
                mu[lam] * mu[beta] * (
                    9.0 * vv(lam, beta) + 3.0 * vv(lam, -beta)
                    + 3.0 * vv(-lam, beta) + vv(-lam, -beta)
                )
                + mu[lam] * mu[0] * (6.0 * vv(lam, 0) + 2.0 * vv(-lam, 0))
                + mu[0] * mu[beta] * (6.0 * vv(0, beta) + 2.0 * vv(0, -beta))
                + 4.0 * mu[0] * mu[0] * vv(0, 0)
            )
            mat[lam, beta] = mat[beta, lam] = c1 + c2 + c3
    return CovarianceEstimate(mat, k_n, n)
