"""Baseband waveform synthesis: multicarrier (IDFT) and single-carrier PSK/FSK/QAM.

All generators are pure functions of (config, seed) and return unit-average-power
complex baseband records wrapped in :class:`SampledSignal`.  Lengths are exact and
documented; pulse-shaping transients are kept in the output so that a blind
receiver sees the full record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError

_ALLOWED_ORDERS = {2, 4, 8, 16, 32, 64, 128, 256}


class Scheme(str, Enum):
    """Single-carrier modulation families (also used for OFDM subcarrier data)."""

    PSK = "PSK"
    FSK = "FSK"
    QAM = "QAM"


@dataclass
class SampledSignal:
    """A complex baseband record.

    samples     -- 1-D complex ndarray, finite values only
    sample_rate -- nominal rate in Hz (metadata; the DSP works in sample units)
    label       -- free-form provenance string
    """

    samples: np.ndarray
    sample_rate: float = 1.0e6
    label: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ConfigError("signal must be a non-empty 1-D sample sequence")
        if not np.all(np.isfinite(self.samples.view(np.float64))):
            raise ConfigError("signal contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.size


@dataclass
class OfdmConfig:
    """Multicarrier generator parameters.

    The data portion of each symbol is synthesized on ``active_carriers``
    centered IDFT bins (DC left empty) out of ``idft_size``, giving an
    oversampled record when ``idft_size`` exceeds the carrier count.  Each
    symbol is preceded by a cyclic copy of its last ``round(cp_fraction *
    data_duration_samples)`` samples.
    """

    active_carriers: int = 64
    idft_size: int = 128
    data_duration_samples: int = 128
    cp_fraction: float = 0.25
    subcarrier_modulation: Scheme = Scheme.QAM
    modulation_order: int = 16
    n_symbols: int = 256
    seed: int = 0

    @property
    def guard_samples(self) -> int:
        return int(round(self.cp_fraction * self.data_duration_samples))

    @property
    def symbol_samples(self) -> int:
        return self.data_duration_samples + self.guard_samples

    def validate(self) -> None:
        if self.active_carriers < 1:
            raise ConfigError("active_carriers must be positive")
        if self.idft_size < self.active_carriers:
            raise ConfigError("idft_size must be >= active_carriers")
        # centered non-DC bins must fit without touching DC or Nyquist
        if (self.active_carriers + 1) // 2 > (self.idft_size - 1) // 2:
            raise ConfigError(
                "idft_size too small to center %d carriers around an empty DC bin"
                % self.active_carriers
            )
        if not 0.0 < self.cp_fraction <= 1.0:
            raise ConfigError("cp_fraction must lie in (0, 1]")
        if self.data_duration_samples < 1:
            raise ConfigError("data_duration_samples must be positive")
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be positive")
        _check_order(self.modulation_order)
        if self.subcarrier_modulation is Scheme.FSK:
            raise ConfigError("subcarriers carry PSK/QAM data, not FSK")


@dataclass
class ScConfig:
    """Single-carrier generator parameters.

    PSK/QAM symbols are upsampled by ``samples_per_symbol`` and shaped with a
    unit-energy root-raised-cosine FIR; FSK produces a continuous-phase tone
    per symbol with ``fsk_tone_spacing`` cycles/sample between adjacent tones
    (``None`` selects the orthogonal spacing ``1 / (2 * samples_per_symbol)``).
    """

    scheme: Scheme = Scheme.QAM
    modulation_order: int = 32
    samples_per_symbol: int = 4
    rrc_rolloff: float = 0.3
    rrc_span_symbols: int = 8
    fsk_tone_spacing: float | None = None
    n_symbols: int = 1024
    seed: int = 0

    def validate(self) -> None:
        if self.scheme not in (Scheme.PSK, Scheme.FSK, Scheme.QAM):
            raise ConfigError("unsupported scheme %r" % (self.scheme,))
        _check_order(self.modulation_order)
        if self.samples_per_symbol < 2:
            raise ConfigError("samples_per_symbol must be >= 2")
        if not 0.0 <= self.rrc_rolloff <= 1.0:
            raise ConfigError("rrc_rolloff must lie in [0, 1]")
        if self.rrc_span_symbols < 2:
            raise ConfigError("rrc_span_symbols must be >= 2")
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be positive")
        if self.fsk_tone_spacing is not None and not 0 < self.fsk_tone_spacing < 0.5:
            raise ConfigError("fsk_tone_spacing must lie in (0, 0.5) cycles/sample")


def _check_order(order: int) -> None:
    if order not in _ALLOWED_ORDERS:
        raise ConfigError("modulation order must be a power of two in 2..256, got %r" % order)


def _qam_constellation(order: int) -> np.ndarray:
    """Unit-average-power QAM points: square grid for even log2(order),
    cross (or 2x4 rectangle for order 8) for odd."""
    bits = int(math.log2(order))
    if order == 2:
        pts = np.array([-1.0 + 0j, 1.0 + 0j])
    elif bits % 2 == 0:
        side = int(round(math.sqrt(order)))
        levels = np.arange(-(side - 1), side, 2, dtype=float)
        pts = (levels[:, None] + 1j * levels[None, :]).ravel()
    elif order == 8:
        re = np.arange(-3, 4, 2, dtype=float)
        im = np.array([-1.0, 1.0])
        pts = (re[:, None] + 1j * im[None, :]).ravel()
    else:
        # cross: square of side 3*2^((bits-1)/2) / ... realized by clipping the
        # corners of the enclosing (w x w) grid, w = (3/4) * sqrt(2 * order)
        w = int(round(0.75 * math.sqrt(2 * order)))
        corner = w // 6  # 1 point for order 32, a 2x2 block for order 128
        levels = np.arange(-(w - 1), w, 2, dtype=float)
        grid = (levels[:, None] + 1j * levels[None, :]).ravel()
        keep = ~(
            (np.abs(grid.real) > levels[-1] - 2 * corner)
            & (np.abs(grid.imag) > levels[-1] - 2 * corner)
        )
        pts = grid[keep]
    if pts.size != order:
        raise ConfigError("no constellation of order %d" % order)
    return pts / math.sqrt(np.mean(np.abs(pts) ** 2))


def map_symbols(order: int, scheme: Scheme, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` i.i.d. symbols uniformly from a unit-average-power
    constellation.

    PSK uses the ``order``-th roots of unity; QAM the grid/cross family from
    :func:`_qam_constellation`.  FSK has no amplitude constellation and is
    rejected here.
    """
    _check_order(order)
    if scheme is Scheme.FSK:
        raise ConfigError("FSK symbols are tone indices; no amplitude constellation exists")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, order, size=count)
    if scheme is Scheme.PSK:
        return np.exp(2j * np.pi * idx / order)
    return _qam_constellation(order)[idx]


def rrc_taps(rolloff: float, span_symbols: int, sps: int) -> np.ndarray:
    """Root-raised-cosine FIR taps, length ``span_symbols*sps + 1``, unit energy.

    The closed form has removable singularities at t = 0 and
    |t| = T/(4*rolloff); both are evaluated by their limits.
    """
    if not 0.0 <= rolloff <= 1.0:
        raise ConfigError("rolloff must lie in [0, 1]")
    if span_symbols < 2 or sps < 2:
        raise ConfigError("need span_symbols >= 2 and sps >= 2")
    n = span_symbols * sps + 1
    t = np.arange(n, dtype=float) - (n - 1) / 2.0
    x = t / sps  # time in symbol durations
    b = rolloff

    taps = np.empty(n)
    at_zero = np.isclose(x, 0.0)
    if b > 0:
        at_sing = np.isclose(np.abs(4.0 * b * x), 1.0)
    else:
        at_sing = np.zeros(n, dtype=bool)
    regular = ~(at_zero | at_sing)

    xr = x[regular]
    num = np.sin(np.pi * xr * (1.0 - b)) + 4.0 * b * xr * np.cos(np.pi * xr * (1.0 + b))
    den = np.pi * xr * (1.0 - (4.0 * b * xr) ** 2)
    taps[regular] = num / den
    taps[at_zero] = 1.0 - b + 4.0 * b / np.pi
    if b > 0:
        taps[at_sing] = (b / math.sqrt(2.0)) * (
            (1.0 + 2.0 / np.pi) * math.sin(np.pi / (4.0 * b))
            + (1.0 - 2.0 / np.pi) * math.cos(np.pi / (4.0 * b))
        )
    return taps / math.sqrt(np.sum(taps * taps))


def _normalize_power(x: np.ndarray) -> np.ndarray:
    rms = math.sqrt(np.mean(np.abs(x) ** 2))
    if rms == 0.0:
        raise ConfigError("generated record has zero power")
    return x / rms


def generate_ofdm(cfg: OfdmConfig) -> SampledSignal:
    """Synthesize ``cfg.n_symbols`` multicarrier symbols.

    Each symbol is the IDFT of random constellation points placed on the
    centered active bins (DC unused), cyclically extended or truncated to
    ``data_duration_samples`` and prefixed with its last ``guard_samples``
    samples.  Output length: ``n_symbols * (data + guard)``; average sample
    power is normalized to 1.
    """
    cfg.validate()
    k, p = cfg.active_carriers, cfg.idft_size
    t_d, t_g = cfg.data_duration_samples, cfg.guard_samples

    bins = np.array(sorted(set(range(-((k + 1) // 2), k // 2 + 1)) - {0}))
    data = map_symbols(
        cfg.modulation_order, cfg.subcarrier_modulation, cfg.n_symbols * k, cfg.seed
    ).reshape(cfg.n_symbols, k)

    spectrum = np.zeros((cfg.n_symbols, p), dtype=np.complex128)
    spectrum[:, bins % p] = data
    body = np.fft.ifft(spectrum, axis=1)
    if t_d != p:
        body = body[:, np.arange(t_d) % p]
    symbols = np.concatenate([body[:, t_d - t_g:], body], axis=1) if t_g else body

    out = _normalize_power(symbols.ravel())
    return SampledSignal(out, label="ofdm-%s%d-k%d" % (
        cfg.subcarrier_modulation.value.lower(), cfg.modulation_order, k))


def generate_sc(cfg: ScConfig) -> SampledSignal:
    """Synthesize a single-carrier record.

    PSK/QAM: random constellation symbols, upsampled by ``samples_per_symbol``
    and shaped by the full root-raised-cosine convolution, so the output is
    ``n_symbols*sps + span*sps`` samples long (the filter transient is kept).
    FSK: a continuous-phase tone per symbol, ``n_symbols*sps`` samples,
    constant modulus.  Average sample power is normalized to 1.
    """
    cfg.validate()
    sps = cfg.samples_per_symbol

    if cfg.scheme is Scheme.FSK:
        rng = np.random.default_rng(cfg.seed)
        tones = rng.integers(0, cfg.modulation_order, size=cfg.n_symbols)
        spacing = cfg.fsk_tone_spacing
        if spacing is None:
            spacing = 1.0 / (2.0 * sps)
        freq = (tones - (cfg.modulation_order - 1) / 2.0) * spacing
        per_sample = np.repeat(freq, sps)
        phase = 2.0 * np.pi * np.concatenate(([0.0], np.cumsum(per_sample[:-1])))
        out = np.exp(1j * phase)
    else:
        syms = map_symbols(cfg.modulation_order, cfg.scheme, cfg.n_symbols, cfg.seed)
        up = np.zeros(cfg.n_symbols * sps, dtype=np.complex128)
        up[::sps] = syms
        out = np.convolve(up, rrc_taps(cfg.rrc_rolloff, cfg.rrc_span_symbols, sps))
        out = _normalize_power(out)

    return SampledSignal(out, label="sc-%s%d" % (cfg.scheme.value.lower(), cfg.modulation_order))
