"""Impairment chain: sample-spaced multipath, CFO/phase rotation, AWGN.

The received record is ``add_awgn(apply_cfo_phase(apply_multipath(x)))``.
Every stage is a pure function of (input, config, seed) with its own RNG
stream, so noise draws never depend on channel draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import math
import numpy as np

from .errors import ConfigError
from .waveforms import SampledSignal


class Fading(str, Enum):
    STATIC = "Static"
    PER_SYMBOL_RAYLEIGH = "PerSymbolRayleigh"


@dataclass
class ChannelProfile:
    """Sample-spaced tap-delay-line profile.

    ``tap_power_profile`` holds the mean power of each tap and must sum to 1.
    Static fading uses the deterministic real taps ``sqrt(power)``;
    PerSymbolRayleigh redraws complex circular Gaussian taps (variance equal
    to the tap power) every ``coherence_samples`` samples.
    """

    n_taps: int = 1
    tap_delays_samples: tuple[int, ...] = (0,)
    tap_power_profile: tuple[float, ...] = (1.0,)
    fading: Fading = Fading.STATIC
    coherence_samples: int = 160

    def validate(self) -> None:
        delays = tuple(self.tap_delays_samples)
        powers = tuple(self.tap_power_profile)
        if self.n_taps < 1 or len(delays) != self.n_taps or len(powers) != self.n_taps:
            raise ConfigError("n_taps must match delay and power lists")
        if delays[0] != 0 or any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigError("tap delays must be strictly increasing and start at 0")
        if min(powers) <= 0 or abs(sum(powers) - 1.0) > 1e-9:
            raise ConfigError("tap powers must be positive and sum to 1")
        if self.coherence_samples < 1:
            raise ConfigError("coherence_samples must be positive")


def rayleigh_profile(n_taps: int = 4, decay: float = 1.0,
                     coherence_samples: int = 160) -> ChannelProfile:
    """Rayleigh profile with unit-spaced taps and exponentially decaying powers."""
    powers = np.exp(-decay * np.arange(n_taps))
    powers /= powers.sum()
    return ChannelProfile(
        n_taps=n_taps,
        tap_delays_samples=tuple(range(n_taps)),
        tap_power_profile=tuple(float(p) for p in powers),
        fading=Fading.PER_SYMBOL_RAYLEIGH,
        coherence_samples=coherence_samples,
    )


@dataclass
class ImpairmentConfig:
    """Carrier-frequency offset, phase offset and optional phase random walk.

    ``cfo_normalized`` is in cycles/sample (|value| < 0.5).  The per-sample
    phase is ``phase_offset_rad`` plus a Gaussian random walk of standard
    deviation ``phase_walk_std`` per step (0 disables the walk and leaves the
    RNG untouched).
    """

    cfo_normalized: float = 0.0
    phase_offset_rad: float = 0.0
    phase_walk_std: float = 0.0
    snr_db: float = math.inf
    seed: int = 0

    def validate(self) -> None:
        if abs(self.cfo_normalized) >= 0.5:
            raise ConfigError("|cfo_normalized| must be < 0.5 cycles/sample")
        if self.phase_walk_std < 0:
            raise ConfigError("phase_walk_std must be >= 0")


def apply_multipath(sig: SampledSignal, prof: ChannelProfile, seed: int) -> SampledSignal:
    """Tap-delay-line convolution, quasi-static per coherence block.

    ``out[i] = sum_m h_m[block(i)] * in[i - delay_m]`` with ``in[j] = 0`` for
    j < 0.  Expected output power equals input power because the tap powers
    sum to 1 (exact for Static with a single tap).
    """
    prof.validate()
    x = sig.samples
    n = x.size
    delays = np.asarray(prof.tap_delays_samples)
    if delays.max() >= n:
        raise ConfigError("max tap delay %d exceeds signal length %d" % (delays.max(), n))
    powers = np.asarray(prof.tap_power_profile, dtype=float)

    shifted = np.zeros((prof.n_taps, n), dtype=np.complex128)
    for m, d in enumerate(delays):
        shifted[m, d:] = x[: n - d]

    if prof.fading is Fading.STATIC:
        out = np.sqrt(powers) @ shifted
    else:
        n_blocks = -(-n // prof.coherence_samples)
        rng = np.random.default_rng(seed)
        draws = rng.standard_normal((n_blocks, prof.n_taps, 2))
        taps = (draws[..., 0] + 1j * draws[..., 1]) * np.sqrt(powers / 2.0)
        per_sample = np.repeat(taps, prof.coherence_samples, axis=0)[:n]
        out = np.einsum("im,mi->i", per_sample, shifted)

    return SampledSignal(out, sig.sample_rate, sig.label)


def apply_cfo_phase(sig: SampledSignal, imp: ImpairmentConfig) -> SampledSignal:
    """Rotate each sample by the accumulated frequency/phase offset.

    Magnitudes are preserved exactly: the factor is ``exp(j*(theta_i +
    2*pi*cfo*i))`` with i counted from 0.
    """
    imp.validate()
    n = len(sig)
    theta = np.full(n, imp.phase_offset_rad)
    if imp.phase_walk_std > 0:
        rng = np.random.default_rng(imp.seed)
        theta = theta + np.cumsum(rng.normal(0.0, imp.phase_walk_std, n))
    phase = theta + 2.0 * np.pi * imp.cfo_normalized * np.arange(n)
    return SampledSignal(sig.samples * np.exp(1j * phase), sig.sample_rate, sig.label)


def add_awgn(sig: SampledSignal, snr_db: float, seed: int) -> SampledSignal:
    """Add complex circular Gaussian noise at the requested SNR.

    Noise variance is ``P_sig * 10**(-snr_db/10)`` with ``P_sig`` measured
    from the input record; ``snr_db = +inf`` returns the input unchanged.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return SampledSignal(sig.samples.copy(), sig.sample_rate, sig.label)
    p_sig = float(np.mean(np.abs(sig.samples) ** 2))
    if p_sig == 0.0:
        raise ConfigError("cannot set a finite SNR on a zero-power record")
    sigma2 = p_sig * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    n = len(sig)
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(sigma2 / 2.0)
    return SampledSignal(sig.samples + noise, sig.sample_rate, sig.label)
