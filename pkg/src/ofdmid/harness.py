"""Monte-Carlo detection experiments: trial runner, sweeps, CSV output.

A sweep runs ``trials`` independent end-to-end trials (waveform -> multipath
-> CFO/phase -> AWGN -> identify) per SNR grid point and reports the
rejection rate (the single-carrier verdict rate: detection probability for
single-carrier inputs, false-alarm probability for multicarrier inputs) with
Wilson 95% intervals.

Seeding: every trial derives four independent stage streams (waveform,
channel, phase, noise) from ``SeedSequence([master_seed, snr_milli_db +
10**6, trial_index])``; the grid point enters through the SNR in milli-dB, so
trials are pairwise independent across the whole sweep and re-running a
configuration reproduces the CSV byte for byte.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field, fields, asdict

import numpy as np

from . import hos
from .channel import (ChannelProfile, Fading, ImpairmentConfig, add_awgn,
                      apply_cfo_phase, apply_multipath, rayleigh_profile)
from .detector import DetectorConfig, GaussianityDecision, Verdict, identify
from .errors import ConfigError
from .waveforms import OfdmConfig, ScConfig, Scheme, SampledSignal, generate_ofdm, generate_sc

MODULATIONS = ("OFDM", "SC-PSK", "SC-FSK", "SC-QAM")
CSV_COLUMNS = ("snr_db", "modulation", "order", "n_symbols", "alpha", "m_lags",
               "trials", "p_reject", "ci_lo", "ci_hi")
_WILSON_Z = 1.959963984540054  # 95%


@dataclass
class ExperimentConfig:
    """One sweep: a modulation at a grid of SNRs through a fixed channel."""

    modulation: str = "SC-QAM"
    order: int = 32
    n_symbols: int = 1024
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0)
    channel: ChannelProfile = field(default_factory=rayleigh_profile)
    impairments: ImpairmentConfig = field(
        default_factory=lambda: ImpairmentConfig(cfo_normalized=1e-5))
    detector: DetectorConfig = field(
        default_factory=lambda: DetectorConfig(significance=0.01, m_lags=6))
    trials: int = 200
    master_seed: int = 0

    def validate(self) -> None:
        if self.modulation not in MODULATIONS:
            raise ConfigError("modulation must be one of %s" % (MODULATIONS,))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if len(self.snr_grid_db) == 0:
            raise ConfigError("snr_grid_db must be non-empty")
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be positive")
        self.channel.validate()
        self.impairments.validate()
        self.detector.validate()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_grid_db"] = list(self.snr_grid_db)
        d["channel"]["fading"] = self.channel.fading.value
        d["channel"]["tap_delays_samples"] = list(self.channel.tap_delays_samples)
        d["channel"]["tap_power_profile"] = list(self.channel.tap_power_profile)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return _hydrate(cls, dict(data))


def _hydrate(cls, data: dict):
    """Build a dataclass from a plain dict, rejecting unknown keys."""
    sub = {"channel": ChannelProfile, "impairments": ImpairmentConfig,
           "detector": DetectorConfig}
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError("unknown config keys: %s" % sorted(unknown))
    kwargs = {}
    for key, value in data.items():
        if key in sub and isinstance(value, dict):
            inner_cls = sub[key]
            inner_known = {f.name for f in fields(inner_cls)}
            bad = set(value) - inner_known
            if bad:
                raise ConfigError("unknown %s keys: %s" % (key, sorted(bad)))
            value = dict(value)
            if key == "channel" and "fading" in value:
                try:
                    value["fading"] = Fading(value["fading"])
                except ValueError as exc:
                    raise ConfigError("unknown fading mode %r" % value["fading"]) from exc
            for seq_key in ("tap_delays_samples", "tap_power_profile"):
                if seq_key in value:
                    value[seq_key] = tuple(value[seq_key])
            value = inner_cls(**value)
        elif key == "snr_grid_db":
            value = tuple(float(v) for v in value)
        kwargs[key] = value
    try:
        out = cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    out.validate()
    return out


def load_config(path: str) -> ExperimentConfig:
    """Read an experiment config from a YAML key-value file."""
    import yaml

    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f.read())
    if not isinstance(data, dict):
        raise ConfigError("config file %r does not hold a key-value document" % path)
    return ExperimentConfig.from_dict(data)


def save_config(cfg: ExperimentConfig, path: str) -> None:
    import yaml

    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(cfg.to_dict(), f, sort_keys=False)


def trial_seeds(master_seed: int, snr_db: float, trial_index: int) -> tuple[int, int, int, int]:
    """Four per-stage seeds (waveform, channel, phase, noise) for one trial."""
    snr_key = int(round(snr_db * 1000.0)) + 10 ** 6
    if snr_key < 0:
        raise ConfigError("snr below -1000 dB is not supported")
    ss = np.random.SeedSequence([int(master_seed), snr_key, int(trial_index)])
    return tuple(int(s) for s in ss.generate_state(4, dtype=np.uint64))


def _make_waveform(cfg: ExperimentConfig, seed: int) -> SampledSignal:
    if cfg.modulation == "OFDM":
        return generate_ofdm(OfdmConfig(
            modulation_order=cfg.order, n_symbols=cfg.n_symbols, seed=seed))
    scheme = Scheme(cfg.modulation.split("-", 1)[1])
    return generate_sc(ScConfig(
        scheme=scheme, modulation_order=cfg.order, n_symbols=cfg.n_symbols, seed=seed))


def run_trial(cfg: ExperimentConfig, snr_db: float, trial_index: int) -> GaussianityDecision:
    """One end-to-end trial at one grid point (deterministic in its arguments)."""
    cfg.validate()
    s_wave, s_chan, s_phase, s_noise = trial_seeds(cfg.master_seed, snr_db, trial_index)
    sig = _make_waveform(cfg, s_wave)
    sig = apply_multipath(sig, cfg.channel, s_chan)
    imp = ImpairmentConfig(
        cfo_normalized=cfg.impairments.cfo_normalized,
        phase_offset_rad=cfg.impairments.phase_offset_rad,
        phase_walk_std=cfg.impairments.phase_walk_std,
        snr_db=snr_db,
        seed=s_phase,
    )
    sig = apply_cfo_phase(sig, imp)
    sig = add_awgn(sig, snr_db, s_noise)
    return identify(sig, cfg.detector)


def wilson_interval(successes: int, total: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total < 1:
        raise ValueError("total must be >= 1")
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * np.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class SweepRow:
    snr_db: float
    modulation: str
    order: int
    n_symbols: int
    alpha: float
    m_lags: int
    trials: int
    p_reject: float
    ci_lo: float
    ci_hi: float


@dataclass
class SweepResult:
    rows: list[SweepRow]


def run_experiment(cfg: ExperimentConfig) -> SweepResult:
    """Run the full grid; rejection counting is order-independent."""
    cfg.validate()
    rows = []
    for snr_db in cfg.snr_grid_db:
        rejections = 0
        m_lags = None
        for t in range(cfg.trials):
            decision = run_trial(cfg, snr_db, t)
            m_lags = decision.dof - 1
            rejections += decision.verdict is Verdict.SINGLE_CARRIER
        lo, hi = wilson_interval(rejections, cfg.trials)
        rows.append(SweepRow(
            snr_db=float(snr_db), modulation=cfg.modulation, order=cfg.order,
            n_symbols=cfg.n_symbols, alpha=cfg.detector.significance,
            m_lags=int(m_lags), trials=cfg.trials,
            p_reject=rejections / cfg.trials, ci_lo=lo, ci_hi=hi,
        ))
    return SweepResult(rows)


def baseline_sum_cumulant(series, m_lags: int, threshold: float) -> Verdict:
    """Fixed-threshold baseline: flag single carrier when the summed cumulant
    magnitudes exceed the threshold.

    Exists to contrast with the calibrated test: its operating point drifts
    with channel realization because the threshold is absolute.
    """
    if threshold <= 0:
        raise ConfigError("threshold must be positive")
    total = sum(abs(hos.cumulant4_diag(series, lam)) for lam in range(m_lags + 1))
    return Verdict.SINGLE_CARRIER if total > threshold else Verdict.MULTI_CARRIER_OFDM


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(result: SweepResult, path: str) -> None:
    """Write sweep rows in grid order; appends (header once) if the file exists."""
    try:
        fresh = not (os.path.exists(path) and os.path.getsize(path) > 0)
        with open(path, "a", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            if fresh:
                writer.writerow(CSV_COLUMNS)
            for row in result.rows:
                writer.writerow([_format_value(getattr(row, col)) for col in CSV_COLUMNS])
    except OSError as exc:
        raise OSError("failed writing CSV %r: %s" % (path, exc)) from exc


def read_csv(path: str) -> SweepResult:
    """Parse a sweep CSV back into rows (round-trips emit_csv)."""
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError("unexpected CSV columns in %r" % path)
        for rec in reader:
            rows.append(SweepRow(
                snr_db=float(rec["snr_db"]), modulation=rec["modulation"],
                order=int(rec["order"]), n_symbols=int(rec["n_symbols"]),
                alpha=float(rec["alpha"]), m_lags=int(rec["m_lags"]),
                trials=int(rec["trials"]), p_reject=float(rec["p_reject"]),
                ci_lo=float(rec["ci_lo"]), ci_hi=float(rec["ci_hi"]),
            ))
    return SweepResult(rows)
