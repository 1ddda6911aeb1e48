"""Waveform file I/O: raw interleaved I/Q plus a key-value sidecar.

Sample file: little-endian 32-bit floats, interleaved I,Q,I,Q,...
Sidecar (same path + ".meta"): one ``key: value`` line per field, parsed as
YAML; carries sample_rate, scheme, order, n_symbols, seed and any extras.
"""

from __future__ import annotations

import os

import numpy as np
import yaml

from .errors import ConfigError
from .waveforms import SampledSignal

_DTYPE = np.dtype("<f4")


def meta_path(path: str) -> str:
    return path + ".meta"


def write_signal(path: str, sig: SampledSignal, metadata: dict | None = None) -> None:
    """Write interleaved float32 I/Q and the metadata sidecar."""
    inter = np.empty(2 * len(sig), dtype=_DTYPE)
    inter[0::2] = sig.samples.real.astype(np.float32)
    inter[1::2] = sig.samples.imag.astype(np.float32)
    try:
        with open(path, "wb") as f:
            f.write(inter.tobytes())
        meta = {"sample_rate": float(sig.sample_rate), "label": sig.label,
                "n_samples": len(sig)}
        meta.update(metadata or {})
        with open(meta_path(path), "w", encoding="utf-8") as f:
            for key in sorted(meta):
                yaml.safe_dump({key: meta[key]}, f, default_flow_style=True)
    except OSError as exc:
        raise OSError("failed writing waveform %r: %s" % (path, exc)) from exc


def read_signal(path: str) -> tuple[SampledSignal, dict]:
    """Read a waveform file; returns the signal and its sidecar metadata.

    A missing sidecar is tolerated (empty metadata, unit sample rate).
    """
    try:
        raw = np.fromfile(path, dtype=_DTYPE)
    except OSError as exc:
        raise OSError("failed reading waveform %r: %s" % (path, exc)) from exc
    if raw.size == 0 or raw.size % 2:
        raise ConfigError("waveform file %r is empty or truncated" % path)
    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)

    meta: dict = {}
    if os.path.exists(meta_path(path)):
        with open(meta_path(path), "r", encoding="utf-8") as f:
            meta = yaml.safe_load(f.read()) or {}
    sig = SampledSignal(
        samples,
        sample_rate=float(meta.get("sample_rate", 1.0)),
        label=str(meta.get("label", os.path.basename(path))),
    )
    return sig, meta
