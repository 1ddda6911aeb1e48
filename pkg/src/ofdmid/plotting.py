"""Static figures for sweep results (file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import SweepResult


def render_sweep_plot(result: SweepResult, path: str, title: str | None = None) -> None:
    """Rejection rate vs. SNR with Wilson bands, one curve per configuration."""
    groups: dict[tuple, list] = {}
    for row in result.rows:
        key = (row.modulation, row.order, row.n_symbols, row.alpha, row.m_lags)
        groups.setdefault(key, []).append(row)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for key, rows in sorted(groups.items()):
        rows.sort(key=lambda r: r.snr_db)
        snr = [r.snr_db for r in rows]
        ax.plot(snr, [r.p_reject for r in rows], marker="o",
                label="%s-%d N=%d a=%g M=%d" % key)
        ax.fill_between(snr, [r.ci_lo for r in rows], [r.ci_hi for r in rows], alpha=0.2)
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("single-carrier verdict rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
