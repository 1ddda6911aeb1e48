"""Multicarrier (OFDM) vs. single-carrier signal identification.

Multicarrier records are near-Gaussian in the time domain, so their
fourth-order cumulants vanish; single-carrier PSK/FSK/QAM records keep a
sub-Gaussian signature.  The detector forms the diagonal-lag cumulant vector,
normalizes it by its estimated covariance, and compares the resulting
chi-square statistic against a constant-false-alarm-rate threshold.
"""

from .channel import (ChannelProfile, Fading, ImpairmentConfig, add_awgn,
                      apply_cfo_phase, apply_multipath, rayleigh_profile)
from .covariance import (CovarianceEstimate, CovarianceTerms, cov_c1, cov_c2,
                         cov_c3, covariance_matrix, covariance_terms,
                         gaussian_covariance_matrix, select_kn)
from .detector import (DetectorConfig, GaussianityDecision, Verdict,
                       chi2_quantile, decide, gaussianity_statistic, identify,
                       pinv_symmetric)
from .errors import ConfigError
from .harness import (ExperimentConfig, SweepResult, SweepRow,
                      baseline_sum_cumulant, emit_csv, load_config, read_csv,
                      run_experiment, run_trial, save_config, wilson_interval)
from .hos import (CumulantVector, autocorr_biased, cumulant4_diag,
                  cumulant_vector, demean, lags_for_symbol_duration,
                  moment_est)
from .iqfile import read_signal, write_signal
from .waveforms import (OfdmConfig, SampledSignal, ScConfig, Scheme,
                        generate_ofdm, generate_sc, map_symbols, rrc_taps)

__version__ = "0.1.0"

__all__ = [
    "ChannelProfile", "Fading", "ImpairmentConfig", "add_awgn",
    "apply_cfo_phase", "apply_multipath", "rayleigh_profile",
    "CovarianceEstimate", "CovarianceTerms", "cov_c1", "cov_c2", "cov_c3",
    "covariance_matrix", "covariance_terms", "gaussian_covariance_matrix",
    "select_kn",
    "DetectorConfig", "GaussianityDecision", "Verdict", "chi2_quantile",
    "decide", "gaussianity_statistic", "identify", "pinv_symmetric",
    "ConfigError",
    "ExperimentConfig", "SweepResult", "SweepRow", "baseline_sum_cumulant",
    "emit_csv", "load_config", "read_csv", "run_experiment", "run_trial",
    "save_config", "wilson_interval",
    "CumulantVector", "autocorr_biased", "cumulant4_diag", "cumulant_vector",
    "demean", "lags_for_symbol_duration", "moment_est",
    "read_signal", "write_signal",
    "OfdmConfig", "SampledSignal", "ScConfig", "Scheme", "generate_ofdm",
    "generate_sc", "map_symbols", "rrc_taps",
    "__version__",
]
