"""Amplitude-modulated three-mode optomechanics: means, fluctuations, sweeps."""

from ._optomod import (
    ConvergenceReport,
    DesignedDrives,
    DriveSpec,
    EffectiveModel,
    FourierCoeffTable,
    MeanSeries,
    MeanState,
    OptomodError,
    RoundTripReport,
    SweepRow,
    SystemParams,
    TargetAmplitudes,
    asymptotic_means,
    design_drives,
    detect_limit_cycle,
    diffusion_matrix,
    drift_matrix,
    effective_model,
    eval_series,
    fourier_extract,
    integrate_cm_to_periodic,
    integrate_means,
    log_negativity,
    recursive_coeffs,
    run,
    stability,
    sweep_omega,
    symplectic_eigenvalues,
    thermal_cm,
    verify_roundtrip,
)

__all__ = [name for name in dir() if not name.startswith("_")]
