"""Alternating-sectors Ising chains: free-fermion spectra, truncated master equations and SVMC."""

from ._ascqa import (
    DEVICE_TEMPERATURE,
    AnnealSchedule,
    BathSpec,
    ChainSpec,
    ConfigError,
    FermionSpectrum,
    SpectralRow,
    SvmcResult,
    diagonalize,
    exact_energies,
    exact_master_equation,
    fermionic_energies,
    is_valid_length,
    make_chain,
    master_equation,
    ohmic_rate,
    oracle_validation,
    run_svmc,
    spectral_row,
    spectrum_at,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
