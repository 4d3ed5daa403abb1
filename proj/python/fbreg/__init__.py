from ._core import (
    FbregError,
    Grid,
    Kernel,
    canonical_config,
    config_hash,
    fit_power_law,
    fractional_laplacian,
    gamma_critical,
    gamma_drift,
    gamma_elliptic,
    holder_seminorm,
    kernel_from_config,
    read_grid,
    run,
    symbol,
)

__all__ = [
    "FbregError",
    "Grid",
    "Kernel",
    "canonical_config",
    "config_hash",
    "fit_power_law",
    "fractional_laplacian",
    "gamma_critical",
    "gamma_drift",
    "gamma_elliptic",
    "holder_seminorm",
    "kernel_from_config",
    "read_grid",
    "run",
    "symbol",
]
