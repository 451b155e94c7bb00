"""Hamilton-Jacobi reachability with subsystem decomposition and leaking-corner repair."""

from ._hjleak import (
    CflError,
    ConfigError,
    DecompositionError,
    DomainError,
    Grid,
    LeakingMask,
    NumericalError,
    RunConfig,
    RunResult,
    ValueSeries,
    compare,
    export_slice,
    load_run_config,
    parse_run_config,
    read_mask,
    read_series,
    run,
)

__all__ = [
    "CflError",
    "ConfigError",
    "DecompositionError",
    "DomainError",
    "Grid",
    "LeakingMask",
    "NumericalError",
    "RunConfig",
    "RunResult",
    "ValueSeries",
    "compare",
    "export_slice",
    "load_run_config",
    "parse_run_config",
    "read_mask",
    "read_series",
    "run",
]
