"""Local exact controllability of the bilinear Schrodinger equation on (0, 1)."""

from ._stlc import (
    NoConvergence,
    Scenario,
    StlcError,
    __version__,
    bump_integral,
    eigenvalues,
    run_command,
    solve_moments,
)

__all__ = [
    "NoConvergence",
    "Scenario",
    "StlcError",
    "__version__",
    "bump_integral",
    "eigenvalues",
    "run_command",
    "solve_moments",
]
