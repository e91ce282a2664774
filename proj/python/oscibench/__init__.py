"""Trigonometric and IMEX integrators for highly oscillatory Hamiltonian
systems, with the Fermi-Pasta-Ulam benchmark and modulated-Fourier
diagnostics. Thin wrapper over the C++ core."""

from ._oscibench import (  # noqa: F401
    DomainError,
    NonFiniteStateError,
    NearResonanceError,
    NoConvergenceError,
    ReferenceNotConvergedError,
    sinc,
    method_names,
    modified_frequency,
    mfe_constants,
    fpu_initial_state,
    fpu_transform,
    fpu_untransform,
    fpu_potential,
    fpu_hamiltonian,
    energies,
    integrate_fpu,
    exchange_series,
    sweep_point,
    max_deviation,
)

__all__ = [
    "DomainError",
    "NonFiniteStateError",
    "NearResonanceError",
    "NoConvergenceError",
    "ReferenceNotConvergedError",
    "sinc",
    "method_names",
    "modified_frequency",
    "mfe_constants",
    "fpu_initial_state",
    "fpu_transform",
    "fpu_untransform",
    "fpu_potential",
    "fpu_hamiltonian",
    "energies",
    "integrate_fpu",
    "exchange_series",
    "sweep_point",
    "max_deviation",
]
