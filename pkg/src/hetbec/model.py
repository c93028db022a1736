"""Physical parameters and their reduction to the dimensionless control set.

Raw inputs are the detuning ``delta`` between the molecular and paired atomic
levels, the atom-molecule coupling ``g``, the symmetric matrix ``chi`` of
s-wave collisional strengths between the three modes (atom 1, atom 2,
molecule), and the two conserved integers: total particle number ``N``
(molecules counted twice) and atomic number difference ``D``.

All solvers downstream consume only the dimensionless set (lam, delta, d)
with energies in units of G = g*sqrt(2N) and times in units of 1/G.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ParameterError

__all__ = ["RawParams", "ScaledParams", "scale_params"]

# chi matrix index order: 0 -> atom mode 1, 1 -> atom mode 2, 2 -> molecule
MODE_1, MODE_2, MODE_M = 0, 1, 2


def _check_integers(N, D):
    if N < 2:
        raise ParameterError(f"N must be >= 2, got {N}")
    if not 0 <= D <= N:
        raise ParameterError(f"D must satisfy 0 <= D <= N, got D={D}, N={N}")
    if (N - D) % 2 != 0:
        raise ParameterError(
            f"N and D must have the same parity so atom numbers are integers "
            f"(got N={N}, D={D})")


@dataclass(frozen=True)
class RawParams:
    """Dimensional model parameters (hbar = 1, energies in common units)."""

    delta: float
    g: float
    chi: np.ndarray
    N: int
    D: int

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=float)
        if chi.shape != (3, 3):
            raise ParameterError(f"chi must be 3x3, got shape {chi.shape}")
        if not np.allclose(chi, chi.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(chi).max())):
            raise ParameterError("chi must be symmetric")
        object.__setattr__(self, "chi", chi)
        if self.g <= 0:
            raise ParameterError(f"coupling g must be positive, got {self.g}")
        _check_integers(self.N, self.D)


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless control set consumed by every solver.

    ``lam`` collects all collisional strengths into a single nonlinearity
    parameter; ``delta`` is the effective detuning; ``d = D/N`` the normalized
    atomic population imbalance.  ``N`` and ``D`` are only needed by the
    quantum (finite-number) routines and may be left unset for purely
    semiclassical work.
    """

    lam: float
    delta: float
    d: float = 0.0
    G: float = 1.0
    N: int | None = None
    D: int | None = None

    def __post_init__(self):
        if self.G <= 0:
            raise ParameterError(f"energy scale G must be positive, got {self.G}")
        if not 0.0 <= self.d < 1.0:
            raise ParameterError(f"imbalance d must lie in [0, 1), got {self.d}")
        if (self.N is None) != (self.D is None):
            raise ParameterError("N and D must be given together")
        if self.N is not None:
            _check_integers(self.N, self.D)
            if self.d != self.D / self.N:
                raise ParameterError(
                    f"d must equal D/N exactly (d={self.d}, D/N={self.D / self.N})")

    @classmethod
    def for_numbers(cls, lam, delta, N, D, G=1.0):
        """Construct with d derived from the conserved integers."""
        return cls(lam=lam, delta=delta, d=D / N, G=G, N=N, D=D)


def scale_params(raw: RawParams) -> ScaledParams:
    """Reduce RawParams to the dimensionless (lam, delta, d) set.

    G = g*sqrt(2N); lam collects N*(chi11+chi22+chimm+2chi12-2chim1-2chim2)/G;
    delta collects the bare detuning plus the number-dependent collisional
    shifts, all divided by G.  Pure function.
    """
    chi = raw.chi
    N, D = raw.N, raw.D
    G = raw.g * math.sqrt(2.0 * N)
    c11 = chi[MODE_1, MODE_1]
    c22 = chi[MODE_2, MODE_2]
    cmm = chi[MODE_M, MODE_M]
    c12 = chi[MODE_1, MODE_2]
    cm1 = chi[MODE_M, MODE_1]
    cm2 = chi[MODE_M, MODE_2]
    lam = N * (c11 + c22 + cmm + 2.0 * c12 - 2.0 * cm1 - 2.0 * cm2) / G
    delta = (raw.delta
             - (D - 1.0) * c11
             + (D + 1.0) * c22
             + (N - 1.0) * cmm
             - (N - D) * cm1
             - (N + D) * cm2) / G
    return ScaledParams(lam=lam, delta=delta, d=D / N, G=G, N=N, D=D)
