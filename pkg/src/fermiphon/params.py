"""Model parameters, stability validation, derived couplings, momentum grids.

Units: hbar = 1 throughout; velocities in length/time, couplings lambda and g
carry velocity units, so gamma1 and gamma2 below are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadGeometry, UnstableCouplings

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the fermion-phonon model.

    v_f, v_p : Fermi and phonon velocities (0 < v_p < v_f)
    lam      : fermion-fermion coupling (velocity units)
    g        : fermion-phonon coupling (velocity units)
    a        : interaction range / UV cutoff length (0 < a < L)
    L        : system size
    omega0   : phonon zero-mode IR cutoff frequency (> 0)
    """

    v_f: float
    v_p: float
    lam: float
    g: float
    a: float
    L: float
    omega0: float = 0.0

    def __post_init__(self):
        if self.omega0 == 0.0:
            # one boson-mode spacing; only omega0 > 0 is physically required
            object.__setattr__(self, "omega0", TWO_PI * self.v_p / self.L)


@dataclass(frozen=True)
class DerivedCouplings:
    """Dimensionless couplings and the discriminant-like combination W.

    gamma1 = lam / (2 pi v_f), gamma2 = g / (v_p sqrt(pi v_f)); W has units
    of velocity squared and separates the two Bogoliubov branches.
    """

    gamma1: float
    gamma2: float
    W: float


@dataclass(frozen=True)
class MomentumGrid:
    """Truncated momentum grids shared by the Fock lab and the spectrum scan.

    Fermion modes k = (2 pi / L)(n + 1/2) for integer n with |n + 1/2| <= K;
    boson modes p = (2 pi / L) m for integer |m| <= K.  n_a = floor(L / 2a)
    counts positive boson modes with |p| <= pi / a.
    """

    L: float
    K: int
    a: float
    n_a: int

    @property
    def spacing(self):
        return TWO_PI / self.L

    def fermion_momenta(self):
        """Physical fermion momenta in the window, ascending."""
        return [self.spacing * (n + 0.5) for n in range(-self.K, self.K)]

    def boson_momenta(self):
        """Physical boson momenta in the window (including 0), ascending."""
        return [self.spacing * m for m in range(-self.K, self.K + 1)]


def validate_params(raw: ModelParams) -> ModelParams:
    """Check geometry and stability; return the params unchanged if valid.

    Raises BadGeometry on violated positivity/ordering constraints and
    UnstableCouplings when gamma1 >= 1 or gamma2^2 >= 1 + gamma1 (the model
    then describes an unstable system).
    """
    for name in ("v_f", "v_p", "lam", "g", "a", "L", "omega0"):
        if not math.isfinite(getattr(raw, name)):
            raise BadGeometry(f"{name} must be finite")
    if raw.v_f <= 0 or raw.v_p <= 0:
        raise BadGeometry("velocities must be positive")
    if raw.v_p >= raw.v_f:
        raise BadGeometry("phonon velocity must satisfy v_p < v_f")
    if raw.a <= 0 or raw.L <= 0 or raw.a >= raw.L:
        raise BadGeometry("lengths must satisfy 0 < a < L")
    if raw.omega0 <= 0:
        raise BadGeometry("omega0 must be positive")
    gamma1 = raw.lam / (TWO_PI * raw.v_f)
    gamma2 = raw.g / (raw.v_p * math.sqrt(math.pi * raw.v_f))
    if gamma1 >= 1.0:
        raise UnstableCouplings(
            f"gamma1 = {gamma1:.6g} >= 1 (requires lambda < 2 pi v_f)")
    if gamma2 * gamma2 >= 1.0 + gamma1:
        raise UnstableCouplings(
            f"gamma2^2 = {gamma2 * gamma2:.6g} >= 1 + gamma1 = {1 + gamma1:.6g} "
            "(requires 2 (g/v_p)^2 < 2 pi v_f + lambda)")
    return raw


def derived_couplings(params: ModelParams) -> DerivedCouplings:
    """Dimensionless couplings and W for validated params."""
    gamma1 = params.lam / (TWO_PI * params.v_f)
    gamma2 = params.g / (params.v_p * math.sqrt(math.pi * params.v_f))
    d = params.v_f**2 * (1.0 - gamma1**2) - params.v_p**2
    W = math.sqrt(d * d + 4.0 * params.v_f**2 * params.v_p**2
                  * gamma2**2 * (1.0 - gamma1))
    return DerivedCouplings(gamma1=gamma1, gamma2=gamma2, W=W)


def momentum_grid(L: float, K: int, a: float) -> MomentumGrid:
    """Build the truncated grid; n_a = floor(L / 2a), ties included."""
    if K < 1:
        raise BadGeometry("K must be >= 1")
    if not (0 < a <= L / 2):
        raise BadGeometry("need 0 < a <= L/2")
    return MomentumGrid(L=L, K=K, a=a, n_a=int(math.floor(L / (2.0 * a))))
