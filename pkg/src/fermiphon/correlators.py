"""Closed-form correlation functions, Klein sign combinatorics, and scaling
exponents in the continuum and thermodynamic limits.

All boundary values i0+ are realized by an explicit positive regulator, so
every output is a plain complex number; each power-law factor is evaluated
with its own principal logarithm and factors are never merged before
exponentiation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .bogoliubov import BogoliubovSolution
from .errors import BadArgument, SelectionViolated, SingularConfiguration

FLAVORS = ("F", "P")


@dataclass(frozen=True)
class InsertionPoint:
    """One field insertion: chirality r, dagger flag q (+1 means psi^dag),
    position x, time t."""

    r: int
    q: int
    x: float
    t: float = 0.0


@dataclass(frozen=True)
class CorrelatorSpec:
    """Ordered field insertions plus the renormalization length ell and the
    finite stand-in for i0+."""

    insertions: Tuple[InsertionPoint, ...]
    ell: float = 1.0
    regulator: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "insertions", tuple(self.insertions))
        if self.ell <= 0:
            raise BadArgument("ell must be positive")
        if self.regulator <= 0:
            raise BadArgument("regulator must be positive")


@dataclass(frozen=True)
class ExponentTable:
    """Pair exponents c_{r,X;q,q'} and the derived scaling dimensions."""

    c_same: dict       # (r_rel, X) -> rho_X^2 (r_rel=+1) or sigma_X^2 (-1)
    c_cross: dict      # X -> rho_X sigma_X
    delta_cdw: float
    delta_sc: float
    fermion_dimension: float


def klein_sign(word: Sequence[Tuple[int, int]]) -> int:
    """Vacuum expectation sign of R_{r_1}^{q_1 r_1} ... R_{r_N}^{q_N r_N}.

    0 unless the q_j sum to zero within each chirality; otherwise
    (-1)^(number of pairs i<j with r_i = -, r_j = +), one sign per
    cross-chirality transposition of unit-exponent Klein factors.
    """
    if sum(q for r, q in word if r == +1) != 0:
        return 0
    if sum(q for r, q in word if r == -1) != 0:
        return 0
    crossings = 0
    plus_seen = 0
    for r, _q in reversed(word):
        if r == +1:
            plus_seen += 1
        else:
            crossings += plus_seen
    return -1 if crossings & 1 else 1


def sum_rules(word: Sequence[Tuple[int, int]]) -> dict:
    """Charge-pair sums over a selection-passing word: same-chirality pairs
    sum to -N/2 and cross-chirality pairs to 0."""
    if klein_sign(word) == 0:
        raise SelectionViolated("word does not pass charge selection")
    same = cross = 0
    n = len(word)
    for i in range(n):
        for j in range(i + 1, n):
            if word[i][0] == word[j][0]:
                same += word[i][1] * word[j][1]
            else:
                cross += word[i][1] * word[j][1]
    return {"same": same, "cross": cross}


def regulated_power(ell: float, r: int, x: float, t: float, v: float,
                    exponent: float, regulator: float) -> complex:
    """(i ell / (r x - v t + i 0+))^exponent with the principal branch.

    The positive regulator keeps the base off the cut; powers from different
    factors are never combined algebraically.
    """
    z = 1j * ell / (r * x - v * t + 1j * regulator)
    if exponent == 0.0:
        return 1.0 + 0.0j
    return cmath.exp(exponent * cmath.log(z))


def free_finite_L(spec: CorrelatorSpec, L: float) -> complex:
    """Equal-time free-fermion N-point function at finite L.

    klein_sign times the product over same-chirality pairs of
    (i / (2 L sin(pi/L [r (x_n - x_m) + i reg])))^(-q_n q_m); returns 0 on
    selection violation.
    """
    word = [(p.r, p.q) for p in spec.insertions]
    sign = klein_sign(word)
    if sign == 0:
        return 0.0j
    out = complex(sign)
    pts = spec.insertions
    for n in range(len(pts)):
        if pts[n].t != 0.0:
            raise BadArgument("free_finite_L is an equal-time formula")
        for m in range(n + 1, len(pts)):
            if pts[n].r != pts[m].r:
                continue
            u = (math.pi / L) * (pts[n].r * (pts[n].x - pts[m].x)
                                 + 1j * spec.regulator)
            base = 1j / (2.0 * L * cmath.sin(u))
            out *= cmath.exp(-pts[n].q * pts[m].q * cmath.log(base))
    return out


def _pair_exponent(r: int, flavor: str, rn: int, rm: int,
                   sol: BogoliubovSolution) -> float:
    """c_{r,X;r_n,r_m}: rho^2/sigma^2 on equal chiralities, rho sigma across."""
    if rn == rm:
        return sol.rho(flavor) ** 2 if r == rn else sol.sigma(flavor) ** 2
    return sol.rho(flavor) * sol.sigma(flavor)


def npoint_continuum(spec: CorrelatorSpec, sol: BogoliubovSolution) -> complex:
    """Renormalized N-point function in the continuum and thermodynamic
    limits: klein_sign x (1 / 2 pi ell)^(N/2) x the product of regulated
    power-law factors over pairs, chiralities, and flavors."""
    word = [(p.r, p.q) for p in spec.insertions]
    sign = klein_sign(word)
    if sign == 0:
        return 0.0j
    pts = spec.insertions
    n_pts = len(pts)
    out = complex(sign) * (1.0 / (2.0 * math.pi * spec.ell)) ** (n_pts / 2.0)
    for n in range(n_pts):
        for m in range(n + 1, n_pts):
            dx = pts[n].x - pts[m].x
            dt = pts[n].t - pts[m].t
            qq = pts[n].q * pts[m].q
            for r in (+1, -1):
                for flavor in FLAVORS:
                    c = _pair_exponent(r, flavor, pts[n].r, pts[m].r, sol)
                    out *= regulated_power(spec.ell, r, dx, dt,
                                           sol.vtilde(flavor), -qq * c,
                                           spec.regulator)
    return out


def two_point(r: int, x: float, t: float, sol: BogoliubovSolution,
              ell: float = 1.0, regulator: float = 1e-8) -> complex:
    """<psi_r(x,t) psi_r^dag(0,0)> in the continuum/thermodynamic limits."""
    spec = CorrelatorSpec(
        insertions=(InsertionPoint(r=r, q=-1, x=x, t=t),
                    InsertionPoint(r=r, q=+1, x=0.0, t=0.0)),
        ell=ell, regulator=regulator)
    return npoint_continuum(spec, sol)


def order_correlator(kind: str, x: float, t: float, sol: BogoliubovSolution,
                     ell: float = 1.0, regulator: float = 1e-8) -> complex:
    """CDW or SC order-parameter correlator:
    (1 / 2 pi ell)^2 prod_X (ell^2 / (x^2 - (vtilde_X t - i0+)^2))^((rho -+ sigma)^2).
    """
    if kind not in ("CDW", "SC"):
        raise BadArgument("kind must be 'CDW' or 'SC'")
    out = (1.0 / (2.0 * math.pi * ell)) ** 2
    for flavor in FLAVORS:
        rho, sigma = sol.rho(flavor), sol.sigma(flavor)
        c = (rho - sigma) ** 2 if kind == "CDW" else (rho + sigma) ** 2
        w = x * x - (sol.vtilde(flavor) * t - 1j * regulator) ** 2
        out *= cmath.exp(c * cmath.log(ell * ell / w))
    return out


def exponents(sol: BogoliubovSolution) -> ExponentTable:
    """Scaling exponents derived from one Bogoliubov solution."""
    c_same = {}
    c_cross = {}
    for flavor in FLAVORS:
        c_same[(+1, flavor)] = sol.rho(flavor) ** 2
        c_same[(-1, flavor)] = sol.sigma(flavor) ** 2
        c_cross[flavor] = sol.rho(flavor) * sol.sigma(flavor)
    delta_cdw = sum((sol.rho(fl) - sol.sigma(fl)) ** 2 for fl in FLAVORS)
    delta_sc = sum((sol.rho(fl) + sol.sigma(fl)) ** 2 for fl in FLAVORS)
    dim = sum(sol.rho(fl) ** 2 + sol.sigma(fl) ** 2 for fl in FLAVORS)
    return ExponentTable(c_same=c_same, c_cross=c_cross,
                         delta_cdw=delta_cdw, delta_sc=delta_sc,
                         fermion_dimension=dim)


def _det(mat: List[List[complex]]) -> complex:
    """Exact cofactor-expansion determinant for small matrices."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    out = 0.0 + 0.0j
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        out += term if j % 2 == 0 else -term
    return out


def cauchy_residual(U: Sequence[float], V: Sequence[float]) -> float:
    """|product form - det(1/sin(U_n - V_m))| for the sine-kernel Cauchy
    determinant identity; cofactor expansion, lists of length M <= 8."""
    M = len(U)
    if M != len(V) or not (1 <= M <= 8):
        raise BadArgument("need equal-length lists with 1 <= M <= 8")
    for u in U:
        for v in V:
            if abs(math.sin(u - v)) < 1e-14:
                raise SingularConfiguration(f"sin({u} - {v}) ~ 0")
    num = 1.0
    for n in range(M):
        for m in range(n + 1, M):
            num *= math.sin(U[n] - U[m]) * math.sin(V[m] - V[n])
    den = 1.0
    for u in U:
        for v in V:
            den *= math.sin(u - v)
    prod_form = num / den
    kernel = [[1.0 / math.sin(u - v) for v in V] for u in U]
    return abs(prod_form - _det(kernel))
