"""Exact sparse operators on the truncated Fock space.

Every operator is sqrt(radicand) * M with M a matrix of Gaussian rationals
and radicand a squarefree positive rational (1 for everything except the
boson ladder operators).  Partial operators (Klein factors) carry the set
of basis columns on which they are defined; partiality is data, not an
error.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ModeOutOfWindow, ZeroMode
from .exact import QC, QC_ONE, sqrt_reduce
from .space import CHIRALITIES, FockSpace


class SparseOperator:
    """Column-major exact sparse matrix over a FockSpace basis."""

    def __init__(self, space: FockSpace, cols=None, radicand=Fraction(1),
                 valid_cols=None):
        self.space = space
        self.cols = cols if cols is not None else {}
        self.radicand = radicand
        self.valid_cols = valid_cols  # None means all columns valid

    # -- construction helpers ------------------------------------------------

    @classmethod
    def identity(cls, space, scalar=None):
        amp = QC_ONE if scalar is None else scalar
        cols = {i: {i: amp} for i in range(space.dim)} if not amp.is_zero() else {}
        return cls(space, cols)

    @classmethod
    def zero(cls, space):
        return cls(space, {})

    def _col(self, c):
        col = self.cols.get(c)
        if col is None:
            col = self.cols[c] = {}
        return col

    def set_entry(self, row, col, amp: QC):
        if amp.is_zero():
            return
        c = self._col(col)
        cur = c.get(row)
        new = amp if cur is None else cur + amp
        if new.is_zero():
            del c[row]
            if not c:
                del self.cols[col]
        else:
            c[row] = new.normalized()

    # -- validity ------------------------------------------------------------

    def is_valid_col(self, c) -> bool:
        return self.valid_cols is None or c in self.valid_cols

    @staticmethod
    def _merge_valid(a, b):
        if a is None:
            return b if b is None else set(b)
        if b is None:
            return set(a)
        return set(a) & set(b)

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        rad, sc_a, sc_b = _common_radicand(self.radicand, other.radicand)
        out = SparseOperator(self.space, {}, rad,
                             self._merge_valid(self.valid_cols, other.valid_cols))
        for src, sc in ((self, sc_a), (other, sc_b)):
            for c, col in src.cols.items():
                for r, amp in col.items():
                    out.set_entry(r, c, amp * sc)
        return out

    def __sub__(self, other):
        return self + (other * QC(-1))

    def __mul__(self, scalar: QC):
        if not isinstance(scalar, QC):
            scalar = QC(scalar)
        cols = {c: {r: amp * scalar for r, amp in col.items()}
                for c, col in self.cols.items()}
        if scalar.is_zero():
            cols = {}
        return SparseOperator(self.space, cols, self.radicand,
                              None if self.valid_cols is None else set(self.valid_cols))

    __rmul__ = __mul__

    def apply_col(self, vec: dict) -> dict:
        """Apply to a vector given as {basis index: QC} (radicand ignored)."""
        out = {}
        for c, v in vec.items():
            col = self.cols.get(c)
            if not col:
                continue
            for r, a in col.items():
                cur = out.get(r)
                new = a * v if cur is None else cur + a * v
                if new.is_zero():
                    out.pop(r, None)
                else:
                    out[r] = new
        return out

    def __matmul__(self, other):
        """self @ other; a result column is valid only when every basis state
        reached by the corresponding column of `other` is a valid column of
        `self`."""
        q, rad = sqrt_reduce(self.radicand * other.radicand)
        qc = QC(q)
        cols = {}
        valid = None
        if other.valid_cols is not None or self.valid_cols is not None:
            valid = set()
            col_range = (other.valid_cols if other.valid_cols is not None
                         else range(self.space.dim))
            for c in col_range:
                if all(self.is_valid_col(r) for r in other.cols.get(c, {})):
                    valid.add(c)
        for c, col in other.cols.items():
            if valid is not None and c not in valid:
                continue
            res = self.apply_col(col)
            if res:
                cols[c] = {r: a * qc for r, a in res.items()}
        return SparseOperator(self.space, cols, rad, valid)

    def adjoint(self):
        if self.valid_cols is not None:
            raise ValueError("adjoint of a partial operator is not defined "
                             "entrywise; build it from its own defining rules")
        cols = {}
        for c, col in self.cols.items():
            for r, amp in col.items():
                cols.setdefault(r, {})[c] = amp.conj()
        return SparseOperator(self.space, cols, self.radicand)

    def commutator(self, other):
        return self @ other - other @ self

    def anticommutator(self, other):
        return self @ other + other @ self

    # -- inspection ----------------------------------------------------------

    def entry(self, row, col) -> QC:
        return self.cols.get(col, {}).get(row, QC(0))

    def max_abs_on(self, rows, cols) -> Fraction:
        """Exact max L1 magnitude sqrt(radicand)-stripped over a block.

        The radicand scales all entries by the same positive factor, so it
        cannot turn a nonzero entry into zero; the returned rational is zero
        iff every block entry is exactly zero.
        """
        rows = set(rows)
        best = Fraction(0)
        for c in cols:
            col = self.cols.get(c)
            if not col:
                continue
            for r, amp in col.items():
                if r in rows:
                    v = amp.l1()
                    if v > best:
                        best = v
        return best

    def restricted_equal(self, other, rows, cols) -> bool:
        return (self - other).max_abs_on(rows, cols) == 0


def _common_radicand(s1: Fraction, s2: Fraction):
    """Scalings (rad, c1, c2) with sqrt(s1) = c1 sqrt(rad), sqrt(s2) = c2 sqrt(rad)."""
    if s1 == s2:
        return s1, QC_ONE, QC_ONE
    q, rad = sqrt_reduce(s1 / s2)
    if rad != 1:
        raise ValueError(f"incompatible radicands {s1} and {s2}")
    # sqrt(s1) = q sqrt(s2)
    return s2, QC(q), QC_ONE


# --------------------------------------------------------------------------
# single-mode fermion operators


def ladder_op(space: FockSpace, r: int, nu, dagger=False) -> SparseOperator:
    """Matrix of c_r(k) (or c^dagger) at k = (2 pi / L) nu.

    The fermionic sign convention follows the ordered basis products
    (chirality + before -, momenta descending).
    """
    nu = Fraction(nu)
    if not space.has_mode(r, nu):
        raise ModeOutOfWindow(f"mode (r={r:+d}, nu={nu}) outside window")
    pos = space.mode_position(r, nu)
    op = SparseOperator(space)
    act = space.create_sign if dagger else space.annihilate_sign
    for mask in range(space.dim):
        new, sign = act(mask, pos)
        if new is not None:
            op.set_entry(new, mask, QC(sign))
    return op


def field_op(space: FockSpace, r: int, nu, dagger=False) -> SparseOperator:
    """psi-hat_r(k) in lab units (the sqrt(L / 2 pi) prefactor is 1 at L = 2 pi)."""
    nu = Fraction(nu)
    if not space.has_mode(r, nu):
        raise ModeOutOfWindow(f"mode (r={r:+d}, nu={nu}) outside window")
    if dagger:
        return ladder_op(space, r, nu, dagger=(r * nu > 0))
    return ladder_op(space, r, nu, dagger=(r * nu < 0))


def _bilinear(space, r, nu_dag, nu):
    """Normal-ordered :psi-hat^dag_r(k) psi-hat_r(k'): as an exact matrix."""
    a = field_op(space, r, nu_dag, dagger=True)
    b = field_op(space, r, nu)
    op = a @ b
    if nu_dag == nu and r * nu < 0:
        # vacuum subtraction: :psi^dag psi: = psi^dag psi - Theta(-rk)
        op = op - SparseOperator.identity(space)
    return op


def density_op(space: FockSpace, r: int, m: int, cutoff=None) -> SparseOperator:
    """Regularized density J-hat^Lambda_r(p) at p = (2 pi / L) m.

    Keeps the bilinear at fermion momentum k when |k + p/2| <= cutoff; terms
    whose modes leave the window are dropped (the validity window shrinks
    accordingly).  Default cutoff is the largest that drops nothing:
    edge - |m|/2.
    """
    if cutoff is None:
        cutoff = space.edge() - Fraction(abs(m), 2)
    cutoff = Fraction(cutoff)
    op = SparseOperator(space)
    half_p = Fraction(m, 2)
    for nu in space.fermion_modes():
        if abs(nu + half_p) > cutoff:
            continue
        if not space.has_mode(r, nu + m):
            continue
        op = op + _bilinear(space, r, nu, nu + m)
    return op


def free_hamiltonian(space: FockSpace, cutoff=None) -> SparseOperator:
    """H0 = sum_{r, |k| <= cutoff} |k| c^dag c, diagonal, in units 2 pi / L."""
    cutoff = space.edge() if cutoff is None else Fraction(cutoff)
    op = SparseOperator(space)
    for i, st in enumerate(space.basis):
        e = Fraction(0)
        for r in CHIRALITIES:
            for nu in space.fermion_modes():
                if abs(nu) <= cutoff and (st.mask >> space.mode_position(r, nu)) & 1:
                    e += abs(nu)
        if e:
            op.set_entry(i, i, QC(e))
    return op


def charge_op(space: FockSpace, r: int) -> SparseOperator:
    """Q_r = J-hat_r(0), diagonal with the exact integer charges."""
    op = SparseOperator(space)
    for i, st in enumerate(space.basis):
        q = st.charge(r)
        if q:
            op.set_entry(i, i, QC(q))
    return op


# --------------------------------------------------------------------------
# Klein factors


def _klein_apply(space: FockSpace, r: int, mask: int, shift: int):
    """Image of a basis state under R_r (shift=+1) or R_r^dagger (shift=-1).

    Returns (vector dict or None); None marks a column outside the validity
    window (a shifted mode would leave the truncation).
    """
    half = Fraction(1, 2)
    special_src = -shift * half      # the mode that turns into an annihilator
    born = shift * half              # mode created from the vacuum by R(^dag)
    ops = []                         # (dagger, r_op, nu) in product order
    for pos in range(space.nmodes):
        if not (mask >> pos) & 1:
            continue
        rr = +1 if pos < 2 * space.K else -1
        nu = space._nus[pos % (2 * space.K)]
        if rr != r:
            ops.append((True, rr, nu))
        elif nu == special_src:
            ops.append((False, r, born))
        else:
            nu2 = nu + shift
            if not space.has_mode(r, nu2):
                return None
            ops.append((True, r, nu2))
    # anticommuting R past each opposite-chirality creator gives one -1
    n_opp = sum(1 for dag, rr, _ in ops if rr != r)
    sign = -1 if n_opp & 1 else 1
    # start from R_r^{shift} Omega = c^dag_r(born) Omega
    vec_mask, vec_sign = space.create_sign(0, space.mode_position(r, born))
    vec = {vec_mask: QC(sign * vec_sign)}
    for dag, rr, nu in reversed(ops):
        pos = space.mode_position(rr, nu)
        out = {}
        act = space.create_sign if dag else space.annihilate_sign
        for m0, amp in vec.items():
            new, s = act(m0, pos)
            if new is not None:
                out[new] = amp * QC(s)
        vec = out
        if not vec:
            break
    return vec


def klein_factor(space: FockSpace, r: int, dagger=False) -> SparseOperator:
    """Klein factor R_r (or its adjoint) as a partial permutation-like matrix.

    R_r shifts chirality-r modes up by one step, anticommutes with the
    opposite chirality, and acts on the vacuum as c^dag_r(pi/L) Omega; the
    adjoint shifts down with R_r^dag Omega = c^dag_r(-pi/L) Omega.  Columns
    whose shifted image leaves the window are absent from valid_cols.
    """
    shift = -1 if dagger else +1
    cols = {}
    valid = set()
    for mask in range(space.dim):
        vec = _klein_apply(space, r, mask, shift)
        if vec is None:
            continue
        valid.add(mask)
        if vec:
            cols[mask] = vec
    return SparseOperator(space, cols, valid_cols=valid)


# --------------------------------------------------------------------------
# boson ladder operators


def boson_ladder(space: FockSpace, m: int, dagger=False) -> SparseOperator:
    """b(p) at p = (2 pi / L) m != 0, from the densities.

    b(p) = -i sqrt(2 pi / (L |p|)) J_+(p) for p > 0 and
    b(p) = +i sqrt(2 pi / (L |p|)) J_-(p) for p < 0; entries stay exact via
    the operator-level sqrt(1/|m|) radicand.
    """
    if m == 0:
        raise ZeroMode("boson ladder operators need p != 0")
    r = +1 if m > 0 else -1
    phase = QC(0, -1) if m > 0 else QC(0, 1)
    op = density_op(space, r, m) * phase
    q, rad = sqrt_reduce(Fraction(1, abs(m)))
    out = op * QC(q)
    out.radicand = rad
    if dagger:
        return out.adjoint()
    return out
