"""Dense complex interval matrices backed by numpy.

Storage is four float64 arrays (lower/upper bounds of the real and imaginary
parts).  Products use the classical midpoint-radius scheme: the midpoint
product is one floating-point matmul and the radius collects operand radii
plus a (k+4)u accumulation term that dominates the rounding error of any
summation order, so the result encloses the exact product entrywise without
touching the FPU rounding mode.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, SingularityUnverified
from .interval import ComplexBox, Interval, iv_sqrt

_U = 2.0 ** -53
_TINY = 5e-308
_INF = math.inf


def _bump_up(x: np.ndarray, steps: int = 2) -> np.ndarray:
    for _ in range(steps):
        x = np.nextafter(x, _INF)
    return x


def _bump_down(x: np.ndarray, steps: int = 2) -> np.ndarray:
    for _ in range(steps):
        x = np.nextafter(x, -_INF)
    return x


def _mm_real(al, ah, bl, bh):
    """Enclosure of the product of real interval matrices."""
    am = al + 0.5 * (ah - al)
    bm = bl + 0.5 * (bh - bl)
    ar = _bump_up(np.maximum(ah - am, am - al))
    br = _bump_up(np.maximum(bh - bm, bm - bl))
    aa = np.abs(am)
    ba = np.abs(bm)
    k = al.shape[1]
    gamma = (k + 4) * _U
    cm = am @ bm
    m1 = aa @ ba
    m2 = ar @ (ba + br) + aa @ br
    rad = (m2 + gamma * m1) * (1.0 + 8.0 * gamma) + 5.0 * _TINY
    return _bump_down(cm - rad), _bump_up(cm + rad)


def _add(lo1, hi1, lo2, hi2):
    return np.nextafter(lo1 + lo2, -_INF), np.nextafter(hi1 + hi2, _INF)


def _sub(lo1, hi1, lo2, hi2):
    return np.nextafter(lo1 - hi2, -_INF), np.nextafter(hi1 - lo2, _INF)


def _scale(lo, hi, s: Interval):
    cands = np.stack([lo * s.lo, lo * s.hi, hi * s.lo, hi * s.hi])
    return (np.nextafter(cands.min(axis=0), -_INF),
            np.nextafter(cands.max(axis=0), _INF))


class IMatrix:
    """Complex interval matrix; shape (m, n)."""

    __slots__ = ("rl", "rh", "il", "ih")

    def __init__(self, rl, rh, il, ih):
        self.rl = np.ascontiguousarray(rl, dtype=np.float64)
        self.rh = np.ascontiguousarray(rh, dtype=np.float64)
        self.il = np.ascontiguousarray(il, dtype=np.float64)
        self.ih = np.ascontiguousarray(ih, dtype=np.float64)
        if not (self.rl.shape == self.rh.shape == self.il.shape == self.ih.shape):
            raise DimensionMismatch("component arrays differ in shape")
        if np.any(self.rl > self.rh) or np.any(self.il > self.ih):
            raise DimensionMismatch("lower bound above upper bound")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_point(cls, a) -> "IMatrix":
        a = np.atleast_2d(np.asarray(a))
        re = np.real(a).astype(np.float64)
        im = np.imag(a).astype(np.float64)
        return cls(re, re.copy(), im, im.copy())

    @classmethod
    def identity(cls, n: int) -> "IMatrix":
        return cls.from_point(np.eye(n))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IMatrix":
        z = np.zeros((m, n))
        return cls(z, z.copy(), z.copy(), z.copy())

    @classmethod
    def from_boxes(cls, rows) -> "IMatrix":
        rl = np.array([[b.re.lo for b in r] for r in rows])
        rh = np.array([[b.re.hi for b in r] for r in rows])
        il = np.array([[b.im.lo for b in r] for r in rows])
        ih = np.array([[b.im.hi for b in r] for r in rows])
        return cls(rl, rh, il, ih)

    @classmethod
    def diag(cls, boxes) -> "IMatrix":
        n = len(boxes)
        out = cls.zeros(n, n)
        for i, b in enumerate(boxes):
            if isinstance(b, Interval):
                b = ComplexBox(b)
            out.rl[i, i] = b.re.lo
            out.rh[i, i] = b.re.hi
            out.il[i, i] = b.im.lo
            out.ih[i, i] = b.im.hi
        return out

    # -- views ------------------------------------------------------------

    @property
    def shape(self):
        return self.rl.shape

    def get(self, i: int, j: int) -> ComplexBox:
        return ComplexBox(Interval(self.rl[i, j], self.rh[i, j]),
                          Interval(self.il[i, j], self.ih[i, j]))

    def mid(self) -> np.ndarray:
        return ((self.rl + 0.5 * (self.rh - self.rl))
                + 1j * (self.il + 0.5 * (self.ih - self.il)))

    def mag(self) -> np.ndarray:
        """Entrywise upper bound on |z|."""
        rm = np.maximum(np.abs(self.rl), np.abs(self.rh))
        im = np.maximum(np.abs(self.il), np.abs(self.ih))
        return _bump_up(np.hypot(rm, im), 3)

    def contains(self, a) -> bool:
        a = np.atleast_2d(np.asarray(a))
        if a.shape != self.shape:
            return False
        re = np.real(a)
        im = np.imag(a)
        return bool(np.all((self.rl <= re) & (re <= self.rh)
                           & (self.il <= im) & (im <= self.ih)))

    def widened(self, eps: float) -> "IMatrix":
        if eps < 0:
            raise DimensionMismatch("negative widening")
        return IMatrix(_bump_down(self.rl - eps), _bump_up(self.rh + eps),
                       _bump_down(self.il - eps), _bump_up(self.ih + eps))

    def hermitian(self) -> "IMatrix":
        return IMatrix(self.rl.T, self.rh.T, -self.ih.T, -self.il.T)

    def submatrix(self, rows, cols) -> "IMatrix":
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        return IMatrix(self.rl[np.ix_(rows, cols)], self.rh[np.ix_(rows, cols)],
                       self.il[np.ix_(rows, cols)], self.ih[np.ix_(rows, cols)])

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "IMatrix":
        return IMatrix(-self.rh, -self.rl, -self.ih, -self.il)

    def __add__(self, other: "IMatrix") -> "IMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"add {self.shape} and {other.shape}")
        rl, rh = _add(self.rl, self.rh, other.rl, other.rh)
        il, ih = _add(self.il, self.ih, other.il, other.ih)
        return IMatrix(rl, rh, il, ih)

    def __sub__(self, other: "IMatrix") -> "IMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"sub {self.shape} and {other.shape}")
        rl, rh = _sub(self.rl, self.rh, other.rl, other.rh)
        il, ih = _sub(self.il, self.ih, other.il, other.ih)
        return IMatrix(rl, rh, il, ih)

    def scaled(self, s) -> "IMatrix":
        """Product with a scalar Interval or ComplexBox."""
        if isinstance(s, (int, float)):
            s = Interval(float(s))
        if isinstance(s, Interval):
            rl, rh = _scale(self.rl, self.rh, s)
            il, ih = _scale(self.il, self.ih, s)
            return IMatrix(rl, rh, il, ih)
        if isinstance(s, ComplexBox):
            a = self.scaled(s.re)
            b = self.scaled(s.im)
            # (x + iy)(c + id) = (xc - yd) + i(xd + yc)
            rl, rh = _sub(a.rl, a.rh, b.il, b.ih)
            il, ih = _add(b.rl, b.rh, a.il, a.ih)
            return IMatrix(rl, rh, il, ih)
        raise TypeError(f"cannot scale by {s!r}")

    def __matmul__(self, other: "IMatrix") -> "IMatrix":
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"matmul {self.shape} and {other.shape}")
        rr_lo, rr_hi = _mm_real(self.rl, self.rh, other.rl, other.rh)
        ii_lo, ii_hi = _mm_real(self.il, self.ih, other.il, other.ih)
        ri_lo, ri_hi = _mm_real(self.rl, self.rh, other.il, other.ih)
        ir_lo, ir_hi = _mm_real(self.il, self.ih, other.rl, other.rh)
        rl, rh = _sub(rr_lo, rr_hi, ii_lo, ii_hi)
        il, ih = _add(ri_lo, ri_hi, ir_lo, ir_hi)
        return IMatrix(rl, rh, il, ih)

    # -- norms ------------------------------------------------------------

    def _sum_hi(self, axis: int) -> np.ndarray:
        s = self.mag().sum(axis=axis)
        n = self.shape[axis]
        return _bump_up(s * (1.0 + (n + 2) * _U) + _TINY)

    def norm1_hi(self) -> float:
        """Upper bound on the maximum column sum of magnitudes."""
        if self.shape[0] == 0 or self.shape[1] == 0:
            return 0.0
        return float(self._sum_hi(axis=0).max())

    def norminf_hi(self) -> float:
        if self.shape[0] == 0 or self.shape[1] == 0:
            return 0.0
        return float(self._sum_hi(axis=1).max())

    def row_sums_hi(self) -> np.ndarray:
        if self.shape[1] == 0:
            return np.zeros(self.shape[0])
        return self._sum_hi(axis=1)


def op_norm2_bound(a: IMatrix) -> Interval:
    """Enclosure [0, b] with the spectral norm certified to be at most b.

    Takes the smaller of sqrt(norm1 * norminf) and the square root of a
    Gershgorin bound on A*A; the second route usually wins for the
    nearly-diagonal matrices produced by pseudo-diagonalization.
    """
    if a.shape[0] == 0 or a.shape[1] == 0:
        return Interval(0.0, 0.0)
    b1 = iv_sqrt(Interval(0.0, a.norm1_hi()) * Interval(0.0, a.norminf_hi())).hi
    ata = a.hermitian() @ a
    b2 = iv_sqrt(Interval(0.0, float(ata.row_sums_hi().max()))).hi
    return Interval(0.0, min(b1, b2))


def verified_inverse(a: IMatrix):
    """Certified inverse of a square interval matrix.

    Returns (inv, defect): an interval matrix containing the exact inverse of
    every point matrix inside `a`, and the residual norm bound that proves
    invertibility.  Raises SingularityUnverified when the residual bound of
    the floating-point candidate is not below one.
    """
    m, n = a.shape
    if m != n:
        raise DimensionMismatch("inverse of non-square matrix")
    mid = a.mid()
    try:
        r0 = np.linalg.inv(mid)
    except np.linalg.LinAlgError as exc:
        raise SingularityUnverified(f"midpoint inversion failed: {exc}") from exc
    if not np.all(np.isfinite(r0)):
        raise SingularityUnverified("midpoint inverse is not finite")
    r0m = IMatrix.from_point(r0)
    resid = IMatrix.identity(n) - (r0m @ a)
    e = op_norm2_bound(resid)
    if e.hi >= 1.0:
        raise SingularityUnverified(
            f"residual norm bound {e.hi} >= 1; cannot certify invertibility")
    nr0 = op_norm2_bound(r0m)
    ehi = Interval(0.0, e.hi)
    delta = (ehi / (Interval(1.0) - ehi) * Interval(0.0, nr0.hi)).hi
    return r0m.widened(delta), e
