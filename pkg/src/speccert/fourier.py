"""Compactly supported Fourier-coefficient sequences on Z^m, m in {1, 2}.

A sequence represents a function on the box Omega_d = (-d, d)^m through its
coefficients against e^{i pi n . x / d}.  Coefficients are real intervals.
Symmetry sectors store one fundamental-domain copy:

  m = 1:  "full" (signed indices), "c" (even), "s" (odd);
  m = 2:  "full", and "cc", "cs", "sc", "ss" (even/odd per axis).

For an odd axis the stored value v_n is the amplitude in the convention
full-coefficient = i * sign(n_i) * v_|n|, which keeps all storage real and
turns products into real convolutions with per-axis sign corrections.

Convolutions are computed over the true supports (supports add, nothing
wraps) with the same midpoint-radius enclosure used for matrix products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve as _sp_convolve

from .errors import DimensionMismatch, GridMismatch, InvalidParameter
from .interval import Interval, iv_sqrt

_U = 2.0 ** -53
_TINY = 5e-308
_INF = math.inf

_SECTORS = {1: ("full", "c", "s"), 2: ("full", "cc", "cs", "sc", "ss")}


@dataclass(frozen=True)
class Grid:
    """Domain descriptor: dimension m and half-period d of Omega_d."""

    m: int
    d: float

    def __post_init__(self):
        if self.m not in (1, 2):
            raise InvalidParameter(f"dimension {self.m} not supported")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise InvalidParameter(f"half-period d={self.d} must be positive")

    def freq(self, n) -> np.ndarray:
        """Unscaled frequency n / (2d) of a lattice multi-index."""
        return np.asarray(n, dtype=np.float64) / (2.0 * self.d)


def _axis_types(m: int, sector: str):
    if sector not in _SECTORS[m]:
        raise InvalidParameter(f"unknown sector {sector!r} for m={m}")
    if sector == "full":
        return ("signed",) * m
    return tuple("c" if ch == "c" else "s" for ch in sector)


def _mult_weights(shape, axes):
    """Orbit sizes of fundamental-domain indices (1, 2, or 4 copies)."""
    w = np.ones(shape)
    for ax, kind in enumerate(axes):
        if kind == "signed":
            continue
        idx = np.arange(shape[ax])
        wax = np.where(idx == 0, 1.0, 2.0)
        sl = [None] * len(shape)
        sl[ax] = slice(None)
        w = w * wax[tuple(sl)]
    return w


def _convolve_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim == 1:
        return np.convolve(a, b)
    return _sp_convolve(a, b, mode="full", method="direct")


def _conv_real(al, ah, bl, bh):
    """Enclosure of the convolution of real interval arrays."""
    am = al + 0.5 * (ah - al)
    bm = bl + 0.5 * (bh - bl)
    ar = np.nextafter(np.nextafter(np.maximum(ah - am, am - al), _INF), _INF)
    br = np.nextafter(np.nextafter(np.maximum(bh - bm, bm - bl), _INF), _INF)
    aa = np.abs(am)
    ba = np.abs(bm)
    k = min(am.size, bm.size)
    gamma = (k + 4) * _U
    cm = _convolve_direct(am, bm)
    m1 = _convolve_direct(aa, ba)
    m2 = _convolve_direct(ar, ba + br) + _convolve_direct(aa, br)
    rad = (m2 + gamma * m1) * (1.0 + 8.0 * gamma) + 5.0 * _TINY
    lo = np.nextafter(np.nextafter(cm - rad, -_INF), -_INF)
    hi = np.nextafter(np.nextafter(cm + rad, _INF), _INF)
    return lo, hi


class FourierSeq:
    """Interval coefficient tensor with a sector tag and support radius S."""

    __slots__ = ("grid", "sector", "S", "lo", "hi")

    def __init__(self, grid: Grid, sector: str, lo, hi):
        axes = _axis_types(grid.m, sector)
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if lo.ndim != grid.m or lo.shape != hi.shape:
            raise DimensionMismatch("coefficient arrays malformed")
        side = lo.shape[0]
        if any(s != side for s in lo.shape):
            raise DimensionMismatch("coefficient tensor must be cubical")
        if axes[0] == "signed":
            if side % 2 == 0:
                raise DimensionMismatch("signed storage needs odd side length")
            S = side // 2
        else:
            S = side - 1
        if np.any(lo > hi):
            raise DimensionMismatch("lower bound above upper bound")
        self.grid = grid
        self.sector = sector
        self.S = S
        self.lo = lo
        self.hi = hi
        for ax, kind in enumerate(axes):
            if kind == "s":
                sl = [slice(None)] * grid.m
                sl[ax] = 0
                if np.any(self.lo[tuple(sl)] != 0.0) or np.any(self.hi[tuple(sl)] != 0.0):
                    raise InvalidParameter("odd-axis coefficients at index 0 must vanish")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, grid: Grid, sector: str, S: int) -> "FourierSeq":
        axes = _axis_types(grid.m, sector)
        side = 2 * S + 1 if axes[0] == "signed" else S + 1
        z = np.zeros((side,) * grid.m)
        return cls(grid, sector, z, z.copy())

    @classmethod
    def from_point(cls, grid: Grid, sector: str, values) -> "FourierSeq":
        values = np.asarray(values, dtype=np.float64)
        return cls(grid, sector, values, values.copy())

    @classmethod
    def delta0(cls, grid: Grid, sector: str) -> "FourierSeq":
        if "s" in _axis_types(grid.m, sector):
            raise InvalidParameter("unit element does not live in an odd sector")
        out = cls.zeros(grid, sector, 0)
        out.lo[(0,) * grid.m] = 1.0
        out.hi[(0,) * grid.m] = 1.0
        return out

    # -- basic structure --------------------------------------------------

    @property
    def axes(self):
        return _axis_types(self.grid.m, self.sector)

    def mid(self) -> np.ndarray:
        return self.lo + 0.5 * (self.hi - self.lo)

    def mag_arr(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def copy(self) -> "FourierSeq":
        return FourierSeq(self.grid, self.sector, self.lo.copy(), self.hi.copy())

    def _check_mate(self, other: "FourierSeq") -> None:
        if self.grid != other.grid:
            raise GridMismatch("sequences live on different grids")

    def padded(self, S: int) -> "FourierSeq":
        """Same sequence with support radius extended to S >= self.S."""
        if S < self.S:
            raise DimensionMismatch("padded support below current support")
        out = FourierSeq.zeros(self.grid, self.sector, S)
        signed = self.axes[0] == "signed"
        off_out = S if signed else 0
        off_in = self.S if signed else 0
        sl_out = tuple(slice(off_out - off_in, off_out - off_in + s)
                       for s in self.lo.shape)
        out.lo[sl_out] = self.lo
        out.hi[sl_out] = self.hi
        return out

    def __add__(self, other: "FourierSeq") -> "FourierSeq":
        self._check_mate(other)
        if self.sector != other.sector:
            raise GridMismatch("cannot add sequences from different sectors")
        S = max(self.S, other.S)
        a = self.padded(S)
        b = other.padded(S)
        lo = np.nextafter(a.lo + b.lo, -_INF)
        hi = np.nextafter(a.hi + b.hi, _INF)
        return FourierSeq(self.grid, self.sector, lo, hi)

    def __sub__(self, other: "FourierSeq") -> "FourierSeq":
        return self + other.scaled(Interval(-1.0))

    def scaled(self, s: Interval) -> "FourierSeq":
        if isinstance(s, (int, float)):
            s = Interval(float(s))
        cands = np.stack([self.lo * s.lo, self.lo * s.hi,
                          self.hi * s.lo, self.hi * s.hi])
        lo = np.nextafter(cands.min(axis=0), -_INF)
        hi = np.nextafter(cands.max(axis=0), _INF)
        if s.lo == s.hi and s.lo in (0.0, 1.0, -1.0):
            lo = np.nextafter(lo, _INF)
            hi = np.nextafter(hi, -_INF)
        return FourierSeq(self.grid, self.sector, lo, hi)

    # -- signed expansion and folding -------------------------------------

    def expand_signed(self):
        """Signed real arrays (lo, hi) carrying the per-axis sign pattern.

        For an odd axis the entry at -n is the negative of the entry at n;
        the i factors of the odd-axis convention are accounted for by the
        sign corrections applied after convolution.
        """
        lo = self.lo
        hi = self.hi
        for ax, kind in enumerate(self.axes):
            if kind == "signed":
                continue
            sl_pos = [slice(None)] * self.grid.m
            sl_pos[ax] = slice(1, None)
            flip_lo = np.flip(lo[tuple(sl_pos)], axis=ax)
            flip_hi = np.flip(hi[tuple(sl_pos)], axis=ax)
            if kind == "s":
                flip_lo, flip_hi = -flip_hi, -flip_lo
            lo = np.concatenate([flip_lo, lo], axis=ax)
            hi = np.concatenate([flip_hi, hi], axis=ax)
        return lo, hi

    def __eq__(self, other) -> bool:
        return (isinstance(other, FourierSeq)
                and self.grid == other.grid and self.sector == other.sector
                and self.lo.shape == other.lo.shape
                and bool(np.all(self.lo == other.lo))
                and bool(np.all(self.hi == other.hi)))

    __hash__ = None


def _fold(grid: Grid, sector: str, lo: np.ndarray, hi: np.ndarray) -> FourierSeq:
    """Restrict a signed array with the sector's symmetry to its domain."""
    axes = _axis_types(grid.m, sector)
    S = lo.shape[0] // 2
    for ax, kind in enumerate(axes):
        if kind == "signed":
            continue
        sl = [slice(None)] * grid.m
        sl[ax] = slice(S, None)
        lo = lo[tuple(sl)]
        hi = hi[tuple(sl)]
        if kind == "s":
            sl0 = [slice(None)] * grid.m
            sl0[ax] = 0
            lo[tuple(sl0)] = 0.0
            hi[tuple(sl0)] = 0.0
    return FourierSeq(grid, sector, np.ascontiguousarray(lo),
                      np.ascontiguousarray(hi))


def _product_sector(m: int, sa: str, sb: str):
    """Result sector of a product plus the count of odd*odd axes."""
    if sa == "full" or sb == "full":
        other = sb if sa == "full" else sa
        if "s" in other and other != "full":
            raise GridMismatch(
                "product of a signed-storage sequence with an odd-sector "
                "sequence has imaginary coefficients; expand both to a "
                "common symmetric sector first")
        return "full", 0
    out = []
    flips = 0
    for ca, cb in zip(sa, sb):
        if ca == "s" and cb == "s":
            out.append("c")
            flips += 1
        elif ca == "s" or cb == "s":
            out.append("s")
        else:
            out.append("c")
    return "".join(out), flips


def conv(u: FourierSeq, v: FourierSeq) -> FourierSeq:
    """Rigorous convolution; the result support is the sum of supports."""
    u._check_mate(v)
    m = u.grid.m
    sec, flips = _product_sector(m, u.sector, v.sector)
    alo, ahi = u.expand_signed()
    blo, bhi = v.expand_signed()
    lo, hi = _conv_real(alo, ahi, blo, bhi)
    if flips % 2 == 1:
        lo, hi = -hi, -lo
    return _fold(u.grid, sec, lo, hi)


def seq_l1(u: FourierSeq) -> Interval:
    """Enclosure of the l1 norm (with orbit multiplicities)."""
    w = _mult_weights(u.lo.shape, u.axes)
    mag = u.mag_arr()
    mig = np.where((u.lo <= 0.0) & (u.hi >= 0.0), 0.0,
                   np.minimum(np.abs(u.lo), np.abs(u.hi)))
    n = u.lo.size
    hi = float((w * mag).sum()) * (1.0 + (n + 4) * _U) + _TINY
    lo = max(float((w * mig).sum()) * (1.0 - (n + 4) * _U) - _TINY, 0.0)
    return Interval(lo, hi)


def seq_l2(u: FourierSeq) -> Interval:
    """Enclosure of the l2 norm (with orbit multiplicities)."""
    w = _mult_weights(u.lo.shape, u.axes)
    mag = u.mag_arr()
    mig = np.where((u.lo <= 0.0) & (u.hi >= 0.0), 0.0,
                   np.minimum(np.abs(u.lo), np.abs(u.hi)))
    n = u.lo.size
    hi2 = float((w * mag * mag).sum()) * (1.0 + (n + 6) * _U) + _TINY
    lo2 = max(float((w * mig * mig).sum()) * (1.0 - (n + 6) * _U) - _TINY, 0.0)
    return iv_sqrt(Interval(lo2, hi2))


def sup_bound(u: FourierSeq) -> Interval:
    """Upper bound on the sup norm of the represented function."""
    l1 = seq_l1(u)
    return Interval(0.0, l1.hi)


def project_inner(u: FourierSeq, N: int) -> FourierSeq:
    """Coefficients with |n|_inf <= N; entries move exactly, none change."""
    out = u.copy()
    signed = out.axes[0] == "signed"
    idx = np.arange(-u.S, u.S + 1) if signed else np.arange(u.S + 1)
    mask1 = np.abs(idx) > N
    for ax in range(u.grid.m):
        sl = [slice(None)] * u.grid.m
        sl[ax] = mask1
        out.lo[tuple(sl)] = 0.0
        out.hi[tuple(sl)] = 0.0
    return out


def project_outer(u: FourierSeq, N: int) -> FourierSeq:
    """Complementary projection: coefficients with |n|_inf > N."""
    out = u.copy()
    signed = out.axes[0] == "signed"
    idx = np.arange(-u.S, u.S + 1) if signed else np.arange(u.S + 1)
    inside = np.ones(u.lo.shape, dtype=bool)
    for ax in range(u.grid.m):
        sl = [None] * u.grid.m
        sl[ax] = slice(None)
        inside &= (np.abs(idx) <= N)[tuple(sl)]
    out.lo[inside] = 0.0
    out.hi[inside] = 0.0
    return out


def index_list(grid: Grid, sector: str, S: int):
    """Fundamental-domain multi-indices in deterministic (row-major) order."""
    axes = _axis_types(grid.m, sector)
    if axes[0] == "signed":
        rng = range(-S, S + 1)
    else:
        rng = range(S + 1)
    if grid.m == 1:
        return [(n,) for n in rng]
    return [(n1, n2) for n1 in rng for n2 in rng]


def sample_gamma_dagger(u: FourierSeq, points: np.ndarray) -> np.ndarray:
    """Non-rigorous midpoint samples of the extension-by-zero of u.

    Points are given as an array of shape (..., m) (or (...,) when m = 1);
    the value is 0 outside the closed box Omega_d.
    """
    pts = np.asarray(points, dtype=np.float64)
    m = u.grid.m
    if m == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
        pts = pts.reshape(pts.shape + (1,))
    flat = pts.reshape(-1, m)
    lo, hi = u.expand_signed()
    coef = lo + 0.5 * (hi - lo)
    coef = coef.astype(np.complex128)
    # restore the i factors of odd axes
    S = u.S
    idx = np.arange(-S, S + 1)
    for ax, kind in enumerate(u.axes):
        if kind == "s":
            sl = [None] * m
            sl[ax] = slice(None)
            coef = coef * (1j * np.ones_like(idx))[tuple(sl)]
    vals = np.zeros(flat.shape[0], dtype=np.complex128)
    inside = np.all(np.abs(flat) <= u.grid.d, axis=1)
    theta = math.pi / u.grid.d
    phase0 = np.exp(1j * theta * np.outer(flat[:, 0], idx))
    if m == 1:
        vals[:] = phase0 @ coef
    else:
        phase1 = np.exp(1j * theta * np.outer(flat[:, 1], idx))
        vals[:] = np.einsum("pi,ij,pj->p", phase0, coef, phase1)
    vals = np.where(inside, vals, 0.0)
    if u.sector == "full":
        return vals.reshape(pts.shape[:-1])
    return np.real(vals).reshape(pts.shape[:-1])
