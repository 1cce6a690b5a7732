"""Finite-dimensional stage: Jacobian blocks, pseudo-diagonalization, disks.

The linearization at a state with coefficient sequence U0 acts on sector
coordinates as diag(l(n~)) plus convolution by the kernel W = DG(U0).  With
the orthonormal sector basis b_k = m_k^{-1/2} sum_sigma chi(sigma) e_{sigma k}
(chi flips sign on reflected odd axes) the matrix entries are

    A[n, k] = delta_{nk} l(n~) + sqrt(m_n / m_k) sum_sigma chi(sigma) W[n - sigma k],

which is what conv_block assembles.  Everything here is interval-rigorous
except newton_solve, which only manufactures candidate states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEigenbasis,
    DimensionMismatch,
    GridMismatch,
    InvalidParameter,
    NoConvergence,
)
from .fourier import FourierSeq, Grid, _axis_types, conv, index_list, seq_l1
from .imatrix import IMatrix, op_norm2_bound, verified_inverse
from .interval import PI, ComplexBox, Interval, iv_sqrt
from .models import Model

_INF = math.inf


# ---------------------------------------------------------------------------
# index bookkeeping


def freq_norm_iv(grid: Grid, n) -> Interval:
    """Enclosure of |2 pi n / (2d)|_2 for a lattice multi-index."""
    ssq = sum(int(c) * int(c) for c in n)
    root = iv_sqrt(Interval(float(ssq)))
    return (Interval(2.0) * PI * root) / Interval(2.0 * grid.d)


def orbit_mult(sector_axes, n) -> int:
    m = 1
    for kind, c in zip(sector_axes, n):
        if kind != "signed" and c != 0:
            m *= 2
    return m


def shell_indices(grid: Grid, sector: str, inner: int, outer: int):
    """Sector indices n with inner < |n|_inf <= outer, deterministic order."""
    return [n for n in index_list(grid, sector, outer)
            if max(abs(c) for c in n) > inner]


def min_tail_freq(grid: Grid, R: int) -> float:
    """Lower bound on |2 pi n~|_2 over indices outside the cube I^R."""
    v = (Interval(2.0) * PI * Interval(float(R + 1))) / Interval(2.0 * grid.d)
    return v.lo


# ---------------------------------------------------------------------------
# block assembly


def kernel_from_state(model: Model, u0: FourierSeq) -> FourierSeq:
    """W = DG(u0) as a coefficient sequence (rigorous convolutions)."""
    terms = []
    for pw, coeff in model.kernel_coeffs():
        if pw == 0:
            term = FourierSeq.delta0(u0.grid, "c" * u0.grid.m
                                     if u0.sector != "full" else "full")
        else:
            term = u0
            for _ in range(pw - 1):
                term = conv(term, u0)
        terms.append(term.scaled(coeff))
    if not terms:
        raise InvalidParameter(f"{model.name}: empty nonlinearity")
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def conv_block(w: FourierSeq, sector: str, rows, cols) -> IMatrix:
    """Interval matrix of convolution by w between sector basis vectors.

    The kernel must be reflection-invariant (no odd axes) unless the basis
    sector is "full", in which case no symmetrization happens at all.
    """
    grid = w.grid
    axes = _axis_types(grid.m, sector)
    if sector != "full" and "s" in w.sector:
        raise GridMismatch("symmetrized basis needs an even kernel")
    if sector == "full" and w.sector != "full" and "s" in w.sector:
        raise GridMismatch("signed basis with odd kernel is not supported")
    wlo, whi = w.expand_signed()
    sw = w.S
    rows_a = np.asarray(rows, dtype=np.int64).reshape(len(rows), grid.m)
    cols_a = np.asarray(cols, dtype=np.int64).reshape(len(cols), grid.m)

    sym_axes = [ax for ax, kind in enumerate(axes) if kind != "signed"]
    acc_lo = np.zeros((len(rows), len(cols)))
    acc_hi = np.zeros((len(rows), len(cols)))
    for flips in itertools.product(*([(1, -1)] * len(sym_axes))):
        sig = np.ones(grid.m, dtype=np.int64)
        chi = 1
        for ax, fl in zip(sym_axes, flips):
            sig[ax] = fl
            if fl == -1 and axes[ax] == "s":
                chi = -chi
        # each distinct orbit element of a column must appear exactly once:
        # canonically, a flip may not reflect an axis where the index is 0
        diff = rows_a[:, None, :] - (cols_a * sig)[None, :, :]
        redundant = np.zeros(len(cols), dtype=bool)
        for ax in range(grid.m):
            if sig[ax] == -1:
                redundant |= cols_a[:, ax] == 0
        distinct = ~redundant
        inside = np.all(np.abs(diff) <= sw, axis=2)
        idx = np.clip(diff + sw, 0, 2 * sw)
        if grid.m == 1:
            glo = wlo[idx[:, :, 0]]
            ghi = whi[idx[:, :, 0]]
        else:
            glo = wlo[idx[:, :, 0], idx[:, :, 1]]
            ghi = whi[idx[:, :, 0], idx[:, :, 1]]
        mask = inside & distinct[None, :]
        glo = np.where(mask, glo, 0.0)
        ghi = np.where(mask, ghi, 0.0)
        if chi == -1:
            glo, ghi = -ghi, -glo
        acc_lo = np.nextafter(acc_lo + glo, -_INF)
        acc_hi = np.nextafter(acc_hi + ghi, _INF)

    # normalization sqrt(m_n / m_k) as a tiny outward-rounded interval
    mr = np.array([orbit_mult(axes, n) for n in rows], dtype=np.float64)
    mc = np.array([orbit_mult(axes, k) for k in cols], dtype=np.float64)
    ratio = np.sqrt(mr[:, None] / mc[None, :])
    f_lo = np.nextafter(np.nextafter(ratio, -_INF), -_INF)
    f_hi = np.nextafter(np.nextafter(ratio, _INF), _INF)
    cands = np.stack([acc_lo * f_lo, acc_lo * f_hi, acc_hi * f_lo, acc_hi * f_hi])
    out_lo = np.nextafter(cands.min(axis=0), -_INF)
    out_hi = np.nextafter(cands.max(axis=0), _INF)
    z = np.zeros_like(out_lo)
    return IMatrix(out_lo, out_hi, z, z.copy())


def symbol_diag(model: Model, grid: Grid, indices):
    """Enclosures l(n~) for a list of multi-indices."""
    return [model.symbol_at(freq_norm_iv(grid, n)) for n in indices]


def assemble_jacobian(model: Model, w: FourierSeq, sector: str, R: int) -> IMatrix:
    """Sector matrix of the linearization truncated to the cube I^R."""
    if model.components != 1:
        raise InvalidParameter("matrix assembly supports scalar models only")
    grid = w.grid
    idx = index_list(grid, sector, R)
    a = conv_block(w, sector, idx, idx)
    for i, lam in enumerate(symbol_diag(model, grid, idx)):
        lo = a.rl[i, i]
        hi = a.rh[i, i]
        s = Interval(lo, hi) + lam
        a.rl[i, i] = s.lo
        a.rh[i, i] = s.hi
    return a


# ---------------------------------------------------------------------------
# pseudo-diagonalization


@dataclass
class PseudoDiag:
    """Certified change of basis for the inner block.

    P holds the numerical eigenvectors (point matrix), Pinv a verified
    enclosure of its inverse, D = Pinv A P, and lams the diagonal of D.
    """

    indices: list
    P: IMatrix
    Pinv: IMatrix
    D: IMatrix
    lams: list
    inv_defect: Interval
    p_norm: Interval
    pinv_norm: Interval


def _normalize_columns(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        piv = col[k]
        if piv != 0:
            col = col * (abs(piv) / piv)
        nrm = np.linalg.norm(col)
        if nrm == 0:
            raise DegenerateEigenbasis("zero eigenvector column")
        out[:, j] = col / nrm
    return out


def build_pseudo_diag(a: IMatrix, indices, self_adjoint: bool) -> PseudoDiag:
    """Diagonalize the midpoint of `a` and carry the exact matrix along."""
    mid = a.mid()
    if self_adjoint:
        mid = 0.5 * (mid + mid.conj().T)
        _, vecs = np.linalg.eigh(mid.real if np.allclose(mid.imag, 0.0) else mid)
        vecs = vecs.astype(np.complex128)
    else:
        _, vecs = np.linalg.eig(mid)
    vecs = _normalize_columns(vecs)
    p = IMatrix.from_point(vecs)
    try:
        pinv, defect = verified_inverse(p)
    except Exception as exc:
        raise DegenerateEigenbasis(f"eigenbasis not verifiably invertible: {exc}")
    d = (pinv @ a) @ p
    lams = []
    for i in range(len(indices)):
        box = d.get(i, i)
        if self_adjoint:
            im = Interval(min(box.im.lo, 0.0), max(box.im.hi, 0.0))
            box = ComplexBox(box.re, im)
        lams.append(box)
    return PseudoDiag(
        indices=list(indices),
        P=p,
        Pinv=pinv,
        D=d,
        lams=lams,
        inv_defect=defect,
        p_norm=op_norm2_bound(p),
        pinv_norm=op_norm2_bound(pinv),
    )


# ---------------------------------------------------------------------------
# Gershgorin disks


@dataclass
class DiskSet:
    """Certified Gershgorin enclosure of the truncation-free linearization.

    * inner disks: centers lams from the pseudo-diagonal block I^N;
    * mid disks: centers l(n~) + diagonal kernel term for I^M minus I^N;
    * tail: every remaining index carries the disk
      B(l(n~) + w0, tail_radius); the symbol range over the tail region is
      reported through min_tail_s (lower bound on the radial variable).
    """

    grid: Grid
    sector: str
    n_inner: int
    n_mid: int
    inner_indices: list = field(default_factory=list)
    mid_indices: list = field(default_factory=list)
    centers: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    w0: ComplexBox = None
    tail_radius: float = 0.0
    min_tail_s: float = 0.0
    sym_factor: float = 1.0

    def disks(self):
        return list(zip(self.inner_indices + self.mid_indices,
                        self.centers, self.radii))


def _kernel_w0(w: FourierSeq) -> Interval:
    zero = (0,) * w.grid.m
    if w.axes[0] == "signed":
        pos = tuple(c + w.S for c in zero)
    else:
        pos = zero
    return Interval(float(w.lo[pos]), float(w.hi[pos]))


def sym_factor(grid: Grid, sector: str) -> float:
    """Upper bound on sqrt(m_n / m_k) over sector index pairs."""
    axes = _axis_types(grid.m, sector)
    a = sum(1 for k in axes if k != "signed")
    return float(Interval(2.0 ** a) .hi) ** 0.5 if a else 1.0


def gershgorin_disks(model: Model, w: FourierSeq, sector: str, N: int,
                     pseudo: PseudoDiag, a_inner: IMatrix) -> DiskSet:
    """Disks for the full (infinite) sector operator.

    a_inner must be the jacobian block the pseudo-diagonalization was built
    from.  M = N + S_W is where explicit rows stop and the uniform tail
    radius takes over.
    """
    grid = w.grid
    sw = w.S
    m_cut = N + sw
    inner = index_list(grid, sector, N)
    mid = shell_indices(grid, sector, N, m_cut)
    p = len(inner)

    # region (i): rows of D off the diagonal, plus the coupling into the mid
    # shell through Pinv DG
    d = pseudo.D
    off = _offdiag_mag(d)
    r_inner = off.sum(axis=1)
    if mid:
        dg_n_mid = conv_block(w, sector, inner, mid)
        coupling = pseudo.Pinv @ dg_n_mid
        r_inner = r_inner + coupling.mag().sum(axis=1)
    r_inner = np.nextafter(r_inner * (1.0 + (p + len(mid) + 4) * 2.0 ** -53), _INF)

    centers = list(pseudo.lams)
    radii = [float(x) for x in r_inner]

    # region (ii): explicit rows in the shell
    w0 = _kernel_w0(w)
    c_m = sym_factor(grid, sector)
    l1w = seq_l1(w)
    if mid:
        ext = shell_indices(grid, sector, N, m_cut + sw)
        dg_mid_inner = conv_block(w, sector, mid, inner)
        bp = dg_mid_inner @ pseudo.P
        term1 = bp.mag().sum(axis=1)
        dg_mid_ext = conv_block(w, sector, mid, ext)
        mag_ext = dg_mid_ext.mag()
        diag_boxes = []
        lam_mid = symbol_diag(model, grid, mid)
        for i, n in enumerate(mid):
            j = ext.index(n)
            diag_entry = dg_mid_ext.get(i, j).re
            mag_ext[i, j] = 0.0
            center = ComplexBox(lam_mid[i] + diag_entry)
            diag_boxes.append(center)
        term2 = mag_ext.sum(axis=1)
        r_mid = np.nextafter((term1 + term2) * (1.0 + (len(ext) + p + 4) * 2.0 ** -53), _INF)
        centers.extend(diag_boxes)
        radii.extend(float(x) for x in r_mid)

    tail_radius = (Interval(c_m) * (l1w - w0.abs())).hi
    return DiskSet(
        grid=grid,
        sector=sector,
        n_inner=N,
        n_mid=m_cut,
        inner_indices=inner,
        mid_indices=mid,
        centers=centers,
        radii=radii,
        w0=ComplexBox(w0),
        tail_radius=tail_radius,
        min_tail_s=min_tail_freq(grid, m_cut),
        sym_factor=c_m,
    )


def _offdiag_mag(a: IMatrix) -> np.ndarray:
    m = a.mag()
    np.fill_diagonal(m, 0.0)
    return m


# ---------------------------------------------------------------------------
# clusters


@dataclass
class Cluster:
    members: list            # positions into DiskSet.centers
    center_hull: ComplexBox
    lo: float                # real-part extent of the union of disks
    hi: float
    count: int


def cluster_disks(diskset: DiskSet) -> list:
    """Group overlapping finite disks; counts carry multiplicity."""
    n = len(diskset.centers)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    cs = diskset.centers
    rs = diskset.radii
    for i in range(n):
        for j in range(i + 1, n):
            dist = (cs[i] - cs[j]).mig()
            if dist <= rs[i] + rs[j]:
                union(i, j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = []
    for members in groups.values():
        members.sort()
        lo = min((cs[i].re.lo - rs[i]) for i in members)
        hi = max((cs[i].re.hi + rs[i]) for i in members)
        clusters.append(Cluster(
            members=members,
            center_hull=ComplexBox.hull(*(cs[i] for i in members)),
            lo=math.nextafter(lo, -_INF),
            hi=math.nextafter(hi, _INF),
            count=len(members),
        ))
    clusters.sort(key=lambda c: (c.lo, c.hi))
    return clusters


# ---------------------------------------------------------------------------
# Newton (non-rigorous; produces candidate states only)


def newton_solve(model: Model, grid: Grid, sector: str, seed, N: int,
                 tol: float = 1e-11, max_iter: int = 80,
                 step_cap: float = 0.5) -> FourierSeq:
    """Newton iteration on the truncated sector coefficients.

    seed is a FourierSeq or a raw coefficient array in sector storage.  The
    returned sequence is a point sequence; its defect must be certified
    elsewhere before any rigorous claim.
    """
    if model.components != 1:
        raise InvalidParameter("newton_solve supports scalar models only")
    idx = index_list(grid, sector, N)
    lam_mid = np.array([l.mid() for l in symbol_diag(model, grid, idx)])
    side = 2 * N + 1 if sector == "full" else N + 1
    shape = (side,) * grid.m
    if not isinstance(seed, FourierSeq):
        seed = FourierSeq.from_point(grid, sector, np.asarray(seed, dtype=np.float64))
    vec = _flatten_to(seed, grid, sector, N)

    def to_seq(v: np.ndarray) -> FourierSeq:
        return FourierSeq.from_point(grid, sector, v.reshape(shape))

    def res(v: np.ndarray) -> np.ndarray:
        useq = to_seq(v)
        total = None
        for deg, coeff in model.nonlin:
            term = useq
            for _ in range(deg - 1):
                term = conv(term, useq)
            term = term.scaled(coeff)
            total = term if total is None else total + term
        g = _flatten_to(total, grid, sector, N) if total is not None else 0.0
        return lam_mid * v + g

    for _ in range(max_iter):
        r = res(vec)
        if np.max(np.abs(r)) < tol:
            return to_seq(vec)
        wk = kernel_from_state(model, to_seq(vec))
        jac = assemble_jacobian(model, wk, sector, N).mid().real
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Newton system: {exc}") from exc
        ns = float(np.max(np.abs(step)))
        if not math.isfinite(ns):
            raise NoConvergence("Newton step is not finite")
        # cap the max-norm of early steps; full steps once in the basin
        vec = vec - (step if ns < step_cap else step * (step_cap / ns))
    raise NoConvergence(f"no convergence after {max_iter} Newton steps")


def _flatten_to(seq: FourierSeq, grid: Grid, sector: str, N: int) -> np.ndarray:
    """Midpoint coefficients of seq restricted/padded to the cube I^N."""
    if seq.sector != sector:
        raise GridMismatch("sector changed during Newton assembly")
    s = seq.padded(N) if seq.S < N else seq
    mid = s.mid()
    signed = s.axes[0] == "signed"
    if signed:
        off = s.S
        sl = tuple(slice(off - N, off + N + 1) for _ in range(grid.m))
    else:
        sl = tuple(slice(0, N + 1) for _ in range(grid.m))
    return mid[sl].reshape(-1)
