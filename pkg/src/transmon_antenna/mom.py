"""Thin-wire method-of-moments solver.

Mixed-potential electric-field integral equation on straight segments,
solved by Galerkin testing with piecewise-linear (triangle) current bases.
A basis lives on a pair of segments that share a node; at a node where
``k`` segments meet, ``k - 1`` bases are formed against the lowest-indexed
segment, which enforces Kirchhoff's current law at junctions and lets loops
close on themselves.  Open wire ends carry no basis, so the current there
is zero.

The kernel is the reduced thin-wire kernel ``exp(-jkR) / (4 pi R)`` with
``R = sqrt(|r - r'|^2 + a^2)``.  It is split into its static part
``1 / (4 pi R)``, whose inner integral along a segment is done in closed
form, and a smooth remainder integrated by Gauss-Legendre.  Self terms of
the static part are integrated exactly in both variables when the kernel
option is ``"extended-self-term"``.

The feed is a voltage source of 1 V applied across the feed segment; the
input current is the current at the centre of that segment.  Closed loops
may instead be driven by a uniform tangential field whose line integral
around the loop is 1 V.  That drive excites only the uniform-current mode,
which is the mode the small-loop radiation resistance formula describes; a
lumped gap also excites the higher Fourier modes of the loop.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .em import CONST, PASSIVITY_TOL, FrequencyGrid, ImpedanceSweep
from .geometry import GeometryError, WireModel, discretize, node_table

log = logging.getLogger(__name__)

KERNELS = ("reduced", "extended-self-term")
EXCITATIONS = ("gap", "uniform")
FOUR_PI = 4.0 * math.pi
# Segment pairs closer than this many segment lengths get graded quadrature.
NEAR_FACTOR = 1.0
RCOND_MIN = 1e-14


class SolverError(RuntimeError):
    """Raised when the linear system cannot be trusted.

    ``frequency`` and ``condition`` carry diagnostic context when known.
    """

    def __init__(self, message, frequency=None, condition=None):
        self.frequency = frequency
        self.condition = condition
        ctx = []
        if frequency is not None:
            ctx.append(f"f = {frequency / 1e9:.6g} GHz")
        if condition is not None:
            ctx.append(f"condition ~ {condition:.3g}")
        super().__init__(message + (f" ({', '.join(ctx)})" if ctx else ""))


@dataclass(frozen=True)
class SolverConfig:
    segments_per_wavelength: int = 20
    quadrature_points: int = 8
    kernel: str = "extended-self-term"
    pivoting: bool = True
    max_workers: int | None = None

    def __post_init__(self):
        if self.quadrature_points < 4:
            raise ValueError("quadrature_points must be >= 4")
        if self.segments_per_wavelength < 10:
            raise ValueError("segments_per_wavelength must be >= 10")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")
        if not self.pivoting:
            raise ValueError("only partial-pivot factorization is supported")


@dataclass(frozen=True)
class MomMatrix:
    n: int
    entries: np.ndarray
    rhs: np.ndarray

    def is_symmetric(self, rtol: float = 1e-9) -> bool:
        z = self.entries
        return bool(np.max(np.abs(z - z.T)) <= rtol * np.max(np.abs(z)))

    def far_diagonal_dominance(self) -> bool:
        """|Z_ii| > |Z_ij| for every pair more than n/2 indices apart."""
        z = np.abs(self.entries)
        i, j = np.indices(z.shape)
        far = np.abs(i - j) > self.n / 2
        return bool(np.all(z[far] < np.broadcast_to(np.diag(z)[:, None], z.shape)[far]))


# --------------------------------------------------------------------------
# Static (frequency independent) quantities


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _inner_static(obs, start, unit, length, a2):
    """Closed-form inner integrals of 1/(4 pi R) along a source segment.

    Returns (int G dt, int (t/L) G dt) for every observation point.
    """
    d = obs - start
    t0 = np.sum(d * unit, axis=-1)
    rho2 = np.maximum(np.sum(d * d, axis=-1) - t0 * t0, 0.0)
    b2 = rho2 + a2
    b = np.sqrt(b2)
    i0 = np.arcsinh((length - t0) / b) + np.arcsinh(t0 / b)
    r_end = np.sqrt((length - t0) ** 2 + b2)
    r_start = np.sqrt(t0 * t0 + b2)
    i1 = r_end - r_start + t0 * i0
    return i0 / FOUR_PI, i1 / (FOUR_PI * length)


def _poly_kernel_integral(coeffs, length, a):
    """int_0^L sum_n c_n s^n / sqrt(s^2 + a^2) ds for n <= 3."""
    r = math.hypot(length, a)
    ash = math.asinh(length / a)
    anti = (
        ash,
        r - a,
        (length * r - a * a * ash) / 2,
        (r**3 - a**3) / 3 - a * a * (r - a),
    )
    return sum(c * v for c, v in zip(coeffs, anti))


def _self_static_exact(length, a):
    """Exact self-term moments L^2 int int u^al v^be / (4 pi R) du dv."""
    L = length
    j00 = 2 * _poly_kernel_integral((L, -1.0), L, a)
    j10 = L * j00 / 2
    j11 = 2 * _poly_kernel_integral((L**3 / 3, -(L**2) / 2, 0.0, 1.0 / 6), L, a)
    m = np.array([[j00, j10 / L], [j10 / L, j11 / L**2]])
    return m / FOUR_PI


def _graded_breaks(centres, h0):
    """Breakpoints on [0, 1] refined geometrically towards ``centres``."""
    pts = {0.0, 1.0}
    for c in centres:
        pts.add(c)
        h = h0
        while h < 1.0:
            for p in (c - h, c + h):
                if 0.0 < p < 1.0:
                    pts.add(p)
            h *= 4.0
    return np.array(sorted(pts))


def _composite_rule(breaks, n):
    x, w = _gauss01(n)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


def _closest_param(p0, p1, q0, q1, samples=65):
    """Parameter on segment p closest to segment q, and that distance."""
    u = np.linspace(0.0, 1.0, samples)
    pts = p0 + np.outer(u, p1 - p0)
    dq = q1 - q0
    t = np.clip((pts - q0) @ dq / (dq @ dq), 0.0, 1.0)
    dist = np.linalg.norm(pts - (q0 + np.outer(t, dq)), axis=1)
    k = int(np.argmin(dist))
    return float(u[k]), float(dist[k])


def _static_pair_graded(mesh, s, t, n):
    """Static moments for a near pair with outer quadrature graded towards
    the closest approach."""
    a2 = mesh.a2[s, t]
    Ls = mesh.length[s]
    if s == t:
        centres = [0.0, 1.0]
        h0 = math.sqrt(a2) / Ls
    else:
        u_c, dmin = _closest_param(mesh.start[s], mesh.end[s], mesh.start[t], mesh.end[t])
        centres = [u_c]
        h0 = max(math.sqrt(dmin * dmin + a2), 1e-6 * Ls) / Ls
    x, w = _composite_rule(_graded_breaks(centres, h0), n)
    obs = mesh.start[s] + np.outer(x * Ls, mesh.unit[s])
    g0, g1 = _inner_static(obs, mesh.start[t], mesh.unit[t], mesh.length[t], a2)
    w = w * Ls
    return np.array(
        [[w @ g0, w @ g1], [(w * x) @ g0, (w * x) @ g1]]
    )


class _Mesh:
    """Segment arrays, basis incidence and static interaction tables."""

    def __init__(self, model: WireModel, quad: int, kernel: str):
        segs = model.segments
        self.model = model
        self.start = np.array([w.start for w in segs], dtype=float)
        self.end = np.array([w.end for w in segs], dtype=float)
        self.length = np.linalg.norm(self.end - self.start, axis=1)
        self.unit = (self.end - self.start) / self.length[:, None]
        self.radius = np.array([w.radius for w in segs], dtype=float)
        self.a2 = (self.radius[:, None] ** 2 + self.radius[None, :] ** 2) / 2
        self.ns = len(segs)
        self.feed = model.feed_segment_index
        self._build_bases()
        self.static = self._static_tables(quad, kernel)
        self._dynamic_geometry(max(4, quad // 2))

    def _build_bases(self):
        ids, coords = node_table(self.model)
        self.node_coords = coords
        attached: dict[int, list[tuple[int, int]]] = {}
        for s, (n0, n1) in enumerate(ids):
            attached.setdefault(int(n0), []).append((s, 0))
            attached.setdefault(int(n1), []).append((s, 1))
        rise, fall = np.array([0.0, 1.0]), np.array([1.0, -1.0])
        p_rows, q_rows = [], []
        for node in sorted(attached):
            segs = attached[node]
            if len(segs) < 2:
                continue
            ref = segs[0]
            for other in segs[1:]:
                p = np.zeros((self.ns, 2))
                q = np.zeros(self.ns)
                # Current flows into the node along ``ref`` and out along ``other``.
                s, at_end = ref
                sigma = 1.0 if at_end else -1.0
                p[s] += sigma * (rise if at_end else fall)
                q[s] += sigma * (1.0 if at_end else -1.0) / self.length[s]
                s, at_end = other
                sigma = -1.0 if at_end else 1.0
                p[s] += sigma * (rise if at_end else fall)
                q[s] += sigma * (1.0 if at_end else -1.0) / self.length[s]
                p_rows.append(p)
                q_rows.append(q)
        if len(p_rows) == 0:
            raise GeometryError("wire model supports no current basis (needs >= 2 segments)")
        self.P = np.array(p_rows)
        self.Q = np.array(q_rows)
        self.nb = len(p_rows)
        # Current at each segment centre per unit basis coefficient.
        self.mid = self.P[:, :, 0] + 0.5 * self.P[:, :, 1]
        self.feed_vec = self.mid[:, self.feed].copy()
        if not np.any(self.feed_vec):
            raise GeometryError("feed segment carries no basis current (open wire end?)")

    def _static_tables(self, n, kernel):
        x, w = _gauss01(n)
        ns = self.ns
        L = self.length
        obs = self.start[:, None, :] + (x[None, :, None] * L[:, None, None]) * self.unit[:, None, :]
        g0, g1 = _inner_static(
            obs[:, :, None, :],
            self.start[None, None, :, :],
            self.unit[None, None, :, :],
            L[None, None, :],
            self.a2[:, None, :],
        )
        wl = w[None, :, None] * L[:, None, None]
        table = np.empty((ns, ns, 2, 2))
        table[:, :, 0, 0] = np.sum(wl * g0, axis=1)
        table[:, :, 0, 1] = np.sum(wl * g1, axis=1)
        table[:, :, 1, 0] = np.sum(wl * x[None, :, None] * g0, axis=1)
        table[:, :, 1, 1] = np.sum(wl * x[None, :, None] * g1, axis=1)

        mids = (self.start + self.end) / 2
        centre_dist = np.linalg.norm(mids[:, None] - mids[None, :], axis=-1)
        reach = (L[:, None] + L[None, :]) / 2 + NEAR_FACTOR * np.maximum(L[:, None], L[None, :])
        for s, t in zip(*np.nonzero(centre_dist < reach)):
            if s == t and kernel == "extended-self-term":
                table[s, s] = _self_static_exact(L[s], self.radius[s])
            else:
                table[s, t] = _static_pair_graded(self, s, t, n)
        # Reciprocity: the (s, t) and (t, s) moments describe the same integral.
        return (table + table.transpose(1, 0, 3, 2)) / 2

    def _dynamic_geometry(self, n):
        x, w = _gauss01(n)
        L = self.length
        pts = self.start[:, None, :] + (x[None, :, None] * L[:, None, None]) * self.unit[:, None, :]
        diff = pts[:, :, None, None, :] - pts[None, None, :, :, :]
        r2 = np.sum(diff * diff, axis=-1) + self.a2[:, None, :, None]
        self.dyn_R = np.sqrt(r2)  # (s, i, t, j)
        wl = w[None, :] * L[:, None]
        self.dyn_w = [wl, wl * x[None, :]]  # moment 0 and 1 weights, (s, i)
        # Self pairs: (cos kR - 1)/R has a kink at u = v, so the inner rule is
        # split there.  Outer nodes u_i, inner nodes on [0, u_i] and [u_i, 1].
        xs, ws = _gauss01(2 * n)
        v = np.concatenate([xs[:, None] * xs[None, :], xs[:, None] + (1 - xs[:, None]) * xs[None, :]], axis=1)
        wv = np.concatenate([xs[:, None] * ws[None, :], (1 - xs[:, None]) * ws[None, :]], axis=1)
        du = np.abs(xs[:, None] - v)
        self.self_R = np.sqrt((L[:, None, None] * du[None]) ** 2 + self.radius[:, None, None] ** 2)
        wuv = ws[:, None] * wv
        self.self_w = np.stack([
            wuv, wuv * v, wuv * xs[:, None], wuv * xs[:, None] * v,
        ]).reshape(2, 2, *wuv.shape)  # (alpha, beta, i, j)

    def dynamic_tables(self, k):
        """Moments of the smooth remainder (exp(-jkR) - 1)/(4 pi R)."""
        R = self.dyn_R
        half = 0.5 * k * R
        g = -2j * np.sin(half) * np.exp(-1j * half) / (FOUR_PI * R)
        out = np.empty((self.ns, self.ns, 2, 2), dtype=complex)
        for al in range(2):
            for be in range(2):
                out[:, :, al, be] = np.einsum(
                    "si,sitj,tj->st", self.dyn_w[al], g, self.dyn_w[be], optimize=True
                )
        R = self.self_R
        half = 0.5 * k * R
        gs = -2j * np.sin(half) * np.exp(-1j * half) / (FOUR_PI * R)
        diag = np.einsum("abij,sij->sab", self.self_w, gs) * (self.length**2)[:, None, None]
        idx = np.arange(self.ns)
        out[idx, idx] = diag
        return out

    def cos_table(self):
        return self.unit @ self.unit.T


@lru_cache(maxsize=8)
def _mesh(model: WireModel, quad: int, kernel: str) -> _Mesh:
    return _Mesh(model, quad, kernel)


# --------------------------------------------------------------------------
# Public solver API


def _prepared(m: WireModel, f: float, cfg: SolverConfig) -> WireModel:
    if not m.discretized:
        m = discretize(m, cfg.segments_per_wavelength, f)
    return m


def _check_validity(m: WireModel, f: float):
    lam = m.medium.wavelength(f)
    for i, w in enumerate(m.segments):
        if w.length < 2 * w.radius:
            raise GeometryError(f"segment {i} shorter than twice its radius")
        if w.length > lam / 8 * (1 + 1e-9):
            raise GeometryError(
                f"segment {i} ({w.length:.3g} m) longer than lambda/8 at "
                f"{f / 1e9:.6g} GHz; refine the model"
            )


def assemble(m: WireModel, f: float, cfg: SolverConfig = SolverConfig()) -> MomMatrix:
    """Impedance matrix and 1 V feed excitation of ``m`` at frequency ``f``."""
    if not f > 0:
        raise ValueError("frequency must be positive")
    m = _prepared(m, f, cfg)
    _check_validity(m, f)
    mesh = _mesh(m, cfg.quadrature_points, cfg.kernel)
    return _assemble_mesh(mesh, f)


def _uniform_rhs(mesh: _Mesh) -> np.ndarray:
    """Excitation by a tangential field of total EMF 1 V around a closed loop."""
    if mesh.model.topology_tag != "loop":
        raise GeometryError("uniform excitation needs a closed loop model")
    return (mesh.mid @ mesh.length / mesh.length.sum()).astype(complex)


def _assemble_mesh(mesh: _Mesh, f: float, excitation: str = "gap") -> MomMatrix:
    med = mesh.model.medium
    omega = 2 * math.pi * f
    mu = med.mu_rel * CONST.mu0
    eps = med.eps_rel * CONST.eps0
    k = omega * math.sqrt(mu * eps)
    F = mesh.static + mesh.dynamic_tables(k)
    ns = mesh.ns
    vec = (mesh.cos_table()[:, :, None, None] * F).transpose(0, 2, 1, 3).reshape(2 * ns, 2 * ns)
    P = mesh.P.reshape(mesh.nb, 2 * ns)
    Z = 1j * omega * mu * (P @ vec @ P.T) + (mesh.Q @ F[:, :, 0, 0] @ mesh.Q.T) / (1j * omega * eps)
    if excitation == "gap":
        rhs = mesh.feed_vec.astype(complex)
    elif excitation == "uniform":
        rhs = _uniform_rhs(mesh)
    else:
        raise ValueError(f"excitation must be one of {EXCITATIONS}")
    return MomMatrix(n=mesh.nb, entries=Z, rhs=rhs)


def _solve(mat: MomMatrix, f: float):
    Z = mat.entries
    lu, piv, info = lapack.zgetrf(Z)
    if info > 0:
        raise SolverError("singular MoM matrix", frequency=f, condition=math.inf)
    anorm = np.linalg.norm(Z, 1)
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if rcond < RCOND_MIN:
        raise SolverError("MoM matrix is numerically singular", frequency=f,
                          condition=1 / rcond if rcond > 0 else math.inf)
    return sla.lu_solve((lu, piv), mat.rhs)


def solve_currents(m: WireModel, f: float, cfg: SolverConfig = SolverConfig()):
    """Return (discretized model, basis coefficients, segment-centre currents)."""
    m = _prepared(m, f, cfg)
    _check_validity(m, f)
    mesh = _mesh(m, cfg.quadrature_points, cfg.kernel)
    coeffs = _solve(_assemble_mesh(mesh, f), f)
    return m, coeffs, mesh.mid.T @ coeffs


def input_impedance(m: WireModel, f: float, cfg: SolverConfig = SolverConfig(),
                    excitation: str = "gap") -> complex:
    """Input impedance seen by the 1 V source.

    With ``excitation="uniform"`` the result is the EMF around the loop over
    the (uniform) loop current, i.e. the impedance of the uniform mode alone.
    """
    m = _prepared(m, f, cfg)
    _check_validity(m, f)
    mesh = _mesh(m, cfg.quadrature_points, cfg.kernel)
    mat = _assemble_mesh(mesh, f, excitation)
    coeffs = _solve(mat, f)
    i_feed = mesh.feed_vec @ coeffs
    if i_feed == 0:
        raise SolverError("zero feed current", frequency=f)
    z = complex(1.0 / i_feed)
    if z.real < -PASSIVITY_TOL:
        raise SolverError(f"negative input resistance {z.real:.4g} ohm", frequency=f)
    return z


def impedance_sweep(m: WireModel, grid: FrequencyGrid,
                    cfg: SolverConfig = SolverConfig()) -> ImpedanceSweep:
    """Wire-space input impedance at every grid point.

    An undiscretized model is refined once for the top of the band so all
    points share one mesh.
    """
    if not m.discretized:
        m = discretize(m, cfg.segments_per_wavelength, grid.f_stop)
    freqs = grid.frequencies
    _mesh(m, cfg.quadrature_points, cfg.kernel)

    def point(f):
        try:
            return input_impedance(m, float(f), cfg)
        except (SolverError, GeometryError) as exc:
            if isinstance(exc, SolverError) and exc.frequency is not None:
                raise
            raise SolverError(str(exc), frequency=float(f)) from exc

    if cfg.max_workers == 1 or len(freqs) == 1:
        z = [point(f) for f in freqs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            z = list(pool.map(point, freqs))
    return ImpedanceSweep(grid, np.array(z), "wire")


def dump_currents(m: WireModel, f: float, path: str | Path,
                  cfg: SolverConfig = SolverConfig()) -> Path:
    """Write segment-centre currents to CSV for inspection."""
    m, _, currents = solve_currents(m, f, cfg)
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["segment_index", "x", "y", "z", "Re[I]", "Im[I]"])
        for i, (w, cur) in enumerate(zip(m.segments, currents)):
            x, y, z = w.midpoint
            wr.writerow([i, repr(float(x)), repr(float(y)), repr(float(z)),
                         repr(float(cur.real)), repr(float(cur.imag))])
    return path
