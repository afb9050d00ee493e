"""Residual evaluation of the integral identities a slab solution satisfies.

Three groups of checks live here, all phrased as "evaluate both sides of an
identity that holds exactly in the continuum and report the gap":

* the distributional formulations tested against batteries of divergence-free
  fields (with and without first derivatives on the velocity, and with the
  pressure--divergence pairing),
* pointwise heat/Poisson identities for kernel-mollified quantities (weighted
  vorticity, pressure, damped velocity), assembled so that no derivative is
  ever taken of sampled data products: derivatives are moved onto the analytic
  cutoff or onto the kernel (vertical derivatives flip the reflection parity,
  horizontal ones become output multipliers),
* the even-even-odd reflection of a zero-slip-coefficient solution through
  the wall, with the distributional check on the doubled slab.

Everything consumes a `SolutionBundle`: immutable velocity/pressure/forcing
series with recorded divergence and wall diagnostics.  Raw residuals are
jointly linear in the bundle data; the battery forms are reported relative to
a per-field norm (L^2 of value, second gradient and time derivative), the
pointwise identities as raw maximum magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import (ConfigurationError, InvalidFieldError, PreconditionError)
from .grid import (PERIOD, CutoffFamily, FieldSeries, SlabGrid,
                   div as field_div)
from .modes import (MollifierOp, VerticalSplines, eval_modes_at, from_modes,
                    mode_grid, to_modes)
from .profiles import gauss_legendre, phi_abs
from .solver import SlabStokesSolver, SolverConfig, manufactured_bundle
from .testfields import TestField

__all__ = [
    "SolutionBundle",
    "ResidualReport",
    "bundle_from_fixture",
    "bundle_from_solver",
    "very_weak_residual",
    "weak_residual",
    "weak_pair_residual",
    "wh_heat_residual",
    "pressure_poisson_residual",
    "mollified_velocity_heat_residual",
    "even_odd_extend",
    "extension_weak_check",
]

_DIV_TOL = 1e-8
_WALL_TOL = 1e-9
# one-sided 4th-order first-derivative closure (times 1/h)
_ONESIDED = np.array([-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25])


# ---------------------------------------------------------------------------
# inner products and vertical quadrature
# ---------------------------------------------------------------------------

def _hdot(am: np.ndarray, bm: np.ndarray) -> np.ndarray:
    """Box integral of the product of two real fields given as rfft modes:
    returns the per-z profile, leading axes summed."""
    w = mode_grid(am.shape[-3], 2 * (am.shape[-2] - 1)).parseval
    prod = am.real * bm.real + am.imag * bm.imag
    while prod.ndim > 3:
        prod = prod.sum(axis=0)
    return PERIOD**2 * np.einsum("xyz,xy->z", prod, w)


def _hdot2d(am: np.ndarray, bm: np.ndarray) -> float:
    """Wall-plane integral of a product of two real fields (rfft modes)."""
    w = mode_grid(am.shape[-2], 2 * (am.shape[-1] - 1)).parseval
    prod = am.real * bm.real + am.imag * bm.imag
    while prod.ndim > 2:
        prod = prod.sum(axis=0)
    return float(PERIOD**2 * np.sum(prod * w))


def _simp(vals: np.ndarray, x: np.ndarray) -> float:
    return float(simpson(vals, x=x))


def _vertical_breaks(grid: SlabGrid) -> tuple:
    """Cutoff kink locations that land on vertical nodes."""
    out = []
    for b in (0.5, 0.75):
        j = b / grid.hz
        if abs(j - round(j)) < 1e-9:
            out.append(b)
    return tuple(out)


# ---------------------------------------------------------------------------
# solution bundles
# ---------------------------------------------------------------------------

@dataclass
class SolutionBundle:
    """Velocity/pressure/forcing series plus wall and divergence diagnostics.

    `div_residual` is the producer's certified relative divergence: factories
    built on closed forms pass the analytic value and stash the grid-stencil
    measurement in `meta`; when omitted it is measured here with the grid
    stencils.  Construction fails if it exceeds the divergence-free gate or
    if the normal wall trace is nonzero.
    """

    u: FieldSeries
    alpha: float
    bc: str = "navier"
    p: Optional[FieldSeries] = None
    f: Optional[FieldSeries] = None
    F: Optional[FieldSeries] = None
    label: str = "bundle"
    div_residual: Optional[float] = None
    navier_residual: Optional[float] = None
    meta: dict = dfield(default_factory=dict)

    def __post_init__(self):
        if self.bc not in ("navier", "noslip"):
            raise ConfigurationError(f"unknown wall condition {self.bc!r}")
        if self.alpha < 0:
            raise ConfigurationError("slip coefficient must be >= 0")
        if self.bc == "noslip" and self.alpha != 0.0:
            raise ConfigurationError("a no-slip bundle has no slip coefficient")
        g = self.u.grid
        for name, s, rank in (("p", self.p, 0), ("f", self.f, 1),
                              ("F", self.F, 2)):
            if s is None:
                continue
            if s.rank != rank:
                raise InvalidFieldError(f"{name} series has rank {s.rank}")
            if s.grid is not g or s.full_depth != self.u.full_depth:
                raise InvalidFieldError(f"{name} series grid mismatch")
            if len(s.times) != len(self.u.times) or \
                    not np.allclose(s.times, self.u.times):
                raise InvalidFieldError(f"{name} series time mismatch")
        scale = float(np.max(np.abs(self.u.data))) + 1e-300
        iw = g.nz - 1 if self.full_depth else 0
        wall3 = float(np.max(np.abs(self.u.data[:, 2, :, :, iw])))
        if wall3 > _WALL_TOL * scale:
            raise InvalidFieldError(
                f"normal wall trace {wall3:.3e} is not zero")
        if self.div_residual is None:
            worst = 0.0
            for it in range(len(self.u.times)):
                d = field_div(self.u.frame(it)).data
                worst = max(worst, float(np.max(np.abs(d))))
            self.div_residual = worst / scale
        if self.div_residual > _DIV_TOL:
            raise InvalidFieldError(
                f"bundle is not divergence-free: {self.div_residual:.3e}")
        if self.navier_residual is None and self.bc == "navier" \
                and not self.full_depth:
            c = _ONESIDED / g.hz
            tr = self.u.data[:, :2, :, :, :5]
            slip = np.tensordot(tr, c, axes=([-1], [0])) \
                - self.alpha * self.u.data[:, :2, :, :, 0]
            self.navier_residual = float(np.max(np.abs(slip))) / scale
        if not np.allclose(self.times, g.t):
            self.meta.setdefault("times_off_grid", True)

    @property
    def grid(self) -> SlabGrid:
        return self.u.grid

    @property
    def times(self) -> np.ndarray:
        return self.u.times

    @property
    def full_depth(self) -> bool:
        return self.u.full_depth

    def scaled(self, c: float) -> "SolutionBundle":
        """Scale all data jointly (linearity probe)."""
        def sc(s, rank):
            return None if s is None else FieldSeries(
                s.grid, s.times, c * s.data, rank, s.full_depth)
        return SolutionBundle(
            u=sc(self.u, 1), alpha=self.alpha, bc=self.bc, p=sc(self.p, 0),
            f=sc(self.f, 1), F=sc(self.F, 2), label=f"{self.label}*{c}",
            div_residual=self.div_residual,
            navier_residual=self.navier_residual, meta=dict(self.meta))


def bundle_from_fixture(name: str, grid: SlabGrid, alpha: float,
                        label: str = "") -> SolutionBundle:
    """Sample a closed-form solution as a bundle on the grid's own times.

    The divergence certificate is analytic (the fixtures are constructed
    divergence-free in closed form); the grid-stencil measurement of the
    sampled data is recorded in meta for reference.
    """
    mb = manufactured_bundle(name, grid, alpha)
    cfg = mb["config"]
    bc = "navier" if cfg["bc_bottom"] == "robin" else "noslip"
    times = grid.t
    nt = len(times)
    udata = np.stack([mb["u_exact"](t) for t in times])
    useries = FieldSeries(grid, times, udata, 1)

    fseries = None
    if mb["forcing"] is not None:
        fdata = np.stack([from_modes(mb["forcing"](t)[0], grid.ny)
                          for t in times])
        fseries = FieldSeries(grid, times, fdata, 1)
    pseries = None
    if mb["p_exact"] is not None:
        pdata = np.stack([mb["p_exact"](t) for t in times])
        pseries = FieldSeries(grid, times, pdata, 0)

    scale = float(np.max(np.abs(udata))) + 1e-300
    probe = [0, nt // 2, nt - 1]
    div_meas = max(float(np.max(np.abs(field_div(useries.frame(i)).data)))
                   for i in probe) / scale
    return SolutionBundle(
        u=useries, alpha=cfg["alpha"], bc=bc, p=pseries, f=fseries,
        label=label or name, div_residual=0.0,
        meta={"fixture": name, "div_grid_stencil": div_meas})


def bundle_from_solver(name: str, grid: SlabGrid, alpha: float,
                       scheme: str = "be", label: str = "") -> SolutionBundle:
    """March the solver on a fixture's data and collect the discrete states.

    The divergence certificate is the solver's own discrete divergence (its
    projection step enforces it); the first pressure frame is the marcher's
    zero placeholder, noted in meta.
    """
    mb = manufactured_bundle(name, grid, alpha)
    cfg = SolverConfig(grid=grid, scheme=scheme, **mb["config"])
    solver = SlabStokesSolver(cfg)
    nt = grid.nt
    udata = np.empty((nt, 3, grid.nx, grid.ny, grid.nz))
    pdata = np.empty((nt, grid.nx, grid.ny, grid.nz))
    worst_div = 0.0
    for st in solver.march(forcing=mb["forcing"],
                           u0_modes=mb["u0_modes"](),
                           top_data=mb["top_data"]):
        udata[st.index] = from_modes(st.u, grid.ny)
        pdata[st.index] = from_modes(st.p, grid.ny)
        worst_div = max(worst_div, float(np.max(np.abs(
            solver.discrete_divergence(st.u)))))
    scale = float(np.max(np.abs(udata))) + 1e-300
    fseries = None
    if mb["forcing"] is not None:
        fdata = np.stack([from_modes(mb["forcing"](t)[0], grid.ny)
                          for t in grid.t])
        fseries = FieldSeries(grid, grid.t, fdata, 1)
    return SolutionBundle(
        u=FieldSeries(grid, grid.t, udata, 1),
        alpha=cfg.alpha, bc="navier" if cfg.bc_bottom == "robin" else "noslip",
        p=FieldSeries(grid, grid.t, pdata, 0), f=fseries,
        label=label or f"solver:{name}", div_residual=worst_div / scale,
        meta={"fixture": name, "scheme": scheme,
              "pressure_first_frame_zero": True})


# ---------------------------------------------------------------------------
# residual reports
# ---------------------------------------------------------------------------

@dataclass
class ResidualReport:
    """Per-test-field residuals of one distributional form on one bundle."""

    form: str
    bundle_id: str
    values: np.ndarray          # normalized residual per admitted field
    raw: np.ndarray             # unnormalized |lhs - rhs|
    norms: np.ndarray           # per-field normalization
    labels: list
    families: list
    refinement_level: int = 0
    meta: dict = dfield(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.raw = np.asarray(self.raw, dtype=float)
        self.norms = np.asarray(self.norms, dtype=float)
        if self.values.size == 0:
            raise PreconditionError("no admissible test fields in the battery")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvalidFieldError("residuals must be finite and nonnegative")

    @property
    def max_residual(self) -> float:
        return float(np.max(self.values))

    @property
    def mean_residual(self) -> float:
        return float(np.mean(self.values))

    def csv_rows(self) -> list:
        rows = []
        for fam in sorted(set(self.families)):
            sel = np.array([f == fam for f in self.families])
            rows.append((self.bundle_id, fam,
                         float(np.max(self.values[sel])),
                         float(np.mean(self.values[sel])),
                         self.refinement_level))
        return rows


# ---------------------------------------------------------------------------
# battery forms (distributional definitions)
# ---------------------------------------------------------------------------

def _admissible(form: str, bundle: SolutionBundle, tf: TestField) -> bool:
    if tf.full_depth:
        return False
    if form == "very_weak":
        if tf.div_max > 1e-6:
            return False
        if tf.family == "normal-zero":
            return True
        if tf.family in ("navier", "curl-w1", "curl-w2", "curl-w3"):
            return abs(tf.alpha - bundle.alpha) < 1e-12
        return False
    if form == "weak":
        return tf.div_max <= 1e-6 and tf.boundary_residual <= 1e-8
    if form == "pair":
        return tf.boundary_residual <= 1e-8
    raise ConfigurationError(f"unknown form {form!r}")


class _ModalMember:
    """Mode-level contractions for a grid-held test field."""

    def __init__(self, tf: TestField, grid: SlabGrid):
        if tf.grid is not None and (tf.grid.nx, tf.grid.ny, tf.grid.nz) != \
                (grid.nx, grid.ny, grid.nz):
            raise InvalidFieldError("test field built on an alien grid")
        self.tf = tf
        mg = mode_grid(grid.nx, grid.ny)
        k2 = mg.k2[None, :, :, None]
        ikx = 1j * mg.kx[:, None, None]
        iky = 1j * mg.ky[None, :, None]
        s0, s1, s2 = tf.spatial(0), tf.spatial(1), tf.spatial(2)
        self.s0 = s0
        self.lap = s2 - k2 * s0
        # (d_j Phi_i), j-first, to pair with the same layout for grad u
        self.grad = np.stack([ikx * s0, iky * s0, s1], axis=0)
        self.div = ikx * s0[0] + iky * s0[1] + s1[2]
        self.hess2 = (np.abs(s2) ** 2 + (k2**2) * np.abs(s0) ** 2
                      + 2.0 * k2 * np.abs(s1) ** 2)
        self.wall0 = s0[:2, :, :, 0]

    def norm(self, z: np.ndarray, times: np.ndarray, psi: np.ndarray,
             dpsi: np.ndarray) -> float:
        w = mode_grid(self.s0.shape[-3], 2 * (self.s0.shape[-2] - 1)).parseval
        val2 = PERIOD**2 * np.einsum(
            "cxyz,xy->z", np.abs(self.s0) ** 2, w)
        hes2 = PERIOD**2 * np.einsum("cxyz,xy->z", self.hess2, w)
        nv = np.sqrt(max(_simp(val2, z), 0.0))
        nh = np.sqrt(max(_simp(hes2, z), 0.0))
        ip = np.sqrt(max(_simp(psi * psi, times), 0.0))
        idp = np.sqrt(max(_simp(dpsi * dpsi, times), 0.0))
        return nv * ip + nh * ip + nv * idp


def _battery_report(form: str, bundle: SolutionBundle,
                    battery: Sequence[TestField], refinement_level: int = 0,
                    ngl_local: int = 12) -> ResidualReport:
    if bundle.full_depth:
        raise PreconditionError("battery forms act on half-slab bundles")
    grid = bundle.grid
    times = bundle.times
    nt = len(times)
    members = [tf for tf in battery if _admissible(form, bundle, tf)]
    if not members:
        raise PreconditionError(f"battery holds no admissible fields "
                                f"for the {form} form")
    need_du = form in ("weak", "pair")
    if form == "pair" and bundle.p is None:
        raise PreconditionError("the pair form needs a pressure series")

    psi = np.array([[tf.tfun(t) for t in times] for tf in members])
    dpsi = np.array([[tf.tfun(t, 1) for t in times] for tf in members])
    active = (np.abs(psi) + np.abs(dpsi)) > 0

    modal = [(i, _ModalMember(tf, grid)) for i, tf in enumerate(members)
             if tf.kind == "modal"]
    local = [(i, _LocalMember(tf, grid, times, ngl_local))
             for i, tf in enumerate(members) if tf.kind != "modal"]

    # per-member, per-frame scalar rows
    rows = np.zeros((len(members), nt))
    z = grid.z
    for it in np.nonzero(active.any(axis=0))[0]:
        um = to_modes(bundle.u.data[it])
        fm = None if bundle.f is None else to_modes(bundle.f.data[it])
        Fm = None if bundle.F is None else to_modes(bundle.F.data[it])
        pm = None if bundle.p is None else to_modes(bundle.p.data[it])
        dum = _grad_modes(um, grid) if need_du else None
        uspl = None
        if local and any(active[i, it] for i, _ in local):
            uspl = CubicSpline(z, um, axis=-1)
        for i, mm in modal:
            if not active[i, it]:
                continue
            ps, dps = psi[i, it], dpsi[i, it]
            if form == "very_weak":
                val = -(_simp(_hdot(um, mm.s0), z) * dps
                        + _simp(_hdot(um, mm.lap), z) * ps)
            else:
                val = -_simp(_hdot(um, mm.s0), z) * dps \
                    + _simp(_hdot(dum, mm.grad), z) * ps
                val += bundle.alpha * _hdot2d(um[:2, :, :, 0], mm.wall0) * ps
                if form == "pair":
                    val -= _simp(_hdot(pm, mm.div), z) * ps
            if fm is not None:
                val -= _simp(_hdot(fm, mm.s0), z) * ps
            if Fm is not None:
                val += _simp(_hdot(np.swapaxes(Fm, 0, 1), mm.grad), z) * ps
            rows[i, it] = val
        for i, lm in local:
            if not active[i, it]:
                continue
            rows[i, it] = lm.frame_value(form, bundle, it, um, fm, Fm, pm,
                                         uspl, psi[i, it], dpsi[i, it])

    raws = np.abs(np.array([_simp(rows[i], times)
                            for i in range(len(members))]))
    norms = np.empty(len(members))
    for i, mm in modal:
        norms[i] = mm.norm(z, times, psi[i], dpsi[i])
    for i, lm in local:
        norms[i] = lm.norm(times, psi[i], dpsi[i])
    values = raws / np.maximum(norms, 1e-300)
    return ResidualReport(
        form=form, bundle_id=bundle.label, values=values, raw=raws,
        norms=norms, labels=[tf.label for tf in members],
        families=[tf.family for tf in members],
        refinement_level=refinement_level,
        meta={"n_members": len(members), "alpha": bundle.alpha})


def _grad_modes(um: np.ndarray, grid: SlabGrid) -> np.ndarray:
    """(d_j u_i) modes, stacked j-first to match _ModalMember.grad."""
    mg = mode_grid(grid.nx, grid.ny)
    ikx = 1j * mg.kx[None, :, None, None]
    iky = 1j * mg.ky[None, None, :, None]
    from .grid import _d1_matrix
    D = _d1_matrix(grid.nz, grid.hz)
    duz = np.tensordot(um, D, axes=([-1], [1]))
    return np.stack([ikx * um, iky * um, duz], axis=0)


class _LocalMember:
    """Tensor-product Gauss quadrature over a point field's support box."""

    def __init__(self, tf: TestField, grid: SlabGrid, times: np.ndarray,
                 ngl: int = 12):
        if tf.point is None or tf.local_eval is None or tf.radius <= 0:
            raise InvalidFieldError("local member lacks a point protocol")
        self.tf = tf
        self.grid = grid
        x0, y0, z0 = (float(v) for v in tf.point)
        r = float(tf.radius)
        xg, wx = gauss_legendre(ngl, x0 - r, x0 + r)
        yg, wy = gauss_legendre(ngl, y0 - r, y0 + r)
        zlo = max(0.0, z0 - r)
        zhi = min(1.0, z0 + r)
        self.zg, self.wz = gauss_legendre(ngl, zlo, zhi)
        X, Y = np.meshgrid(xg, yg, indexing="ij")
        self.ptsxy = np.stack([X.ravel(), Y.ravel()], axis=-1)
        self.wxy = np.outer(wx, wy).ravel()
        nq, m = len(self.zg), len(self.wxy)
        pts = np.empty((nq * m, 3))
        pts[:, :2] = np.tile(self.ptsxy, (nq, 1))
        pts[:, 2] = np.repeat(self.zg, m)
        le = tf.local_eval(pts)
        self.vals = le["vals"].reshape(nq, m, 3)
        self.grad = le["grad"].reshape(nq, m, 3, 3)   # (..., i, j) = d_j v_i
        self.lap = le["lap"].reshape(nq, m, 3)
        self.straddles = z0 < r
        if self.straddles:
            wpts = np.zeros((m, 3))
            wpts[:, :2] = self.ptsxy
            self.wall_vals = tf.local_eval(wpts)["vals"]
        self._norm_space = None

    def _integrate(self, cube: np.ndarray) -> float:
        """(nq, m) -> volume integral over the support box."""
        return float(np.einsum("qm,q,m->", cube, self.wz, self.wxy))

    def _u_at(self, uspl, deriv: bool = False):
        """Velocity (and gradient) samples at the quadrature nodes."""
        vm = uspl(self.zg)                          # (3, nx, nyr, nq)
        vals = eval_modes_at(np.moveaxis(vm, -1, 1), self.grid, self.ptsxy)
        out = np.moveaxis(vals, [0, 1, 2], [2, 0, 1])    # (nq, m, 3)
        if not deriv:
            return out, None
        mg = mode_grid(self.grid.nx, self.grid.ny)
        ikx = 1j * mg.kx[None, :, None, None]
        iky = 1j * mg.ky[None, None, :, None]
        dvm = np.stack([ikx * vm, iky * vm, uspl(self.zg, 1)])  # (3j,3i,...)
        dvals = eval_modes_at(np.moveaxis(dvm, -1, 2), self.grid, self.ptsxy)
        dout = np.moveaxis(dvals, [0, 1, 2, 3], [3, 2, 0, 1])  # (nq,m,i,j)
        return out, dout

    def frame_value(self, form: str, bundle: SolutionBundle, it: int,
                    um, fm, Fm, pm, uspl, ps: float, dps: float) -> float:
        uv, duv = self._u_at(uspl, deriv=form in ("weak", "pair"))
        if form == "very_weak":
            val = -(self._integrate(np.einsum("qmc,qmc->qm", uv, self.vals))
                    * dps
                    + self._integrate(np.einsum("qmc,qmc->qm", uv, self.lap))
                    * ps)
        else:
            val = -self._integrate(
                np.einsum("qmc,qmc->qm", uv, self.vals)) * dps
            val += self._integrate(
                np.einsum("qmij,qmij->qm", duv, self.grad)) * ps
            if self.straddles and bundle.alpha != 0.0:
                uw = eval_modes_at(um[:2, :, :, 0], self.grid, self.ptsxy)
                wall = float(np.einsum(
                    "cm,mc,m->", uw, self.wall_vals[:, :2], self.wxy))
                val += bundle.alpha * wall * ps
            if form == "pair":
                pspl = CubicSpline(self.grid.z, pm, axis=-1)
                pv = eval_modes_at(
                    np.moveaxis(pspl(self.zg), -1, 0), self.grid, self.ptsxy)
                dv = np.einsum("qmii->qm", self.grad)
                val -= self._integrate(pv * dv) * ps
        if fm is not None:
            fspl = CubicSpline(self.grid.z, fm, axis=-1)
            fv = np.moveaxis(eval_modes_at(
                np.moveaxis(fspl(self.zg), -1, 1), self.grid, self.ptsxy),
                [0, 1, 2], [2, 0, 1])
            val -= self._integrate(
                np.einsum("qmc,qmc->qm", fv, self.vals)) * ps
        if Fm is not None:
            Fspl = CubicSpline(self.grid.z, Fm, axis=-1)
            Fv = np.moveaxis(eval_modes_at(
                np.moveaxis(Fspl(self.zg), -1, 2), self.grid, self.ptsxy),
                [0, 1, 2, 3], [2, 3, 0, 1])
            val += self._integrate(
                np.einsum("qmij,qmij->qm", Fv, self.grad)) * ps
        return val

    def norm(self, times: np.ndarray, psi: np.ndarray,
             dpsi: np.ndarray) -> float:
        if self._norm_space is None:
            nv2 = self._integrate(np.einsum("qmc,qmc->qm",
                                            self.vals, self.vals))
            nl2 = self._integrate(np.einsum("qmc,qmc->qm",
                                            self.lap, self.lap))
            self._norm_space = (np.sqrt(max(nv2, 0.0)),
                                np.sqrt(max(nl2, 0.0)))
        nv, nl = self._norm_space
        ip = np.sqrt(max(_simp(psi * psi, times), 0.0))
        idp = np.sqrt(max(_simp(dpsi * dpsi, times), 0.0))
        return nv * ip + nl * ip + nv * idp


def very_weak_residual(bundle: SolutionBundle, battery: Sequence[TestField],
                       refinement_level: int = 0,
                       ngl_local: int = 12) -> ResidualReport:
    """No-derivatives-on-u form: both time and space derivatives sit on the
    test field, which must be divergence-free and satisfy the slip rows of
    the bundle (fields vanishing near the wall qualify for every slip
    coefficient; wall-touching families only at a matching one)."""
    return _battery_report("very_weak", bundle, battery, refinement_level,
                           ngl_local)


def weak_residual(bundle: SolutionBundle, battery: Sequence[TestField],
                  refinement_level: int = 0,
                  ngl_local: int = 12) -> ResidualReport:
    """First-derivative form with the slip boundary integral on the wall;
    test fields need zero normal wall trace only."""
    return _battery_report("weak", bundle, battery, refinement_level,
                           ngl_local)


def weak_pair_residual(bundle: SolutionBundle, battery: Sequence[TestField],
                       refinement_level: int = 0,
                       ngl_local: int = 12) -> ResidualReport:
    """Velocity-pressure form: adds the pressure-divergence pairing, so the
    battery may carry fields with nonzero divergence."""
    return _battery_report("pair", bundle, battery, refinement_level,
                           ngl_local)


# ---------------------------------------------------------------------------
# kernel-identity engine
# ---------------------------------------------------------------------------
#
# A term is (c, dkey, g, s, m, hk) and stands for
#
#   c * (i k1)^hk1 (i k2)^hk2  D_{x3}^m  P_s[ data(dkey) * xi^(g) ](x)
#
# where P_s is the direct-plus-reflected (s = +1) or direct-minus-reflected
# (s = -1) mollifier pass and xi^(g) the analytic derivative of the weight.
# Moving a y-derivative off the smooth factor uses only two rules:
# vertical kernel derivatives flip parity (d/dy3 of the reflected kernel is
# minus d/dx3 of the opposite parity), horizontal ones become multipliers on
# the output spectrum (exact: the output of a pass is the band-limited
# transform of a smoothed field, never a sampled product).

_E1, _E2, _E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def _gadd(g: tuple, j: int) -> tuple:
    out = list(g)
    out[j] += 1
    return tuple(out)


def _dy(terms: list, j: int) -> list:
    """Terms of D_{y_j} applied to each term's weight-kernel product."""
    out = []
    for (c, d, g, s, m, hk) in terms:
        out.append((c, d, _gadd(g, j), s, m, hk))
        if j == 2:
            out.append((-c, d, g, -s, m + 1, hk))
        else:
            out.append((-c, d, g, s, m, _gadd(hk, j)))
    return out


def _base(dkey: tuple, s: int) -> list:
    return [(1.0, dkey, (0, 0, 0), s, 0, (0, 0))]


def _neg(terms: list) -> list:
    return [(-c, d, g, s, m, hk) for (c, d, g, s, m, hk) in terms]


def _shift_m(terms: list, dm: int) -> list:
    return [(c, d, g, s, m + dm, hk) for (c, d, g, s, m, hk) in terms]


def _bracket(dkey: tuple, s: int) -> list:
    """Terms of the commutator weight [2 grad(xi) . grad(eta) + lap(xi) eta]
    paired with the given data."""
    out = []
    for j in (0, 1):
        out.append((-2.0, dkey, _gadd((0, 0, 0), j), s, 0,
                    _gadd((0, 0), j)))
        out.append((1.0, dkey, _gadd(_gadd((0, 0, 0), j), j), s, 0, (0, 0)))
    out.append((-2.0, dkey, _E3, -s, 1, (0, 0)))
    out.append((1.0, dkey, (0, 0, 2), s, 0, (0, 0)))
    return out


class _XiTable:
    """Sampled derivatives of the weight xi = exp(coef*z) * cutoff.

    cutoffs=None keeps only the vertical plateau window (identities then
    integrate over the whole periodic box horizontally, so horizontal
    derivatives of xi vanish identically and those terms prune away)."""

    def __init__(self, grid: SlabGrid, coef: float,
                 cutoffs: Optional[CutoffFamily]):
        self.grid = grid
        self.coef = float(coef)
        self.cut = cutoffs
        z = grid.z
        ez = np.exp(self.coef * z)
        self._e = [ez * self.coef**j for j in range(4)]
        self._vert = phi_abs(z, 3)
        self._cache: dict = {}

    def get(self, g: tuple):
        if g in self._cache:
            return self._cache[g]
        g1, g2, g3 = g
        if self.cut is None and (g1 or g2):
            self._cache[g] = None
            return None
        out = 0.0
        for i in range(g3 + 1):
            w = comb(g3, i)
            if self.cut is None:
                out = out + w * self._e[g3 - i] * self._vert[i]
            else:
                out = out + w * self._e[g3 - i][None, None, :] \
                    * self.cut.zeta_d((g1, g2, i))
        if self.cut is None:
            out = out[None, None, :]
        self._cache[g] = out
        return out


class _KernelEngine:
    """Per-frame pass evaluation with shared bank/pass caches."""

    def __init__(self, bundle: SolutionBundle, eps: float, coef: float,
                 cutoffs: Optional[CutoffFamily], ngl: int = 16):
        if bundle.full_depth:
            raise PreconditionError("kernel identities act on the half slab")
        self.b = bundle
        self.grid = bundle.grid
        self.op = MollifierOp(bundle.grid, eps, ngl=ngl)
        self.xi = _XiTable(bundle.grid, coef, cutoffs)
        self.mg = mode_grid(bundle.grid.nx, bundle.grid.ny)
        self.breaks = _vertical_breaks(bundle.grid)
        self._ikx = 1j * self.mg.kx[:, None, None]
        self._iky = 1j * self.mg.ky[None, :, None]

    def _data(self, it: int, dkey: tuple):
        kind = dkey[0]
        if kind == "u":
            return self.b.u.data[it, dkey[1]]
        if kind == "f":
            return None if self.b.f is None else self.b.f.data[it, dkey[1]]
        if kind == "F":
            return None if self.b.F is None \
                else self.b.F.data[it, dkey[1], dkey[2]]
        if kind == "pi":
            return None if self.b.p is None else self.b.p.data[it]
        raise ConfigurationError(f"unknown data key {dkey!r}")

    def eval_at(self, it: int, groups: dict) -> dict:
        """Evaluate several term lists at one frame with shared caches."""
        banks: dict = {}
        passes: dict = {}
        shape = (self.grid.nx, self.grid.ny // 2 + 1, self.grid.nz)

        def bank(dkey, g):
            key = (dkey, g)
            if key not in banks:
                xi = self.xi.get(g)
                data = self._data(it, dkey)
                if xi is None or data is None:
                    banks[key] = None
                else:
                    banks[key] = VerticalSplines(
                        self.grid.z, to_modes(data * xi), breaks=self.breaks)
            return banks[key]

        def kpass(dkey, g, s, m):
            key = (dkey, g, s, m)
            if key not in passes:
                bk = bank(dkey, g)
                if bk is None:
                    passes[key] = None
                else:
                    fn = self.op.even if s > 0 else self.op.odd
                    passes[key] = fn(bk, self.grid.z, domega=m)
            return passes[key]

        out = {}
        for name, terms in groups.items():
            acc = np.zeros(shape, dtype=complex)
            for (c, d, g, s, m, hk) in terms:
                base = kpass(d, g, s, m)
                if base is None:
                    continue
                val = c * base
                if hk[0]:
                    val = val * self._ikx ** hk[0]
                if hk[1]:
                    val = val * self._iky ** hk[1]
                acc += val
            out[name] = acc
        return out

    def wall_mhat(self, trace_phys: np.ndarray, m: int = 0) -> np.ndarray:
        """Convolution of a wall-plane density with the kernel at height z:
        modes (nx, nyr, nz).  The reflected-kernel doubling factor is the
        caller's to supply."""
        tr = to_modes(trace_phys[..., None])[..., 0]
        mh = self.op.mhat(self.grid.z, m)
        return np.moveaxis(mh, 0, -1) * tr[..., None]

    def zeta_wall(self, g12: tuple) -> np.ndarray:
        """Horizontal cutoff derivative sampled on the wall plane."""
        if self.xi.cut is None:
            if g12 == (0, 0):
                return np.ones((self.grid.nx, self.grid.ny))
            return np.zeros((self.grid.nx, self.grid.ny))
        return self.xi.cut.zeta_d((g12[0], g12[1], 0))[..., 0]


def _sample_frames(nt: int, time_stride: Optional[int]) -> list:
    if time_stride is None:
        time_stride = max(1, (nt - 2) // 5)
    return list(range(1, nt - 1, max(1, int(time_stride))))


_WH_PAIRS = {1: (1, 2), 2: (2, 0), 3: (0, 1)}  # 0-based (a, b) per component


def _require_wall_free_stress(bundle: SolutionBundle, rows: slice) -> None:
    """Vertical-by-parts wall terms vanish only when the wall-plane rows of
    the stress data do; gate on that instead of silently dropping them."""
    if bundle.F is None:
        return
    scale = float(np.max(np.abs(bundle.F.data))) + 1e-300
    wallF = float(np.max(np.abs(bundle.F.data[:, rows, 2, :, :, 0])))
    if wallF > 1e-10 * scale:
        raise PreconditionError("wall-plane vertical stress rows must vanish")


def wh_heat_residual(bundle: SolutionBundle, component: int, eps: float,
                     alpha: Optional[float] = None, *,
                     cutoffs: bool = False, ngl: int = 16,
                     time_stride: Optional[int] = None,
                     exponent_coef: Optional[float] = None) -> float:
    """Heat-equation defect of one mollified weighted-vorticity component.

    The quantity is a kernel pass of the cutoff-weighted vorticity; for a
    solution its time derivative minus horizontal Laplacian equals the
    cutoff-commutator integral plus the forcing integral, all assembled here
    by the same pass machinery.  Horizontal components pair with the odd
    kernel and the half exponent; the vertical one with the even kernel and
    the full exponent.  `exponent_coef` overrides the weight exponent (the
    negative-control hook); `cutoffs=True` uses the full spatial cutoff
    instead of the vertical-only window.
    """
    if component not in (1, 2, 3):
        raise ConfigurationError("component must be 1, 2 or 3")
    _require_wall_free_stress(bundle, slice(None))
    al = bundle.alpha if alpha is None else float(alpha)
    coef = (al if component == 3 else 0.5 * al) \
        if exponent_coef is None else float(exponent_coef)
    s = 1 if component == 3 else -1
    a, b = _WH_PAIRS[component]
    cut = CutoffFamily(bundle.grid) if cutoffs else None
    eng = _KernelEngine(bundle, eps, coef, cut, ngl)

    w_terms = _dy(_base(("u", a), s), b) + _neg(_dy(_base(("u", b), s), a))
    rhs_terms = _dy(_bracket(("u", a), s), b) \
        + _neg(_dy(_bracket(("u", b), s), a)) \
        + _dy(_base(("f", a), s), b) + _neg(_dy(_base(("f", b), s), a))
    for k in range(3):
        rhs_terms += _neg(_dy(_dy(_base(("F", a, k), s), k), b))
        rhs_terms += _dy(_dy(_base(("F", b, k), s), k), a)

    times = bundle.times
    nt = len(times)
    ht = times[1] - times[0]
    samples = _sample_frames(nt, time_stride)
    needed = sorted({j for it in samples for j in (it - 1, it, it + 1)})
    W = {}
    rhs = {}
    w2 = {}
    for it in needed:
        groups = {"w": w_terms}
        if it in samples:
            groups["rhs"] = rhs_terms
            groups["w2"] = _shift_m(w_terms, 2)
        res = eng.eval_at(it, groups)
        W[it] = res["w"]
        if it in samples:
            rhs[it] = res["rhs"]
            w2[it] = res["w2"]

    k2 = eng.mg.k2[:, :, None]
    worst = 0.0
    for it in samples:
        lhs = (W[it + 1] - W[it - 1]) / (2.0 * ht) + k2 * W[it] - w2[it]
        gap = from_modes(lhs - rhs[it], bundle.grid.ny)
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


def pressure_poisson_residual(bundle: SolutionBundle, eps: float, *,
                              cutoffs: bool = False, ngl: int = 16,
                              time_stride: Optional[int] = None) -> float:
    """Defect of the horizontal Poisson identity for the mollified, cutoff
    pressure: minus its horizontal Laplacian equals the cutoff-commutator
    integral, the wall slip integral, and the forcing-gradient integral.

    Requires a pressure series and wall-vanishing off-diagonal vertical
    stress rows (the shear components of F on the wall enter a boundary
    integral the identity drops).
    """
    if bundle.p is None:
        raise PreconditionError("pressure series required")
    _require_wall_free_stress(bundle, slice(None, 2))
    al = bundle.alpha
    cut = CutoffFamily(bundle.grid) if cutoffs else None
    eng = _KernelEngine(bundle, eps, 0.0, cut, ngl)

    pi_terms = _base(("pi",), 1)
    rhs_terms = _bracket(("pi",), 1)
    for j in range(3):
        rhs_terms += _dy(_base(("f", j), 1), j)
        for k in range(3):
            rhs_terms += _neg(_dy(_dy(_base(("F", j, k), 1), k), j))

    times = bundle.times
    samples = _sample_frames(len(times), time_stride)
    k2 = eng.mg.k2[:, :, None]
    worst = 0.0
    for it in samples:
        res = eng.eval_at(it, {"pi": pi_terms,
                               "pi2": _shift_m(pi_terms, 2),
                               "rhs": rhs_terms})
        lhs = k2 * res["pi"] - res["pi2"]
        rhs = res["rhs"]
        if al != 0.0:
            for k in (0, 1):
                uw = bundle.u.data[it, k, :, :, 0]
                rhs = rhs - 2.0 * al * eng.wall_mhat(
                    uw * eng.zeta_wall(((1, 0) if k == 0 else (0, 1))))
                ik = eng._ikx if k == 0 else eng._iky
                rhs = rhs + 2.0 * al * ik * eng.wall_mhat(
                    uw * eng.zeta_wall((0, 0)))
        gap = from_modes(lhs - rhs, bundle.grid.ny)
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


def mollified_velocity_heat_residual(
        bundle: SolutionBundle, eps: float, alpha: Optional[float] = None, *,
        component: Optional[int] = None, cutoffs: bool = False,
        ngl: int = 16, time_stride: Optional[int] = None,
        exponent_coef: Optional[float] = None) -> float:
    """Heat-equation defect of the damped mollified velocity components.

    Horizontal components carry the decaying exponential weight and the even
    kernel; the vertical one the plain cutoff and the odd kernel.  For a slip
    solution the wall contributions of the vertical integration by parts
    cancel against the slip rows, which is exactly what the negative controls
    break.  Returns the worst component defect (or one component's).
    """
    if bundle.p is None:
        raise PreconditionError("pressure series required")
    _require_wall_free_stress(bundle, slice(None, 2))
    al = bundle.alpha if alpha is None else float(alpha)
    comps = (1, 2, 3) if component is None else (component,)
    times = bundle.times
    nt = len(times)
    ht = times[1] - times[0]
    samples = _sample_frames(nt, time_stride)
    needed = sorted({j for it in samples for j in (it - 1, it, it + 1)})
    worst = 0.0
    for ci in comps:
        i = ci - 1
        if ci in (1, 2):
            coef = -al if exponent_coef is None else float(exponent_coef)
            s = 1
        else:
            coef = 0.0 if exponent_coef is None else float(exponent_coef)
            s = -1
        cut = CutoffFamily(bundle.grid) if cutoffs else None
        eng = _KernelEngine(bundle, eps, coef, cut, ngl)

        v_terms = _base(("u", i), s)
        rhs_terms = list(_base(("f", i), s))
        for k in range(3):
            rhs_terms += _neg(_dy(_base(("F", i, k), s), k))
        rhs_terms += _dy(_base(("pi",), s), i)
        for j in range(3):
            # -[2 grad u_i . grad(xi) + u_i lap(xi)] eta, with the gradient
            # moved off u_i (the j = 3 move regenerates the wall integral)
            rhs_terms += _dy(
                [(2.0, ("u", i), _gadd((0, 0, 0), j), s, 0, (0, 0))], j)
            rhs_terms.append((-1.0, ("u", i),
                              _gadd(_gadd((0, 0, 0), j), j), s, 0, (0, 0)))

        V = {}
        rhs = {}
        v2 = {}
        for it in needed:
            groups = {"v": v_terms}
            if it in samples:
                groups["rhs"] = rhs_terms
                groups["v2"] = _shift_m(v_terms, 2)
            res = eng.eval_at(it, groups)
            V[it] = res["v"]
            if it in samples:
                r = res["rhs"]
                if ci in (1, 2) and al != 0.0:
                    uw = bundle.u.data[it, i, :, :, 0]
                    r = r - 4.0 * al * eng.wall_mhat(
                        uw * eng.zeta_wall((0, 0)))
                rhs[it] = r
                v2[it] = res["v2"]

        k2 = eng.mg.k2[:, :, None]
        for it in samples:
            lhs = (V[it + 1] - V[it - 1]) / (2.0 * ht) + k2 * V[it] - v2[it]
            gap = from_modes(lhs - rhs[it], bundle.grid.ny)
            worst = max(worst, float(np.max(np.abs(gap))))
    return worst


# ---------------------------------------------------------------------------
# reflection through the wall
# ---------------------------------------------------------------------------

_EXT_SIGNS = np.array([1.0, 1.0, -1.0])


def even_odd_extend(bundle: SolutionBundle) -> SolutionBundle:
    """Reflect a zero-slip-coefficient bundle through the wall.

    Horizontal velocity and forcing components extend evenly, vertical ones
    oddly, and the stress tensor picks up the product of the component signs;
    the divergence of the closed-form extension is then the even reflection
    of the original one.  The pressure is not extended (the doubled-slab
    check is pressure-free).  Records the one-sided derivative jump of the
    horizontal velocity at the interface -- zero exactly when the original
    wall slope vanishes, which is what the zero slip coefficient grants for
    actual solutions.
    """
    if bundle.alpha != 0.0:
        raise PreconditionError(
            "the reflection argument needs a zero slip coefficient")
    if bundle.full_depth:
        raise PreconditionError("bundle already lives on the doubled slab")
    g = bundle.grid
    nz = g.nz

    def extend(data: np.ndarray, signs: np.ndarray) -> np.ndarray:
        lead = data.shape[:-3]
        out = np.empty(lead + (g.nx, g.ny, 2 * nz - 1))
        out[..., nz - 1:] = data
        sl = (...,) + (None,) * 3
        out[..., :nz - 1] = signs[sl] * data[..., nz - 1:0:-1] \
            if signs.ndim else signs * data[..., nz - 1:0:-1]
        return out

    nt = len(bundle.times)
    uext = np.stack([extend(bundle.u.data[it], _EXT_SIGNS)
                     for it in range(nt)])
    fext = None
    if bundle.f is not None:
        fext = np.stack([extend(bundle.f.data[it], _EXT_SIGNS)
                         for it in range(nt)])
    Fext = None
    if bundle.F is not None:
        sij = np.outer(_EXT_SIGNS, _EXT_SIGNS)
        Fext = np.empty((nt, 3, 3, g.nx, g.ny, 2 * nz - 1))
        for it in range(nt):
            for i in range(3):
                for j in range(3):
                    Fext[it, i, j] = extend(bundle.F.data[it, i, j],
                                            np.float64(sij[i, j]))

    scale = float(np.max(np.abs(bundle.u.data))) + 1e-300
    c = _ONESIDED / g.hz
    up = np.tensordot(bundle.u.data[:, :2, :, :, :5], c, axes=([-1], [0]))
    jump = 2.0 * float(np.max(np.abs(up))) / scale

    useries = FieldSeries(g, bundle.times, uext, 1, full_depth=True)
    half_div = max(
        float(np.max(np.abs(field_div(bundle.u.frame(i)).data)))
        for i in (0, nt - 1)) / scale
    meta = dict(bundle.meta)
    meta.update({"interface_jump": jump, "div_half_grid": half_div,
                 "pressure_dropped": bundle.p is not None,
                 "source": bundle.label})
    return SolutionBundle(
        u=useries, alpha=0.0, bc=bundle.bc,
        f=None if fext is None else FieldSeries(g, bundle.times, fext, 1,
                                                full_depth=True),
        F=None if Fext is None else FieldSeries(g, bundle.times, Fext, 2,
                                                full_depth=True),
        label=f"ext:{bundle.label}", div_residual=bundle.div_residual,
        navier_residual=bundle.navier_residual, meta=meta)


def extension_weak_check(bundle: SolutionBundle,
                         battery: Sequence[TestField],
                         refinement_level: int = 0) -> ResidualReport:
    """First-derivative distributional check on the doubled slab.

    Test fields must straddle the interface with compact support in the
    doubled vertical interval and vanishing divergence.  Velocity gradients
    are formed one-sidedly on each half (the extension need not be twice
    differentiable across the interface) and the two half-integrals are
    summed; nothing is asserted about boundary values on the doubled slab's
    caps, which the battery's support avoids.
    """
    if not bundle.full_depth:
        raise PreconditionError("extension check needs a doubled-slab bundle")
    g = bundle.grid
    nz = g.nz
    members = [tf for tf in battery
               if tf.full_depth and tf.kind == "modal" and tf.div_max <= 1e-6]
    if not members:
        raise PreconditionError("battery holds no interior doubled-slab fields")
    times = bundle.times
    nt = len(times)
    mg = mode_grid(g.nx, g.ny)
    ikx = 1j * mg.kx[None, :, None, None]
    iky = 1j * mg.ky[None, None, :, None]
    from .grid import _d1_matrix
    D = _d1_matrix(nz, g.hz)
    zlo = g.zgrid(True)[:nz]
    zhi = g.z

    prep = []
    for tf in members:
        s0, s1 = tf.spatial(0), tf.spatial(1)
        gradp = np.stack([ikx[0] * s0, iky[0] * s0, s1], axis=0)
        prep.append((s0, gradp))

    psi = np.array([[tf.tfun(t) for t in times] for tf in members])
    dpsi = np.array([[tf.tfun(t, 1) for t in times] for tf in members])
    rows = np.zeros((len(members), nt))
    for it in range(nt):
        um = to_modes(bundle.u.data[it])
        fm = None if bundle.f is None else to_modes(bundle.f.data[it])
        Fm = None if bundle.F is None else to_modes(bundle.F.data[it])
        halves = []
        for sl in (slice(None, nz), slice(nz - 1, None)):
            uh = um[..., sl]
            duh = np.stack([ikx * uh, iky * uh,
                            np.tensordot(uh, D, axes=([-1], [1]))], axis=0)
            halves.append((sl, uh, duh))
        for i, (s0, gradp) in enumerate(prep):
            ps, dps = psi[i, it], dpsi[i, it]
            if ps == 0.0 and dps == 0.0:
                continue
            val = 0.0
            for sl, uh, duh in halves:
                zh = zlo if sl.start is None else zhi
                val += -_simp(_hdot(uh, s0[..., sl]), zh) * dps
                val += _simp(_hdot(duh, gradp[..., sl]), zh) * ps
                if fm is not None:
                    val -= _simp(_hdot(fm[..., sl], s0[..., sl]), zh) * ps
                if Fm is not None:
                    val += _simp(_hdot(np.swapaxes(Fm[..., sl], 0, 1),
                                       gradp[..., sl]), zh) * ps
            rows[i, it] = val

    raws = np.abs(np.array([_simp(rows[i], times)
                            for i in range(len(members))]))
    norms = np.empty(len(members))
    zfull = g.zgrid(True)
    for i, tf in enumerate(members):
        w = mg.parseval
        s0 = tf.spatial(0)
        val2 = PERIOD**2 * np.einsum("cxyz,xy->z", np.abs(s0) ** 2, w)
        s1, s2 = tf.spatial(1), tf.spatial(2)
        hes2 = PERIOD**2 * np.einsum(
            "cxyz,xy->z",
            np.abs(s2) ** 2 + (mg.k2[None, :, :, None] ** 2) * np.abs(s0) ** 2
            + 2.0 * mg.k2[None, :, :, None] * np.abs(s1) ** 2, w)
        nv = np.sqrt(max(_simp(val2, zfull), 0.0))
        nh = np.sqrt(max(_simp(hes2, zfull), 0.0))
        ip = np.sqrt(max(_simp(psi[i] ** 2, times), 0.0))
        idp = np.sqrt(max(_simp(dpsi[i] ** 2, times), 0.0))
        norms[i] = nv * ip + nh * ip + nv * idp
    values = raws / np.maximum(norms, 1e-300)
    return ResidualReport(
        form="extension_weak", bundle_id=bundle.label, values=values,
        raw=raws, norms=norms, labels=[tf.label for tf in members],
        families=[tf.family for tf in members],
        refinement_level=refinement_level,
        meta={"interface_jump": bundle.meta.get("interface_jump"),
              "n_members": len(members)})
