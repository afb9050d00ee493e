"""Time-stepping solver for unsteady Stokes flow in the periodic slab.

Each horizontal Fourier mode evolves independently.  The horizontal velocity
is rotated into longitudinal/transverse components relative to the wave
vector: the transverse part decouples from the pressure and obeys a scalar
heat equation, while (longitudinal, vertical, pressure) form a coupled
differential-algebraic block whose matrix depends on the mode only through
|k|, so modes sharing |k| are solved together with stacked right-hand sides.

Vertical discretization is second-order finite differences on the grid
nodes with one-sided closures in the boundary rows; the divergence
constraint is imposed at every node at the new time level, which keeps the
discrete divergence (in the solver's own stencils) at the linear-solve
rounding floor.  Time stepping is a theta scheme (backward Euler or
Crank-Nicolson) with fully implicit pressure.

Wall conditions: `robin` ties the tangential shear to the slip velocity,
D3 u_k - a u_k = -F_k3, and pins the normal velocity; `dirichlet` pins all
components (no-slip when the data is zero).  The mean (k = 0) mode is
special-cased: pure heat flow for the horizontal means, zero vertical mean,
and hydrostatic reconstruction of the mean pressure.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np
from scipy import linalg as sla
from scipy import optimize

from .errors import ConfigurationError, DegenerateInputError, InvalidFieldError
from .grid import PERIOD, SlabGrid, VectorField
from .modes import from_modes, mode_grid, to_modes

__all__ = [
    "SolverConfig",
    "SlabStokesSolver",
    "StepState",
    "manufactured_bundle",
    "steady_shear_profile",
    "robin_shear_eigenvalue",
    "shear_evolve",
]


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    grid: SlabGrid
    alpha: float = 0.0
    bc_bottom: str = "robin"
    bc_top: str = "dirichlet"
    scheme: str = "be"

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigurationError("slip coefficient must be >= 0")
        if self.bc_bottom not in ("robin", "dirichlet"):
            raise ConfigurationError(f"unknown bottom condition {self.bc_bottom!r}")
        if self.bc_top not in ("robin", "dirichlet"):
            raise ConfigurationError(f"unknown top condition {self.bc_top!r}")
        if self.scheme not in ("be", "cn"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.grid.ht > self.grid.hz + 1e-14:
            raise ConfigurationError(
                f"time step {self.grid.ht} exceeds vertical spacing "
                f"{self.grid.hz}; refine the time grid")

    @property
    def theta(self) -> float:
        return 1.0 if self.scheme == "be" else 0.5


@dataclasses.dataclass
class StepState:
    """Solver state after one step: mode coefficients, z-last.

    The pressure of the very first state (the initial condition) is not
    defined by the march and is reported as zero.
    """
    index: int
    t: float
    u: np.ndarray          # (3, nx, ny/2+1, nz) complex
    p: np.ndarray          # (nx, ny/2+1, nz) complex

    def velocity_field(self, grid: SlabGrid) -> VectorField:
        return VectorField(grid, from_modes(self.u, grid.ny))


def _bc_row_scalar(nz: int, h: float, alpha: float, bc: str, top: bool):
    """(3-node coefficients, node indices) for one tangential wall row."""
    if bc == "dirichlet":
        coef = np.array([1.0, 0.0, 0.0])
    elif top:
        # outward normal +e3: D3 u + a u = data
        coef = np.array([3.0, -4.0, 1.0]) / (2.0 * h) + np.array([alpha, 0.0, 0.0])
    else:
        coef = np.array([-3.0, 4.0, -1.0]) / (2.0 * h) - np.array([alpha, 0.0, 0.0])
    nodes = [nz - 1, nz - 2, nz - 3] if top else [0, 1, 2]
    return coef, nodes


class SlabStokesSolver:
    def __init__(self, config: SolverConfig):
        self.cfg = config
        g = config.grid
        self.mg = mode_grid(g.nx, g.ny)
        flat = np.round(self.mg.kabs.ravel(), 12)
        self._groups: dict[float, np.ndarray] = {
            float(kv): np.nonzero(flat == kv)[0] for kv in np.unique(flat)}
        kx, ky = self.mg.kx, self.mg.ky
        norm = np.maximum(self.mg.kabs, 1e-300)
        self._eL = (kx[:, None] / norm, ky[None, :] / norm)
        self._eT = (-ky[None, :] / norm, kx[:, None] / norm)
        self._ab_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    # -- banded operators -------------------------------------------------

    def _operators(self, kv: float):
        """Cached implicit banded matrices (transverse heat, coupled block)."""
        hit = self._ab_cache.get(kv)
        if hit is not None:
            return hit
        g, cfg = self.cfg.grid, self.cfg
        nz, h, dt, th, al = g.nz, g.hz, g.ht, cfg.theta, cfg.alpha
        diag = 1.0 / dt + th * (kv * kv + 2.0 / h**2)
        off = -th / h**2

        abT = np.zeros((5, nz))
        abT[2, :] = diag
        abT[1, 1:] = off
        abT[3, :-1] = off
        for top in (False, True):
            coef, nodes = _bc_row_scalar(nz, h, al,
                                         cfg.bc_top if top else cfg.bc_bottom,
                                         top)
            r = nodes[0]
            for c in range(max(0, r - 2), min(nz, r + 3)):
                abT[2 + r - c, c] = 0.0
            for cf, j in zip(coef, nodes):
                abT[2 + r - j, j] = cf

        n = 3 * nz
        abC = np.zeros((15, n), dtype=complex)

        def put(rows, cols, val):
            rows = np.asarray(rows)
            cols = np.asarray(cols)
            abC[7 + rows - cols, cols] += val

        jj = np.arange(1, nz - 1)
        put(3 * jj, 3 * jj, diag)                      # longitudinal momentum
        put(3 * jj, 3 * (jj - 1), off)
        put(3 * jj, 3 * (jj + 1), off)
        put(3 * jj, 3 * jj + 2, 1j * kv)
        put(3 * jj + 1, 3 * jj + 1, diag)              # vertical momentum
        put(3 * jj + 1, 3 * (jj - 1) + 1, off)
        put(3 * jj + 1, 3 * (jj + 1) + 1, off)
        put(3 * jj + 1, 3 * (jj + 1) + 2, 0.5 / h)
        put(3 * jj + 1, 3 * (jj - 1) + 2, -0.5 / h)
        put(3 * jj + 2, 3 * jj, 1j * kv)               # divergence, interior
        put(3 * jj + 2, 3 * (jj + 1) + 1, 0.5 / h)
        put(3 * jj + 2, 3 * (jj - 1) + 1, -0.5 / h)
        coef, nodes = _bc_row_scalar(nz, h, al, cfg.bc_bottom, top=False)
        for cf, j in zip(coef, nodes):
            put(0, 3 * j, cf)
        put(1, 1, 1.0)                                 # u3 = 0 at the wall
        put(2, 0, 1j * kv)                             # one-sided divergence
        for cf, j in zip(np.array([-3.0, 4.0, -1.0]) / (2 * h), (0, 1, 2)):
            put(2, 3 * j + 1, cf)
        coef, nodes = _bc_row_scalar(nz, h, al, cfg.bc_top, top=True)
        rL = 3 * (nz - 1)
        for cf, j in zip(coef, nodes):
            put(rL, 3 * j, cf)
        put(rL + 1, 3 * (nz - 1) + 1, 1.0)
        put(rL + 2, 3 * (nz - 1), 1j * kv)
        for cf, j in zip(np.array([3.0, -4.0, 1.0]) / (2 * h),
                         (nz - 1, nz - 2, nz - 3)):
            put(rL + 2, 3 * j + 1, cf)

        self._ab_cache[kv] = (abT, abC)
        return abT, abC

    def _explicit_apply(self, kv: float, prof: np.ndarray):
        """(1/dt - (1 - theta) L_k) on mode profiles (m, nz); wall rows zero."""
        g, th = self.cfg.grid, self.cfg.theta
        if th == 1.0:
            out = prof / g.ht
        else:
            h = g.hz
            lap = np.zeros_like(prof)
            lap[:, 1:-1] = (prof[:, 2:] - 2 * prof[:, 1:-1] + prof[:, :-2]) / h**2
            out = prof / g.ht + (1 - th) * (lap - kv * kv * prof)
        out[:, 0] = 0.0
        out[:, -1] = 0.0
        return out

    # -- marching ----------------------------------------------------------

    def march(self, forcing: Callable | None = None,
              u0_modes: np.ndarray | None = None,
              top_data: Callable | None = None,
              active: np.ndarray | None = None):
        """Generator of StepState over the grid times.

        forcing(t) -> (f_modes, F_modes): f is (3, nx, nyr, nz), F is
        (3, 3, nx, nyr, nz); either may be None.  top_data(t) gives
        (3, nx, nyr) dirichlet values when the top condition needs them.
        `active` is an optional (nx, nyr) mask restricting the solve to the
        mode columns that can ever be excited; everything outside must stay
        identically zero (band-limited data), which the caller guarantees.
        """
        g = self.cfg.grid
        nx, nyr, nz = g.nx, g.ny // 2 + 1, g.nz
        u = np.zeros((3, nx, nyr, nz), dtype=complex) if u0_modes is None \
            else np.array(u0_modes, dtype=complex)
        if u.shape != (3, nx, nyr, nz):
            raise InvalidFieldError("bad initial mode array shape")
        if active is None:
            groups = self._groups
        else:
            m = np.asarray(active, dtype=bool).ravel()
            groups = {}
            for kv, idx in self._groups.items():
                sub = idx[m[idx]]
                if len(sub):
                    groups[kv] = sub
        p = np.zeros((nx, nyr, nz), dtype=complex)
        t = g.t
        yield StepState(0, t[0], u.copy(), p.copy())
        fF_old = forcing(t[0]) if forcing else (None, None)
        for n in range(1, g.nt):
            fF_new = forcing(t[n]) if forcing else (None, None)
            u, p = self._step(u, t[n], fF_old, fF_new, top_data, groups)
            fF_old = fF_new
            yield StepState(n, t[n], u.copy(), p.copy())

    def _effective_force(self, fF):
        """f + div F in mode space (z-derivative second order, one-sided)."""
        f, Ften = fF
        g = self.cfg.grid
        nx, nyr, nz = g.nx, g.ny // 2 + 1, g.nz
        out = np.zeros((3, nx, nyr, nz), dtype=complex)
        if f is not None:
            out += f
        if Ften is not None:
            ikx = 1j * self.mg.kx[:, None, None]
            iky = 1j * self.mg.ky[None, :, None]
            h = g.hz
            for i in range(3):
                out[i] += ikx * Ften[i, 0] + iky * Ften[i, 1]
                Fz = Ften[i, 2]
                dz = np.empty((nx, nyr, nz), dtype=complex)
                dz[..., 1:-1] = (Fz[..., 2:] - Fz[..., :-2]) / (2 * h)
                dz[..., 0] = (-3 * Fz[..., 0] + 4 * Fz[..., 1] - Fz[..., 2]) / (2 * h)
                dz[..., -1] = (3 * Fz[..., -1] - 4 * Fz[..., -2] + Fz[..., -3]) / (2 * h)
                out[i] += dz
        return out

    def _rotate_in(self, vx, vy):
        sl = (...,) + (None,) * (vx.ndim - 2)
        eLx, eLy = self._eL[0][sl], self._eL[1][sl]
        eTx, eTy = self._eT[0][sl], self._eT[1][sl]
        return eLx * vx + eLy * vy, eTx * vx + eTy * vy

    def _step(self, u, t_new, fF_old, fF_new, top_data, groups):
        g, cfg = self.cfg.grid, self.cfg
        nx, nyr, nz = g.nx, g.ny // 2 + 1, g.nz
        th = cfg.theta
        feff = self._effective_force(fF_new)
        if th != 1.0:
            feff = th * feff + (1 - th) * self._effective_force(fF_old)
        Fnew = fF_new[1]
        Fw_bot = Fnew[:, 2, :, :, 0] if Fnew is not None else None
        Fw_top = Fnew[:, 2, :, :, -1] if Fnew is not None else None
        tdat = top_data(t_new) if top_data is not None else None

        uL, uT = self._rotate_in(u[0], u[1])
        fL, fT = self._rotate_in(feff[0], feff[1])
        FL_bot = FT_bot = FL_top = FT_top = None
        if Fw_bot is not None:
            FL_bot, FT_bot = self._rotate_in(Fw_bot[0], Fw_bot[1])
            FL_top, FT_top = self._rotate_in(Fw_top[0], Fw_top[1])
        tL = tT = None
        if tdat is not None:
            tL, tT = self._rotate_in(tdat[0], tdat[1])

        # inactive columns carry their (zero) state forward
        newL, newT, new3 = uL.copy(), uT.copy(), u[2].copy()
        newP = np.zeros_like(u[2])

        flat = lambda a: a.reshape(nx * nyr, nz)
        uLf, uTf, u3f = flat(uL), flat(uT), flat(u[2])
        fLf, fTf, f3f = flat(fL), flat(fT), flat(feff[2])
        pick = lambda a, idx: a.reshape(-1)[idx] if a is not None else None
        newLf, newTf = flat(newL), flat(newT)
        new3f, newPf = flat(new3), flat(newP)

        for kv, idx in groups.items():
            if kv == 0.0:
                self._step_mean(u, feff, newL, newT, new3, newP, tdat,
                                Fw_bot, Fw_top)
                continue
            abT, abC = self._operators(kv)
            rhsT = self._explicit_apply(kv, uTf[idx]) + self._wall_zero(fTf[idx])
            self._fill_scalar_bc(rhsT, pick(FT_bot, idx), pick(FT_top, idx),
                                 pick(tT, idx))
            newTf[idx] = sla.solve_banded((2, 2), abT, rhsT.T).T

            rhsC = np.zeros((len(idx), 3 * nz), dtype=complex)
            rhsC[:, 0::3] = self._explicit_apply(kv, uLf[idx]) + \
                self._wall_zero(fLf[idx])
            rhsC[:, 1::3] = self._explicit_apply(kv, u3f[idx]) + \
                self._wall_zero(f3f[idx])
            self._fill_coupled_bc(rhsC, pick(FL_bot, idx), pick(FL_top, idx),
                                  pick(tL, idx))
            solC = sla.solve_banded((7, 7), abC, rhsC.T).T
            newLf[idx] = solC[:, 0::3]
            new3f[idx] = solC[:, 1::3]
            newPf[idx] = solC[:, 2::3]

        eLx, eLy = self._eL[0][..., None], self._eL[1][..., None]
        eTx, eTy = self._eT[0][..., None], self._eT[1][..., None]
        u1 = eLx * newL + eTx * newT
        u2 = eLy * newL + eTy * newT
        u_out = np.stack([u1, u2, new3])
        # the mean column bypasses the rotation
        u_out[0, 0, 0] = newL[0, 0]
        u_out[1, 0, 0] = newT[0, 0]
        return u_out, newP

    @staticmethod
    def _wall_zero(f):
        out = f.copy()
        out[:, 0] = 0.0
        out[:, -1] = 0.0
        return out

    def _fill_scalar_bc(self, rhs, F_bot, F_top, tdat):
        cfg = self.cfg
        rhs[:, 0] = -F_bot if (cfg.bc_bottom == "robin" and F_bot is not None) \
            else 0.0
        if cfg.bc_top == "dirichlet":
            rhs[:, -1] = tdat if tdat is not None else 0.0
        else:
            rhs[:, -1] = -F_top if F_top is not None else 0.0
        return rhs

    def _fill_coupled_bc(self, rhs, F_bot, F_top, tdat):
        cfg = self.cfg
        nz = self.cfg.grid.nz
        rhs[:, 0] = -F_bot if (cfg.bc_bottom == "robin" and F_bot is not None) \
            else 0.0
        rhs[:, 1] = 0.0
        rhs[:, 2] = 0.0
        top = 3 * (nz - 1)
        if cfg.bc_top == "dirichlet":
            rhs[:, top] = tdat if tdat is not None else 0.0
        else:
            rhs[:, top] = -F_top if F_top is not None else 0.0
        rhs[:, top + 1] = 0.0
        rhs[:, top + 2] = 0.0
        return rhs

    def _step_mean(self, u, feff, newL, newT, new3, newP, tdat,
                   Fw_bot, Fw_top):
        """k = 0: heat flow for the horizontal means, zero vertical mean,
        hydrostatic mean pressure."""
        g = self.cfg.grid
        abT, _ = self._operators(0.0)
        for comp, dest in ((0, newL), (1, newT)):
            rhs = self._explicit_apply(0.0, u[comp, 0, 0][None, :]) + \
                self._wall_zero(feff[comp, 0, 0][None, :])
            fb = Fw_bot[comp, 0, 0][None] if Fw_bot is not None else None
            ft = Fw_top[comp, 0, 0][None] if Fw_top is not None else None
            td = tdat[comp, 0, 0][None] if tdat is not None else None
            self._fill_scalar_bc(rhs, fb, ft, td)
            dest[0, 0] = sla.solve_banded((2, 2), abT, rhs[0])
        new3[0, 0] = 0.0
        f3 = feff[2, 0, 0]
        pr = np.concatenate([[0.0 + 0.0j],
                             np.cumsum(0.5 * (f3[1:] + f3[:-1]) * g.hz)])
        newP[0, 0] = pr - pr.mean()

    # -- solver-consistent diagnostics --------------------------------------

    def discrete_divergence(self, u_modes: np.ndarray) -> np.ndarray:
        """Divergence with the solver's own stencils (modes, z-last)."""
        g = self.cfg.grid
        h = g.hz
        ikx = 1j * self.mg.kx[:, None, None]
        iky = 1j * self.mg.ky[None, :, None]
        u3 = u_modes[2]
        dz = np.empty_like(u3)
        dz[..., 1:-1] = (u3[..., 2:] - u3[..., :-2]) / (2 * h)
        dz[..., 0] = (-3 * u3[..., 0] + 4 * u3[..., 1] - u3[..., 2]) / (2 * h)
        dz[..., -1] = (3 * u3[..., -1] - 4 * u3[..., -2] + u3[..., -3]) / (2 * h)
        return ikx * u_modes[0] + iky * u_modes[1] + dz

    def kinetic_energy(self, u_modes: np.ndarray) -> float:
        mag = np.sum(u_modes.real**2 + u_modes.imag**2, axis=0)
        prof = np.einsum("xyz,xy->z", mag, self.mg.parseval)
        g = self.cfg.grid
        wz = np.full(g.nz, g.hz)
        wz[0] = wz[-1] = g.hz / 2
        return float(PERIOD**2 * np.sum(prof * wz))


# ---------------------------------------------------------------------------
# closed-form fixtures
# ---------------------------------------------------------------------------

def steady_shear_profile(alpha: float, z: np.ndarray) -> np.ndarray:
    """Steady unit-forced shear between slip walls: u1 = -z^2/2 + b z + c
    with b = (1 + a/2)/(2 + a), c = b/a.  Requires a > 0; at a = 0 the
    momentum input cannot be absorbed and no steady state exists."""
    if alpha <= 0:
        raise DegenerateInputError("steady shear balance needs alpha > 0")
    b = (1.0 + alpha / 2.0) / (2.0 + alpha)
    c = b / alpha
    return -0.5 * z * z + b * z + c


def robin_shear_eigenvalue(alpha: float, bracket=(0.1, 3.1)) -> float:
    """Smallest positive lam solving (lam^2 - a^2) sin lam = 2 a lam cos lam:
    decay rate of the slip-wall shear mode cos(lam z) + (a/lam) sin(lam z)."""
    f = lambda lam: (lam * lam - alpha * alpha) * np.sin(lam) \
        - 2.0 * alpha * lam * np.cos(lam)
    lo, hi = bracket
    return float(optimize.brentq(f, lo + 1e-9, hi))


def manufactured_bundle(name: str, grid: SlabGrid, alpha: float) -> dict:
    """Closed-form solutions with matching forcing for solver verification.

    Returns a dict with keys: config (kwargs), forcing(t), top_data(t) or
    None, u_exact(t) (physical samples), u0_modes(), p_exact(t) or None.
    """
    nx, nyr, nz = grid.nx, grid.ny // 2 + 1, grid.nz
    z = grid.z

    def lift(prof):  # horizontally constant profile into mode space
        out = np.zeros((nx, nyr, nz), dtype=complex)
        out[0, 0] = prof
        return out

    def stack0(prof):
        zero = np.zeros(nz)
        return np.stack([lift(prof.astype(complex)), lift(zero), lift(zero)])

    if name == "alpha0_cos":
        if alpha != 0.0:
            raise ConfigurationError("alpha0_cos is an alpha = 0 fixture")
        prof = np.cos(np.pi * z)

        def forcing(t):
            f = np.zeros((3, nx, nyr, nz), dtype=complex)
            f[0] = lift((np.pi**2 - 1.0) * prof * np.exp(-t))
            return f, None

        def u_exact(t):
            out = np.zeros((3, grid.nx, grid.ny, nz))
            out[0] = prof[None, None, :] * np.exp(-t)
            return out

        return {"config": dict(alpha=0.0, bc_bottom="robin", bc_top="robin"),
                "forcing": forcing, "top_data": None, "u_exact": u_exact,
                "u0_modes": lambda: stack0(prof * np.e), "p_exact": None}

    if name == "robin_linear":
        prof = alpha * z + 1.0

        def forcing(t):
            f = np.zeros((3, nx, nyr, nz), dtype=complex)
            f[0] = lift(-np.exp(-t) * prof)
            return f, None

        def top_data(t):
            out = np.zeros((3, nx, nyr), dtype=complex)
            out[0, 0, 0] = np.exp(-t) * (alpha + 1.0)
            return out

        def u_exact(t):
            out = np.zeros((3, grid.nx, grid.ny, nz))
            out[0] = prof[None, None, :] * np.exp(-t)
            return out

        return {"config": dict(alpha=alpha, bc_bottom="robin",
                               bc_top="dirichlet"),
                "forcing": forcing, "top_data": top_data, "u_exact": u_exact,
                "u0_modes": lambda: stack0(prof * np.e), "p_exact": None}

    if name == "poiseuille_noslip":
        prof = 0.5 * z * (1.0 - z)

        def forcing(t):
            f = np.zeros((3, nx, nyr, nz), dtype=complex)
            f[0] = lift(np.ones(nz))
            return f, None

        def u_exact(t):
            out = np.zeros((3, grid.nx, grid.ny, nz))
            out[0] = np.broadcast_to(prof, (grid.nx, grid.ny, nz))
            return out

        return {"config": dict(alpha=0.0, bc_bottom="dirichlet",
                               bc_top="dirichlet"),
                "forcing": forcing, "top_data": None, "u_exact": u_exact,
                "u0_modes": lambda: stack0(prof), "p_exact": None}

    if name == "swirl_mode":
        # u = (d2 psi, -d1 psi, 0), psi = cos(k.x') h(z) exp(-mu t), with
        # h = cos(lam z) + (a / lam) sin(lam z): unforced, pressureless,
        # and compatible with the slip wall since h'(0) = a h(0).
        lam = 2.2
        kx = 2.0 * np.pi / PERIOD
        ky = 2.0 * np.pi / PERIOD
        k2 = kx * kx + ky * ky
        mu = lam * lam + k2
        h = np.cos(lam * z) + (alpha / lam) * np.sin(lam * z)
        X, Y, _ = grid.meshgrid()
        sinph = np.sin(kx * X + ky * Y)

        def u_exact(t):
            out = np.empty((3, grid.nx, grid.ny, nz))
            core = sinph * h[None, None, :] * np.exp(-mu * t)
            out[0] = -ky * core
            out[1] = kx * core
            out[2] = 0.0
            return out

        def top_data(t):
            return to_modes(u_exact(t)[:, :, :, -1][..., None])[..., 0]

        return {"config": dict(alpha=alpha, bc_bottom="robin",
                               bc_top="dirichlet"),
                "forcing": None, "top_data": top_data, "u_exact": u_exact,
                "u0_modes": lambda: to_modes(u_exact(-1.0)),
                "p_exact": None, "decay": mu, "lam": lam, "kvec": (kx, ky)}

    if name == "vertical_mode":
        # u3 = c3(z) cos(k.x'), u' = -c3'(z) grad' invlap cos(k.x'), with
        # c3 = z^3 (1-z)^3 so that u3, u3', u3'' all vanish at the wall and
        # the slip condition holds for every alpha; the pressure mode
        # cos(pi z) cos(k.x') exercises the gradient coupling.
        kx = 2.0 * np.pi / PERIOD
        ky = 4.0 * np.pi / PERIOD
        k2 = kx * kx + ky * ky
        c3 = z**3 * (1 - z)**3
        dc3 = 3 * z**2 * (1 - z)**2 * (1 - 2 * z)
        d2c3 = 6 * z * (1 - z)**3 - 18 * z**2 * (1 - z)**2 + 6 * z**3 * (1 - z)
        d3c3 = 6 * (1 - z)**3 - 54 * z * (1 - z)**2 + 54 * z**2 * (1 - z) \
            - 6 * z**3
        X, Y, _ = grid.meshgrid()
        ph = kx * X + ky * Y
        cosph, sinph = np.cos(ph), np.sin(ph)
        cz = np.cos(np.pi * z)
        sz = np.sin(np.pi * z)

        def u_exact(t):
            et = np.exp(-t)
            out = np.empty((3, grid.nx, grid.ny, nz))
            out[0] = -(kx / k2) * sinph * dc3[None, None, :] * et
            out[1] = -(ky / k2) * sinph * dc3[None, None, :] * et
            out[2] = cosph * c3[None, None, :] * et
            return out

        def p_exact(t):
            return cosph * cz[None, None, :] * np.exp(-t)

        def forcing(t):
            et = np.exp(-t)
            f = np.zeros((3, grid.nx, grid.ny, nz))
            horiz = (dc3 + d3c3 - k2 * dc3)[None, None, :]
            f[0] = (kx / k2) * sinph * horiz * et - kx * sinph * cz[None, None, :] * et
            f[1] = (ky / k2) * sinph * horiz * et - ky * sinph * cz[None, None, :] * et
            f[2] = cosph * (-c3 - d2c3 + k2 * c3 - np.pi * sz)[None, None, :] * et
            return to_modes(f), None

        return {"config": dict(alpha=alpha, bc_bottom="robin",
                               bc_top="dirichlet"),
                "forcing": forcing, "top_data": None, "u_exact": u_exact,
                "u0_modes": lambda: to_modes(u_exact(-1.0)),
                "p_exact": p_exact}

    if name == "wall_mode":
        # boundary-active relative of vertical_mode: c(0) = 0 but c'(0) = 1
        # and c''(0) = alpha, so the wall slip rows, the wall shear and the
        # normal pressure gradient on the wall are all nonzero -- the fixture
        # that actually exercises boundary-integral routes.
        kx = 2.0 * np.pi / PERIOD
        ky = 4.0 * np.pi / PERIOD
        k2 = kx * kx + ky * ky
        gam = 3.0
        bet = gam + 0.5 * alpha
        ez = np.exp(-gam * z)
        q0 = z + bet * z * z
        q1 = 1.0 + 2.0 * bet * z
        c = q0 * ez
        dc = (q1 - gam * q0) * ez
        d2c = (2.0 * bet - 2.0 * gam * q1 + gam**2 * q0) * ez
        d3c = (-6.0 * gam * bet + 3.0 * gam**2 * q1 - gam**3 * q0) * ez
        X, Y, _ = grid.meshgrid()
        ph = kx * X + ky * Y
        cosph, sinph = np.cos(ph), np.sin(ph)
        cz = np.cos(np.pi * z)
        sz = np.sin(np.pi * z)

        def u_exact(t):
            et = np.exp(-t)
            out = np.empty((3, grid.nx, grid.ny, nz))
            out[0] = -(kx / k2) * sinph * dc[None, None, :] * et
            out[1] = -(ky / k2) * sinph * dc[None, None, :] * et
            out[2] = cosph * c[None, None, :] * et
            return out

        def p_exact(t):
            return cosph * cz[None, None, :] * np.exp(-t)

        def forcing(t):
            et = np.exp(-t)
            f = np.zeros((3, grid.nx, grid.ny, nz))
            horiz = (dc + d3c - k2 * dc)[None, None, :]
            f[0] = (kx / k2) * sinph * horiz * et - kx * sinph * cz[None, None, :] * et
            f[1] = (ky / k2) * sinph * horiz * et - ky * sinph * cz[None, None, :] * et
            f[2] = cosph * (-c - d2c + k2 * c - np.pi * sz)[None, None, :] * et
            return to_modes(f), None

        def top_data(t):
            return to_modes(u_exact(t)[:, :, :, -1][..., None])[..., 0]

        return {"config": dict(alpha=alpha, bc_bottom="robin",
                               bc_top="dirichlet"),
                "forcing": forcing, "top_data": top_data, "u_exact": u_exact,
                "u0_modes": lambda: to_modes(u_exact(-1.0)),
                "p_exact": p_exact}

    raise ConfigurationError(f"unknown fixture {name!r}")


# ---------------------------------------------------------------------------
# one-dimensional shear flows (wall-condition contrast laboratory)
# ---------------------------------------------------------------------------

def shear_evolve(omega: float, alpha: float | None, nz: int = 2049,
                 dt: float | None = None, g_of_t: Callable | None = None,
                 t0: float = -1.0, bc_top: str = "dirichlet"):
    """March V_t - V'' = g(t) on z in (0,1) from rest (Crank-Nicolson).

    alpha = None means a no-slip wall (V(0) = 0); otherwise a slip wall,
    V'(0) = alpha V(0), closed with a second-order ghost-node row.  The top
    is V(1) = 0 by default, or the mirrored slip condition V'(1) = -a V(1)
    when bc_top = "robin".  Default forcing g(t) = sin(omega t) is the
    horizontally uniform surrogate for an oscillating pressure gradient.

    Returns dict with times, z, V (nt, nz), wall trace V(0, t) and wall
    gradient V'(0, t) (one-sided, fourth order).
    """
    if bc_top not in ("dirichlet", "robin"):
        raise ConfigurationError(f"unknown top condition {bc_top!r}")
    if bc_top == "robin" and alpha is None:
        raise ConfigurationError("robin top needs a slip coefficient")
    if g_of_t is None:
        g_of_t = lambda t: np.sin(omega * t)
    h = 1.0 / (nz - 1)
    if dt is None:
        dt = min(h, 0.05 / max(omega, 1.0), 2.5e-3)
    nsteps = int(np.ceil(-t0 / dt))
    dt = -t0 / nsteps
    z = np.linspace(0.0, 1.0, nz)
    A = np.zeros((3, nz))
    A[1, :] = 1.0 / dt + 1.0 / h**2
    A[0, 1:] = -0.5 / h**2
    A[2, :-1] = -0.5 / h**2
    if alpha is None:
        A[0, 1] = 0.0
        A[1, 0] = 1.0
    else:
        # ghost elimination: V(-h) = V(h) - 2 h a V(0) closes the wall heat
        # row at second order
        A[1, 0] = 1.0 / dt + (1.0 + h * alpha) / h**2
        A[0, 1] = -1.0 / h**2
    if bc_top == "dirichlet":
        A[2, nz - 2] = 0.0
        A[1, nz - 1] = 1.0
    else:
        A[1, nz - 1] = 1.0 / dt + (1.0 + h * alpha) / h**2
        A[2, nz - 2] = -1.0 / h**2
    V = np.zeros(nz)
    times = [t0]
    traces = [0.0]
    grads = [0.0]
    sol = [V.copy()]
    t = t0
    for _ in range(nsteps):
        tn1 = t + dt
        gbar = 0.5 * (g_of_t(t) + g_of_t(tn1))
        rhs = V / dt
        rhs[1:-1] += 0.5 * (V[2:] - 2 * V[1:-1] + V[:-2]) / h**2 + gbar
        if alpha is None:
            rhs[0] = 0.0
        else:
            rhs[0] = V[0] / dt \
                + (V[1] - (1.0 + h * alpha) * V[0]) / h**2 + gbar
        if bc_top == "dirichlet":
            rhs[-1] = 0.0
        else:
            rhs[-1] = V[-1] / dt \
                + (V[-2] - (1.0 + h * alpha) * V[-1]) / h**2 + gbar
        V = sla.solve_banded((1, 1), A, rhs)
        t = tn1
        times.append(t)
        sol.append(V.copy())
        traces.append(V[0])
        grads.append((-25 * V[0] + 48 * V[1] - 36 * V[2] + 16 * V[3]
                      - 3 * V[4]) / (12 * h))
    return {"times": np.array(times), "z": z, "V": np.array(sol),
            "trace": np.array(traces), "wall_grad": np.array(grads),
            "dt": dt}
