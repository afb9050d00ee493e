"""Half-space heat kernels with wall conditions, and a Duhamel engine.

The free kernel factorizes over horizontal/vertical directions; horizontal
periodization is exact in mode space (multiplier e^{-|k|^2 tau}), so only the
one-dimensional vertical kernels are needed:

    dirichlet:  q(x3 - y3) - q(x3 + y3)
    neumann:    q(x3 - y3) + q(x3 + y3)
    robin:      neumann - 2a * int_0^inf e^{-a z} q(x3 + y3 + z) dz

with q the 1D Gaussian kernel.  The damped layer integral is evaluated by
composite Gauss-Legendre over geometrically graded segments (primary path);
it also has a closed form in erfc which the tests pin the panels against.
The robin kernel satisfies (D3 - a) G = 0 on the wall; dirichlet boundary
data enters through the wall flux kernel -2 D3 q.

Duhamel integrals in time use the substitution tau = sigma^2, which removes
the 1/sqrt(t-s) endpoint singularity, with panels graded toward sigma = 0
(and toward sigma ~ x3 for the wall layer, where the flux kernel peaks).
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import interpolate

from .errors import ConfigurationError, DegenerateInputError, PreconditionError
from .grid import CutoffFamily, FieldSeries, SlabGrid
from .modes import VerticalSplines, from_modes, mode_grid, to_modes
from .profiles import gauss_legendre, phi_abs, theta_time

__all__ = [
    "gamma1",
    "robin_layer",
    "robin_layer_erfc",
    "vertical_kernel",
    "poisson_vertical",
    "KernelQuery",
    "gamma",
    "dirichlet_kernel",
    "neumann_kernel",
    "robin_kernel",
    "poisson_kernel",
    "HalfSlabHeat",
    "omega_decomposition",
    "boundary_trace_inequality_check",
]


def gamma1(w, tau, d: int = 0):
    """1D heat kernel (4 pi tau)^{-1/2} e^{-w^2/4 tau} and w-derivatives."""
    w = np.asarray(w, dtype=float)
    base = np.exp(-w * w / (4.0 * tau)) / np.sqrt(4.0 * np.pi * tau)
    if d == 0:
        return base
    if d == 1:
        return -w / (2.0 * tau) * base
    if d == 2:
        return (w * w / (4.0 * tau * tau) - 1.0 / (2.0 * tau)) * base
    raise ConfigurationError("gamma1 derivatives implemented to order 2")


def _layer_segments(tau: float, alpha: float, nseg: int):
    """Geometrically graded edges resolving both the Gaussian scale sqrt(tau)
    and the e^{-alpha z} tail."""
    zmax = 10.0 * np.sqrt(tau) + (45.0 / alpha if alpha > 0 else 0.0) + 2.0
    first = min(np.sqrt(tau), zmax / 2.0 ** (nseg - 1))
    edges = [0.0]
    e = first
    while e < zmax and len(edges) < nseg:
        edges.append(e)
        e *= 2.0
    edges.append(zmax)
    return edges


def robin_layer(b, tau: float, alpha: float, d: int = 0, nseg: int = 16,
                ngl: int = 12):
    """int_0^inf e^{-alpha z} q^{(d)}(b + z, tau) dz, composite Gauss-Legendre."""
    b = np.asarray(b, dtype=float)
    out = np.zeros_like(b)
    edges = _layer_segments(tau, alpha, nseg)
    for a0, a1 in zip(edges[:-1], edges[1:]):
        zq, wq = gauss_legendre(ngl, a0, a1)
        out = out + np.einsum(
            "q,...q->...", wq * np.exp(-alpha * zq),
            gamma1(b[..., None] + zq, tau, d))
    return out


def robin_layer_erfc(b, tau: float, alpha: float):
    """Closed form of the damped layer: (1/2) e^{a b + a^2 tau}
    erfc((b + 2 a tau) / (2 sqrt(tau))).  Used as an oracle for the panels."""
    from scipy.special import erfcx
    b = np.asarray(b, dtype=float)
    u = (b + 2.0 * alpha * tau) / (2.0 * np.sqrt(tau))
    # erfcx avoids overflow of e^{ab+a^2 tau}: result = 0.5 erfcx(u) e^{-b^2/4tau}
    return 0.5 * erfcx(u) * np.exp(-b * b / (4.0 * tau))


def vertical_kernel(x3, y3, tau: float, alpha: float = 0.0,
                    bc: str = "robin"):
    """Vertical factor of the half-space kernel for the given wall condition."""
    x3 = np.asarray(x3, dtype=float)
    y3 = np.asarray(y3, dtype=float)
    if bc == "dirichlet":
        return gamma1(x3 - y3, tau) - gamma1(x3 + y3, tau)
    if bc == "neumann":
        return gamma1(x3 - y3, tau) + gamma1(x3 + y3, tau)
    if bc == "robin":
        out = gamma1(x3 - y3, tau) + gamma1(x3 + y3, tau)
        if alpha > 0.0:
            out = out - 2.0 * alpha * robin_layer(x3 + y3, tau, alpha)
        return out
    raise ConfigurationError(f"unknown wall condition {bc!r}")


def poisson_vertical(x3, tau: float):
    """Wall flux kernel -2 D3 q(x3, tau) carrying dirichlet boundary data."""
    return -2.0 * gamma1(x3, tau, d=1)


# ---------------------------------------------------------------------------
# pointwise kernel queries
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class KernelQuery:
    """One half-space kernel evaluation: horizontal offset (dx1, dx2),
    heights x3, y3 >= 0, elapsed time tau > 0, slip coefficient alpha >= 0."""

    dx1: float
    dx2: float
    x3: float
    y3: float
    tau: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.tau <= 0.0:
            raise PreconditionError(f"elapsed time must be positive, got {self.tau}")
        if self.x3 < 0.0 or self.y3 < 0.0:
            raise PreconditionError("heights must be nonnegative")
        if self.alpha < 0.0:
            raise PreconditionError(f"slip coefficient {self.alpha} negative")


def gamma(offset, t: float):
    """Whole-space Gaussian heat kernel (4 pi t)^{-3/2} e^{-|x|^2 / 4t}.

    `offset` is a 3-vector (or array of them along the last axis)."""
    if t <= 0.0:
        raise PreconditionError(f"elapsed time must be positive, got {t}")
    x = np.asarray(offset, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    val = (4.0 * np.pi * t) ** -1.5 * np.exp(-r2 / (4.0 * t))
    return float(val) if val.ndim == 0 else val


def _gamma_plane(q: KernelQuery) -> float:
    r2 = q.dx1 * q.dx1 + q.dx2 * q.dx2
    return np.exp(-r2 / (4.0 * q.tau)) / (4.0 * np.pi * q.tau)


def dirichlet_kernel(q: KernelQuery, d3: int = 0) -> float:
    """Half-space kernel vanishing on the wall: direct minus image charge.
    `d3` differentiates in x3 (analytic, for boundary-residual checks)."""
    return float(_gamma_plane(q) * (gamma1(q.x3 - q.y3, q.tau, d3)
                                    - gamma1(q.x3 + q.y3, q.tau, d3)))


def neumann_kernel(q: KernelQuery, d3: int = 0) -> float:
    """Insulating-wall kernel: direct plus image charge."""
    return float(_gamma_plane(q) * (gamma1(q.x3 - q.y3, q.tau, d3)
                                    + gamma1(q.x3 + q.y3, q.tau, d3)))


def _layer_capped(b: float, tau: float, alpha: float, d3: int,
                  nseg: int = 16, ngl: int = 12) -> float:
    """int_0^zmax e^{-alpha z} q^{(d3)}(b + z, tau) dz with the explicit
    truncation zmax = b + 8 sqrt(tau) + 40/alpha (tail below e^{-40} of the
    damping alone), geometrically graded Gauss-Legendre panels."""
    zmax = b + 8.0 * np.sqrt(tau) + 40.0 / alpha
    first = min(np.sqrt(tau), zmax / 2.0 ** (nseg - 1))
    edges = [0.0]
    e = first
    while e < zmax and len(edges) < nseg:
        edges.append(e)
        e *= 2.0
    edges.append(zmax)
    total = 0.0
    for a0, a1 in zip(edges[:-1], edges[1:]):
        zq, wq = gauss_legendre(ngl, a0, a1)
        total += np.sum(wq * np.exp(-alpha * zq) * gamma1(b + zq, tau, d3))
    return total


def robin_kernel(q: KernelQuery, d3: int = 0) -> float:
    """Slip-wall kernel: neumann part minus the damped reflection layer
    2 alpha int_0^inf e^{-alpha z} Gamma(dx', x3 + y3 + z, tau) dz; it obeys
    (D3 - alpha) G = 0 on the wall."""
    vert = (gamma1(q.x3 - q.y3, q.tau, d3) + gamma1(q.x3 + q.y3, q.tau, d3))
    if q.alpha > 0.0:
        vert = vert - 2.0 * q.alpha * _layer_capped(q.x3 + q.y3, q.tau,
                                                    q.alpha, d3)
    return float(_gamma_plane(q) * vert)


def poisson_kernel(dx1: float, dx2: float, x3: float, tau: float) -> float:
    """Wall-data kernel -2 D_{x3} Gamma(dx', x3, tau); unit mass over
    horizontal plane x time."""
    if tau <= 0.0:
        raise PreconditionError(f"elapsed time must be positive, got {tau}")
    r2 = dx1 * dx1 + dx2 * dx2
    plane = np.exp(-r2 / (4.0 * tau)) / (4.0 * np.pi * tau)
    return float(plane * poisson_vertical(x3, tau))


def _sigma_panels(sigma_max: float, scale: float, nseg: int, ngl: int,
                  extra=()):
    """GL nodes/weights on (0, sigma_max] graded toward 0 and toward `scale`,
    with additional panel edges at `extra` (integrand kink locations)."""
    pts = {0.0, sigma_max}
    s = sigma_max
    for _ in range(nseg):
        s *= 0.5
        pts.add(s)
    if 0.0 < scale < sigma_max:
        for f in (0.5, 1.0, 2.0):
            if scale * f < sigma_max:
                pts.add(scale * f)
    for e in extra:
        if 0.0 < e < sigma_max:
            pts.add(float(e))
    edges = sorted(pts)
    nodes, weights = [], []
    for a0, a1 in zip(edges[:-1], edges[1:]):
        xq, wq = gauss_legendre(ngl, a0, a1)
        nodes.append(xq)
        weights.append(wq)
    return np.concatenate(nodes), np.concatenate(weights)


class HalfSlabHeat:
    """Mode-space Duhamel evaluation over the half slab.

    Sources are either coefficient arrays shaped (nx, ny/2+1, nz, n_times)
    sampled on uniform times, or callables g(y3_points, s) returning
    (n_points, nx, ny/2+1) coefficients exactly at the quadrature nodes (the
    preferred form when the source involves cutoff derivatives, which are
    only piecewise smooth).  Wall traces follow the same convention with
    arrays (nx, ny/2+1, n_times) or callables h(s) -> (nx, ny/2+1).

    `space_breaks` / `time_breaks` list interior locations (vertical
    respectively temporal) where the data is not twice differentiable;
    quadrature panels and interpolants never straddle them.
    """

    def __init__(self, grid: SlabGrid, alpha: float = 0.0, bc: str = "robin",
                 ngl_y: int = 24, nseg_t: int = 10, ngl_t: int = 8,
                 space_breaks=(), time_breaks=()):
        if bc not in ("robin", "dirichlet", "neumann"):
            raise ConfigurationError(f"unknown wall condition {bc!r}")
        self.grid = grid
        self.alpha = float(alpha)
        self.bc = bc
        self.ngl_y = ngl_y
        self.nseg_t = nseg_t
        self.ngl_t = ngl_t
        self.space_breaks = tuple(space_breaks)
        self.time_breaks = tuple(time_breaks)
        self.mg = mode_grid(grid.nx, grid.ny)

    def _source_bank(self, times, source):
        """Returns s -> (callable(y_pts) -> (n, nx, nyr)) for either form."""
        if callable(source):
            def at(s):
                return lambda pts, nu=0: source(np.asarray(pts, dtype=float), s)
            return at
        tspline = interpolate.make_interp_spline(
            times, np.moveaxis(source, -1, 0), k=min(5, len(times) - 1), axis=0)
        return lambda s: VerticalSplines(self.grid.z, tspline(s),
                                         breaks=self.space_breaks)

    def _time_edges(self, t, span):
        return [np.sqrt(t - b) for b in self.time_breaks if 0.0 < t - b < span]

    # -- interior source ------------------------------------------------------

    def evolve(self, times: np.ndarray, source, eval_times: np.ndarray,
               targets: np.ndarray | None = None):
        """v(x, t) = int_{t0}^{t} int G(x, y, t-s) g(y, s) dy ds."""
        times = np.asarray(times, dtype=float)
        targets = self.grid.z if targets is None else np.asarray(targets)
        bank_at = self._source_bank(times, source)
        nx, nyr = self.mg.kabs.shape
        out = np.zeros((nx, nyr, len(targets), len(eval_times)), dtype=complex)
        k2 = self.mg.k2[:, :, None]
        for it, t in enumerate(np.asarray(eval_times, dtype=float)):
            span = t - times[0]
            if span <= 0:
                continue
            sq, swq = _sigma_panels(np.sqrt(span), 0.0, self.nseg_t, self.ngl_t,
                                    extra=self._time_edges(t, span))
            for sig, wsig in zip(sq, swq):
                tau = sig * sig
                bank = bank_at(t - tau)
                acc = self._space_pass(bank, targets, tau)
                out[..., it] += (2.0 * sig * wsig) * np.exp(-k2 * tau) * acc
        return out

    def _subwindows(self, a0: float, a1: float):
        edges = [a0] + [b for b in sorted(self.space_breaks)
                        if a0 < b < a1] + [a1]
        return zip(edges[:-1], edges[1:])

    def _space_pass(self, bank, targets, tau: float):
        """int over y3 of the vertical kernel against the source profiles.

        Quadrature nodes for all targets are gathered into one padded array
        so the source bank is evaluated in a few large batches; windows are
        split at the declared vertical kinks."""
        targets = np.asarray(targets, dtype=float)
        nx, nyr = self.mg.kabs.shape
        ng = self.ngl_y
        width = 9.0 * np.sqrt(tau)
        pad = 3 * (1 + len(self.space_breaks)) * ng
        ynodes = np.zeros((len(targets), pad))
        wkern = np.zeros((len(targets), pad))
        for i, x3 in enumerate(targets):
            col = 0
            pieces = [(max(0.0, x3 - width), min(1.0, x3 + width), "direct"),
                      (0.0, min(1.0, width - x3), "image")]
            if self.bc == "robin" and self.alpha > 0.0:
                pieces.append((0.0, min(1.0, width - x3), "layer"))
            for a0, a1, kind in pieces:
                if a1 - a0 <= 1e-15:
                    continue
                for b0, b1 in self._subwindows(a0, a1):
                    yq, wq = gauss_legendre(ng, b0, b1)
                    if kind == "direct":
                        kern = gamma1(x3 - yq, tau)
                    elif kind == "image":
                        sgn = -1.0 if self.bc == "dirichlet" else 1.0
                        kern = sgn * gamma1(x3 + yq, tau)
                    else:
                        kern = -2.0 * self.alpha * robin_layer(x3 + yq, tau,
                                                               self.alpha)
                    ynodes[i, col:col + ng] = yq
                    wkern[i, col:col + ng] = wq * kern
                    col += ng
        acc = np.empty((nx, nyr, len(targets)), dtype=complex)
        chunk = max(1, 2_000_000 // (pad * nx * nyr))
        for c0 in range(0, len(targets), chunk):
            sl = slice(c0, min(c0 + chunk, len(targets)))
            vals = bank(ynodes[sl].ravel()).reshape(
                sl.stop - sl.start, pad, nx, nyr)
            acc[..., sl] = np.einsum("tq,tqxy->xyt", wkern[sl], vals)
        return acc

    # -- dirichlet wall data ---------------------------------------------------

    def wall_layer(self, times: np.ndarray, trace, eval_times: np.ndarray,
                   targets: np.ndarray | None = None):
        """v(x, t) = int_{t0}^{t} (-2 D3 q)(x3, t-s) e^{-|k|^2 (t-s)} h(k, s) ds;
        the harmonic-extension layer carrying dirichlet wall values h."""
        times = np.asarray(times, dtype=float)
        targets = self.grid.z if targets is None else np.asarray(targets)
        if callable(trace):
            trace_at = trace
        else:
            tspline = interpolate.make_interp_spline(
                times, np.moveaxis(trace, -1, 0), k=min(5, len(times) - 1),
                axis=0)
            trace_at = tspline
        nx, nyr = self.mg.kabs.shape
        out = np.zeros((nx, nyr, len(targets), len(eval_times)), dtype=complex)
        k2 = self.mg.k2
        for it, t in enumerate(np.asarray(eval_times, dtype=float)):
            span = t - times[0]
            if span <= 0:
                continue
            for i, x3 in enumerate(np.asarray(targets, dtype=float)):
                if x3 <= 1e-14:
                    # distributional limit of the flux layer: the trace itself
                    out[..., i, it] = trace_at(t)
                    continue
                sq, swq = _sigma_panels(np.sqrt(span), x3, self.nseg_t,
                                        self.ngl_t,
                                        extra=self._time_edges(t, span))
                tauq = sq * sq
                kern = poisson_vertical(x3, tauq)
                hval = np.stack([np.asarray(trace_at(t - tq)) for tq in tauq]) \
                    if callable(trace) else trace_at(t - tauq)
                damp = np.exp(-np.multiply.outer(tauq, k2))
                out[..., i, it] = np.einsum(
                    "q,qxy,qxy->xy", 2.0 * sq * swq * kern, damp, hval)
        return out


# ---------------------------------------------------------------------------
# localized vorticity: interior + wall-layer reconstruction
# ---------------------------------------------------------------------------

def _mode_dz(arr: np.ndarray, hz: float) -> np.ndarray:
    from .grid import _d1_matrix
    return np.tensordot(arr, _d1_matrix(arr.shape[-1], hz), axes=([-1], [1]))


def _curl_component(u_modes: np.ndarray, comp: int, grid: SlabGrid) -> np.ndarray:
    """One component of curl u for mode profiles u (3, nx, nyr, nz)."""
    mg = mode_grid(grid.nx, grid.ny)
    ikx = (1j * mg.kx)[:, None, None]
    iky = (1j * mg.ky)[None, :, None]
    if comp == 0:
        return iky * u_modes[2] - _mode_dz(u_modes[1], grid.hz)
    if comp == 1:
        return _mode_dz(u_modes[0], grid.hz) - ikx * u_modes[2]
    return ikx * u_modes[1] - iky * u_modes[0]


def _cutoff_planes(grid: SlabGrid, cutoffs: CutoffFamily | None):
    """Horizontal factor of the spatial cutoff and its derivatives, read off
    the wall plane where the vertical factor is 1 with zero derivatives.

    With no family supplied the cutoff is vertical-and-time only (the natural
    choice on the periodic box, where horizontal localization is not needed
    for integrability and sampled cutoff derivatives would inject aliasing)."""
    if cutoffs is None:
        shape = (grid.nx, grid.ny)
        return (np.ones(shape), np.zeros(shape), np.zeros(shape),
                np.zeros(shape))
    zh = cutoffs.zeta_d((0, 0, 0))[:, :, 0]
    zx = cutoffs.zeta_d((1, 0, 0))[:, :, 0]
    zy = cutoffs.zeta_d((0, 1, 0))[:, :, 0]
    lap = cutoffs.zeta_d((2, 0, 0))[:, :, 0] + cutoffs.zeta_d((0, 2, 0))[:, :, 0]
    return zh, zx, zy, lap


def _wrap_series(u, times):
    """Uniform access to mode series: callable s -> (3, nx, nyr, nz)."""
    if callable(u):
        return u
    u = np.asarray(u)
    spline = interpolate.make_interp_spline(times, u, k=min(5, len(times) - 1),
                                            axis=0)
    return lambda s: spline(s)


def _localized_curl_source(ufun, grid: SlabGrid, planes, comp: int):
    """Heat source of the cutoff vorticity component:
    g = w * dt(cutoff) - 2 grad w . grad(cutoff) - w * lap(cutoff),
    evaluated exactly at quadrature heights/times (cutoff factors analytic,
    vorticity profiles through a spline bank, horizontal products physical)."""
    mg = mode_grid(grid.nx, grid.ny)
    zh, zx, zy, lap = planes
    ny = grid.ny
    ikx = (1j * mg.kx)[None, :, None]
    iky = (1j * mg.ky)[None, None, :]

    def source(pts, s):
        pts = np.asarray(pts, dtype=float)
        tv = theta_time(np.array([float(s)]), 1)
        theta, dtheta = float(tv[0][0]), float(tv[1][0])
        if theta == 0.0 and dtheta == 0.0:
            return np.zeros((len(pts), grid.nx, ny // 2 + 1), dtype=complex)
        w = _curl_component(ufun(float(s)), comp, grid)
        bank = VerticalSplines(grid.z, w)
        wv = bank(pts)          # (npts, nx, nyr)
        wz = bank(pts, 1)
        phys = from_modes(np.moveaxis(wv, 0, -1), ny)        # (nx, ny, npts)
        phys_x = from_modes(np.moveaxis(wv * ikx, 0, -1), ny)
        phys_y = from_modes(np.moveaxis(wv * iky, 0, -1), ny)
        phys_z = from_modes(np.moveaxis(wz, 0, -1), ny)
        ph = phi_abs(pts, 2)
        g = (dtheta * ph[0] * zh[..., None] * phys
             - theta * (2.0 * (ph[0] * (zx[..., None] * phys_x
                                        + zy[..., None] * phys_y)
                               + ph[1] * zh[..., None] * phys_z)
                        + (lap[..., None] * ph[0] + zh[..., None] * ph[2])
                        * phys))
        return np.moveaxis(to_modes(g), -1, 0)

    return source


def _wall_trace(ufun, grid: SlabGrid, zh: np.ndarray, k: int, coef: float):
    """Dirichlet wall values of the cutoff vorticity's horizontal components,
    carried by the tangential velocity trace: coef * theta(s) * zh * u_k(.,0,s)."""
    nyr = grid.ny // 2 + 1

    def h(s):
        theta = float(theta_time(np.array([float(s)]))[0][0])
        if theta == 0.0:
            return np.zeros((grid.nx, nyr), dtype=complex)
        tr = ufun(float(s))[k][..., 0]
        phys = from_modes(tr[..., None], grid.ny)[..., 0]
        return coef * theta * to_modes((zh * phys)[..., None])[..., 0]

    return h


def omega_decomposition(u, times, grid: SlabGrid, alpha: float,
                        eval_times=None, targets=None, cutoffs=None,
                        nseg_t: int = 10, ngl_t: int = 8, ngl_y: int = 24) -> dict:
    """Reconstruct the cutoff vorticity from its heat representation.

    The cutoff field (space-time cutoff times curl u) solves a heat equation
    on the half space with source g (cutoff-derivative terms) and wall data
    set by the slip condition.  Each component splits into an interior part
    (Duhamel against the zero-BC kernel) plus a wall part: components 1-2 a
    flux layer of the tangential velocity trace (-alpha u2, +alpha u1), the
    third the damped-reflection correction of the slip-wall kernel.  Returns
    both parts, the directly sampled target, and the relative L2 mismatch.

    `u` is a callable s -> (3, nx, nyr, nz) mode array or an array
    (nt, 3, nx, nyr, nz) sampled on `times` (spline-interpolated in time).
    """
    if alpha < 0.0:
        raise PreconditionError(f"slip coefficient {alpha} negative")
    times = np.asarray(times, dtype=float)
    ufun = _wrap_series(u, times)
    if eval_times is None:
        eval_times = np.array([-0.2, -0.1, -0.05, 0.0])
    eval_times = np.asarray(eval_times, dtype=float)
    if targets is None:
        step = max(1, (grid.nz - 1) // 64)
        targets = grid.z[grid.z <= 0.8][::step]
    targets = np.asarray(targets, dtype=float)
    planes = _cutoff_planes(grid, cutoffs)
    zh = planes[0]

    # which components carry vorticity at all
    probe = [ufun(float(t)) for t in
             (times[0] + 0.6 * (times[-1] - times[0]), times[-1])]
    scale = max(np.max(np.abs(p)) for p in probe) + 1e-300
    active = []
    for c in range(3):
        amp = max(np.max(np.abs(_curl_component(p, c, grid))) for p in probe)
        active.append(amp > 1e-12 * scale)

    kw = dict(ngl_y=ngl_y, nseg_t=nseg_t, ngl_t=ngl_t,
              space_breaks=(0.5, 0.75), time_breaks=(-0.5, -0.25))
    eng_d = HalfSlabHeat(grid, 0.0, bc="dirichlet", **kw)
    nx, nyr = grid.nx, grid.ny // 2 + 1
    shape = (3, nx, nyr, len(targets), len(eval_times))
    part_m = np.zeros(shape, dtype=complex)
    part_d = np.zeros(shape, dtype=complex)

    for c in range(3):
        if not active[c]:
            continue
        src = _localized_curl_source(ufun, grid, planes, c)
        part_m[c] = eng_d.evolve(times, src, eval_times, targets)
        if c == 2 and alpha > 0.0:
            eng_r = HalfSlabHeat(grid, alpha, bc="robin", **kw)
            part_d[2] = eng_r.evolve(times, src, eval_times, targets) - part_m[2]
    if alpha > 0.0:
        for c, (k, coef) in enumerate(((1, -alpha), (0, alpha))):
            if not active[c]:
                continue
            part_d[c] = eng_d.wall_layer(
                times, _wall_trace(ufun, grid, zh, k, coef),
                eval_times, targets)

    # directly sampled target: cutoff times curl u
    target = np.zeros(shape, dtype=complex)
    phv = phi_abs(targets)[0]
    for it, t in enumerate(eval_times):
        theta = float(theta_time(np.array([t]))[0][0])
        if theta == 0.0:
            continue
        um = ufun(float(t))
        for c in range(3):
            if not active[c]:
                continue
            bank = VerticalSplines(grid.z, _curl_component(um, c, grid))
            phys = from_modes(np.moveaxis(bank(targets), 0, -1), grid.ny)
            loc = theta * phv * zh[..., None] * phys
            target[c, :, :, :, it] = to_modes(loc)

    mg = mode_grid(grid.nx, grid.ny)
    wz = np.full(len(targets), 1.0)
    wz[0] = wz[-1] = 0.5
    wgt = mg.parseval[None, :, :, None, None] * wz[None, None, None, :, None]
    recon = part_m + part_d
    num = np.sqrt(np.sum(wgt * np.abs(recon - target) ** 2))
    den = np.sqrt(np.sum(wgt * np.abs(target) ** 2))
    residual = float(num / den) if den > 0 else 0.0
    return {
        "eval_times": eval_times,
        "targets": targets,
        "interior": part_m,
        "wall": part_d,
        "omega_bar": target,
        "residual": residual,
        "active": active,
    }


def boundary_trace_inequality_check(u_series: FieldSeries,
                                    omega_bar: FieldSeries,
                                    q: float, r: float,
                                    cutoffs: CutoffFamily | None = None) -> float:
    """Measured ratio of the cutoff-vorticity norm against the velocity norm
    plus the wall trace of the cutoff velocity (both mixed L^{q,r})."""
    from .grid import MixedNormSpec, mixed_norm
    grid = u_series.grid
    spec = MixedNormSpec(q=q, r=r, radius=1.0, z0=0.0, z1=1.0, t0=-1.0, t1=0.0)
    num = mixed_norm(omega_bar, spec)
    den_u = mixed_norm(u_series, spec)
    zh = _cutoff_planes(grid, cutoffs)[0]
    theta = theta_time(u_series.times)[0]
    tr = u_series.data[:, :, :, :, 0] * zh[None, None] * theta[:, None, None, None]
    mag = np.sqrt(np.sum(tr * tr, axis=1))
    sq = (np.sum(mag ** q * grid.hx * grid.hy, axis=(1, 2))) ** (1.0 / q)
    den_tr = float(np.trapezoid(sq ** r, u_series.times) ** (1.0 / r))
    if den_u + den_tr <= 0.0:
        raise DegenerateInputError("trace-inequality ratio needs nonzero data")
    return num / (den_u + den_tr)
