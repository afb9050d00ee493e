"""Divergence-free test fields on the half-slab.

Four constructions live here:

* the explicit disk Bogovskii operator (pointwise kernel, quadrature solve,
  and the mean-zero input type it acts on),
* slip-corrected extension fields: a smooth normal-zero field is extended
  through the wall by even/odd mollified reflection, a damped reflected
  layer enforces the slip rows, and a small horizontal pair built from the
  layer's wall trace restores the divergence,
* curl-type bumps: sharply localized fields written as exact curls of
  reflected mollifier kernels times cutoffs, with every derivative the weak
  forms need available in closed form,
* the mollified-vorticity approximation ``w_field`` whose parts are single
  kernel passes of cutoff-weighted velocity data.

A constructed field exposes one of two evaluation protocols: "modal" fields
carry mode-coefficient arrays on a grid (band-limited horizontally), "local"
fields are sub-grid bumps evaluated through vectorized point closures.  Both
record divergence and boundary residuals at construction.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dfield
from math import comb
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import (ConfigurationError, DegenerateInputError,
                     InvalidFieldError, PreconditionError)
from .grid import PERIOD, FieldSeries, SlabGrid
from .modes import (MollifierOp, VerticalSplines, band_limit, dx_multipliers,
                    from_modes, mode_grid, to_modes)
from .profiles import bump01, eta_radial, gauss_legendre, phi_abs, phi_profile

__all__ = [
    "bump_mass",
    "bogovskii_kernel",
    "MeanZeroDisk",
    "bogovskii_solve",
    "disk_norm_report",
    "make_time_bump",
    "TestField",
    "BaseField",
    "random_base_field",
    "navier_test_field",
    "navier_eps_ladder",
    "curl_test_field",
    "interior_bump_field",
    "gradient_probe_field",
    "top_flux_probe",
    "w_field",
    "build_battery",
    "sample_series",
]


# ---------------------------------------------------------------------------
# plateau bump on the disk
# ---------------------------------------------------------------------------

def _phi_r(r: np.ndarray) -> np.ndarray:
    """Radial plateau value phi(r): 1 up to 1/2, smooth ramp, 0 beyond 3/4."""
    return phi_profile(r)[0]


@functools.lru_cache(maxsize=1)
def bump_mass() -> float:
    """Total mass of the planar bump, int_{R^2} phi(|y'|) dy'."""
    val, _ = integrate.quad(lambda r: float(_phi_r(np.array([r]))[0]) * r,
                            0.0, 0.75, points=[0.5], epsabs=1e-14)
    return 2.0 * np.pi * val


# ---------------------------------------------------------------------------
# pointwise kernel
# ---------------------------------------------------------------------------

def bogovskii_kernel(xp, yp, ngl: int = 20) -> np.ndarray:
    """Disk kernel N(x', y'), vectorized over any leading axes.

    N = (x'-y')/|x'-y'|^2 * int_{|x'-y'|}^{2} phi(|y' + s w|) s ds / mass
    with w the unit vector from y' toward x'.  The s-integrand is smooth
    except where |y' + s w| crosses the plateau radii 1/2 and 3/4, so the
    line is panelled at those crossings and each panel gets a Gauss rule.
    The upper limit 2 is exact: points of interest are at most a diameter
    apart and the bump vanishes beyond radius 3/4.
    """
    xp = np.asarray(xp, dtype=float)
    yp = np.asarray(yp, dtype=float)
    d = xp - yp
    rho = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(rho < 1e-12):
        raise DegenerateInputError("kernel evaluated at coincident points")
    omega = d / rho[..., None]
    b = np.sum(yp * omega, axis=-1)
    y2 = np.sum(yp * yp, axis=-1)

    # candidate panel edges: |y' + s w|^2 = c^2 at s = -b +- sqrt(b^2-y2+c^2)
    edges = [np.broadcast_to(rho, rho.shape), np.full(rho.shape, 2.0)]
    for c in (0.5, 0.75):
        disc = b * b - y2 + c * c
        ok = disc > 0.0
        root = np.sqrt(np.where(ok, disc, 0.0))
        for sgn in (-1.0, 1.0):
            s = np.where(ok, -b + sgn * root, rho)
            edges.append(np.clip(s, rho, 2.0))
    edges = np.sort(np.stack(edges, axis=-1), axis=-1)

    xg, wg = np.polynomial.legendre.leggauss(ngl)
    acc = np.zeros(rho.shape)
    for p in range(edges.shape[-1] - 1):
        lo, hi = edges[..., p], edges[..., p + 1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for xi, wi in zip(xg, wg):
            s = mid + half * xi
            pos = yp + s[..., None] * omega
            r = np.sqrt(np.sum(pos * pos, axis=-1))
            acc += wi * half * s * _phi_r(r)
    return omega * (acc / (rho * bump_mass()))[..., None]


# ---------------------------------------------------------------------------
# mean-zero samples on the disk
# ---------------------------------------------------------------------------

class MeanZeroDisk:
    """Scalar samples on the unit disk, projected to exact quadrature mean
    zero at construction (``enforce=False`` only records the imbalance).
    Nodes outside the disk are zeroed: the operator's domain is the disk
    and admissible inputs vanish there."""

    def __init__(self, samples: np.ndarray, enforce: bool = True):
        samples = np.array(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
            raise InvalidFieldError("disk samples must be square")
        n = samples.shape[0]
        if n < 4 or n & (n - 1):
            raise ConfigurationError("disk resolution must be a power of two")
        self.n = n
        self.h = PERIOD / n
        self.coords = -0.5 * PERIOD + self.h * np.arange(n)
        X, Y = np.meshgrid(self.coords, self.coords, indexing="ij")
        inside = X * X + Y * Y < 1.0
        samples = np.where(inside, samples, 0.0)
        self.inside = inside
        self.weights = np.where(inside, self.h ** 2, 0.0)
        self.imbalance = float(np.sum(samples * self.weights))
        if enforce:
            samples = samples - np.where(
                inside, self.imbalance / np.sum(self.weights), 0.0)
        self.samples = samples

    @classmethod
    def from_function(cls, fn: Callable, n: int, enforce: bool = True):
        h = PERIOD / n
        c = -0.5 * PERIOD + h * np.arange(n)
        X, Y = np.meshgrid(c, c, indexing="ij")
        return cls(fn(X, Y), enforce=enforce)

    def mean(self) -> float:
        return float(np.sum(self.samples * self.weights))


# ---------------------------------------------------------------------------
# the antidivergence solve
# ---------------------------------------------------------------------------

def _shifted_samples(samples: np.ndarray, h: float, shift) -> np.ndarray:
    """samples evaluated at (x - shift) by periodic roll plus bilinear
    blend.  Nodes whose true argument leaves the disk are zeroed so the
    periodic wrap cannot leak data back in (the data vanish there anyway)."""
    n = samples.shape[0]
    s1, s2 = shift
    f1, i1 = np.modf(s1 / h)
    f2, i2 = np.modf(s2 / h)
    if f1 < 0.0:
        f1, i1 = f1 + 1.0, i1 - 1.0
    if f2 < 0.0:
        f2, i2 = f2 + 1.0, i2 - 1.0
    i1, i2 = int(i1), int(i2)
    a = np.roll(samples, (i1, i2), axis=(0, 1))
    b = np.roll(samples, (i1 + 1, i2), axis=(0, 1))
    c = np.roll(samples, (i1, i2 + 1), axis=(0, 1))
    d = np.roll(samples, (i1 + 1, i2 + 1), axis=(0, 1))
    out = ((1.0 - f1) * (1.0 - f2) * a + f1 * (1.0 - f2) * b
           + (1.0 - f1) * f2 * c + f1 * f2 * d)
    coord = -0.5 * PERIOD + h * np.arange(n)
    X, Y = np.meshgrid(coord, coord, indexing="ij")
    good = (X - s1) ** 2 + (Y - s2) ** 2 <= 1.0 + 4.0 * h
    return np.where(good, out, 0.0)


def _ray_nodes(nray: int):
    """Composite Gauss nodes on [0, 2] (four half-unit panels), used where
    the integrand's kink positions are not known: sampled data carry
    bilinear kinks at every grid-cell crossing."""
    per = max(nray // 4, 4)
    nodes, weights = [], []
    for k in range(4):
        xq, wq = gauss_legendre(per, 0.5 * k, 0.5 * (k + 1))
        nodes.append(xq)
        weights.append(wq)
    return np.concatenate(nodes), np.concatenate(weights)


def _panelled_edges(p: np.ndarray, x2: np.ndarray, circles, cap: float,
                    toward: bool) -> np.ndarray:
    """Sorted panel edges on [0, cap] for line integrals with radial kinks.

    For arguments x - r e (``toward=True``) or x + r e the radius crosses
    ``c`` at r = +-(x.e) +- sqrt((x.e)^2 - |x|^2 + c^2); clipped roots
    partition [0, cap] so per-panel Gauss rules see smooth integrands.
    """
    base = p if toward else -p
    parts = [np.zeros_like(p), np.full(p.shape, cap)]
    for c in circles:
        disc = base * base - x2 + c * c
        ok = disc > 0.0
        s = np.sqrt(np.where(ok, disc, 0.0))
        for sg in (-1.0, 1.0):
            parts.append(np.where(ok, np.clip(base + sg * s, 0.0, cap), 0.0))
    return np.sort(np.stack(parts, axis=-1), axis=-1)


def _bump_ray_factors(P: np.ndarray, R2: np.ndarray, ngl: int):
    """Forward-ray integrals of the bump for one direction at every node:
    A0 = int_0^2 phi(|x + u e|) du and B = the first moment.  Panelled at
    the plateau radii, so the only error left is per-panel Gauss on the
    smooth ramp.  Exactly zero wherever the ray never meets the bump."""
    xg, wg = np.polynomial.legendre.leggauss(ngl)
    edges = _panelled_edges(P, R2, (0.5, 0.75), 2.0, toward=False)
    A0 = np.zeros_like(P)
    B = np.zeros_like(P)
    for k in range(edges.shape[-1] - 1):
        lo, hi = edges[..., k], edges[..., k + 1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for xi, wi in zip(xg, wg):
            u = mid + half * xi
            s = _phi_r(np.sqrt(np.maximum(R2 + 2.0 * u * P + u * u, 0.0)))
            A0 += wi * half * s
            B += wi * half * u * s
    return A0, B


def _data_ray_moments(hfun, X, Y, P, R2, e1, e2, ngl: int):
    """Backward-ray integrals M0 = int h(x - rho e) drho and first moment
    for exact callables, panelled at the plateau radii and the disk edge
    (plateau-derived data are smooth inside each panel; other data are
    simply panelled more than needed)."""
    xg, wg = np.polynomial.legendre.leggauss(ngl)
    edges = _panelled_edges(P, R2, (0.5, 0.75, 1.0), 2.0, toward=True)
    M0 = np.zeros_like(P)
    M1 = np.zeros_like(P)
    for k in range(edges.shape[-1] - 1):
        lo, hi = edges[..., k], edges[..., k + 1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for xi, wi in zip(xg, wg):
            rho = mid + half * xi
            xs, ys = X - rho * e1, Y - rho * e2
            vals = np.where(xs * xs + ys * ys < 1.0, hfun(xs, ys), 0.0)
            M0 += wi * half * vals
            M1 += wi * half * rho * vals
    return M0, M1


_RAY_CACHE: dict = {}


def _bump_factor_table(n: int, ntheta: int, ngl: int):
    """Per-direction bump ray factors on the n x n grid (data-independent;
    cached for small grids)."""
    key = (n, ntheta, ngl)
    if key in _RAY_CACHE:
        return _RAY_CACHE[key]
    h = PERIOD / n
    c = -0.5 * PERIOD + h * np.arange(n)
    X, Y = np.meshgrid(c, c, indexing="ij")
    R2 = X * X + Y * Y
    thetas = 2.0 * np.pi * (np.arange(ntheta) + 0.5) / ntheta
    A0 = np.empty((ntheta, n, n))
    B = np.empty((ntheta, n, n))
    for j, th in enumerate(thetas):
        P = X * np.cos(th) + Y * np.sin(th)
        A0[j], B[j] = _bump_ray_factors(P, R2, ngl)
    out = (thetas, A0, B)
    if n <= 128:
        _RAY_CACHE[key] = out
    return out


def bogovskii_solve(h, n: Optional[int] = None, *, ntheta: int = 96,
                    nray: int = 48, ngl_ray: int = 16, method: str = "rays",
                    mean_tol: float = 1e-8) -> np.ndarray:
    """Solve D1 psi1 + D2 psi2 = h on the unit disk; returns (2, n, n).

    ``h`` is a :class:`MeanZeroDisk` or a callable (X, Y) -> samples
    supported inside the disk (then ``n`` is required).  The default path
    integrates the kernel formula in polar coordinates around each output
    point, where the kernel's 1/rho singularity cancels against the area
    element:

        psi(x) = (1/mass) int_theta e(th) [B(x,th) M0 + A0(x,th) M1] dth,
        M0 = int h(x - rho e) drho,   M1 = int h(x - rho e) rho drho.

    The bump factors A0, B are integrated on panels split at the exact
    plateau-radius crossings (``ngl_ray`` Gauss points per panel), as are
    the data moments when ``h`` is a callable; gridded data are sampled on
    a composite ``nray``-node rule, whose error sits below the bilinear
    interpolation error that dominates that path.

    Outside the disk both factors vanish for every direction (a backward
    ray meeting the data forces x*e > 0, so the forward ray escapes the
    bump), hence support containment holds node-exactly, without masking.

    ``method="cells"`` is the literal kernel-times-cell-samples sum with
    the singular diagonal cell integrated in local polar coordinates on an
    8x8 Gauss grid; first-order and quadratically expensive, kept as an
    independent cross-check of the ray path at low resolution.
    """
    if isinstance(h, MeanZeroDisk):
        disk = h
        n = disk.n
        imb = disk.mean()
        scale = float(np.max(np.abs(disk.samples)))
        if abs(imb) > mean_tol * max(scale, 1.0):
            raise PreconditionError(
                f"input not mean-zero: quadrature imbalance {imb:.3e}")
        samples = disk.samples
        hfun = None
    else:
        if n is None:
            raise ConfigurationError("callable input needs a resolution")
        hstep0 = PERIOD / n
        c0 = -0.5 * PERIOD + hstep0 * np.arange(n)
        X0, Y0 = np.meshgrid(c0, c0, indexing="ij")
        samples = np.where(X0 * X0 + Y0 * Y0 < 1.0, h(X0, Y0), 0.0)
        imb = float(np.sum(samples) * hstep0 ** 2)
        if abs(imb) > mean_tol * max(float(np.max(np.abs(samples))), 1.0):
            raise PreconditionError(
                f"input not mean-zero: quadrature imbalance {imb:.3e}")
        hfun = h

    if method == "cells":
        return _bogovskii_cells(samples, n)
    if method != "rays":
        raise ConfigurationError(f"unknown bogovskii method '{method}'")

    hstep = PERIOD / n
    c = -0.5 * PERIOD + hstep * np.arange(n)
    X, Y = np.meshgrid(c, c, indexing="ij")
    R2 = X * X + Y * Y
    if n <= 128:
        thetas, A0all, Ball = _bump_factor_table(n, ntheta, ngl_ray)
    else:
        thetas = 2.0 * np.pi * (np.arange(ntheta) + 0.5) / ntheta
        A0all = Ball = None
    rq, rw = _ray_nodes(nray)
    wtheta = 2.0 * np.pi / ntheta
    psi = np.zeros((2, n, n))
    for j, th in enumerate(thetas):
        e1, e2 = np.cos(th), np.sin(th)
        P = X * e1 + Y * e2
        if A0all is not None:
            A0, B = A0all[j], Ball[j]
        else:
            A0, B = _bump_ray_factors(P, R2, ngl_ray)
        if hfun is not None:
            M0, M1 = _data_ray_moments(hfun, X, Y, P, R2, e1, e2, ngl_ray)
        else:
            M0 = np.zeros((n, n))
            M1 = np.zeros((n, n))
            for rho, w in zip(rq, rw):
                vals = _shifted_samples(samples, hstep, (rho * e1, rho * e2))
                M0 += w * vals
                M1 += w * rho * vals
        core = wtheta * (B * M0 + A0 * M1)
        psi[0] += e1 * core
        psi[1] += e2 * core
    return psi / bump_mass()


def _bogovskii_cells(samples: np.ndarray, n: int) -> np.ndarray:
    """Direct cell-sum path; 8x8 local-polar rule on the singular cell."""
    hstep = PERIOD / n
    coords = -0.5 * PERIOD + hstep * np.arange(n)
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    sup = np.abs(samples) > 0.0
    ys = np.stack([X[sup], Y[sup]], axis=-1)
    hv = samples[sup]
    cell = hstep ** 2

    tq, tw = gauss_legendre(8, 0.0, 2.0 * np.pi)
    uq, uw = _ray_nodes(32)
    psi = np.zeros((2, n, n))
    for idx in range(n * n):
        i, j = divmod(idx, n)
        xpt = np.array([X[i, j], Y[i, j]])
        d = xpt[None, :] - ys
        far = np.sum(d * d, axis=-1) > 1e-14
        if np.any(far):
            N = bogovskii_kernel(np.broadcast_to(xpt, ys[far].shape),
                                 ys[far])
            psi[:, i, j] += cell * np.sum(N * hv[far][:, None], axis=0)
        if np.any(~far):
            # int_cell N(x, x - rho e) dA: the kernel's s-integral from rho
            # splits as B + rho A0, and N rho drho dth = e (B + rho A0)
            # drho dth -- regular, integrated per direction by Gauss rules.
            hval = hv[~far][0]
            acc = np.zeros(2)
            for th, wt in zip(tq, tw):
                e = np.array([np.cos(th), np.sin(th)])
                pos = xpt[None, :] + uq[:, None] * e[None, :]
                s = _phi_r(np.sqrt(np.sum(pos * pos, axis=-1)))
                a0 = float(np.sum(uw * s))
                bb = float(np.sum(uw * uq * s))
                redge = 0.5 * hstep / max(abs(e[0]), abs(e[1]))
                rq8, rw8 = gauss_legendre(8, 0.0, redge)
                acc += wt * e * float(np.sum(rw8 * (bb + a0 * rq8)))
            psi[:, i, j] += hval * acc / bump_mass()
    return psi


def disk_norm_report(psi: np.ndarray, h, q: float = 2.0) -> dict:
    """Disk-weighted L^q / W^{1,q} norms of an antidivergence output and the
    relative L^q residual of its horizontal divergence against the data."""
    if isinstance(h, MeanZeroDisk):
        data = h.samples
        n = h.n
    else:
        data = np.asarray(h, dtype=float)
        n = data.shape[0]
    if psi.shape != (2, n, n):
        raise InvalidFieldError("psi must be (2, n, n) matching the data")
    hstep = PERIOD / n
    c = -0.5 * PERIOD + hstep * np.arange(n)
    X, Y = np.meshgrid(c, c, indexing="ij")
    wts = np.where(X * X + Y * Y < 1.0, hstep ** 2, 0.0)

    mg = mode_grid(n, n)
    kx = mg.kx[:, None]
    ky = mg.ky[None, :]
    grads = []
    for compi in range(2):
        fh = np.fft.rfft2(psi[compi])
        grads.append(np.fft.irfft2(1j * kx * fh, s=(n, n)))
        grads.append(np.fft.irfft2(1j * ky * fh, s=(n, n)))
    div = grads[0] + grads[3]

    def lq(a):
        return float(np.sum(np.abs(a) ** q * wts) ** (1.0 / q))

    mag_psi = np.sqrt(psi[0] ** 2 + psi[1] ** 2)
    mag_grad = np.sqrt(sum(g * g for g in grads))
    lq_h = lq(data)
    return {
        "lq_h": lq_h,
        "lq_psi": lq(mag_psi),
        "w1q_psi": float((lq(mag_psi) ** q + lq(mag_grad) ** q) ** (1.0 / q)),
        "div_residual": lq(div - data) / (lq_h + 1e-300),
        "outside_max": float(np.max(np.abs(psi)
                                    * (X * X + Y * Y >= 1.0)[None])),
    }


# ---------------------------------------------------------------------------
# time bumps
# ---------------------------------------------------------------------------

def make_time_bump(t0: float = -0.5, width: float = 0.35) -> Callable:
    """Smooth compactly supported time factor psi(t) = b(((t - t0)/width)^2)
    built from the bump ramp; supported strictly inside (-1, 0)."""
    if not (-1.0 < t0 - width and t0 + width < 0.0):
        raise ConfigurationError("time bump must be supported inside (-1, 0)")

    def tf(t, nder: int = 0):
        t = np.asarray(t, dtype=float)
        u = (t - t0) / width
        b = bump01(u * u, min(nder + 1, 3))
        if nder == 0:
            return b[0]
        if nder == 1:
            return b[1] * 2.0 * u / width
        if nder == 2:
            return (b[2] * 4.0 * u * u + b[1] * 2.0) / width ** 2
        raise ConfigurationError("time bump derivatives available up to 2")

    tf.t0, tf.width = t0, width
    return tf


# ---------------------------------------------------------------------------
# the test-field record
# ---------------------------------------------------------------------------

@dataclass
class TestField:
    """Space-time test field with construction diagnostics.

    ``kind`` selects the evaluation protocol.  Modal fields implement
    ``spatial(nu)`` returning the nu-th vertical derivative of their mode
    coefficients, shape (3, nx, ny/2+1, nz).  Local fields implement
    ``local_eval(pts)`` -> {"vals": (n,3), "grad": (n,3,3), "lap": (n,3)}
    with grad[:, i, j] = D_j of component i; their support is the ball of
    ``radius`` around ``point`` plus its wall reflection.

    ``div_max`` and ``boundary_residual`` are relative to the field's
    maximum amplitude.
    """

    family: str
    kind: str
    eps: float
    alpha: float
    label: str
    tfun: Callable
    grid: Optional[SlabGrid] = None
    spatial: Optional[Callable] = None
    point: Optional[np.ndarray] = None
    local_eval: Optional[Callable] = None
    radius: float = 0.0
    div_max: float = 0.0
    boundary_residual: float = 0.0
    full_depth: bool = False
    diagnostics: dict = dfield(default_factory=dict)

    def values_modes(self, t: float) -> np.ndarray:
        if self.kind != "modal":
            raise InvalidFieldError("values_modes is for modal fields")
        return self.spatial(0) * self.tfun(t)


# ---------------------------------------------------------------------------
# smooth normal-zero base fields (curls of band-limited potentials)
# ---------------------------------------------------------------------------

@dataclass
class BaseField:
    """Band-limited divergence-free field with zero normal wall trace.

    Stored as spline banks of the component mode profiles and of their
    first two analytic vertical derivatives (one bank tuple per order), so
    derivative data never rely on differentiating an interpolant: the
    curl structure then cancels in the divergence term by term, down to
    float rounding."""

    grid: SlabGrid
    banks: tuple          # ((value banks), (derivative banks), ...)
    tfun: Callable
    label: str = ""

    def modes(self, nu: int = 0,
              z: Optional[np.ndarray] = None) -> np.ndarray:
        zq = self.grid.z if z is None else np.asarray(z, dtype=float)
        return np.stack([np.moveaxis(b(zq), 0, -1) for b in self.banks[nu]])


_ZF_DENSE = 641  # dense vertical sampling for spline banks


def _curl_banks(pots: np.ndarray, grid: SlabGrid, zf: np.ndarray,
                breaks: tuple, amp: float = 1.0) -> tuple:
    """Spline banks of curl(pots) and its vertical derivatives.

    ``pots`` holds the three potential components and their analytic
    vertical derivatives, shape (4, 3, nx, nyr, nz): orders 0..3 of each
    component.  Returns ((banks0), (banks1), (banks2)) for the curl's
    profile orders 0..2.
    """
    ikx, iky = dx_multipliers(grid)
    out = []
    for nu in range(3):
        profiles = np.stack([
            iky * pots[nu][2] - pots[nu + 1][1],
            pots[nu + 1][0] - ikx * pots[nu][2],
            ikx * pots[nu][1] - iky * pots[nu][0],
        ])
        profiles *= amp
        out.append(tuple(VerticalSplines(zf, profiles[i], breaks=breaks)
                         for i in range(3)))
    return tuple(out)


def random_base_field(grid: SlabGrid, rng: np.random.Generator,
                      mmax: int = 3, neumann: bool = False,
                      amp: float = 1.0, tfun: Optional[Callable] = None,
                      label: str = "") -> BaseField:
    """Draw a random divergence-free field with zero normal wall trace.

    The field is the curl of a band-limited vector potential vanishing at
    the wall and, to first order, at the top.  With ``neumann=True`` the
    potential is flattened to cubic order at the wall, so the horizontal
    components also have zero wall slope -- the fixture for the
    zero-slip-coefficient convergence example.
    """
    nx, nyr = grid.nx, grid.ny // 2 + 1
    zf = np.linspace(0.0, 1.0, _ZF_DENSE)
    env = phi_abs(zf - 0.25, 3)  # plateau over [0, 3/4], support below 1

    pots = np.zeros((4, 3, nx, nyr, _ZF_DENSE), dtype=complex)
    for compi in range(3):
        coef = (rng.standard_normal((nx, nyr))
                + 1j * rng.standard_normal((nx, nyr)))
        coef = band_limit(coef[..., None], mmax)[..., 0]
        coef[0, 0] = 0.0
        c0, c1 = rng.standard_normal(2)
        if neumann:
            poly = [zf ** 3 * (c0 + c1 * zf),
                    zf ** 2 * (3.0 * c0 + 4.0 * c1 * zf),
                    zf * (6.0 * c0 + 12.0 * c1 * zf),
                    6.0 * c0 + 24.0 * c1 * zf]
        else:
            poly = [zf * (c0 + c1 * zf), c0 + 2.0 * c1 * zf,
                    np.full_like(zf, 2.0 * c1), np.zeros_like(zf)]
        for nu in range(4):
            prod = sum(comb(nu, i) * poly[nu - i] * env[i]
                       for i in range(nu + 1))
            pots[nu, compi] = coef[..., None] * prod

    # normalize by the value-order curl amplitude
    ikx, iky = dx_multipliers(grid)
    p0 = np.stack([iky * pots[0][2] - pots[1][1],
                   pots[1][0] - ikx * pots[0][2],
                   ikx * pots[0][1] - iky * pots[0][0]])
    scale = amp / (np.max(np.abs(p0)) + 1e-300)
    banks = _curl_banks(pots, grid, zf, (0.75,), amp=scale)
    return BaseField(grid=grid, banks=banks,
                     tfun=tfun or make_time_bump(), label=label)


# ---------------------------------------------------------------------------
# slip-corrected extension fields
# ---------------------------------------------------------------------------

def navier_test_field(base: BaseField, eps: float, alpha: float,
                      ngl: int = 24, ngl_xi: int = 16,
                      use_bogovskii: bool = True, label: str = "",
                      pre_tol: float = 1e-7) -> TestField:
    """Extend a normal-zero divergence-free field past the wall so the slip
    rows hold at the boundary, preserving the divergence.

    Horizontal components: even mollified extension minus a damped
    reflected layer (2 alpha I).  Vertical component: odd extension plus
    the layer.  The layer's wall trace tau feeds a vertical corrector
    -2 alpha tau phi(z) (killing the remaining normal trace) and a
    horizontal pair supported near the wall whose divergence cancels the
    corrector's.  The pair comes from the disk antidivergence of
    2 alpha tau; a mode-space gradient closes that solve's quadrature gap
    so the assembled field is divergence-free at kernel-identity accuracy
    (the closed fraction is recorded).  ``use_bogovskii=False`` takes the
    exact mode-space antidivergence directly -- used by convergence
    ladders where only rates matter.

    Vertical derivative slots (``spatial(nu)``, nu <= 2) are evaluated by
    moving the derivatives onto the data through the exact reflection
    identities, which keeps the divergence at the data's own level and the
    wall rows exact; the kernel-derivative route is recorded against it in
    ``diagnostics["deriv_swap_residual"]``.
    """
    grid = base.grid
    if grid.nx != grid.ny and use_bogovskii:
        raise ConfigurationError("disk solve needs a square horizontal grid")

    b0 = base.modes(0)
    b1 = base.modes(1)
    scale0 = float(np.max(np.abs(b0))) + 1e-300
    wall = base.modes(0, z=np.array([0.0]))
    if np.max(np.abs(wall[2])) > pre_tol * scale0:
        raise PreconditionError("base field has a nonzero normal wall trace")
    ikx, iky = dx_multipliers(grid)
    dv = ikx * b0[0] + iky * b0[1] + b1[2]
    if np.max(np.abs(dv)) > 10.0 * pre_tol * scale0:
        raise PreconditionError("base field is not divergence-free")
    if np.max(np.abs(base.modes(0, z=np.array([1.0])))) > pre_tol * scale0:
        raise PreconditionError("base field does not vanish at the top")

    mop = MollifierOp(grid, eps, ngl=ngl, ngl_xi=ngl_xi)
    zq = grid.z
    phi_v = phi_abs(zq, 3)
    parts: dict = {}
    lcache: dict = {}

    def layer_terms(compi: int):
        # damped layer I(g) and its exact vertical derivative alpha I - Im
        if compi not in lcache:
            bank = base.banks[0][compi]
            ia = mop.i_alpha(bank, zq, alpha)
            dia = alpha * ia - mop.image(bank, zq)
            lcache[compi] = (ia, dia)
        return lcache[compi]

    kernel_wall = None  # kernel column M(k, z), built on first use

    def ext_part(compi: int, nu: int) -> np.ndarray:
        # Vertical derivatives are moved onto the data through the exact
        # reflection identities (D3 E+ g = E- g', D3 E- g = E+ g' + wall
        # layer, D3 I g = alpha I g - Im g), so the assembled divergence
        # collapses to one pass of the data's own divergence and the slip
        # rows cancel within a single quadrature.  The wall layers vanish
        # at nu = 1: the normal component has zero trace by precondition.
        nonlocal kernel_wall
        key = (compi, nu)
        if key in parts:
            return parts[key]
        if nu > 2:
            raise ConfigurationError("extension derivatives available up to 2")
        bank = base.banks[nu][compi]
        flip = nu % 2 == 1
        if (compi < 2) != flip:
            out = mop.even(bank, zq)
        else:
            out = mop.odd(bank, zq)
        sgn = -1.0 if compi < 2 else 1.0
        if nu == 2 and compi < 2:
            if kernel_wall is None:
                kernel_wall = np.moveaxis(mop.mhat(zq), 0, -1)
            dwall = base.banks[1][compi](np.array([0.0]))[0]
            out = out + 2.0 * dwall[..., None] * kernel_wall
        if alpha != 0.0:
            ia, dia = layer_terms(compi)
            if nu == 0:
                out = out + sgn * 2.0 * alpha * ia
            elif nu == 1:
                out = out + sgn * 2.0 * alpha * dia
            else:
                ddia = alpha * dia - mop.image(base.banks[0][compi], zq,
                                               domega=1)
                out = out + sgn * 2.0 * alpha * ddia
        parts[key] = out
        return out

    # wall trace of the damped layer and the horizontal repair pair
    trace = mop.i_alpha(base.banks[0][2], np.array([0.0]), alpha)[..., 0]
    mg = mode_grid(grid.nx, grid.ny)
    kx2 = mg.kx[:, None]
    ky2 = mg.ky[None, :]
    k2 = kx2 ** 2 + ky2 ** 2

    fix_fraction = 0.0
    pair_modes = np.zeros((2,) + trace.shape, dtype=complex)
    if alpha != 0.0:
        rhs = 2.0 * alpha * trace
        if use_bogovskii:
            hphys = from_modes(rhs[..., None], grid.ny)[..., 0]
            psi_pair = bogovskii_solve(MeanZeroDisk(hphys),
                                       ntheta=64, nray=40)
            pair_modes = np.stack([to_modes(psi_pair[0][..., None])[..., 0],
                                   to_modes(psi_pair[1][..., None])[..., 0]])
        resid = 1j * kx2 * pair_modes[0] + 1j * ky2 * pair_modes[1] - rhs
        with np.errstate(divide="ignore", invalid="ignore"):
            gfix = np.where(k2 > 0.0, resid / k2, 0.0)
        fix = np.stack([1j * kx2 * gfix, 1j * ky2 * gfix])
        pair_modes = pair_modes + fix
        fix_fraction = float(np.max(np.abs(fix))
                             / (np.max(np.abs(pair_modes)) + 1e-300))

    def psi_stack(nu: int = 0) -> np.ndarray:
        out = np.zeros((3,) + trace.shape + (grid.nz,), dtype=complex)
        if alpha != 0.0:
            out[0] = pair_modes[0][..., None] * phi_v[1 + nu][None, None]
            out[1] = pair_modes[1][..., None] * phi_v[1 + nu][None, None]
            out[2] = (-2.0 * alpha) * trace[..., None] * phi_v[nu][None, None]
        return out

    cache: dict = {}

    def spatial(nu: int = 0) -> np.ndarray:
        if nu not in cache:
            ext = np.stack([ext_part(c, nu) for c in range(3)])
            cache[nu] = ext + psi_stack(nu)
        return cache[nu]

    s0 = spatial(0)
    s1 = spatial(1)
    scale = float(np.max(np.abs(from_modes(s0, grid.ny)))) + 1e-300
    rows = [from_modes((s1[k] - alpha * s0[k])[..., :1], grid.ny)
            for k in range(2)]
    rows.append(from_modes(s0[2][..., :1], grid.ny))
    bres = float(max(np.max(np.abs(r)) for r in rows)) / scale
    divm = ikx * s0[0] + iky * s0[1] + s1[2]
    div_max = float(np.max(np.abs(from_modes(divm, grid.ny)))) / scale
    # agreement between the two derivative routes (kernel derivative vs
    # derivative moved onto the data); limited by the window quadrature
    swap = float(np.max(np.abs(
        mop.even(base.banks[0][0], zq, domega=1)
        - mop.odd(base.banks[1][0], zq)))) / scale

    return TestField(
        family="navier", kind="modal", eps=eps, alpha=alpha,
        label=label or f"navier-e{eps:g}-a{alpha:g}",
        tfun=base.tfun, grid=grid, spatial=spatial,
        div_max=div_max, boundary_residual=bres,
        diagnostics={
            "psi_stack": psi_stack,
            "pair_fix_fraction": fix_fraction,
            "deriv_swap_residual": swap,
            # box integral of the layer's wall trace: the (0,0) coefficient
            # times the box area, exactly zero for admissible inputs
            "wall_layer_integral": float(abs(trace[0, 0])) * PERIOD ** 2,
        },
    )


def _wq_norm(vals: np.ndarray, grads: Optional[np.ndarray], grid: SlabGrid,
             qp: float) -> float:
    """Sobolev-style norm over box x [0,1]: components combined in
    quadrature pointwise, then one L^{qp} integral (trapezoid vertically,
    exact rectangle rule horizontally)."""
    mag2 = np.sum(vals ** 2, axis=0)
    if grads is not None:
        mag2 = mag2 + np.sum(grads ** 2, axis=0)
    mag = np.sqrt(mag2)
    wz = np.full(grid.nz, grid.hz)
    wz[0] = wz[-1] = 0.5 * grid.hz
    cell = grid.hx * grid.hy
    return float((np.sum(mag ** qp * wz[None, None, :]) * cell) ** (1.0 / qp))


def navier_eps_ladder(base: BaseField, alpha: float, eps_list,
                      qprime: float = 10.0 / 9.0,
                      use_bogovskii: bool = False) -> dict:
    """Distances from the corrected extension to the base field in W^{1,q'}
    and the norms of the wall-repair part across a mollification ladder,
    with fitted log-log slopes."""
    grid = base.grid
    eps_list = sorted(eps_list, reverse=True)
    b0 = base.modes(0)
    b1 = base.modes(1)
    ikx, iky = dx_multipliers(grid)

    def stacks(m0, m1):
        vals = from_modes(m0, grid.ny)
        grads = np.concatenate([
            from_modes(ikx * m0, grid.ny),
            from_modes(iky * m0, grid.ny),
            from_modes(m1, grid.ny),
        ])
        return vals, grads

    dists, psis = [], []
    for eps in eps_list:
        tf = navier_test_field(base, eps, alpha,
                               use_bogovskii=use_bogovskii)
        vals, grads = stacks(tf.spatial(0) - b0, tf.spatial(1) - b1)
        dists.append(_wq_norm(vals, grads, grid, qprime))
        pstack = tf.diagnostics["psi_stack"]
        vals, grads = stacks(pstack(0), pstack(1))
        psis.append(_wq_norm(vals, grads, grid, qprime))

    eps_arr = np.asarray(eps_list, dtype=float)
    out = {"eps": eps_arr, "dist": np.asarray(dists),
           "psi_norm": np.asarray(psis),
           "slope_dist": _fit_slope(eps_arr, np.asarray(dists))}
    if alpha != 0.0:
        out["slope_psi"] = _fit_slope(eps_arr, out["psi_norm"])
        out["psi_over_eps"] = out["psi_norm"] / eps_arr
    return out


def _fit_slope(x: np.ndarray, y: np.ndarray) -> float:
    good = y > 0.0
    if int(np.sum(good)) < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[good]), np.log(y[good]), 1)[0])


# ---------------------------------------------------------------------------
# curl-type localized fields
# ---------------------------------------------------------------------------

_MIDX = [g for g in itertools.product(range(4), repeat=3) if sum(g) <= 3]


def _leibniz(F: dict, G: dict) -> dict:
    """Product rule on derivative tables keyed by multi-index, order <= 3."""
    out = {}
    for g in _MIDX:
        acc = 0.0
        for b in itertools.product(*(range(gi + 1) for gi in g)):
            cb = 1.0
            for gi, bi in zip(g, b):
                cb *= comb(gi, bi)
            rest = tuple(gi - bi for gi, bi in zip(g, b))
            acc = acc + cb * F[b] * G[rest]
        out[g] = acc
    return out


def _mi(*axes) -> tuple:
    g = [0, 0, 0]
    for a in axes:
        g[a] += 1
    return tuple(g)


def _eta_cart(pts: np.ndarray, center: np.ndarray, eps: float,
              image: bool) -> dict:
    """Derivative table (orders <= 3) of the scaled mollifier centered at
    ``center`` or at its wall reflection.  Derivatives act on the
    evaluation point; the reflected copy gets no sign flips because the
    reflection moves the center, not the argument."""
    v = pts - center[None, :]
    if image:
        v = v.copy()
        v[:, 2] = pts[:, 2] + center[2]
    s = np.sum(v * v, axis=-1) / eps ** 2
    G = eta_radial(s, 3)
    i3 = eps ** -3
    e2, e4, e6 = eps ** -2, eps ** -4, eps ** -6
    out = {(0, 0, 0): i3 * G[0]}
    for a in range(3):
        out[_mi(a)] = i3 * 2.0 * e2 * v[:, a] * G[1]
    for a in range(3):
        for b in range(a, 3):
            val = i3 * 4.0 * e4 * v[:, a] * v[:, b] * G[2]
            if a == b:
                val = val + i3 * 2.0 * e2 * G[1]
            out[_mi(a, b)] = val
    for a in range(3):
        for b in range(a, 3):
            for c in range(b, 3):
                val = i3 * 8.0 * e6 * v[:, a] * v[:, b] * v[:, c] * G[3]
                dd = 0.0
                if a == b:
                    dd = dd + v[:, c]
                if a == c:
                    dd = dd + v[:, b]
                if b == c:
                    dd = dd + v[:, a]
                out[_mi(a, b, c)] = val + i3 * 4.0 * e4 * dd * G[2]
    return out


def _radial_plateau_cart(pts: np.ndarray) -> dict:
    """Derivative table of the radial plateau phi(|y|) in R^3.  phi' is
    identically zero off the shell 1/2 < |y| < 3/4, so the 1/r chain-rule
    factors never see the origin."""
    r = np.sqrt(np.sum(pts * pts, axis=-1))
    f = phi_profile(r, 3)
    shell = (r > 0.5) & (r < 0.75)
    safe = np.where(shell, r, 1.0)
    nh = pts / safe[:, None]
    f1 = np.where(shell, f[1], 0.0)
    f2 = np.where(shell, f[2], 0.0)
    f3 = np.where(shell, f[3], 0.0)
    out = {(0, 0, 0): f[0]}
    for a in range(3):
        out[_mi(a)] = f1 * nh[:, a]
    for a in range(3):
        for b in range(a, 3):
            delta = 1.0 if a == b else 0.0
            out[_mi(a, b)] = (f2 * nh[:, a] * nh[:, b]
                              + f1 * (delta - nh[:, a] * nh[:, b]) / safe)
    for a in range(3):
        for b in range(a, 3):
            for c in range(b, 3):
                nnn = nh[:, a] * nh[:, b] * nh[:, c]
                sym = 0.0
                if a == b:
                    sym = sym + nh[:, c]
                if a == c:
                    sym = sym + nh[:, b]
                if b == c:
                    sym = sym + nh[:, a]
                out[_mi(a, b, c)] = (f3 * nnn
                                     + f2 * (sym - 3.0 * nnn) / safe
                                     + f1 * (3.0 * nnn - sym) / safe ** 2)
    return out


def _exp_vertical_cart(pts: np.ndarray, coef: float) -> dict:
    e = np.exp(coef * pts[:, 2])
    zero = np.zeros(len(pts))
    out = {}
    for g in _MIDX:
        out[g] = coef ** g[2] * e if (g[0] == 0 and g[1] == 0) else zero
    return out


def curl_test_field(component: int, point, eps: float, alpha: float,
                    psi: Optional[Callable] = None,
                    label: str = "") -> TestField:
    """Localized divergence-free bump written as an exact curl.

    ``component`` picks the vorticity direction probed: 1 and 2 ride the
    odd reflected kernel with the half-exponent vertical weight
    exp(alpha y3 / 2); 3 rides the even kernel with the full exponent.
    With those weights the slip rows and the normal entry vanish on the
    wall; sampled residuals are recorded anyway.  The divergence is zero
    by the curl structure (equal mixed partials from one derivative
    table).
    """
    if component not in (1, 2, 3):
        raise ConfigurationError("component must be 1, 2 or 3")
    if not 0.0 < eps <= 1.0 / 64.0:
        raise PreconditionError("bump width must satisfy 0 < eps <= 1/64")
    point = np.asarray(point, dtype=float)
    if point[2] < 0.0 or point[2] > 1.0 or np.max(np.abs(point[:2])) > 2.0:
        raise PreconditionError("base point outside the half-slab")
    psi = psi or make_time_bump()
    coef = alpha if component == 3 else 0.5 * alpha
    sign = 1.0 if component == 3 else -1.0  # even vs odd kernel reflection

    if component == 1:
        spec = ((1, 2, +1.0), (2, 1, -1.0))   # (0, +D3 G, -D2 G)
    elif component == 2:
        spec = ((0, 2, -1.0), (2, 0, +1.0))   # (-D3 G, 0, +D1 G)
    else:
        spec = ((0, 1, +1.0), (1, 0, -1.0))   # (+D2 H, -D1 H, 0)

    def eval_local(pts: np.ndarray) -> dict:
        pts = np.asarray(pts, dtype=float)
        ef = _exp_vertical_cart(pts, coef)
        ze = _radial_plateau_cart(pts)
        kd = _eta_cart(pts, point, eps, image=False)
        ki = _eta_cart(pts, point, eps, image=True)
        ker = {g: kd[g] + sign * ki[g] for g in kd}
        G = _leibniz(_leibniz(ef, ze), ker)
        vals = np.zeros((len(pts), 3))
        grad = np.zeros((len(pts), 3, 3))
        lap = np.zeros((len(pts), 3))
        for ci, axis, sgn in spec:
            vals[:, ci] = sgn * G[_mi(axis)]
            for j in range(3):
                grad[:, ci, j] = sgn * G[_mi(axis, j)]
            lap[:, ci] = sgn * (G[_mi(axis, 0, 0)] + G[_mi(axis, 1, 1)]
                                + G[_mi(axis, 2, 2)])
        return {"vals": vals, "grad": grad, "lap": lap}

    rng = np.random.default_rng(1234)
    smp = point[None, :] + (rng.random((64, 3)) - 0.5) * (3.0 * eps)
    smp[:, 2] = np.abs(smp[:, 2])
    out = eval_local(smp)
    scale = float(np.max(np.abs(out["vals"]))) + 1e-300
    div_max = float(np.max(np.abs(
        out["grad"][:, 0, 0] + out["grad"][:, 1, 1]
        + out["grad"][:, 2, 2]))) / scale

    ring = np.zeros((48, 3))
    ang = np.linspace(0.0, 2.0 * np.pi, 48, endpoint=False)
    ring[:, 0] = point[0] + 1.2 * eps * np.cos(ang)
    ring[:, 1] = point[1] + 1.2 * eps * np.sin(ang)
    wall = eval_local(ring)
    rows = np.maximum(
        np.abs(wall["grad"][:, 0, 2] - alpha * wall["vals"][:, 0]),
        np.abs(wall["grad"][:, 1, 2] - alpha * wall["vals"][:, 1]))
    bres = float(max(np.max(rows),
                     np.max(np.abs(wall["vals"][:, 2])))) / scale

    return TestField(
        family=f"curl-w{component}", kind="local", eps=eps, alpha=alpha,
        label=label or f"curl{component}-e{eps:g}", tfun=psi,
        point=point, local_eval=eval_local, radius=eps,
        div_max=div_max, boundary_residual=bres,
    )


# ---------------------------------------------------------------------------
# interior bumps (modal curls supported away from wall and top)
# ---------------------------------------------------------------------------

def interior_bump_field(grid: SlabGrid, rng: np.random.Generator,
                        mmax: int = 5, tfun: Optional[Callable] = None,
                        label: str = "", full_depth: bool = False) -> TestField:
    """Divergence-free modal field vanishing near both the wall and the
    top: the curl of a band-limited potential windowed by an interior
    plateau in z.

    With ``full_depth=True`` the profile lives on the doubled interval
    [-1, 1] instead, windowed around z = 0 so the field straddles the
    interface plane while still vanishing near both caps.  Such fields
    test reflected series, where the interesting behaviour sits at z = 0.
    """
    nx, nyr = grid.nx, grid.ny // 2 + 1
    if full_depth:
        zf = np.linspace(-1.0, 1.0, 2 * _ZF_DENSE - 1)
        win = phi_abs(zf / 0.9, 3)
        wd = [win[i] / 0.9 ** i for i in range(4)]
        # window kinks: plateau edge at |z| = 0.45, support edge 0.675
        breaks = (-0.675, -0.45, 0.45, 0.675)
        zeval = grid.zgrid(True)
    else:
        zf = np.linspace(0.0, 1.0, _ZF_DENSE)
        win = phi_abs((zf - 0.5) / 0.45, 3)
        wd = [win[i] / 0.45 ** i for i in range(4)]
        # window kinks: plateau edge at 0.5 +- 0.225, support edge +- 0.3375
        breaks = (0.1625, 0.275, 0.725, 0.8375)
        zeval = grid.z

    pots = np.zeros((4, 3, nx, nyr, zf.size), dtype=complex)
    for compi in range(3):
        coef = (rng.standard_normal((nx, nyr))
                + 1j * rng.standard_normal((nx, nyr)))
        coef = band_limit(coef[..., None], mmax)[..., 0]
        coef[0, 0] = 0.0
        c0, c1, c2 = rng.standard_normal(3)
        poly = [c0 + c1 * zf + c2 * zf * zf, c1 + 2.0 * c2 * zf,
                np.full_like(zf, 2.0 * c2), np.zeros_like(zf)]
        for nu in range(4):
            pots[nu, compi] = coef[..., None] * sum(
                comb(nu, i) * poly[nu - i] * wd[i] for i in range(nu + 1))

    ikx, iky = dx_multipliers(grid)
    p0 = np.stack([iky * pots[0][2] - pots[1][1],
                   pots[1][0] - ikx * pots[0][2],
                   ikx * pots[0][1] - iky * pots[0][0]])
    scale = 1.0 / (np.max(np.abs(p0)) + 1e-300)

    banks = _curl_banks(pots, grid, zf, breaks, amp=scale)
    cache: dict = {}

    def spatial(nu: int = 0) -> np.ndarray:
        if nu not in cache:
            cache[nu] = np.stack(
                [np.moveaxis(b(zeval), 0, -1) for b in banks[nu]])
        return cache[nu]

    s0, s1 = spatial(0), spatial(1)
    scale = float(np.max(np.abs(from_modes(s0, grid.ny)))) + 1e-300
    divm = ikx * s0[0] + iky * s0[1] + s1[2]
    div_max = float(np.max(np.abs(from_modes(divm, grid.ny)))) / scale
    ends = np.concatenate([s0[2][..., :1], s0[2][..., -1:]], axis=-1)
    bres = float(np.max(np.abs(from_modes(ends, grid.ny)))) / scale

    return TestField(
        family="interior" if full_depth else "normal-zero", kind="modal",
        eps=0.0, alpha=0.0, label=label or "bump",
        tfun=tfun or make_time_bump(), grid=grid, spatial=spatial,
        div_max=div_max, boundary_residual=bres, full_depth=full_depth,
    )


def gradient_probe_field(grid: SlabGrid, rng: np.random.Generator,
                         mmax: int = 3, tfun: Optional[Callable] = None,
                         label: str = "") -> TestField:
    """Pure-gradient probe: the gradient of a band-limited scalar windowed
    to the interior of the slab.

    Deliberately *not* divergence-free (its divergence is the scalar's
    Laplacian, and ``div_max`` records it honestly), but curl-free with
    zero wall flux.  Pairings that are supposed to see the pressure need a
    test field with nonvanishing divergence; the battery never produces
    one, so this is the probe for those checks.
    """
    nx, nyr = grid.nx, grid.ny // 2 + 1
    zf = np.linspace(0.0, 1.0, _ZF_DENSE)
    win = phi_abs((zf - 0.45) / 0.4, 3)
    wd = [win[i] / 0.4 ** i for i in range(4)]

    coef = (rng.standard_normal((nx, nyr))
            + 1j * rng.standard_normal((nx, nyr)))
    coef = band_limit(coef[..., None], mmax)[..., 0]
    coef[0, 0] = 0.0
    c0, c1, c2 = rng.standard_normal(3)
    poly = [c0 + c1 * zf + c2 * zf * zf, c1 + 2.0 * c2 * zf,
            np.full_like(zf, 2.0 * c2), np.zeros_like(zf)]
    chi = np.stack([coef[..., None] * sum(
        comb(nu, i) * poly[nu - i] * wd[i] for i in range(nu + 1))
        for nu in range(4)])

    ikx, iky = dx_multipliers(grid)
    g0 = np.stack([ikx * chi[0], iky * chi[0], chi[1]])
    amp = 1.0 / (np.max(np.abs(g0)) + 1e-300)
    # window kinks: plateau ends 0.25 / 0.65, support ends 0.15 / 0.75
    breaks = (0.15, 0.25, 0.65, 0.75)
    banks = tuple(
        tuple(VerticalSplines(zf, amp * prof, breaks=breaks) for prof in
              (ikx * chi[nu], iky * chi[nu], chi[nu + 1]))
        for nu in range(3))
    cache: dict = {}

    def spatial(nu: int = 0) -> np.ndarray:
        if nu not in cache:
            cache[nu] = np.stack(
                [np.moveaxis(b(grid.z), 0, -1) for b in banks[nu]])
        return cache[nu]

    s0, s1 = spatial(0), spatial(1)
    scale = float(np.max(np.abs(from_modes(s0, grid.ny)))) + 1e-300
    divm = ikx * s0[0] + iky * s0[1] + s1[2]
    div_max = float(np.max(np.abs(from_modes(divm, grid.ny)))) / scale
    bres = float(np.max(np.abs(
        from_modes(s0[2][..., :1], grid.ny)))) / scale

    return TestField(
        family="gradient", kind="modal", eps=0.0, alpha=0.0,
        label=label or "grad-probe", tfun=tfun or make_time_bump(),
        grid=grid, spatial=spatial, div_max=div_max,
        boundary_residual=bres,
    )


def top_flux_probe(grid: SlabGrid, tfun: Optional[Callable] = None,
                   label: str = "") -> TestField:
    """Vertical mean-mode field carrying flux out of the top of the box.

    Phi = (0, 0, q(z)) with q identically zero below z = 0.625 and q = 1
    near the top.  It satisfies the wall condition but not compact
    support, so the net-divergence cancellation that holds for every
    admissible field fails for it by construction: its space integral of
    div Phi equals the top flux.  Used as the deliberate counterexample in
    the constant-shift sensitivity checks; not an admissible member of any
    battery.
    """
    zf = np.linspace(0.0, 1.0, _ZF_DENSE)
    ramp = phi_abs(zf * 0.8, 3)
    qd = [(1.0 - ramp[0] if i == 0 else -ramp[i]) * 0.8 ** i
          for i in range(3)]
    banks = tuple(VerticalSplines(zf, np.asarray(q)[None, :],
                                  breaks=(0.625, 0.9375))
                  for q in qd)
    nx, nyr = grid.nx, grid.ny // 2 + 1
    cache: dict = {}

    def spatial(nu: int = 0) -> np.ndarray:
        if nu not in cache:
            s = np.zeros((3, nx, nyr, grid.nz), dtype=complex)
            s[2, 0, 0] = banks[nu](grid.z)[:, 0]
            cache[nu] = s
        return cache[nu]

    s0, s1 = spatial(0), spatial(1)
    div_max = float(np.max(np.abs(s1[2])))
    bres = float(np.abs(s0[2, 0, 0, 0]))

    return TestField(
        family="flux-probe", kind="modal", eps=0.0, alpha=0.0,
        label=label or "top-flux", tfun=tfun or make_time_bump(),
        grid=grid, spatial=spatial, div_max=div_max,
        boundary_residual=bres,
    )


# ---------------------------------------------------------------------------
# mollified-vorticity approximations
# ---------------------------------------------------------------------------

def w_field(u_series: FieldSeries, component: int, eps: float, alpha: float,
            cutoffs=None, ngl: int = 24):
    """Kernel-pass approximation of one cutoff, weighted vorticity
    component.  Returns the pair (main part, cutoff-gradient part) as
    scalar series: the main part approximates the weighted vorticity
    itself, and subtracting the gradient part leaves the matching curl of
    the weighted velocity.

    Components 1 and 2 convolve against the odd reflected kernel with the
    half-exponent vertical weight exp(alpha y3/2); component 3 against the
    even kernel with the full exponent.  ``cutoffs=None`` localizes
    vertically only; passing a cutoff family multiplies the data by its
    sampled values and adds the horizontal-gradient terms the integrals
    then require.

    Derivatives are never taken of sampled products (the trig-interpolant
    derivative of data times a plateau cutoff converges too slowly to be
    usable): horizontal derivatives act spectrally on the velocity data,
    which the battery and the solver deliver band-limited, cutoff
    derivatives come from the family's analytic slots, and the vertical
    derivative rides the kernel.
    """
    if component not in (1, 2, 3):
        raise ConfigurationError("component must be 1, 2 or 3")
    if u_series.rank != 1:
        raise InvalidFieldError("w_field needs a velocity (vector) series")
    grid = u_series.grid
    mop = MollifierOp(grid, eps, ngl=ngl)
    coef = alpha if component == 3 else 0.5 * alpha
    zq = grid.z
    ezb = np.exp(coef * zq)[None, None, :]

    if cutoffs is None:
        pv = phi_abs(zq, 1)
        zeta0 = pv[0][None, None, :]
        zeta3 = pv[1][None, None, :]
        zeta1 = zeta2 = None
    else:
        zeta0 = cutoffs.zeta_d((0, 0, 0))
        zeta1 = cutoffs.zeta_d((1, 0, 0))
        zeta2 = cutoffs.zeta_d((0, 1, 0))
        zeta3 = cutoffs.zeta_d((0, 0, 1))

    W0 = ezb * zeta0                      # e^{cz} zeta
    W3 = ezb * (coef * zeta0 + zeta3)     # its vertical derivative
    W1 = ezb * zeta1 if zeta1 is not None else None
    W2 = ezb * zeta2 if zeta2 is not None else None

    ikx, iky = dx_multipliers(grid)
    vert_breaks = tuple(
        b for b in (0.5, 0.75)
        if abs(round(b / grid.hz) * grid.hz - b) < 1e-12)

    nt = len(u_series)
    main = np.zeros((nt, grid.nx, grid.ny, grid.nz))
    low = np.zeros((nt, grid.nx, grid.ny, grid.nz))

    def bank(weighted_phys: np.ndarray) -> VerticalSplines:
        return VerticalSplines(zq, to_modes(weighted_phys),
                               breaks=vert_breaks)

    def d_h(u_comp: np.ndarray, mult: np.ndarray) -> np.ndarray:
        return from_modes(mult * to_modes(u_comp), grid.ny)

    for it in range(nt):
        u = u_series.data[it]
        if component == 1:
            t03 = mop.odd(bank(W3 * u[1]), zq)
            lo = t03 if W2 is None else t03 - mop.odd(bank(W2 * u[2]), zq)
            hi = (t03 - mop.even(bank(W0 * u[1]), zq, domega=1)
                  + mop.odd(bank(W0 * d_h(u[2], iky)), zq))
        elif component == 2:
            t03 = mop.odd(bank(W3 * u[0]), zq)
            lo = -t03 if W1 is None else mop.odd(bank(W1 * u[2]), zq) - t03
            hi = (-t03 + mop.even(bank(W0 * u[0]), zq, domega=1)
                  - mop.odd(bank(W0 * d_h(u[2], ikx)), zq))
        else:
            if W1 is not None:
                lo = (mop.even(bank(W2 * u[0]), zq)
                      - mop.even(bank(W1 * u[1]), zq))
            else:
                lo = np.zeros((grid.nx, grid.ny // 2 + 1, grid.nz),
                              dtype=complex)
            om3 = d_h(u[1], ikx) - d_h(u[0], iky)
            hi = mop.even(bank(W0 * om3), zq)
        main[it] = from_modes(hi, grid.ny)
        low[it] = from_modes(lo, grid.ny)

    wh = FieldSeries(grid, u_series.times, main, rank=0)
    wl = FieldSeries(grid, u_series.times, low, rank=0)
    return wh, wl


# ---------------------------------------------------------------------------
# battery
# ---------------------------------------------------------------------------

def build_battery(grid: SlabGrid, rng: np.random.Generator, alpha: float,
                  eps_navier: float = 1.0 / 64.0,
                  counts=(20, 20, 10)) -> list:
    """Assemble the standard test battery: curl-type bumps at random base
    points (some straddling the wall), slip-corrected extensions of random
    base fields, and interior bumps.  Members are built independently."""
    n_curl, n_navier, n_bump = counts
    fields = []

    for i in range(n_curl):
        compi = 1 + (i % 3)
        eps = float(rng.uniform(1.0 / 320.0, 1.0 / 128.0))
        if i % 4 == 3:
            z0 = float(eps * rng.uniform(0.3, 0.8))
        else:
            z0 = float(rng.uniform(0.15, 0.55))
        x0 = float(rng.uniform(-0.5, 0.5))
        y0 = float(rng.uniform(-0.5, 0.5))
        t0 = float(rng.uniform(-0.62, -0.38))
        fields.append(curl_test_field(
            compi, (x0, y0, z0), eps, alpha,
            psi=make_time_bump(t0, 0.3), label=f"curl{compi}-{i:02d}"))

    for i in range(n_navier):
        base = random_base_field(
            grid, rng, mmax=3,
            tfun=make_time_bump(float(rng.uniform(-0.6, -0.4)), 0.32))
        fields.append(navier_test_field(base, eps_navier, alpha,
                                        label=f"navier-{i:02d}"))

    for i in range(n_bump):
        fields.append(interior_bump_field(
            grid, rng, label=f"bump-{i:02d}",
            tfun=make_time_bump(float(rng.uniform(-0.6, -0.4)), 0.32)))
    return fields


def sample_series(tf: TestField, grid: SlabGrid,
                  times: Optional[np.ndarray] = None) -> FieldSeries:
    """Sample a test field on a grid as a vector series (storage format).
    Local fields narrower than the grid spacing serialize only in the
    trivial sense; their native protocol is the point closure."""
    times = grid.t if times is None else np.asarray(times, dtype=float)
    data = np.zeros((len(times), 3, grid.nx, grid.ny, grid.nz))
    if tf.kind == "modal":
        phys = from_modes(tf.spatial(0), grid.ny)
        for it, t in enumerate(times):
            data[it] = phys * tf.tfun(t)
    else:
        X, Y, Z = grid.meshgrid()
        pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
        vals = np.zeros((len(pts), 3))
        for lo in range(0, len(pts), 200000):
            sel = slice(lo, min(lo + 200000, len(pts)))
            vals[sel] = tf.local_eval(pts[sel])["vals"]
        cube = np.moveaxis(
            vals.reshape(grid.nx, grid.ny, grid.nz, 3), -1, 0)
        for it, t in enumerate(times):
            data[it] = cube * tf.tfun(t)
    return FieldSeries(grid, times, data)
