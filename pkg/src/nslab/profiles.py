"""Closed-form smooth profiles used throughout the laboratory.

Three ingredients recur in every operator of the package:

* the plateau cutoff ``phi`` (equal to 1 on [0, 1/2], vanishing beyond 3/4),
  from which the spatial cutoff ``zeta`` and the time cutoffs are assembled,
* the radial mollifier profile ``eta`` supported on the unit ball with unit
  mass, written as a function of s = |x|^2 so that Cartesian derivatives of
  any order are polynomial combinations of the s-derivatives (no 1/r terms),
* reductions of ``eta``: its integral over horizontal planes (``m_profile``)
  and its horizontal Fourier transform F(kappa, omega), tabulated once and
  evaluated through a high-order spline.

All functions are vectorised over numpy arrays.
"""

from __future__ import annotations

import functools

import numpy as np
from scipy import integrate, interpolate, special

__all__ = [
    "phi_profile",
    "phi_abs",
    "theta_time",
    "bump01",
    "eta_ball_constant",
    "eta_radial",
    "m_profile",
    "horizontal_transform",
    "gauss_legendre",
]


# ---------------------------------------------------------------------------
# plateau cutoff phi
# ---------------------------------------------------------------------------

def phi_profile(s, nder: int = 0):
    """Plateau cutoff: 1 on [0, 1/2], exp(1 - 1/(1 - tau^2)) with
    tau = (s - 1/2)/(1/4) on (1/2, 3/4), 0 beyond.

    Returns a list [phi, phi', ..., phi^(nder)] of arrays.  On the closed
    plateau (including s = 1/2 itself) all derivatives are reported as 0,
    the almost-everywhere value.
    """
    s = np.asarray(s, dtype=float)
    out = [np.zeros_like(s) for _ in range(nder + 1)]
    out[0][s <= 0.5] = 1.0

    mid = (s > 0.5) & (s < 0.75)
    if np.any(mid):
        tau = (s[mid] - 0.5) * 4.0
        g = 1.0 - tau * tau
        u = 1.0 - 1.0 / g
        e = np.exp(u)
        out[0][mid] = e
        if nder >= 1:
            u1 = -2.0 * tau / g**2
            out[1][mid] = 4.0 * u1 * e
        if nder >= 2:
            u2 = -2.0 / g**2 - 8.0 * tau**2 / g**3
            out[2][mid] = 16.0 * (u2 + u1 * u1) * e
        if nder >= 3:
            u3 = -24.0 * tau / g**3 - 48.0 * tau**3 / g**4
            out[3][mid] = 64.0 * (u3 + 3.0 * u1 * u2 + u1**3) * e
    return out


def phi_abs(w, nder: int = 0):
    """phi(|w|) and its w-derivatives (smooth: phi is flat near 0)."""
    w = np.asarray(w, dtype=float)
    sgn = np.sign(w)
    vals = phi_profile(np.abs(w), nder)
    out = [vals[0]]
    for k in range(1, nder + 1):
        out.append(vals[k] * (sgn**k if k % 2 == 1 else 1.0))
    return out


def theta_time(t, nder: int = 0):
    """Time cutoff theta(t) = phi(1/4 - t): 1 on [-1/4, 0], 0 for t <= -1/2."""
    t = np.asarray(t, dtype=float)
    vals = phi_profile(0.25 - t, nder)
    return [vals[k] * (-1.0) ** k for k in range(nder + 1)]


def bump01(v, nder: int = 0):
    """b(v) = exp(1 - 1/(1 - v)) on [0, 1), 0 for v >= 1; b(0) = 1.

    Used for time bumps psi(t) = b(((t - t0)/w)^2) in test-field families.
    Returns [b, b', ..., b^(nder)] with derivatives in v.
    """
    v = np.asarray(v, dtype=float)
    out = [np.zeros_like(v) for _ in range(nder + 1)]
    inside = v < 1.0
    if np.any(inside):
        g = 1.0 - v[inside]
        u = 1.0 - 1.0 / g
        e = np.exp(u)
        out[0][inside] = e
        if nder >= 1:
            u1 = -1.0 / g**2
            out[1][inside] = u1 * e
        if nder >= 2:
            u2 = -2.0 / g**3
            out[2][inside] = (u2 + u1 * u1) * e
        if nder >= 3:
            u3 = -6.0 / g**4
            out[3][inside] = (u3 + 3.0 * u1 * u2 + u1**3) * e
    return out


# ---------------------------------------------------------------------------
# mollifier radial profile eta
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=1)
def eta_ball_constant() -> float:
    """Normalisation c with integral of c*exp(-1/(1-|x|^2)) over B(1) equal 1."""
    val, _ = integrate.quad(
        lambda r: 4.0 * np.pi * r * r * np.exp(-1.0 / (1.0 - r * r)),
        0.0, 1.0, epsabs=1e-14, epsrel=1e-13,
    )
    return 1.0 / val


def eta_radial(s, nder: int = 0):
    """G(s) = c * exp(-1/(1-s)) for s = |x|^2 in [0, 1), 0 beyond.

    eta(x) = G(|x|^2); Cartesian derivatives follow from
    d/dx_a = 2 x_a d/ds, e.g. grad eta = 2 x G'(s).
    Returns [G, G', ..., G^(nder)] (derivatives with respect to s).
    """
    s = np.asarray(s, dtype=float)
    c = eta_ball_constant()
    out = [np.zeros_like(s) for _ in range(nder + 1)]
    inside = s < 1.0
    if np.any(inside):
        g = 1.0 - s[inside]
        e = c * np.exp(-1.0 / g)
        out[0][inside] = e
        if nder >= 1:
            u1 = -1.0 / g**2
            out[1][inside] = u1 * e
        if nder >= 2:
            u2 = -2.0 / g**3
            out[2][inside] = (u2 + u1 * u1) * e
        if nder >= 3:
            u3 = -6.0 / g**4
            out[3][inside] = (u3 + 3.0 * u1 * u2 + u1**3) * e
    return out


def m_profile(w, nder: int = 0):
    """Integral of eta over a horizontal plane at height w (closed form).

    m(w) = c*pi*M(1-w^2) with M(a) = int_0^a exp(-1/sigma) dsigma
         = a exp(-1/a) - E1(1/a).
    Unit mass: int m(w) dw = 1.  Returns [m, m', ..., m^(nder)].
    """
    w = np.asarray(w, dtype=float)
    c = eta_ball_constant()
    out = [np.zeros_like(w) for _ in range(nder + 1)]
    inside = np.abs(w) < 1.0
    if np.any(inside):
        a = 1.0 - w[inside] ** 2
        ea = np.exp(-1.0 / a)
        out[0][inside] = c * np.pi * (a * ea - special.exp1(1.0 / a))
        if nder >= 1:
            out[1][inside] = c * np.pi * ea * (-2.0 * w[inside])
        if nder >= 2:
            # d/dw [exp(-1/a(w)) * (-2w)],  a = 1 - w^2, a' = -2w
            out[2][inside] = c * np.pi * ea * (4.0 * w[inside] ** 2 / a**2 - 2.0)
    return out


# ---------------------------------------------------------------------------
# horizontal Fourier transform of eta
# ---------------------------------------------------------------------------

_KAPPA_MAX = 80.0
_N_KAPPA = 641
_N_OMEGA = 161


@functools.lru_cache(maxsize=1)
def _transform_spline():
    """Spline of F(kappa, omega) = int eta((z', omega)) e^{-i k.z'} dz'
    (radial: real Hankel transform), on [0, KAPPA_MAX] x [0, 1].
    """
    kappa = np.linspace(0.0, _KAPPA_MAX, _N_KAPPA)
    omega = np.linspace(0.0, 1.0, _N_OMEGA)
    xg, wg = np.polynomial.legendre.leggauss(96)
    table = np.zeros((_N_KAPPA, _N_OMEGA))
    for j, om in enumerate(omega[:-1]):  # F(., 1) = 0
        rmax = np.sqrt(max(1.0 - om * om, 0.0))
        sig = 0.5 * rmax * (xg + 1.0)
        wq = 0.5 * rmax * wg
        g = eta_radial(sig**2 + om * om)[0] * sig * wq
        table[:, j] = 2.0 * np.pi * (special.j0(np.outer(kappa, sig)) @ g)
    return interpolate.RectBivariateSpline(kappa, omega, table, kx=5, ky=5)


def horizontal_transform(kappa, omega, domega: int = 0):
    """F(kappa, |omega|) and its omega-derivatives, clamped to 0 outside
    |omega| < 1 and for kappa > KAPPA_MAX (transform decays superalgebraically).

    The omega-derivative is the exact derivative of the tabulated spline, so
    identities relating a kernel and its vertical derivative hold at the
    discrete level.
    """
    kappa = np.asarray(kappa, dtype=float)
    omega = np.asarray(omega, dtype=float)
    kappa, omega = np.broadcast_arrays(kappa, omega)
    out = np.zeros(kappa.shape)
    ok = (np.abs(omega) < 1.0) & (kappa <= _KAPPA_MAX)
    if np.any(ok):
        sp = _transform_spline()
        sgn = np.sign(omega[ok]) ** domega if domega % 2 == 1 else 1.0
        out[ok] = sp.ev(kappa[ok], np.abs(omega[ok]), dy=domega) * sgn
    return out


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(n: int, a: float, b: float):
    """Gauss-Legendre nodes/weights on [a, b] (cached reference rule)."""
    x, w = _leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w
