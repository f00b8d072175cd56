"""Breakpoint-exact quadrature for products of the interaction weight with arcs.

The double integrals over [0,2pi]^2 appearing in the interaction functional
and its flux all have the shape

    iint_{S x T} w_alpha(s - t) * g(s, t) ds dt

over rectangles S x T (products of indicator arcs), with w_alpha the odd
pi-periodic power weight and g a product of sines/cosines.  Substituting
u = s - t, v = s + t turns each of them into a single u-integral with an
explicit inner antiderivative; the integrand is then analytic between
breakpoints (quarter-pi kinks of the weight, plus the two corners of the
overlap window), and the |u - k pi|^alpha endpoint behavior is resolved by
grading the quadrature pieces geometrically toward the singular endpoint.
Everything is vectorized over arrays of rectangles.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

QUARTER = np.pi / 4.0


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=64)
def gauss_jacobi01(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights with int_0^1 y^alpha g(y) dy = sum w_i g(y_i)."""
    x, w = roots_jacobi(n, 0.0, alpha)
    y = 0.5 * (x + 1.0)
    return y, w * 2.0 ** (-1.0 - alpha)


#: geometric grading pieces per segment and Gauss nodes per piece
_PIECES = 8
_NODES = 16
#: slivers closer to a singular point than this are dropped (error ~ SNAP^{1+alpha})
_SNAP = 1e-8


def _segment_nodes(lo: np.ndarray, hi: np.ndarray, weight, n: int = _NODES):
    """Quadrature nodes U and effective weights W (phi factor included) for
    int_lo^hi w_alpha(u) G(u) du, vectorized over segment arrays.

    Segments must not cross quarter-pi grid lines; the caller guarantees this
    by splitting at them.  Inside the quarter cells adjacent to a multiple of
    pi the weight behaves like dist^alpha, so the piece boundaries are graded
    geometrically toward that endpoint; elsewhere they are uniform.  Output
    arrays have shape lo.shape + (_PIECES, n).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    width = np.maximum(hi - lo, 0.0)
    live = width > 0
    cell = np.floor(mid / QUARTER + 1e-15).astype(int)
    cat = np.mod(cell, 4)  # 0: just right of a pi-multiple, 3: just left of one

    base_lo = np.pi * np.floor(mid / np.pi + 1e-15)   # singular point for cat 0
    base_hi = np.pi * np.ceil(mid / np.pi - 1e-15)    # singular point for cat 3

    frac = np.arange(_PIECES + 1) / _PIECES
    # uniform boundaries (categories 1, 2)
    bnd = lo[..., None] + width[..., None] * frac
    # geometric toward the left base (category 0)
    d1 = np.maximum(hi - base_lo, _SNAP)
    d0 = np.minimum(np.maximum(lo - base_lo, _SNAP), d1)
    geo_l = base_lo[..., None] + d0[..., None] * (d1 / d0)[..., None] ** frac
    # geometric toward the right base (category 3)
    e1 = np.maximum(base_hi - lo, _SNAP)
    e0 = np.minimum(np.maximum(base_hi - hi, _SNAP), e1)
    geo_r = base_hi[..., None] - e0[..., None] * (e1 / e0)[..., None] ** frac[::-1]
    is0 = (cat == 0)[..., None]
    is3 = (cat == 3)[..., None]
    bnd = np.where(is0, geo_l, np.where(is3, geo_r, bnd))

    a = bnd[..., :-1]
    b = bnd[..., 1:]
    half = 0.5 * np.maximum(b - a, 0.0)
    center = 0.5 * (a + b)
    glx, glw = gauss_legendre(n)
    U = center[..., None] + half[..., None] * glx
    W = half[..., None] * glw * weight.value(U)
    W = np.where(live[..., None, None], W, 0.0)
    return U, W


def _split_segments(ulo: np.ndarray, uhi: np.ndarray, extra: list[np.ndarray]):
    """Sorted per-row segment endpoints: quarter-pi grid plus extra breakpoints."""
    ulo = np.asarray(ulo, dtype=float)
    uhi = np.asarray(uhi, dtype=float)
    span = float(np.max(uhi - ulo, initial=0.0))
    nquarters = int(np.ceil(span / QUARTER)) + 1
    k0 = np.ceil(ulo / QUARTER - 1e-13)
    grid = (k0[..., None] + np.arange(nquarters)) * QUARTER
    cands = [np.clip(grid, ulo[..., None], uhi[..., None])]
    for e in extra:
        cands.append(np.clip(np.asarray(e, dtype=float)[..., None], ulo[..., None], uhi[..., None]))
    cands.append(ulo[..., None])
    cands.append(uhi[..., None])
    pts = np.sort(np.concatenate(cands, axis=-1), axis=-1)
    return pts[..., :-1], pts[..., 1:]


def phi_weighted_integral(g, lo, hi, weight, n: int = 24, extra_breaks: list | None = None):
    """int_lo^hi w_alpha(u) g(u) du, vectorized over lo/hi arrays.

    g must accept arrays; extra breakpoints (per-row arrays) may be supplied
    for kinks of g.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    seg_lo, seg_hi = _split_segments(lo, hi, extra_breaks or [])
    U, W = _segment_nodes(seg_lo, seg_hi, weight, n)
    return np.sum(W * g(U), axis=(-1, -2, -3))


_KINDS = ("sin_diff", "sin_cos", "sin_sin")


_CHUNK = 128


def _arc_rectangle_chunk(kind: str, slo, shi, tlo, thi, weight, n: int):
    ulo = slo - thi
    uhi = shi - tlo
    seg_lo, seg_hi = _split_segments(ulo, uhi, [slo - tlo, shi - thi])
    U, W = _segment_nodes(seg_lo, seg_hi, weight, n)

    ex = lambda a: a[..., None, None, None]  # noqa: E731
    vlo = 2.0 * np.maximum(ex(slo), ex(tlo) + U) - U
    vhi = 2.0 * np.minimum(ex(shi), ex(thi) + U) - U
    wid = np.maximum(vhi - vlo, 0.0)
    pos = wid > 0
    if kind == "sin_diff":
        iv = np.sin(U) * wid
    elif kind == "sin_cos":
        iv = 0.5 * ((np.cos(vlo) - np.cos(vhi)) * pos + np.sin(U) * wid)
    else:
        iv = 0.5 * (np.cos(U) * wid - (np.sin(vhi) - np.sin(vlo)) * pos)
    return np.sum(W * (0.5 * iv), axis=(-1, -2, -3))


def arc_rectangle_integral(kind: str, slo, shi, tlo, thi, weight, n: int = _NODES):
    """iint over [slo,shi] x [tlo,thi] of w_alpha(s-t) * g, vectorized.

    kind selects g: ``sin_diff`` -> sin(s-t), ``sin_cos`` -> sin(s)cos(t),
    ``sin_sin`` -> sin(s)sin(t).  Large batches are processed in chunks to
    keep the node arrays cache-resident.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    slo, shi, tlo, thi = np.broadcast_arrays(
        *[np.asarray(a, dtype=float) for a in (slo, shi, tlo, thi)]
    )
    if slo.ndim != 1 or slo.size <= _CHUNK:
        return _arc_rectangle_chunk(kind, slo, shi, tlo, thi, weight, n)
    out = np.empty(slo.shape)
    for i in range(0, slo.size, _CHUNK):
        sl = slice(i, i + _CHUNK)
        out[sl] = _arc_rectangle_chunk(kind, slo[sl], shi[sl], tlo[sl], thi[sl], weight, n)
    return out


def interaction_pair_value(theta0, theta1, weight, n: int = 24):
    """The interaction functional of the value pair (theta0, theta1).

    Expands the product of indicator differences into four signed rectangles
    of arcs (theta - pi/2, theta + pi/2) against the kernel w_alpha(s-t)sin(s-t).
    """
    theta0, theta1 = np.broadcast_arrays(
        np.asarray(theta0, dtype=float), np.asarray(theta1, dtype=float)
    )
    arcs = (theta1, theta0)
    signs = (1.0, -1.0)
    total = np.zeros(theta0.shape)
    for ta, wa in zip(arcs, signs):
        for tb, wb in zip(arcs, signs):
            total = total + wa * wb * arc_rectangle_integral(
                "sin_diff", ta - np.pi / 2, ta + np.pi / 2, tb - np.pi / 2, tb + np.pi / 2,
                weight, n=n,
            )
    return total


def interaction_pair_flux(theta0, theta1, weight, n: int = 24):
    """The two flux components of the interaction identity at a value pair.

    With chi the arc indicator of theta0 and chi^h that of theta1,

        A_1 = 2 iint w(s-t) sin(s)cos(t) chi^h(s) (chi^h - chi)(t),
        A_2 = 2 iint w(s-t) sin(s)sin(t) chi(s) chi^h(t).
    """
    theta0, theta1 = np.broadcast_arrays(
        np.asarray(theta0, dtype=float), np.asarray(theta1, dtype=float)
    )
    h = np.pi / 2
    a1 = 2.0 * (
        arc_rectangle_integral("sin_cos", theta1 - h, theta1 + h, theta1 - h, theta1 + h, weight, n=n)
        - arc_rectangle_integral("sin_cos", theta1 - h, theta1 + h, theta0 - h, theta0 + h, weight, n=n)
    )
    a2 = 2.0 * arc_rectangle_integral(
        "sin_sin", theta0 - h, theta0 + h, theta1 - h, theta1 + h, weight, n=n
    )
    return a1, a2
