"""Kernel families, polynomial bases, and the population moment matrices.

The moment matrices (``S``, ``c``, ``c_tilde``, ``Gamma``, ``Tmat``) are the
bias/variance constants of the local fit, computed by composite
Gauss-Legendre quadrature over the (possibly truncated) kernel window.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateRegion

KERNEL_FAMILIES = ("triangular", "epanechnikov", "uniform")

#: quadrature resolution: nodes per panel x panels per smooth segment
_GL_NODES = 20
_GL_PANELS = 8
_REGION_TOL = 1e-12
_DEGENERATE_TOL = 1e-8


def kernel_value(family: str, u) -> np.ndarray:
    """Evaluate the kernel; zero outside [-1, 1]."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) <= 1.0
    if family == "triangular":
        return np.where(inside, 1.0 - np.abs(u), 0.0)
    if family == "epanechnikov":
        return np.where(inside, 0.75 * (1.0 - u * u), 0.0)
    if family == "uniform":
        return np.where(inside, 0.5, 0.0)
    raise ValueError(f"unknown kernel family {family!r}")


class BasisKind(enum.Enum):
    """Shape of the local polynomial expansion r_p(u)."""

    STANDARD = "standard"  # [1, u, ..., u^p], dim p+1
    UNRESTRICTED = "unrestricted"  # split monomials at u=0, dim 2p+2
    RESTRICTED = "restricted"  # [1, u*1{u<0}, u*1{u>=0}, u^2..u^p], dim p+2


def basis_dim(p: int, basis: BasisKind) -> int:
    if basis is BasisKind.STANDARD:
        return p + 1
    if basis is BasisKind.UNRESTRICTED:
        return 2 * p + 2
    return p + 2


def basis_powers(p: int, basis: BasisKind) -> np.ndarray:
    """Monomial power of each basis column (drives the bandwidth rescaling)."""
    if basis is BasisKind.STANDARD:
        return np.arange(p + 1)
    if basis is BasisKind.UNRESTRICTED:
        return np.concatenate([np.arange(p + 1), np.arange(p + 1)])
    return np.array([0, 1, 1] + list(range(2, p + 1)))


def basis_matrix(u, p: int, basis: BasisKind) -> np.ndarray:
    """Rows r_p(u_i) for each input point."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    mono = u[:, None] ** np.arange(p + 1)[None, :]
    if basis is BasisKind.STANDARD:
        return mono
    neg = (u < 0)[:, None]
    if basis is BasisKind.UNRESTRICTED:
        return np.hstack([mono * neg, mono * ~neg])
    cols = [np.ones_like(u), u * neg.ravel(), u * ~neg.ravel()]
    cols += [u**j for j in range(2, p + 1)]
    return np.column_stack(cols)


def selector_index(p: int, basis: BasisKind, v: int, side: str | None = None) -> int:
    """Column index extracting the order-v coefficient (per side at a cutoff)."""
    if basis is BasisKind.STANDARD:
        return v
    if basis is BasisKind.UNRESTRICTED:
        if side not in ("left", "right"):
            raise ValueError("unrestricted basis requires side='left' or 'right'")
        return v if side == "left" else p + 1 + v
    # restricted: only the linear term splits
    if v == 0:
        return 0
    if v == 1:
        if side not in ("left", "right"):
            raise ValueError("restricted basis requires a side for v=1")
        return 1 if side == "left" else 2
    return v + 1


@dataclass(frozen=True)
class EvalRegion:
    """Scaled integration window [a, b] = [max(-1,(lo-x)/h), min(1,(hi-x)/h)]."""

    a: float
    b: float
    kind: str  # "interior" | "lower_boundary" | "upper_boundary"
    c: float  # boundary offset, 0 <= c < 1; unused for interior

    @property
    def is_interior(self) -> bool:
        return self.kind == "interior"


def classify_region(x: float, h: float, support_lower: float, support_upper: float) -> EvalRegion:
    """Classify the evaluation point relative to the support at bandwidth h."""
    a = max(-1.0, (support_lower - x) / h)
    b = min(1.0, (support_upper - x) / h)
    lower_trunc = a > -1.0 + _REGION_TOL
    upper_trunc = b < 1.0 - _REGION_TOL
    if b - a < _DEGENERATE_TOL:
        raise DegenerateRegion(f"kernel window [{a}, {b}] is degenerate")
    if lower_trunc and upper_trunc:
        raise DegenerateRegion(
            "window truncated at both support endpoints; reduce the bandwidth"
        )
    if lower_trunc:
        return EvalRegion(a=a, b=1.0, kind="lower_boundary", c=-a)
    if upper_trunc:
        return EvalRegion(a=-1.0, b=b, kind="upper_boundary", c=b)
    return EvalRegion(a=-1.0, b=1.0, kind="interior", c=0.0)


@dataclass(frozen=True)
class KernelMoments:
    """Moment matrices of the kernel over one integration region."""

    S: np.ndarray
    c: np.ndarray
    c_tilde: np.ndarray
    Gamma: np.ndarray
    Tmat: np.ndarray
    d: int


def _composite_gl(a: float, b: float, panels: int = _GL_PANELS):
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    xs = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    return xs, ws


def _segments(a: float, b: float):
    # split at 0: kernel kink (triangular) and basis indicator both live there
    if a < 0.0 < b:
        return [(a, 0.0), (0.0, b)]
    return [(a, b)]


@lru_cache(maxsize=512)
def _moments_cached(family: str, a: float, b: float, p: int, basis: BasisKind, panels: int):
    d = basis_dim(p, basis)
    S = np.zeros((d, d))
    c = np.zeros(d)
    c_tilde = np.zeros(d)
    Tmat = np.zeros((d, d))
    Gamma = np.zeros((d, d))
    segs = _segments(a, b)

    # per-segment 1-D moments; m0 = int r K, m1 = int u r K reused for Gamma
    seg_m0, seg_m1 = [], []
    for sa, sb in segs:
        # GL nodes are interior to each panel, so the u=0 indicator and the
        # triangular-kernel kink are never sampled at the split point itself
        xs, ws = _composite_gl(sa, sb, panels)
        R = basis_matrix(xs, p, basis)
        K = kernel_value(family, xs)
        wk = ws * K
        S += (R * wk[:, None]).T @ R
        c += R.T @ (wk * xs ** (p + 1))
        c_tilde += R.T @ (wk * xs ** (p + 2))
        Tmat += (R * (wk * K)[:, None]).T @ R
        seg_m0.append(R.T @ wk)
        seg_m1.append(R.T @ (wk * xs))

    # Gamma: diagonal blocks via two triangles (min(u,v) kink on u=v),
    # off-diagonal segment pairs are separable since min is then one-sided
    for si, (sa, sb) in enumerate(segs):
        xs, ws = _composite_gl(sa, sb, panels)
        Ro = basis_matrix(xs, p, basis)
        Ko = kernel_value(family, xs)
        L = np.zeros((d, d))
        for ui, wu, ro, ko in zip(xs, ws, Ro, Ko):
            vi, wv = _composite_gl(sa, ui, panels)
            Ri = basis_matrix(vi, p, basis)
            Ki = kernel_value(family, vi)
            inner = Ri.T @ (wv * vi * Ki)  # int_{sa}^{u} v r(v) K(v) dv
            L += (wu * ko) * np.outer(ro, inner)
        Gamma += L + L.T
        for sj in range(si + 1, len(segs)):
            cross = np.outer(seg_m1[si], seg_m0[sj])
            Gamma += cross + cross.T

    return KernelMoments(S=S, c=c, c_tilde=c_tilde, Gamma=Gamma, Tmat=Tmat, d=d)


def moments(
    family: str,
    region: EvalRegion,
    p: int,
    basis: BasisKind = BasisKind.STANDARD,
    panels: int = _GL_PANELS,
) -> KernelMoments:
    """Moment matrices for a kernel family over ``region`` at order ``p``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    if family not in KERNEL_FAMILIES:
        raise ValueError(f"unknown kernel family {family!r}")
    if region.b - region.a < _DEGENERATE_TOL:
        raise DegenerateRegion(f"region [{region.a}, {region.b}] is degenerate")
    return _moments_cached(family, region.a, region.b, p, basis, panels)


def factorial(v: int) -> float:
    return float(math.factorial(v))
