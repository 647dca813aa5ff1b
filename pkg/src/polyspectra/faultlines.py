"""Fault points: where the two lowest distinct singular-value surfaces meet.

Surfaces that coincide identically (repeated structure in the polynomial)
are first collapsed through a probe-based index map; the fault set is then
the zero set of the gap between the two lowest surviving surfaces.  The gap
is nonnegative and typically conic at its zeros, so refinement uses a
derivative-free simplex search.  Fault detection never involves the weight
polynomial: the operation signatures admit no weight input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import PreconditionError
from .matpoly import MatrixPolynomial
from .pseudospectrum import GridSpec
from .svdcore import singular_values_many

# Probe agreement threshold for "identical surfaces".  Agreement at every
# generic probe is strong (not certified) evidence of global identity,
# since distinct surfaces can only coincide on sets without interior.
IDENTITY_RTOL = 1e-10

REFINED_GAP_RTOL = 1e-8


@dataclass(frozen=True)
class SurfaceIndexMap:
    """Canonical indices of the distinct singular-value surfaces.

    ``representative[j-1]`` is the 1-based canonical index for surface j;
    surfaces sharing a representative agreed at every probe.  ``c1`` is the
    largest canonical index (the lowest distinct surface) and ``c2`` the
    second largest; ``c2`` is None when fewer than two distinct surfaces
    exist.
    """

    representative: tuple
    c1: int
    c2: int | None

    @property
    def distinct_count(self) -> int:
        return len(set(self.representative))


@dataclass(frozen=True)
class FaultReport:
    """Grid cells flagged by the scan and their refined fault points."""

    cells: tuple
    refined_points: np.ndarray
    refined_gaps: np.ndarray
    empty: bool


def default_probes(window: GridSpec, count: int = 24, seed: int = 20240) -> np.ndarray:
    """Generic probe points drawn uniformly from the window (deterministic)."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(window.x_min, window.x_max, count)
    y = rng.uniform(window.y_min, window.y_max, count)
    return x + 1j * y


def build_surface_map(P: MatrixPolynomial, probes) -> SurfaceIndexMap:
    """Group surface indices whose singular values agree at every probe.

    Identical surfaces occupy contiguous positions in the descending order,
    so only adjacent pairs need comparing.  Each group is represented by its
    largest index.
    """
    probes = np.asarray(probes, dtype=complex)
    if probes.size < 2:
        raise PreconditionError("need at least 2 probe points (20+ recommended)")
    svals = singular_values_many(P, probes)  # (npr, n)
    n = P.n
    scale = 1.0 + svals[:, 0]
    same_as_next = [
        bool(np.all(np.abs(svals[:, j] - svals[:, j + 1]) <= IDENTITY_RTOL * scale))
        for j in range(n - 1)
    ]
    rep = [0] * n
    j = n - 1
    while j >= 0:
        k = j
        while k > 0 and same_as_next[k - 1]:
            k -= 1
        for i in range(k, j + 1):
            rep[i] = j + 1  # 1-based representative = largest index in group
        j = k - 1
    canonical = sorted(set(rep), reverse=True)
    c1 = canonical[0]
    c2 = canonical[1] if len(canonical) > 1 else None
    return SurfaceIndexMap(representative=tuple(rep), c1=c1, c2=c2)


def collapsed_gap(P: MatrixPolynomial, lam: complex, smap: SurfaceIndexMap) -> float:
    """s_{c2}(lambda) - s_{c1}(lambda) >= 0, the collapsed surface gap."""
    if smap.c2 is None:
        raise PreconditionError("fewer than two distinct surfaces; gap undefined")
    s = singular_values_many(P, np.array([lam]))[0]
    return float(s[smap.c2 - 1] - s[smap.c1 - 1])


def is_fault_point(
    P: MatrixPolynomial,
    lam: complex,
    smap: SurfaceIndexMap,
    tol: float | None = None,
) -> bool:
    """True iff the collapsed gap at lambda is below tolerance.

    With fewer than two distinct surfaces the fault set is vacuously empty
    and every point answers False.
    """
    if smap.c2 is None:
        return False
    s = singular_values_many(P, np.array([lam]))[0]
    if tol is None:
        tol = REFINED_GAP_RTOL * (1.0 + float(s[0]))
    return float(s[smap.c2 - 1] - s[smap.c1 - 1]) <= tol


def fault_scan(
    P: MatrixPolynomial,
    grid: GridSpec,
    smap: SurfaceIndexMap,
    refine_maxiter: int = 200,
) -> FaultReport:
    """Locate fault points inside the window.

    The collapsed gap is sampled on the grid; 8-neighbor local minima whose
    value is below 10 * cell diagonal * local slope estimate are candidate
    cells (the margin keeps curve crossings between nodes from being
    missed).  Each candidate is refined by Nelder-Mead simplex minimization
    of the gap, and refined points are kept only where the gap is
    numerically zero.  An empty report is a valid outcome; with fewer than
    two distinct surfaces (scalar problems, fully repeated structure) the
    fault set is vacuously empty.
    """
    if smap.c2 is None:
        return FaultReport(
            cells=(),
            refined_points=np.zeros(0, dtype=complex),
            refined_gaps=np.zeros(0, dtype=float),
            empty=True,
        )
    pts = grid.points()
    svals = singular_values_many(P, pts)
    g = svals[..., smap.c2 - 1] - svals[..., smap.c1 - 1]
    s1 = svals[..., 0]

    gx, gy = np.gradient(g, grid.xs(), grid.ys())
    slope = np.maximum(np.hypot(gx, gy), np.finfo(float).tiny)
    tau_cell = 10.0 * grid.cell_diagonal * _max_filter3(slope)

    is_min = np.ones_like(g, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = np.full_like(g, np.inf)
            src_i = slice(max(0, -di), g.shape[0] - max(0, di))
            dst_i = slice(max(0, di), g.shape[0] - max(0, -di))
            src_j = slice(max(0, -dj), g.shape[1] - max(0, dj))
            dst_j = slice(max(0, dj), g.shape[1] - max(0, -dj))
            shifted[dst_i, dst_j] = g[src_i, src_j]
            is_min &= g <= shifted
    is_min[[0, -1], :] = False
    is_min[:, [0, -1]] = False
    candidates = np.argwhere(is_min & (g <= tau_cell))

    def gap_at(p) -> float:
        s = singular_values_many(P, np.array([complex(p[0], p[1])]))[0]
        return float(s[smap.c2 - 1] - s[smap.c1 - 1])

    xs, ys = grid.xs(), grid.ys()
    bounds = [(grid.x_min, grid.x_max), (grid.y_min, grid.y_max)]
    refined = []
    for i, j in sorted(map(tuple, candidates)):
        res = optimize.minimize(
            gap_at,
            x0=[xs[i], ys[j]],
            method="Nelder-Mead",
            bounds=bounds,
            options=dict(maxiter=refine_maxiter, xatol=1e-12, fatol=1e-15),
        )
        lam = complex(res.x[0], res.x[1])
        gval = float(res.fun)
        if gval <= REFINED_GAP_RTOL * (1.0 + float(s1[i, j])):
            refined.append((lam, gval))

    # near-duplicate refinements from neighboring cells collapse to one point
    dedupe_radius = 0.5 * grid.cell_diagonal
    kept: list = []
    for lam, gval in sorted(refined, key=lambda t: (t[0].real, t[0].imag)):
        if all(abs(lam - other) > dedupe_radius for other, _ in kept):
            kept.append((lam, gval))

    points = np.array([lam for lam, _ in kept], dtype=complex)
    gaps = np.array([gv for _, gv in kept], dtype=float)
    return FaultReport(
        cells=tuple((int(i), int(j)) for i, j in sorted(map(tuple, candidates))),
        refined_points=points,
        refined_gaps=gaps,
        empty=len(points) == 0,
    )


def _max_filter3(a: np.ndarray) -> np.ndarray:
    """3x3 maximum filter with edge replication."""
    out = a.copy()
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = np.full_like(a, -np.inf)
            src_i = slice(max(0, -di), a.shape[0] - max(0, di))
            dst_i = slice(max(0, di), a.shape[0] - max(0, -di))
            src_j = slice(max(0, -dj), a.shape[1] - max(0, dj))
            dst_j = slice(max(0, dj), a.shape[1] - max(0, -dj))
            shifted[dst_i, dst_j] = a[src_i, src_j]
            out = np.maximum(out, shifted)
    return out
