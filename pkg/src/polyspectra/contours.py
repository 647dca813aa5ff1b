"""Marching-squares extraction of level curves from a sampled field.

Produces polylines (chains of linearly interpolated edge crossings) for a
given level of an (nx, ny) sample array.  Endpoints are keyed by grid edge,
so segments from neighboring cells share exact coordinates and chain into
polylines deterministically.
"""

from __future__ import annotations

import numpy as np

from .pseudospectrum import GridSpec

# cell corner order: BL, BR, TR, TL; case index packs "inside" bits
_SEGMENT_TABLE = {
    0: (),
    1: (("left", "bottom"),),
    2: (("bottom", "right"),),
    3: (("left", "right"),),
    4: (("right", "top"),),
    5: None,  # ambiguous, resolved by cell-center value
    6: (("bottom", "top"),),
    7: (("left", "top"),),
    8: (("top", "left"),),
    9: (("top", "bottom"),),
    10: None,  # ambiguous
    11: (("top", "right"),),
    12: (("right", "left"),),
    13: (("right", "bottom"),),
    14: (("bottom", "left"),),
    15: (),
}


def _interp(p, q, fp, fq, level):
    if fq == fp:
        t = 0.5
    else:
        t = (level - fp) / (fq - fp)
        t = min(max(t, 0.0), 1.0)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def marching_squares(grid: GridSpec, values: np.ndarray, level: float):
    """Level curves of ``values`` as a list of (k, 2) coordinate arrays."""
    xs, ys = grid.xs(), grid.ys()
    inside = values <= level
    edge_point: dict = {}
    segments: list = []

    def edge_id(kind, i, j):
        return (kind, i, j)

    def point_on(kind, i, j):
        key = (kind, i, j)
        pt = edge_point.get(key)
        if pt is None:
            if kind == "x":  # between (i, j) and (i+1, j)
                pt = _interp(
                    (xs[i], ys[j]), (xs[i + 1], ys[j]), values[i, j], values[i + 1, j], level
                )
            else:  # between (i, j) and (i, j+1)
                pt = _interp(
                    (xs[i], ys[j]), (xs[i], ys[j + 1]), values[i, j], values[i, j + 1], level
                )
            edge_point[key] = pt
        return pt

    names = {
        "bottom": lambda i, j: edge_id("x", i, j),
        "top": lambda i, j: edge_id("x", i, j + 1),
        "left": lambda i, j: edge_id("y", i, j),
        "right": lambda i, j: edge_id("y", i + 1, j),
    }

    for i in range(grid.nx - 1):
        for j in range(grid.ny - 1):
            case = (
                int(inside[i, j])
                | int(inside[i + 1, j]) << 1
                | int(inside[i + 1, j + 1]) << 2
                | int(inside[i, j + 1]) << 3
            )
            pairs = _SEGMENT_TABLE[case]
            if pairs is None:
                center = 0.25 * (
                    values[i, j] + values[i + 1, j] + values[i + 1, j + 1] + values[i, j + 1]
                )
                if case == 5:
                    pairs = (
                        (("left", "top"), ("bottom", "right"))
                        if center <= level
                        else (("left", "bottom"), ("right", "top"))
                    )
                else:  # case 10
                    pairs = (
                        (("bottom", "left"), ("top", "right"))
                        if center <= level
                        else (("bottom", "right"), ("top", "left"))
                    )
            for a, b in pairs:
                ea, eb = names[a](i, j), names[b](i, j)
                point_on(*ea)
                point_on(*eb)
                segments.append((ea, eb))

    # chain segments into polylines via shared edge endpoints
    adjacency: dict = {}
    for idx, (ea, eb) in enumerate(segments):
        adjacency.setdefault(ea, []).append((idx, eb))
        adjacency.setdefault(eb, []).append((idx, ea))

    used = [False] * len(segments)
    polylines = []

    def walk(start_edge):
        chain = [start_edge]
        current = start_edge
        while True:
            nxt = None
            for idx, other in adjacency[current]:
                if not used[idx]:
                    used[idx] = True
                    nxt = other
                    break
            if nxt is None:
                break
            chain.append(nxt)
            current = nxt
        return chain

    open_ends = sorted(e for e, nbrs in adjacency.items() if len(nbrs) == 1)
    for e in open_ends:
        if all(used[idx] for idx, _ in adjacency[e]):
            continue
        chain = walk(e)
        polylines.append(np.array([edge_point[c] for c in chain]))
    for ea, eb in segments:
        idx_any = [i for i, _ in adjacency[ea]]
        if any(not used[i] for i in idx_any):
            chain = walk(ea)
            polylines.append(np.array([edge_point[c] for c in chain]))

    return polylines
