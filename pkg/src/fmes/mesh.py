"""Uniform right-triangle meshes of the unit square."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class Mesh:
    """Structured triangulation of [0,1] x [0,1] with ``n_side`` nodes per side.

    Nodes are numbered row by row, x varying fastest, so node (ix, iy) has
    index ``iy * n_side + ix``.  Each grid cell is split by its lower-left to
    upper-right diagonal; both triangles are stored counterclockwise and have
    signed area h**2 / 2.

    Attributes
    ----------
    n_side : nodes per side (mesh width h = 1 / (n_side - 1))
    nodes : (n_nodes, 2) array of coordinates
    triangles : (n_triangles, 3) int array of node indices
    boundary_edges : list of ((i, j), side) with side one of SIDES
    """

    n_side: int
    h: float
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: list[tuple[tuple[int, int], str]]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]


def build_mesh(n_side: int) -> Mesh:
    """Triangulate the unit square uniformly.

    Produces n_side**2 nodes, 2 (n_side - 1)**2 triangles and
    4 (n_side - 1) labeled boundary edges.

    Raises
    ------
    ValueError
        If n_side < 2.
    """
    if n_side < 2:
        raise ValueError(f"n_side must be >= 2, got {n_side}")

    n_cells = n_side - 1
    h = 1.0 / n_cells

    xs = np.linspace(0.0, 1.0, n_side)
    gx, gy = np.meshgrid(xs, xs, indexing="xy")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    def idx(ix: int, iy: int) -> int:
        return iy * n_side + ix

    triangles = np.empty((2 * n_cells * n_cells, 3), dtype=np.int64)
    t = 0
    for iy in range(n_cells):
        for ix in range(n_cells):
            ll = idx(ix, iy)
            lr = idx(ix + 1, iy)
            ul = idx(ix, iy + 1)
            ur = idx(ix + 1, iy + 1)
            triangles[t] = (ll, lr, ur)
            triangles[t + 1] = (ll, ur, ul)
            t += 2

    boundary_edges: list[tuple[tuple[int, int], str]] = []
    last = n_side - 1
    for i in range(n_cells):
        boundary_edges.append(((idx(i, 0), idx(i + 1, 0)), "bottom"))
        boundary_edges.append(((idx(i, last), idx(i + 1, last)), "top"))
        boundary_edges.append(((idx(0, i), idx(0, i + 1)), "left"))
        boundary_edges.append(((idx(last, i), idx(last, i + 1)), "right"))

    nodes.setflags(write=False)
    triangles.setflags(write=False)
    return Mesh(n_side=n_side, h=h, nodes=nodes, triangles=triangles,
                boundary_edges=boundary_edges)


def triangle_areas(mesh: Mesh) -> np.ndarray:
    """Signed areas of all triangles (positive for counterclockwise)."""
    p = mesh.nodes[mesh.triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
