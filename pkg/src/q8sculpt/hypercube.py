"""Cell combinatorics of the hypercube [-1,1]^4.

The eight cubical cells are labelled by group elements: the cell pinned at
coordinate ``axis`` = ``sign`` gets the label with that axis and sign, so the
cell {w = +1} is labelled 1, {x = +1} is labelled i, and so on.  Which cell
is called 1 is an arbitrary base choice; fixing it to {w = +1} makes the
label of every other cell the element whose right multiplication reaches it.
Right multiplication permutes the cells; the cell centers are the vertices
of the 16-cell; and the signed permutations of the four coordinates are
exactly the isometries of R^4 preserving the cell decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .quat import Isometry4, Q8Element, Q8_ELEMENTS, q8_mul, q8_right_matrix_int

# A cell label is just a group element.
CellLabel = Q8Element

ZERO_VECTOR_TOL = 1e-12


def cell_of_point(v: np.ndarray) -> CellLabel:
    """Label of the cell whose pinned coordinate dominates v in absolute value.

    Ties break to the lowest coordinate index (w before x before y before z);
    radially projected cube corners sit exactly on such ties.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {v.shape}")
    if float(np.linalg.norm(v)) <= ZERO_VECTOR_TOL:
        raise ValueError("cell_of_point is undefined at the zero vector")
    axis = int(np.argmax(np.abs(v)))  # argmax returns the first maximum
    return Q8Element(1 if v[axis] > 0 else -1, axis)


def cells_of_points(points: np.ndarray) -> list[CellLabel]:
    """Vectorized cell_of_point over an (n, 4) array."""
    points = np.asarray(points, dtype=np.float64)
    norms = np.linalg.norm(points, axis=1)
    if np.any(norms <= ZERO_VECTOR_TOL):
        raise ValueError("cell_of_point is undefined at the zero vector")
    axes = np.argmax(np.abs(points), axis=1)
    signs = np.where(points[np.arange(len(points)), axes] > 0, 1, -1)
    return [Q8Element(int(s), int(a)) for s, a in zip(signs, axes)]


def cell_action(g: Q8Element) -> dict[CellLabel, CellLabel]:
    """The permutation of cell labels induced by right multiplication by g."""
    return {a: q8_mul(a, g) for a in Q8_ELEMENTS}


@dataclass(frozen=True)
class SixteenCell:
    """Vertices and edges of the dual polytope of the hypercube."""

    vertices: np.ndarray  # (8, 4) signed standard basis vectors
    edges: tuple[tuple[int, int], ...]  # 24 non-antipodal vertex pairs


def sixteen_cell() -> SixteenCell:
    """The 16-cell: vertices are the cell centers, in the group label order."""
    vertices = np.array([g.to_vec4() for g in Q8_ELEMENTS], dtype=np.int64)
    edges = []
    for a in range(8):
        for b in range(a + 1, 8):
            if not np.array_equal(vertices[a], -vertices[b]):
                edges.append((a, b))
    out = SixteenCell(vertices, tuple(edges))
    out.vertices.setflags(write=False)
    return out


def signed_permutation_matrices(n: int) -> list[np.ndarray]:
    """All signed n x n permutation matrices (row convention), integer entries.

    Deterministic order: permutations lexicographically, then sign patterns
    with +1 before -1 per coordinate.
    """
    mats = []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            m = np.zeros((n, n), dtype=np.int64)
            for row in range(n):
                m[row, perm[row]] = signs[row]
            mats.append(m)
    return mats


def hyperoctahedral_candidates() -> list[Isometry4]:
    """The 384 cell-decomposition-preserving isometries of S^3.

    These are the signed permutations of the four coordinates; the universe
    searched by the brute-force symmetry detector.  Contains the eight
    right-multiplication matrices of the group.
    """
    return [Isometry4.from_matrix(m) for m in signed_permutation_matrices(4)]


def q8_right_isometries() -> list[Isometry4]:
    """The eight right-multiplication matrices, in the group label order."""
    return [Isometry4(q8_right_matrix_int(g).astype(np.float64), "preserving") for g in Q8_ELEMENTS]
