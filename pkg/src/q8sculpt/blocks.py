"""Decorated cubes, their face-matching rules, line/ring/hypercube assemblies,
and the labelled-cell path calculus.

A block is a cube whose six faces carry a motif (face, paw or tail), a
chirality (the motif or its mirror image) and a quarter-turn orientation.
Orientation conventions, fixed once:

- Face frames: the face with outward normal n = sign * e_axis has reference
  tangent u = e_((axis+1) % 3), identical for both signs.
- Turns are quarter turns of the motif measured in the right-hand sense about
  the INWARD normal (clockwise as seen from outside the cube).
- A screw step of +1 along an axis rotates the next block by one quarter turn
  in that same sense about the travel direction.

Two decorated faces in direct contact match when their motifs agree, their
chiralities are opposite (each side sees the other's mirror image) and their
turns cancel.  The 24 face gluings of the hypercube are not hand-entered:
``gluing_table`` derives each one from the cell-transport isometries, and the
assembly checker consumes that table.

These blocks cannot tile flat 3-space: four blocks can never match around a
single edge.  A chain of them closes only by bending 90 degrees into the
fourth dimension, which is why a loop of four works and why eight fill the
hypercube boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .quat import (
    Q8Element,
    Q8_ELEMENTS,
    GENERATORS,
    q8_mul,
    q8_right_matrix_int,
)
from .hypercube import signed_permutation_matrices

MOTIFS = ("face", "paw", "tail")
CHIRALITIES = ("left", "right")

#: Face identifiers (axis, sign) in a fixed order: +X, -X, +Y, -Y, +Z, -Z.
FACES: tuple[tuple[int, int], ...] = ((0, 1), (0, -1), (1, 1), (1, -1), (2, 1), (2, -1))

_AXIS_LETTERS = "XYZ"


def face_name(face: tuple[int, int]) -> str:
    axis, sign = face
    return ("+" if sign > 0 else "-") + _AXIS_LETTERS[axis]


def _quarter_turn(axis: int) -> np.ndarray:
    """+90 degree right-handed rotation about +e_axis, acting on row vectors."""
    m = np.zeros((3, 3), dtype=np.int64)
    a1, a2 = (axis + 1) % 3, (axis + 2) % 3
    m[axis, axis] = 1
    m[a1, a2] = 1
    m[a2, a1] = -1
    return m


_ROT3 = tuple(_quarter_turn(a) for a in range(3))
_ROT3_POWERS = tuple(
    tuple(np.linalg.matrix_power(_ROT3[a], k) for k in range(4)) for a in range(3)
)


def quarter_turn_matrix(axis: int, turns: int = 1) -> np.ndarray:
    """Rotation by ``turns`` right-handed quarter turns about +e_axis."""
    return _ROT3_POWERS[axis][turns % 4].copy()


def screw_step_matrix(axis: int, step: int = 1) -> np.ndarray:
    """Rotation applied per block by a screw of ``step`` quarter turns.

    Positive steps turn in the same sense as face turns (about the inward
    travel direction), i.e. by -90 degrees right-handed about +e_axis each.
    """
    return _ROT3_POWERS[axis][(-step) % 4].copy()


def _face_u(face: tuple[int, int]) -> np.ndarray:
    axis, _ = face
    u = np.zeros(3, dtype=np.int64)
    u[(axis + 1) % 3] = 1
    return u


def face_arrow(face: tuple[int, int], turn: int) -> np.ndarray:
    """Direction the motif points at the given turn, as an integer 3-vector."""
    axis, sign = face
    return _face_u(face) @ _ROT3_POWERS[axis][(-sign * turn) % 4]


def _face_sigma(face: tuple[int, int], turn: int) -> np.ndarray:
    # one more quarter turn in the turn sense: the motif's transverse direction
    return face_arrow(face, turn + 1)


_TURN_OF_ARROW = {
    face: {tuple(face_arrow(face, t)): t for t in range(4)} for face in FACES
}


@dataclass(frozen=True, slots=True)
class FaceDecoration:
    """Motif, chirality and quarter-turn orientation on one cube face."""

    motif: str
    chirality: str
    turn: int

    def __post_init__(self) -> None:
        if self.motif not in MOTIFS:
            raise ValueError(f"unknown motif {self.motif!r}")
        if self.chirality not in CHIRALITIES:
            raise ValueError(f"unknown chirality {self.chirality!r}")
        if self.turn not in (0, 1, 2, 3):
            raise ValueError(f"turn must be 0..3, got {self.turn!r}")

    def mirrored(self) -> "FaceDecoration":
        other = "left" if self.chirality == "right" else "right"
        return FaceDecoration(self.motif, other, self.turn)


@dataclass(frozen=True)
class DecoratedBlock:
    """A cube with one decoration per face, keyed by (axis, sign)."""

    faces: dict[tuple[int, int], FaceDecoration]

    def __post_init__(self) -> None:
        if set(self.faces) != set(FACES):
            raise ValueError("a block needs exactly the six cube faces")

    def face(self, axis: int, sign: int) -> FaceDecoration:
        return self.faces[(axis, sign)]

    def is_well_formed(self) -> bool:
        """Opposite faces: same motif, opposite chirality, turns offset by one.

        The offset direction is fixed: turn(-axis face) - turn(+axis face) = 1
        (mod 4) on every axis.
        """
        for axis in range(3):
            plus, minus = self.faces[(axis, 1)], self.faces[(axis, -1)]
            if plus.motif != minus.motif:
                return False
            if plus.chirality == minus.chirality:
                return False
            if (minus.turn - plus.turn) % 4 != 1:
                return False
        return True

    def transform(self, r: np.ndarray) -> "DecoratedBlock":
        """Image of the block under a signed permutation of the cube.

        Rotations move decorations between faces and re-express their turns
        in the target face frame; reflections additionally mirror every motif.
        """
        r = np.asarray(r, dtype=np.int64)
        det = int(round(float(np.linalg.det(r))))
        if det not in (1, -1):
            raise ValueError("expected a signed permutation matrix")
        new_faces = {}
        for (axis, sign), dec in self.faces.items():
            normal = np.zeros(3, dtype=np.int64)
            normal[axis] = sign
            image = normal @ r
            new_axis = int(np.argmax(np.abs(image)))
            new_sign = int(image[new_axis])
            arrow_image = face_arrow((axis, sign), dec.turn) @ r
            new_turn = _TURN_OF_ARROW[(new_axis, new_sign)][tuple(arrow_image)]
            moved = FaceDecoration(dec.motif, dec.chirality, new_turn)
            if det < 0:
                moved = moved.mirrored()
            new_faces[(new_axis, new_sign)] = moved
        return DecoratedBlock(new_faces)


def standard_block() -> DecoratedBlock:
    """The reference block: tails on +-X, paws on +-Y, face motifs on +-Z.

    Positive faces carry the right-handed motif at turn 0, negative faces the
    left-handed motif at turn 1.  These absolute orientations are the unique
    choice (up to adding 2 to both turns of an axis) for which the block both
    closes a +1-step screw line and assembles the hypercube.
    """
    motif_of_axis = {0: "tail", 1: "paw", 2: "face"}
    faces = {}
    for axis, sign in FACES:
        motif = motif_of_axis[axis]
        if sign > 0:
            faces[(axis, sign)] = FaceDecoration(motif, "right", 0)
        else:
            faces[(axis, sign)] = FaceDecoration(motif, "left", 1)
    return DecoratedBlock(faces)


def faces_match(a: FaceDecoration, b: FaceDecoration, relative_turn: int) -> bool:
    """Mirror-image matching of two decorated faces brought into contact.

    True when the motifs agree, the chiralities are opposite, and the turns
    satisfy ``turn(a) + turn(b) = relative_turn (mod 4)``.  Direct contact in
    3-space demands ``relative_turn = 0``; the hypercube's bent gluings demand
    the offsets recorded in :func:`gluing_table`.
    """
    return (
        a.motif == b.motif
        and a.chirality != b.chirality
        and (a.turn + b.turn - relative_turn) % 4 == 0
    )


def block_symmetries(block: DecoratedBlock) -> list[np.ndarray]:
    """All of the 48 signed-permutation cube isometries preserving the block."""
    return [r for r in signed_permutation_matrices(3) if block.transform(r) == block]


# ---------------------------------------------------------------------------
# lines and rings


@dataclass(frozen=True)
class LineReport:
    """Outcome of verifying a line or ring of placed blocks."""

    ok: bool
    first_mismatch: Optional[tuple[int, int]]
    mismatch_reason: Optional[str]
    screw_step: Optional[int]
    screw_order: Optional[int]
    translation_period: Optional[int]


def line_placements(
    block: DecoratedBlock, count: int, axis: int = 0, step: int = 1
) -> list[DecoratedBlock]:
    """Blocks of a screw line: block n is the seed turned n*step quarter turns."""
    single = screw_step_matrix(axis, step)
    placements = []
    r = np.eye(3, dtype=np.int64)
    for _ in range(count):
        placements.append(block.transform(r))
        r = r @ single
    return placements


def verify_line(
    blocks: Sequence[DecoratedBlock], axis: int = 0, wrap: bool = False
) -> LineReport:
    """Check every adjacent face pair of a line (or ring, with wrap) of blocks.

    Adjacent blocks touch +axis face to -axis face; a pair fails on motif,
    chirality or turn per :func:`faces_match`.  On success the report also
    describes the pattern's screw generator and translation period.
    """
    n = len(blocks)
    if n < 2:
        raise ValueError("need at least two blocks to verify a line")
    pairs = [(idx, idx + 1) for idx in range(n - 1)]
    if wrap:
        pairs.append((n - 1, 0))
    for p, q in pairs:
        a = blocks[p].faces[(axis, 1)]
        b = blocks[q].faces[(axis, -1)]
        if not faces_match(a, b, 0):
            reason = (
                f"blocks {p} and {q} disagree across the shared face: "
                f"{a.motif}/{a.chirality}/turn {a.turn} against "
                f"{b.motif}/{b.chirality}/turn {b.turn}"
            )
            return LineReport(False, (p, q), reason, None, None, None)

    screw_step = None
    for step in (1, 3, 2, 0):
        single = screw_step_matrix(axis, step)
        if all(blocks[q] == blocks[p].transform(single) for p, q in pairs):
            screw_step = step
            break
    screw_order = None
    if screw_step is not None and screw_step != 0:
        k = 1
        while (screw_step * k) % 4 != 0:
            k += 1
        screw_order = k

    translation_period = None
    limit = n if wrap else n - 1
    for period in range(1, limit + 1):
        if wrap:
            match = all(blocks[(idx + period) % n] == blocks[idx] for idx in range(n))
        else:
            match = all(blocks[idx + period] == blocks[idx] for idx in range(n - period))
        if match:
            translation_period = period
            break

    return LineReport(True, None, None, screw_step, screw_order, translation_period)


# ---------------------------------------------------------------------------
# the hypercube assembly

# local cube axis a corresponds to the quaternion axis a+1 (x->i, y->j, z->k)
_LOCAL_AXIS_TO_GENERATOR = {0: Q8Element(1, 1), 1: Q8Element(1, 2), 2: Q8Element(1, 3)}


def _embed_point(p3: np.ndarray) -> np.ndarray:
    return np.concatenate(([1], np.asarray(p3, dtype=np.int64)))


def _embed_vector(v3: np.ndarray) -> np.ndarray:
    return np.concatenate(([0], np.asarray(v3, dtype=np.int64)))


def neighbor_cell(cell: Q8Element, face: tuple[int, int]) -> Q8Element:
    """The cell met through the given local face of a cell's block."""
    axis, sign = face
    step = q8_mul(_LOCAL_AXIS_TO_GENERATOR[axis], cell)
    return Q8Element(sign * step.sign, step.axis)


@dataclass(frozen=True)
class Gluing:
    """One shared square of the hypercube, with the matching it demands."""

    cell_a: Q8Element
    face_a: tuple[int, int]
    cell_b: Q8Element
    face_b: tuple[int, int]
    relative_turn: int
    chirality_flip: bool


@dataclass(frozen=True)
class _FaceRecord:
    cell: Q8Element
    face: tuple[int, int]
    center: tuple[int, ...]
    arrows: tuple[tuple[int, ...], ...]  # transported arrow per turn 0..3
    sigmas: tuple[tuple[int, ...], ...]


def _face_records() -> list[_FaceRecord]:
    records = []
    for cell in Q8_ELEMENTS:
        transport = q8_right_matrix_int(cell)
        for face in FACES:
            axis, sign = face
            center3 = np.zeros(3, dtype=np.int64)
            center3[axis] = sign
            center = tuple(_embed_point(center3) @ transport)
            arrows = tuple(
                tuple(_embed_vector(face_arrow(face, t)) @ transport) for t in range(4)
            )
            sigmas = tuple(
                tuple(_embed_vector(_face_sigma(face, t)) @ transport) for t in range(4)
            )
            records.append(_FaceRecord(cell, face, center, arrows, sigmas))
    return records


def gluing_table() -> list[Gluing]:
    """The 24 face gluings of the hypercube, derived from cell transport.

    Each shared square is found by transporting both incident blocks' face
    frames into 4-space; the demanded ``relative_turn`` is the constant c with
    turn(a) + turn(b) = c (mod 4), and ``chirality_flip`` records that the two
    sides view the square with opposite orientations (they always do).
    """
    by_center: dict[tuple[int, ...], list[_FaceRecord]] = {}
    for record in _face_records():
        by_center.setdefault(record.center, []).append(record)

    gluings = []
    for center, pair in sorted(by_center.items()):
        if len(pair) != 2:
            raise AssertionError(f"face center {center} shared by {len(pair)} cells")
        first, second = pair
        if neighbor_cell(first.cell, first.face) != second.cell:
            raise AssertionError("cell adjacency disagrees with face incidence")
        const = None
        for t in range(4):
            if second.arrows[t] == first.arrows[0]:
                const = t
                break
        if const is None:
            raise AssertionError("transported face frames never align")
        for t in range(4):
            if second.arrows[(const - t) % 4] != first.arrows[t]:
                raise AssertionError("gluing demand is not of the constant-sum form")
        sig_a = np.array(first.sigmas[0])
        sig_b = np.array(second.sigmas[const % 4])
        if np.array_equal(sig_b, -sig_a):
            flip = True
        elif np.array_equal(sig_b, sig_a):
            flip = False
        else:
            raise AssertionError("transported transverse directions not aligned")
        gluings.append(
            Gluing(first.cell, first.face, second.cell, second.face, const % 4, flip)
        )
    if len(gluings) != 24:
        raise AssertionError(f"expected 24 gluings, found {len(gluings)}")
    return gluings


@dataclass(frozen=True)
class HypercubeAssembly:
    """A block placed in every cell by cell transport, plus the match audit."""

    block: DecoratedBlock
    placements: dict[Q8Element, np.ndarray]  # cell -> transport matrix
    gluings: tuple[Gluing, ...]
    failures: tuple[Gluing, ...]

    @property
    def matched(self) -> int:
        return len(self.gluings) - len(self.failures)

    @property
    def valid(self) -> bool:
        return not self.failures


def assemble_hypercube(block: Optional[DecoratedBlock] = None) -> HypercubeAssembly:
    """Place one copy of the block per cell and audit all 24 shared squares.

    The placement in cell g is the cell-1 placement transported by right
    multiplication, so every block is the same block in its local frame and a
    shared square matches exactly when the two stored face decorations satisfy
    its gluing demand.
    """
    if block is None:
        block = standard_block()
    placements = {cell: q8_right_matrix_int(cell) for cell in Q8_ELEMENTS}
    gluings = tuple(gluing_table())
    failures = []
    for gluing in gluings:
        if not gluing.chirality_flip:
            raise AssertionError("mirror matching assumed but gluing preserves orientation")
        a = block.faces[gluing.face_a]
        b = block.faces[gluing.face_b]
        if not faces_match(a, b, gluing.relative_turn):
            failures.append(gluing)
    return HypercubeAssembly(block, placements, gluings, tuple(failures))


# Tangential offsets distinguishing the motifs in the decoration encoding;
# small enough that every sample point stays inside its own face square.
_MOTIF_OFFSET = {"face": 0.11, "paw": 0.13, "tail": 0.17}
_CHIRALITY_OFFSET = 0.07


def decoration_cloud(assembly: HypercubeAssembly) -> np.ndarray:
    """Encode a valid assembly's decorations as a point cloud on the 3-sphere.

    Every decorated face contributes two points inside its square: one along
    the motif arrow at a motif-specific distance, one off-axis on the motif's
    handedness side.  A matched square receives identical points from both
    incident cells, so the cloud has one pair per square (48 points) and its
    symmetries are exactly the isometries preserving the decorated assembly.
    """
    if not assembly.valid:
        raise ValueError("decoration encoding requires a fully matched assembly")
    seen: dict[tuple, np.ndarray] = {}
    for cell in Q8_ELEMENTS:
        transport = assembly.placements[cell]
        for face in FACES:
            dec = assembly.block.faces[face]
            axis, sign = face
            center3 = np.zeros(3, dtype=np.int64)
            center3[axis] = sign
            center = _embed_point(center3) @ transport
            arrow = _embed_vector(face_arrow(face, dec.turn)) @ transport
            sigma = _embed_vector(_face_sigma(face, dec.turn)) @ transport
            hand = 1 if dec.chirality == "right" else -1
            combo = arrow + hand * sigma
            key_arrow = ("arrow", dec.motif, tuple(center), tuple(arrow))
            key_hand = ("hand", tuple(center), tuple(combo))
            if key_arrow not in seen:
                point = center + _MOTIF_OFFSET[dec.motif] * arrow
                seen[key_arrow] = point / np.linalg.norm(point)
            if key_hand not in seen:
                point = center + _CHIRALITY_OFFSET * combo
                seen[key_hand] = point / np.linalg.norm(point)
    return np.array(list(seen.values()), dtype=np.float64)


def contact_transfer_matrix(axis: int) -> np.ndarray:
    """Map from a seed's +axis face plane onto its -axis face plane.

    This is the identification the hypercube gluing induces between the two
    opposite faces of the seed cube: reflect through the cube's mid-plane,
    then a quarter turn about the axis.  A seed connects with its transported
    copies exactly when its -face contact set is the image of its +face set.
    """
    reflect = np.eye(3, dtype=np.int64)
    reflect[axis, axis] = -1
    return reflect @ _ROT3[axis]


# ---------------------------------------------------------------------------
# the labelled-cell graph


@dataclass(frozen=True)
class CayleyGraph:
    """Directed graph on the eight labels with one arc per generator."""

    nodes: tuple[Q8Element, ...]
    arcs: tuple[tuple[Q8Element, Q8Element, Q8Element], ...]  # (from, generator, to)


def cayley_graph() -> CayleyGraph:
    nodes = Q8_ELEMENTS
    arcs = tuple(
        (node, gen, q8_mul(node, gen)) for node in nodes for gen in GENERATORS
    )
    return CayleyGraph(nodes, arcs)


def follow_path(start: Q8Element, word: Sequence[Q8Element]) -> Q8Element:
    """Right-multiply the start label by each letter of the word in order.

    Letters must be +-i, +-j or +-k; traversing an arc backwards corresponds
    to a negative letter.
    """
    current = start
    for letter in word:
        if letter.axis == 0:
            raise ValueError(f"path letters must be imaginary units, got {letter.name}")
        current = q8_mul(current, letter)
    return current


def to_dot(graph: CayleyGraph) -> str:
    """Render the labelled-cell graph in DOT, arcs labelled by generator."""
    lines = ["digraph q8_cayley {", "  node [shape=circle];"]
    for node in graph.nodes:
        lines.append(f'  "{node.name}";')
    for src, gen, dst in graph.arcs:
        lines.append(f'  "{src.name}" -> "{dst.name}" [label="{gen.name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
