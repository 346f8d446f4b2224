"""Brute-force exact symmetry detection for point clouds on the 3-sphere.

The candidate universe is the 384 signed coordinate permutations: these are
precisely the isometries preserving the hypercube's cell decomposition, so
for cell-aligned sculptures nothing relevant is missed, and the search is
exact and fast.  Matching is tolerance-based: a candidate survives when it
maps the cloud bijectively onto itself within the tolerance.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .quat import Isometry4, UNIT_NORM_TOL, matrix_key
from .hypercube import hyperoctahedral_candidates, signed_permutation_matrices
from . import quat

DEFAULT_TOL = 1e-6

#: Canonical orientation-reversing signed permutation: negate the w axis.
MIRROR_W = np.diag([-1, 1, 1, 1]).astype(np.int64)

#: Greedy matching falls back to exact bipartite matching on at most this
#: many ambiguous points.
MAX_AMBIGUOUS = 32


@dataclass(frozen=True, eq=False)
class PointCloud4:
    """Finite set of unit 4-vectors standing in for sculpture geometry."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64).copy()
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError(f"expected an (n, 4) array, got shape {pts.shape}")
        if len(pts) == 0:
            raise ValueError("point cloud is empty")
        norms = np.linalg.norm(pts, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > UNIT_NORM_TOL:
            raise ValueError(f"points must lie on the unit sphere (off by {worst:.3g})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_json(cls, text: str | bytes) -> "PointCloud4":
        data = json.loads(text)
        if not isinstance(data, dict) or "points" not in data:
            raise ValueError('cloud JSON must be an object with a "points" array')
        return cls(np.array(data["points"], dtype=np.float64))

    def to_json(self) -> str:
        return json.dumps({"points": [[float(c) for c in p] for p in self.points]})


@dataclass(frozen=True)
class SymmetryReport:
    """Surviving candidates plus the headline verdicts."""

    candidates_tested: int
    symmetries: tuple[Isometry4, ...]
    is_exactly_q8: bool
    chirality: str

    def to_json(self) -> str:
        matrices = sorted(
            [[int(v) for v in s.key()] for s in self.symmetries]
        )
        payload = {
            "candidates_tested": self.candidates_tested,
            "symmetry_count": len(self.symmetries),
            "symmetries": [
                [row for row in (m[0:4], m[4:8], m[8:12], m[12:16])] for m in matrices
            ],
            "is_exactly_q8": self.is_exactly_q8,
            "chirality": self.chirality,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def min_pairwise_distance(points: np.ndarray) -> float:
    """Smallest distance between two distinct points (inf for one point)."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if n < 2:
        return float("inf")
    best = float("inf")
    for start in range(0, n, 256):
        block = points[start : start + 256]
        d2 = np.sum((block[:, None, :] - points[None, :, :]) ** 2, axis=-1)
        for row in range(len(block)):
            d2[row, start + row] = np.inf
        best = min(best, float(np.sqrt(np.min(d2))))
    return best


class _GridIndex:
    """Spatial hash over the target points with cell size 2*tol.

    Any point within tol of a query falls in one of at most two cells per
    axis, so a lookup probes at most 2**dim buckets.
    """

    def __init__(self, points: np.ndarray, tol: float):
        self.points = np.asarray(points, dtype=np.float64)
        self.tol = tol
        self.cell = 2.0 * tol
        buckets: dict[tuple[int, ...], list[int]] = {}
        keys = np.floor(self.points / self.cell).astype(np.int64)
        for idx, key in enumerate(map(tuple, keys)):
            buckets.setdefault(key, []).append(idx)
        self.buckets = buckets

    def near(self, p: np.ndarray) -> list[int]:
        lo = np.floor((p - self.tol) / self.cell).astype(np.int64)
        hi = np.floor((p + self.tol) / self.cell).astype(np.int64)
        hits = []
        for key in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            for idx in self.buckets.get(key, ()):
                if np.linalg.norm(self.points[idx] - p) <= self.tol:
                    hits.append(idx)
        return hits


def _perfect_matching(candidates: dict[int, list[int]]) -> bool:
    """Kuhn's augmenting-path test for a perfect matching of the sources."""
    matched_target: dict[int, int] = {}

    def try_assign(source: int, banned: set[int]) -> bool:
        for target in candidates[source]:
            if target in banned:
                continue
            banned.add(target)
            holder = matched_target.get(target)
            if holder is None or try_assign(holder, banned):
                matched_target[target] = source
                return True
        return False

    for source in candidates:
        if not try_assign(source, set()):
            return False
    return True


def _matches_point_set(source: np.ndarray, index: _GridIndex) -> bool:
    """True when source maps bijectively onto the indexed points within tol.

    Greedy nearest-neighbour first; if that leaves collisions, the points
    involved are re-matched exactly (bounded by MAX_AMBIGUOUS).
    """
    target = index.points
    if len(source) != len(target):
        return False
    owner: dict[int, int] = {}  # target index -> source index
    collided: set[int] = set()
    hits_of: dict[int, list[int]] = {}
    for i, p in enumerate(source):
        hits = index.near(p)
        if not hits:
            return False
        hits_of[i] = hits
        best = min(hits, key=lambda idx: float(np.linalg.norm(target[idx] - p)))
        if best in owner:
            collided.add(i)
            collided.add(owner[best])
        else:
            owner[best] = i
    if not collided:
        return True
    if len(collided) > MAX_AMBIGUOUS:
        return False
    # Re-match the ambiguous sources over the targets they can still reach.
    taken = {t for t, j in owner.items() if j not in collided}
    candidates = {i: [t for t in hits_of[i] if t not in taken] for i in collided}
    if any(not opts for opts in candidates.values()):
        return False
    return _perfect_matching(candidates)


def match_point_sets(source: np.ndarray, target: np.ndarray, tol: float) -> bool:
    """Bijective tolerance matching between two raw point arrays.

    No well-posedness guard: thin wrapper for callers comparing sets that are
    not sphere clouds (seed contact sets, fixtures).
    """
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if len(source) != len(target):
        return False
    return _matches_point_set(source, _GridIndex(target, tol))


def _well_posed_tol(points: np.ndarray, tol: float) -> None:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    separation = min_pairwise_distance(points)
    if tol > 0.5 * separation:
        raise ValueError(
            f"tolerance {tol} exceeds half the minimum pairwise distance "
            f"({separation / 2:.3g}); matching would be ill-posed"
        )


def invariant_under(cloud: PointCloud4, iso: Isometry4, tol: float = DEFAULT_TOL) -> bool:
    """True when the isometry maps the cloud onto itself within tol."""
    _well_posed_tol(cloud.points, tol)
    index = _GridIndex(cloud.points, tol)
    return _matches_point_set(cloud.points @ iso.m, index)


def _q8_right_keys() -> frozenset[tuple[int, ...]]:
    return frozenset(matrix_key(quat.q8_right_matrix_int(g)) for g in quat.Q8_ELEMENTS)


def surviving_candidates(cloud: PointCloud4, tol: float = DEFAULT_TOL) -> list[Isometry4]:
    """Filter the 384-candidate universe down to the cloud's symmetries."""
    _well_posed_tol(cloud.points, tol)
    index = _GridIndex(cloud.points, tol)
    survivors = []
    for candidate in hyperoctahedral_candidates():
        if _matches_point_set(cloud.points @ candidate.m, index):
            survivors.append(candidate)
    return survivors


def symmetry_group(cloud: PointCloud4, tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Detect the cloud's full symmetry set within the candidate universe.

    ``is_exactly_q8`` is true when the survivors are precisely the eight
    right-multiplication matrices; the chirality verdict is computed from the
    survivors and the cloud's mirror image.
    """
    survivors = surviving_candidates(cloud, tol)
    keys = frozenset(s.key() for s in survivors)
    chirality = classify_chirality(cloud, tol, survivors=survivors)
    return SymmetryReport(
        candidates_tested=384,
        symmetries=tuple(survivors),
        is_exactly_q8=keys == _q8_right_keys(),
        chirality=chirality,
    )


def seed_asymmetry_check(points: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when only the identity cube isometry preserves the seed points.

    The seed lives in the cube [-1,1]^3; the candidate symmetries are the 48
    signed permutations of the three coordinates.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array, got shape {points.shape}")
    _well_posed_tol(points, tol)
    index = _GridIndex(points, tol)
    identity = np.eye(3, dtype=np.int64)
    for candidate in signed_permutation_matrices(3):
        if np.array_equal(candidate, identity):
            continue
        if _matches_point_set(points @ candidate, index):
            return False
    return True


def _conjugate_keys(g: np.ndarray, group: Sequence[np.ndarray]) -> frozenset:
    # orthogonal with integer entries, so the inverse is the exact transpose
    return frozenset(matrix_key(g @ s @ g.T) for s in group)


def classify_chirality(
    cloud: PointCloud4,
    tol: float = DEFAULT_TOL,
    survivors: Optional[Sequence[Isometry4]] = None,
) -> str:
    """Classify the cloud as achiral, chiral or metachiral.

    Achiral: some orientation-preserving candidate carries the cloud onto its
    mirror image.  Otherwise the cloud is chiral, and it is metachiral when
    additionally no orientation-preserving candidate conjugates its symmetry
    group onto the mirror image's symmetry group: the group itself has a
    handedness.  All checks stay inside the 384-candidate universe, with the
    fixed mirror ``MIRROR_W``.
    """
    _well_posed_tol(cloud.points, tol)
    mirrored = cloud.points @ MIRROR_W
    mirror_index = _GridIndex(mirrored, tol)
    preserving = [c for c in hyperoctahedral_candidates() if c.is_orientation_preserving]
    for candidate in preserving:
        if _matches_point_set(cloud.points @ candidate.m, mirror_index):
            return "achiral"
    if survivors is None:
        survivors = surviving_candidates(cloud, tol)
    group = [np.rint(s.m).astype(np.int64) for s in survivors]
    group_keys = frozenset(matrix_key(m) for m in group)
    mirror_group_keys = _conjugate_keys(MIRROR_W, group)
    if group_keys == mirror_group_keys:
        return "chiral"
    for candidate in preserving:
        g = np.rint(candidate.m).astype(np.int64)
        if _conjugate_keys(g, group) == mirror_group_keys:
            return "chiral"
    return "metachiral"
