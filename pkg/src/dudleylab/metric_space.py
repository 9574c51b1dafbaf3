"""Finite metric spaces, maps between them, and metric validation.

Every measure handled by the package lives on a :class:`FiniteMetricSpace`,
a list of point labels together with a validated distance matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import InputError

#: Triangle-inequality slack for matrices read from files.
FILE_TOLERANCE = 1e-12

# Relative slack (in ulps of the compared distance) granted to "exact"
# validation; float subtraction alone breaks |x-z| <= |x-y| + |y-z|.
_ULP_SLACK = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    detail: str

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "indices": list(self.indices), "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def witnesses(self, axiom: str) -> list[tuple[int, ...]]:
        return [v.indices for v in self.violations if v.axiom == axiom]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def _as_square(matrix) -> np.ndarray:
    try:
        d = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"distance matrix is not numeric: {exc}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise InputError(f"distance matrix must be square and nonempty, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InputError("distance matrix has non-finite entries")
    return d


def validate_metric(matrix, tol: float = 0.0) -> ValidationReport:
    """Check the metric axioms and list every violation with its witness.

    Witness conventions: symmetry ``(i, j)``, zero diagonal ``(i,)``,
    positivity ``(i, j)`` and triangle ``(i, k, j)`` meaning
    ``d[i][k] > d[i][j] + d[j][k]``.  ``tol`` is the absolute triangle slack;
    a few ulps of relative slack are always granted.
    """
    d = _as_square(matrix)
    n = d.shape[0]
    out: list[Violation] = []

    for i in range(n):
        if d[i, i] != 0.0:
            out.append(Violation("zero_diagonal", (i,), f"d[{i}][{i}] = {d[i, i]!r}"))
    for i, j in itertools.combinations(range(n), 2):
        if d[i, j] != d[j, i]:
            out.append(Violation("symmetry", (i, j), f"d[{i}][{j}] = {d[i, j]!r} != d[{j}][{i}] = {d[j, i]!r}"))
    for i, j in itertools.permutations(range(n), 2):
        if not d[i, j] > 0.0:
            out.append(Violation("positivity", (i, j), f"d[{i}][{j}] = {d[i, j]!r} <= 0"))

    # through[i, j, k] = d[i, j] + d[j, k]
    through = d[:, :, None] + d[None, :, :]
    direct = d[:, None, :]
    excess = direct - through - (tol + _ULP_SLACK * np.abs(direct))
    for i, j, k in zip(*np.nonzero(excess > 0)):
        if i == k or j in (i, k):
            continue
        out.append(
            Violation(
                "triangle",
                (int(i), int(k), int(j)),
                f"d[{i}][{k}] = {d[i, k]!r} > d[{i}][{j}] + d[{j}][{k}] = {d[i, j] + d[j, k]!r}",
            )
        )
    return ValidationReport(tuple(out))


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Point labels plus a validated, read-only distance matrix."""

    labels: tuple
    dist: np.ndarray = field(repr=False)

    def __init__(self, labels: Sequence[Hashable], dist, tol: float = 0.0):
        d = _as_square(dist)
        labels = tuple(labels)
        if len(labels) != d.shape[0]:
            raise InputError(f"{len(labels)} labels for a {d.shape[0]}-point distance matrix")
        if len(set(labels)) != len(labels):
            raise InputError("point labels must be distinct")
        report = validate_metric(d, tol=tol)
        if not report.ok:
            first = report.violations[0]
            raise InputError(f"not a metric ({len(report.violations)} violations), e.g. {first.axiom}: {first.detail}")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", d)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @property
    def is_real_line(self) -> bool:
        """True when every label is a real coordinate and distances are |x - y|."""
        return getattr(self, "_coords", None) is not None

    @property
    def coordinates(self) -> np.ndarray:
        coords = getattr(self, "_coords", None)
        if coords is None:
            raise InputError("space is not a subset of the real line")
        return coords

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"no point labelled {label!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self is other or (self.labels == other.labels and np.array_equal(self.dist, other.dist))

    def __hash__(self) -> int:
        return hash((self.labels, self.dist.tobytes()))


def from_real_points(xs: Sequence[float]) -> FiniteMetricSpace:
    """The subset ``xs`` of the real line with the metric ``|x - y|``."""
    coords = np.array(xs, dtype=float).ravel()
    if coords.size == 0:
        raise InputError("need at least one point")
    if not np.all(np.isfinite(coords)):
        raise InputError("coordinates must be finite")
    if len(np.unique(coords)) != coords.size:
        raise InputError("real points must be pairwise distinct")
    space = FiniteMetricSpace([float(x) for x in coords], np.abs(coords[:, None] - coords[None, :]))
    coords.setflags(write=False)
    object.__setattr__(space, "_coords", coords)
    return space


def from_matrix(labels: Sequence[Hashable], matrix) -> FiniteMetricSpace:
    """A space from an externally supplied matrix (file tolerance on triangles)."""
    return FiniteMetricSpace(labels, matrix, tol=FILE_TOLERANCE)


def truncate_metric(space: FiniteMetricSpace, c: float) -> FiniteMetricSpace:
    """The metric ``min(d, c)`` on the same points."""
    if not c > 0:
        raise InputError(f"truncation level must be positive, got {c!r}")
    out = FiniteMetricSpace(space.labels, np.minimum(space.dist, c))
    if space.is_real_line and c >= space.diameter:
        object.__setattr__(out, "_coords", space.coordinates)
    return out


@dataclass(frozen=True)
class PointMap:
    """A map between finite spaces given by the target index of each source point."""

    source: FiniteMetricSpace
    target: FiniteMetricSpace
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if len(image) != self.source.size:
            raise InputError(f"image has {len(image)} entries for a {self.source.size}-point source")
        bad = [i for i in image if not 0 <= i < self.target.size]
        if bad:
            raise InputError(f"image indices out of range for the target: {bad}")
        object.__setattr__(self, "image", image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def compose(self, inner: "PointMap") -> "PointMap":
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise InputError("maps are not composable")
        return PointMap(inner.source, self.target, tuple(self.image[i] for i in inner.image))

    @classmethod
    def identity(cls, space: FiniteMetricSpace) -> "PointMap":
        return cls(space, space, tuple(range(space.size)))


def real_map(source: FiniteMetricSpace, fn, target_points: Sequence[float] | None = None) -> PointMap:
    """Map ``source`` into the real line through ``fn`` applied to each label.

    The target is the set of distinct image values unless ``target_points``
    is supplied.
    """
    values = [float(fn(label)) for label in source.labels]
    if target_points is None:
        target_points = sorted(set(values))
    target = from_real_points(target_points)
    lookup = {x: i for i, x in enumerate(target.labels)}
    try:
        image = tuple(lookup[v] for v in values)
    except KeyError as exc:
        raise InputError(f"image value {exc.args[0]!r} is not a target point") from None
    return PointMap(source, target, image)


def lipschitz_constant_of_map(phi: PointMap) -> float:
    """``max_{i != j} d_Y(phi(i), phi(j)) / d_X(i, j)``; 0 on a singleton source."""
    n = phi.source.size
    if n < 2:
        return 0.0
    idx = np.array(phi.image)
    dy = phi.target.dist[np.ix_(idx, idx)]
    off = ~np.eye(n, dtype=bool)
    return float(np.max(dy[off] / phi.source.dist[off]))
