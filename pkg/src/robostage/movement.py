"""Movement algebra: kinds, properties, combination legality and planar pose transforms.

Poses live on a bounded 2D stage. Internally every transform is a
column-vector homogeneous matrix (translation in the last column); the
row-vector form with the offset in the bottom row is its transpose.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MAX_STEP = 1.0
# below this a trig value is treated as an exact zero; keeps axis-aligned
# motion exact (cos(pi/2) would otherwise leak 6e-17 into the other axis)
_TRIG_EPS = 1e-15


class MovementKind(str, Enum):
    SPATIAL = "spatial"
    ROTATIONAL = "rotational"
    ICONIC = "iconic"
    DEICTIC = "deictic"
    METAPHORIC = "metaphoric"
    COHESIVE = "cohesive"
    BEAT = "beat"

    @property
    def is_body(self) -> bool:
        return self in (MovementKind.SPATIAL, MovementKind.ROTATIONAL)

    @property
    def is_gesture(self) -> bool:
        return not self.is_body


class Legality(str, Enum):
    COMBINABLE = "combinable"
    RESTRICTED = "restricted"
    EXCLUSIVE = "exclusive"


class Property(str, Enum):
    GLOBAL = "global"
    RELATIONAL = "relational"
    SUMMATIVE = "summative"
    ADDITIVE = "additive"
    PERSISTENT = "persistent"
    OBVIOUS = "obvious"
    LOCAL = "local"
    REFERENTIAL = "referential"
    METAPHORICAL = "metaphorical"


_PROPERTIES: dict[MovementKind, frozenset[Property]] = {
    MovementKind.SPATIAL: frozenset(
        {Property.GLOBAL, Property.RELATIONAL, Property.SUMMATIVE, Property.ADDITIVE, Property.PERSISTENT}
    ),
    MovementKind.ROTATIONAL: frozenset(
        {Property.RELATIONAL, Property.OBVIOUS, Property.SUMMATIVE, Property.ADDITIVE, Property.PERSISTENT}
    ),
    MovementKind.ICONIC: frozenset({Property.OBVIOUS}),
    MovementKind.DEICTIC: frozenset({Property.REFERENTIAL}),
    MovementKind.METAPHORIC: frozenset({Property.METAPHORICAL}),
    MovementKind.COHESIVE: frozenset({Property.GLOBAL}),
    MovementKind.BEAT: frozenset({Property.LOCAL}),
}


def properties_of(kind: MovementKind | str) -> frozenset[Property]:
    return _PROPERTIES[MovementKind(kind)]


def load_combination_matrix(source: str | None = None) -> dict[tuple[MovementKind, MovementKind], Legality]:
    """Read the 7x7 legality matrix; defaults to the bundled data file."""
    if source is None:
        source = resources.files("robostage.data").joinpath("combination_matrix.json").read_text()
    doc = json.loads(source)
    kinds = [MovementKind(k) for k in doc["kinds"]]
    if set(kinds) != set(MovementKind) or len(kinds) != len(MovementKind):
        raise ValueError("combination matrix must label exactly the seven movement kinds")
    rows = doc["matrix"]
    if len(rows) != len(kinds) or any(len(r) != len(kinds) for r in rows):
        raise ValueError("combination matrix must be square")
    return {(a, b): Legality(rows[i][j]) for i, a in enumerate(kinds) for j, b in enumerate(kinds)}


_MATRIX = load_combination_matrix()


def can_combine(a: MovementKind | str, b: MovementKind | str) -> Legality:
    return _MATRIX[MovementKind(a), MovementKind(b)]


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    exclusive: tuple[tuple[MovementKind, MovementKind], ...] = ()
    restricted: tuple[tuple[MovementKind, MovementKind], ...] = ()


def validate_parallel_set(events: Iterable[MovementKind | str], restricted_ok: bool = False) -> Verdict:
    """Check that a set of simultaneously running movement kinds may co-occur.

    Exclusive pairs always reject. Restricted pairs are accepted only when
    the caller asserts that the restriction's condition holds.
    """
    kinds = [MovementKind(k) for k in events]
    exclusive = []
    restricted = []
    for a, b in combinations(kinds, 2):
        legality = can_combine(a, b)
        if legality is Legality.EXCLUSIVE:
            exclusive.append((a, b))
        elif legality is Legality.RESTRICTED:
            restricted.append((a, b))
    accepted = not exclusive and (restricted_ok or not restricted)
    return Verdict(accepted, tuple(exclusive), tuple(restricted))


# Conditions that may license a restricted pair (see restriction_condition).
WALK_SAFE = "gesture.walk_safe"
TARGET_STILL_VISIBLE = "target_still_visible"


def restriction_condition(body: MovementKind, gesture: MovementKind) -> str | None:
    """Name of the condition that can license a restricted body x gesture overlap."""
    if gesture is MovementKind.DEICTIC and body.is_body:
        return TARGET_STILL_VISIBLE
    if body is MovementKind.SPATIAL and gesture in (MovementKind.ICONIC, MovementKind.METAPHORIC):
        return WALK_SAFE
    return None


# -- poses and transforms ---------------------------------------------------


def normalize_angle(theta: float) -> float:
    """Map an angle into [0, 2*pi)."""
    h = math.fmod(theta, TWO_PI)
    if h < 0.0:
        h += TWO_PI
    if h >= TWO_PI:
        h = 0.0
    return h


def signed_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]; the minimal signed representative."""
    h = normalize_angle(theta)
    return h - TWO_PI if h > math.pi else h


def _clean(v: float) -> float:
    return 0.0 if abs(v) < _TRIG_EPS else v


def heading_vector(heading: float) -> tuple[float, float]:
    return _clean(math.cos(heading)), _clean(math.sin(heading))


@dataclass(frozen=True)
class Bounds:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        return min(max(x, self.xmin), self.xmax), min(max(y, self.ymin), self.ymax)


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.heading)):
            raise ValueError(f"non-finite pose {self!r}")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    def matrix(self) -> np.ndarray:
        """World-from-body homogeneous matrix."""
        c, s = heading_vector(self.heading)
        return np.array([[c, -s, self.x], [s, c, self.y], [0.0, 0.0, 1.0]])

    def to_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "heading": self.heading}

    @classmethod
    def from_dict(cls, d: dict) -> Pose:
        return cls(float(d["x"]), float(d["y"]), float(d["heading"]))


@dataclass(frozen=True)
class Transform:
    """A translation along the current heading or a rotation about the body axis."""

    variant: str  # "translation" | "rotation"
    value: float

    def __post_init__(self) -> None:
        if self.variant not in ("translation", "rotation"):
            raise ValueError(f"unknown transform variant {self.variant!r}")
        if not math.isfinite(self.value):
            raise ValueError("transform value must be finite")
        if self.variant == "translation" and abs(self.value) > MAX_STEP:
            raise ValueError(f"step {self.value} exceeds max step {MAX_STEP}")

    @classmethod
    def translation(cls, omega: float) -> Transform:
        return cls("translation", omega)

    @classmethod
    def rotation(cls, theta: float) -> Transform:
        return cls("rotation", theta)

    def negated(self) -> Transform:
        return Transform(self.variant, -self.value)

    def apply(self, pose: Pose, bounds: Bounds | None = None) -> Pose:
        if self.variant == "translation":
            return translate_pose(pose, self.value, bounds)
        return rotate_pose(pose, self.value)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> Transform:
        return cls(d["variant"], float(d["value"]))


def translate_pose(p: Pose, omega: float, bounds: Bounds | None = None) -> Pose:
    """Move ``omega`` metres along the current heading.

    With ``bounds`` given, a result off the stage is clamped to the edge and
    a warning logged.
    """
    c, s = heading_vector(p.heading)
    x, y = p.x + omega * c, p.y + omega * s
    if bounds is not None and not bounds.contains(x, y):
        cx, cy = bounds.clamp(x, y)
        logger.warning("translation to (%.3f, %.3f) leaves the stage; clamped to (%.3f, %.3f)", x, y, cx, cy)
        x, y = cx, cy
    return Pose(x, y, p.heading)


def rotate_pose(p: Pose, theta: float) -> Pose:
    return Pose(p.x, p.y, p.heading + theta)


def apply_transforms(p: Pose, transforms: Sequence[Transform], bounds: Bounds | None = None) -> Pose:
    for t in transforms:
        p = t.apply(p, bounds)
    return p


def rotation_matrix(theta: float) -> np.ndarray:
    """3x3 rotation about the vertical axis, acting on homogeneous 2D points."""
    c, s = heading_vector(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def translation_matrix(omega: float) -> np.ndarray:
    """3x3 body-frame translation along the local x axis (column-vector form)."""
    return np.array([[1.0, 0.0, omega], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def spatial_matrix(omega: float) -> np.ndarray:
    """4x4 column-vector form of the one-axis spatial movement.

    Its transpose is the row-vector form with ``omega`` in the bottom row.
    """
    m = np.eye(4)
    m[0, 3] = omega
    return m


def transform_matrix(t: Transform) -> np.ndarray:
    if t.variant == "translation":
        return translation_matrix(t.value)
    return rotation_matrix(t.value)


def pose_from_matrix(m: np.ndarray) -> Pose:
    return Pose(float(m[0, 2]), float(m[1, 2]), math.atan2(m[1, 0], m[0, 0]))


def bearing(src: Pose, dst: Pose) -> float:
    """Heading that would make ``src`` face ``dst``, in [0, 2*pi)."""
    return normalize_angle(math.atan2(dst.y - src.y, dst.x - src.x))


def distance(a: Pose, b: Pose) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)
