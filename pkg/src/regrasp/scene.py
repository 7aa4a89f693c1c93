"""World model: collision primitives, objects with grasps, stances, placements.

Collision checking is analytic over sphere/capsule/box primitives. Contacts
are tolerated up to CONTACT_EPS penetration so that an object resting exactly
on a table top is not a collision; hand links may penetrate the manipulated
object up to HAND_OBJECT_CLEARANCE, which lets grasp approach/retreat motions
pass while still rejecting gross interpenetration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import EmptyResult, MissingFile, ParseError
from .geometry import ConvexPolygon, Point2, contains, convex_hull
from .kinematics import (
    Configuration,
    FootSpec,
    Link,
    RobotModel,
    Transform,
    forward_kinematics,
)

CONTACT_EPS = 0.1              # mm of tolerated penetration for resting contact
HAND_OBJECT_CLEARANCE = 5.0    # mm of tolerated hand-object penetration

FACE_NAMES = ("+x", "-x", "+y", "-y", "+z", "-z")


# ---------------------------------------------------------------------------
# Collision primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float

    def transformed(self, t: Transform) -> "Sphere":
        return Sphere(tuple(t.apply(self.center)), self.radius)


@dataclass(frozen=True)
class Capsule:
    a: tuple[float, float, float]
    b: tuple[float, float, float]
    radius: float

    def transformed(self, t: Transform) -> "Capsule":
        return Capsule(tuple(t.apply(self.a)), tuple(t.apply(self.b)), self.radius)


@dataclass(frozen=True)
class Box:
    center: tuple[float, float, float]
    half: tuple[float, float, float]
    rpy: tuple[float, float, float] = (0.0, 0.0, 0.0)
    # world-frame pose cache, set by transformed()
    rotation: tuple = None

    def _rot(self) -> np.ndarray:
        if self.rotation is not None:
            return np.asarray(self.rotation)
        from .kinematics import rotation_rpy

        return rotation_rpy(*self.rpy)

    def transformed(self, t: Transform) -> "Box":
        rot = t.rotation @ self._rot()
        return Box(
            center=tuple(t.apply(self.center)),
            half=self.half,
            rotation=tuple(map(tuple, rot)),
        )


CollisionPrimitive = Sphere | Capsule | Box


def parse_primitive(node, path="<memory>", where="collision") -> CollisionPrimitive:
    kind = node.get("type")
    try:
        if kind == "sphere":
            prim = Sphere(tuple(node["center"]), float(node["radius"]))
        elif kind == "capsule":
            prim = Capsule(tuple(node["a"]), tuple(node["b"]), float(node["radius"]))
        elif kind == "box":
            prim = Box(
                tuple(node["center"]),
                tuple(node["half"]),
                tuple(node.get("rpy", (0.0, 0.0, 0.0))),
            )
        else:
            raise ParseError(path, where, f"unknown primitive type {kind!r}")
    except KeyError as exc:
        raise ParseError(path, where, f"missing field {exc}") from exc
    if kind == "sphere" and prim.radius <= 0:
        raise ParseError(path, where, "sphere radius must be positive")
    if kind == "capsule" and prim.radius <= 0:
        raise ParseError(path, where, "capsule radius must be positive")
    if kind == "box" and any(h <= 0 for h in prim.half):
        raise ParseError(path, where, "box half-extents must be positive")
    return prim


def _segment_point_closest(a, b, p):
    a, b, p = np.asarray(a, float), np.asarray(b, float), np.asarray(p, float)
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return a + t * ab


def _segment_segment_distance(p1, q1, p2, q2):
    """Closest distance between segments [p1,q1] and [p2,q2] (Ericson)."""
    p1, q1 = np.asarray(p1, float), np.asarray(q1, float)
    p2, q2 = np.asarray(p2, float), np.asarray(q2, float)
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    if a <= 1e-12 and e <= 1e-12:
        return float(np.linalg.norm(r))
    if a <= 1e-12:
        t = np.clip(f / e, 0.0, 1.0)
        s = 0.0
    else:
        c = d1 @ r
        if e <= 1e-12:
            t = 0.0
            s = np.clip(-c / a, 0.0, 1.0)
        else:
            b = d1 @ d2
            denom = a * e - b * b
            s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > 1e-12 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = np.clip(-c / a, 0.0, 1.0)
            elif t > 1.0:
                t = 1.0
                s = np.clip((b - c) / a, 0.0, 1.0)
    return float(np.linalg.norm(p1 + s * d1 - (p2 + t * d2)))


def _point_box_signed(p, box: Box) -> float:
    """Signed distance point to box: negative inside."""
    rot = box._rot()
    local = rot.T @ (np.asarray(p, float) - np.asarray(box.center, float))
    h = np.asarray(box.half, float)
    outside = np.maximum(np.abs(local) - h, 0.0)
    d_out = float(np.linalg.norm(outside))
    if d_out > 0.0:
        return d_out
    return -float(np.min(h - np.abs(local)))


def _segment_box_separation(a, b, box: Box) -> float:
    """Signed separation between a segment and a box (negative = penetrating).

    Outside distance^2 is convex along the segment, so a ternary search finds
    its exact minimum; if the segment enters the box the (non-convex) interior
    depth is maximised over a fine parameter sweep, which is accurate enough
    for threshold tests at millimetre scales.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)

    def d_out(t):
        p = a + t * (b - a)
        return max(0.0, _point_box_signed(p, box))

    lo, hi = 0.0, 1.0
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if d_out(m1) <= d_out(m2):
            hi = m2
        else:
            lo = m1
    t_star = (lo + hi) / 2.0
    best = d_out(t_star)
    if best > 1e-9:
        return best
    ts = np.linspace(0.0, 1.0, 257)
    depths = [_point_box_signed(a + t * (b - a), box) for t in ts]
    return float(min(depths))


def _box_box_separation(b1: Box, b2: Box) -> float:
    """Max separating-axis gap over the 15 OBB axes (negative = overlap)."""
    r1, r2 = b1._rot(), b2._rot()
    h1 = np.asarray(b1.half, float)
    h2 = np.asarray(b2.half, float)
    t = np.asarray(b2.center, float) - np.asarray(b1.center, float)
    axes = [r1[:, i] for i in range(3)] + [r2[:, i] for i in range(3)]
    for i in range(3):
        for j in range(3):
            cr = np.cross(r1[:, i], r2[:, j])
            n = np.linalg.norm(cr)
            if n > 1e-9:
                axes.append(cr / n)
    best = -np.inf
    for axis in axes:
        ext1 = float(np.abs(axis @ r1) @ h1)
        ext2 = float(np.abs(axis @ r2) @ h2)
        gap = abs(float(axis @ t)) - ext1 - ext2
        best = max(best, gap)
    return best


def primitive_separation(p1: CollisionPrimitive, p2: CollisionPrimitive) -> float:
    """Signed separation between two world-frame primitives (negative = overlap)."""
    if isinstance(p1, Box) and not isinstance(p2, Box):
        return primitive_separation(p2, p1)
    if isinstance(p1, Capsule) and isinstance(p2, Sphere):
        return primitive_separation(p2, p1)
    if isinstance(p1, Sphere) and isinstance(p2, Sphere):
        d = np.linalg.norm(np.asarray(p1.center) - np.asarray(p2.center))
        return float(d) - p1.radius - p2.radius
    if isinstance(p1, Sphere) and isinstance(p2, Capsule):
        closest = _segment_point_closest(p2.a, p2.b, p1.center)
        d = np.linalg.norm(closest - np.asarray(p1.center, float))
        return float(d) - p1.radius - p2.radius
    if isinstance(p1, Capsule) and isinstance(p2, Capsule):
        d = _segment_segment_distance(p1.a, p1.b, p2.a, p2.b)
        return d - p1.radius - p2.radius
    if isinstance(p1, Sphere) and isinstance(p2, Box):
        return _point_box_signed(p1.center, p2) - p1.radius
    if isinstance(p1, Capsule) and isinstance(p2, Box):
        return _segment_box_separation(p1.a, p1.b, p2) - p1.radius
    if isinstance(p1, Box) and isinstance(p2, Box):
        return _box_box_separation(p1, p2)
    raise TypeError(f"unsupported primitive pair {type(p1)}, {type(p2)}")


def primitives_collide(p1, p2, clearance: float = CONTACT_EPS) -> bool:
    return primitive_separation(p1, p2) < -clearance


# ---------------------------------------------------------------------------
# Objects, grasps, placements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grasp:
    hand: str                      # "left" | "right"
    hand_in_object: Transform      # hand frame expressed in the object frame
    approach: tuple[float, float, float]   # unit vector, object frame

    def hand_pose(self, object_pose: Transform) -> Transform:
        return object_pose.compose(self.hand_in_object)

    def object_pose(self, hand_pose: Transform) -> Transform:
        return hand_pose.compose(self.hand_in_object.inverse())


@dataclass(frozen=True)
class ObjectModel:
    name: str
    mass: float
    local_com: tuple[float, float, float]
    primitives: tuple[CollisionPrimitive, ...]
    grasps: tuple[Grasp, ...]
    resting_faces: tuple[str, ...]

    def world_primitives(self, pose: Transform):
        return [p.transformed(pose) for p in self.primitives]

    def com_world(self, pose: Transform) -> np.ndarray:
        return pose.apply(self.local_com)

    def local_aabb(self) -> tuple[np.ndarray, np.ndarray]:
        los, his = [], []
        for p in self.primitives:
            if isinstance(p, Sphere):
                c = np.asarray(p.center, float)
                los.append(c - p.radius)
                his.append(c + p.radius)
            elif isinstance(p, Capsule):
                a, b = np.asarray(p.a, float), np.asarray(p.b, float)
                los.append(np.minimum(a, b) - p.radius)
                his.append(np.maximum(a, b) + p.radius)
            else:
                rot = p._rot()
                c = np.asarray(p.center, float)
                ext = np.abs(rot) @ np.asarray(p.half, float)
                los.append(c - ext)
                his.append(c + ext)
        return np.min(los, axis=0), np.max(his, axis=0)


@dataclass(frozen=True)
class Placement:
    pose: Transform
    surface: str
    face: str
    stable: bool = True


@dataclass(frozen=True)
class Surface:
    id: str
    center: tuple[float, float]
    size: tuple[float, float]
    top_z: float
    thickness: float = 40.0

    def collision_box(self) -> Box:
        return Box(
            center=(self.center[0], self.center[1], self.top_z - self.thickness / 2.0),
            half=(self.size[0] / 2.0, self.size[1] / 2.0, self.thickness / 2.0),
        )


@dataclass(frozen=True)
class Environment:
    surfaces: dict[str, Surface]
    obstacles: tuple[CollisionPrimitive, ...] = ()

    def collision_primitives(self):
        return [s.collision_box() for s in self.surfaces.values()] + list(self.obstacles)


def face_rotation(face: str) -> np.ndarray:
    """Rotation that turns the named object face to point straight down."""
    from .kinematics import rotation_rpy

    half_pi = math.pi / 2.0
    table = {
        "-z": (0.0, 0.0, 0.0),
        "+z": (math.pi, 0.0, 0.0),
        "+x": (0.0, half_pi, 0.0),
        "-x": (0.0, -half_pi, 0.0),
        "+y": (-half_pi, 0.0, 0.0),
        "-y": (half_pi, 0.0, 0.0),
    }
    if face not in table:
        raise ValueError(f"unknown face {face!r}")
    return rotation_rpy(*table[face])


def placement_pose(obj: ObjectModel, face: str, surface: Surface, xy, yaw: float) -> Transform:
    rot = Transform.rot_z(yaw).rotation @ face_rotation(face)
    lo, hi = obj.local_aabb()
    corners = np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    z_min = (corners @ rot.T)[:, 2].min()
    t = np.array([xy[0], xy[1], surface.top_z - z_min])
    return Transform(rot, t, check=False)


def placement_footprint(obj: ObjectModel, pose: Transform) -> ConvexPolygon:
    """Ground projection of the resting (lowest) face of the object's AABB."""
    lo, hi = obj.local_aabb()
    corners = np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    world = corners @ pose.rotation.T + pose.translation
    z_min = world[:, 2].min()
    bottom = world[world[:, 2] <= z_min + 1e-6]
    return convex_hull([Point2(float(x), float(y)) for x, y, _ in bottom])


def placement_is_stable(obj: ObjectModel, pose: Transform) -> bool:
    com = obj.com_world(pose)
    footprint = placement_footprint(obj, pose)
    return contains(footprint, Point2(float(com[0]), float(com[1])))


def make_placement(obj: ObjectModel, surface: Surface, face: str, xy, yaw: float) -> Placement:
    pose = placement_pose(obj, face, surface, xy, yaw)
    return Placement(pose, surface.id, face, placement_is_stable(obj, pose))


def enumerate_placements(
    obj: ObjectModel,
    surface: Surface,
    positions: int = 3,
    yaws: int = 4,
) -> list[Placement]:
    """Statically stable candidate placements on a grid over the surface.

    One candidate per (resting face, grid position, yaw); candidates whose CoM
    does not project inside the resting-face footprint are dropped. Raises
    EmptyResult when the grid is empty or no face admits a stable pose.
    """
    if positions <= 0 or yaws <= 0:
        raise EmptyResult("placement grid has zero points")
    cx, cy = surface.center
    span_x = surface.size[0] * 0.3
    span_y = surface.size[1] * 0.3
    if positions == 1:
        xs, ys = [cx], [cy]
    else:
        xs = np.linspace(cx - span_x, cx + span_x, positions)
        ys = np.linspace(cy - span_y, cy + span_y, positions)
    yaw_list = [2.0 * math.pi * k / yaws for k in range(yaws)]
    out = []
    for face in obj.resting_faces:
        for x in xs:
            for y in ys:
                for yaw in yaw_list:
                    p = make_placement(obj, surface, face, (float(x), float(y)), yaw)
                    if p.stable:
                        out.append(p)
    if not out:
        raise EmptyResult(f"no stable placement for object '{obj.name}' on '{surface.id}'")
    return out


def _parse_grasp(node, path, where) -> Grasp:
    hand = node.get("hand")
    if hand not in ("left", "right"):
        raise ParseError(path, f"{where}.hand", f"hand must be left or right, got {hand!r}")
    xyz = node.get("xyz", [0, 0, 0])
    rpy = node.get("rpy", [0, 0, 0])
    if "rotation" in node:
        rot = np.asarray(node["rotation"], float)
        if rot.shape != (3, 3) or not np.allclose(rot @ rot.T, np.eye(3), atol=1e-6) or abs(np.linalg.det(rot) - 1) > 1e-6:
            raise ParseError(path, f"{where}.rotation", "rotation matrix is not orthonormal with det +1")
        t = Transform(rot, xyz, check=False)
    else:
        t = Transform.from_rpy(xyz, rpy)
    approach = np.asarray(node.get("approach", [0, 0, -1]), float)
    n = np.linalg.norm(approach)
    if abs(n - 1.0) > 1e-6:
        raise ParseError(path, f"{where}.approach", "approach direction must be a unit vector")
    return Grasp(hand=hand, hand_in_object=t, approach=tuple(approach))


def load_grasps(path) -> list[Grasp]:
    """Validated grasp list from an object file; EmptyResult when none."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"object file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(path, "-", f"invalid JSON: {exc}") from exc
    grasps = [
        _parse_grasp(node, path, f"grasps[{i}]") for i, node in enumerate(raw.get("grasps", []))
    ]
    if not grasps:
        raise EmptyResult(f"object file {path} declares no grasps")
    return grasps


def load_object(path) -> ObjectModel:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"object file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(path, "-", f"invalid JSON: {exc}") from exc
    mass = float(raw.get("mass_kg", -1.0))
    if mass < 0:
        raise ParseError(path, "mass_kg", "mass must be >= 0")
    prims = tuple(
        parse_primitive(node, path, f"primitives[{i}]")
        for i, node in enumerate(raw.get("primitives", []))
    )
    if not prims:
        raise ParseError(path, "primitives", "object needs at least one primitive")
    faces = tuple(raw.get("resting_faces", ["-z"]))
    for f in faces:
        if f not in FACE_NAMES:
            raise ParseError(path, "resting_faces", f"unknown face {f!r}")
    return ObjectModel(
        name=raw.get("name", path.stem),
        mass=mass,
        local_com=tuple(raw.get("com_mm", [0, 0, 0])),
        primitives=prims,
        grasps=tuple(load_grasps(path)),
        resting_faces=faces,
    )


def load_environment(path) -> Environment:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"environment file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(path, "-", f"invalid JSON: {exc}") from exc
    surfaces = {}
    for i, node in enumerate(raw.get("surfaces", [])):
        where = f"surfaces[{i}]"
        if "id" not in node:
            raise ParseError(path, where, "surface needs an id")
        surfaces[node["id"]] = Surface(
            id=node["id"],
            center=tuple(node["center"]),
            size=tuple(node["size"]),
            top_z=float(node["top_z"]),
            thickness=float(node.get("thickness", 40.0)),
        )
    obstacles = tuple(
        parse_primitive(node, path, f"obstacles[{i}]")
        for i, node in enumerate(raw.get("obstacles", []))
    )
    return Environment(surfaces=surfaces, obstacles=obstacles)


# ---------------------------------------------------------------------------
# Stances and stance posing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FootPlacement:
    x: float
    y: float
    yaw: float = 0.0
    contact: bool = True
    raise_mm: float = 0.0


@dataclass(frozen=True)
class Stance:
    name: str
    preset: str
    feet: dict[str, FootPlacement]
    base_xyz: tuple[float, float, float]
    base_yaw: float = 0.0
    leg_joint_values: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not any(f.contact for f in self.feet.values()):
            raise ValueError("stance must place at least one foot in contact")

    def base_pose(self) -> Transform:
        return Transform.rot_z(self.base_yaw, self.base_xyz)


# Preset geometry for the bundled biped. The legs are rigid; each preset fixes
# the base pose and both foot ground poses, and pose_with_stance() rebuilds
# the leg/foot link origins so forward kinematics agrees with the stance.
_STANCE_PRESETS = {
    "upright": dict(
        base_xyz=(0.0, 0.0, 880.0),
        feet=dict(
            left=FootPlacement(x=0.0, y=135.0),
            right=FootPlacement(x=0.0, y=-135.0),
        ),
    ),
    # Right leg 50 mm ahead of the body frame, left foot 200 mm behind.
    "staggered": dict(
        base_xyz=(-75.0, 0.0, 870.0),
        feet=dict(
            left=FootPlacement(x=-200.0, y=135.0),
            right=FootPlacement(x=50.0, y=-135.0),
        ),
    ),
    # Wide, slightly staggered squat: lowers the trunk and centres the
    # composite CoM inside an enlarged support polygon.
    "crouched": dict(
        base_xyz=(0.0, 0.0, 680.0),
        feet=dict(
            left=FootPlacement(x=-55.0, y=165.0),
            right=FootPlacement(x=145.0, y=-165.0),
        ),
    ),
    # Right foot directly below the rest-pose CoM, left foot raised 50 mm.
    "one_legged": dict(
        base_xyz=(0.0, 0.0, 880.0),
        feet=dict(
            left=FootPlacement(x=0.0, y=165.0, contact=False, raise_mm=50.0),
            right=FootPlacement(x=45.0, y=0.0),
        ),
    ),
}


def stance_preset(name: str) -> Stance:
    if name not in _STANCE_PRESETS:
        raise ValueError(f"unknown stance preset {name!r}; options: {sorted(_STANCE_PRESETS)}")
    spec = _STANCE_PRESETS[name]
    return Stance(name=name, preset=name, feet=dict(spec["feet"]), base_xyz=spec["base_xyz"])


def custom_stance(feet: dict[str, FootPlacement], base_xyz, base_yaw=0.0, name="custom") -> Stance:
    return Stance(name=name, preset="custom", feet=dict(feet), base_xyz=tuple(base_xyz), base_yaw=base_yaw)


LEG_RADIUS = 60.0


def pose_with_stance(model: RobotModel, stance: Stance) -> RobotModel:
    """Rebuild rigid leg/foot link origins so the feet sit at the stance poses."""
    base = stance.base_pose()
    updates: dict[str, Link] = {}
    for side, foot_spec in model.feet.items():
        if side not in stance.feet:
            continue
        fp = stance.feet[side]
        foot_link = model.link(foot_spec.link)
        leg_link = model.link(foot_link.parent)
        hip_local = leg_link.origin.translation
        hip_world = base.apply(hip_local)
        sole_world = np.array([fp.x, fp.y, fp.raise_mm])
        sole_in_leg = base.rotation.T @ (sole_world - hip_world)
        leg_top = np.zeros(3)
        leg_bottom = sole_in_leg + np.array([0.0, 0.0, 80.0])
        updates[leg_link.name] = replace(
            leg_link,
            origin=Transform(np.eye(3), hip_local, check=False),
            local_com=tuple((leg_top + leg_bottom) / 2.0),
            collision=Capsule(tuple(leg_top), tuple(leg_bottom), LEG_RADIUS),
        )
        foot_rot = Transform.rot_z(fp.yaw - stance.base_yaw)
        updates[foot_link.name] = replace(
            foot_link,
            origin=Transform(foot_rot.rotation, sole_in_leg, check=False),
        )
    return model.replace_links(updates)


def rest_configuration(model: RobotModel, stance: Stance) -> Configuration:
    values = {name: 0.0 for name in model.revolute_joints()}
    values.update(model.rest_pose)
    values.update(stance.leg_joint_values)
    return Configuration(base_pose=stance.base_pose(), joint_values=values)


def foot_contact_corners(model: RobotModel, stance: Stance) -> list[Point2]:
    """Ground-plane corners of every contacting foot (z within 1e-6 of 0)."""
    corners: list[Point2] = []
    for side, foot_spec in model.feet.items():
        fp = stance.feet.get(side)
        if fp is None or not fp.contact:
            continue
        pose = Transform.rot_z(fp.yaw, (fp.x, fp.y, fp.raise_mm))
        for c in foot_spec.corners:
            w = pose.apply(c)
            if abs(w[2]) <= 1e-6:
                corners.append(Point2(float(w[0]), float(w[1])))
    return corners


# ---------------------------------------------------------------------------
# Whole-scene collision query
# ---------------------------------------------------------------------------

def _link_world_primitives(model: RobotModel, world) -> dict[str, CollisionPrimitive]:
    out = {}
    for link in model.links:
        if link.collision is not None:
            out[link.name] = link.collision.transformed(world[link.name])
    return out


def _excluded(model: RobotModel, a: str, b: str) -> bool:
    la, lb = model.link(a), model.link(b)
    if la.parent == b or lb.parent == a:
        return True
    return frozenset((a, b)) in model.collision_exclude


def collide(
    model: RobotModel,
    q: Configuration,
    obj: ObjectModel | None = None,
    obj_pose: Transform | None = None,
    environment: Environment | None = None,
    world: dict[str, Transform] | None = None,
) -> bool:
    """True iff any checked primitive pair interpenetrates.

    Checked pairs: non-adjacent link pairs, links vs object, links vs
    environment, object vs environment. Hand links get the grasp clearance
    shell against the object; everything else uses the contact epsilon.
    """
    if world is None:
        world = forward_kinematics(model, q)
    link_prims = _link_world_primitives(model, world)
    names = list(link_prims)
    hands = {model.hand_link("left"), model.hand_link("right")}
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            if _excluded(model, a, b):
                continue
            if primitives_collide(link_prims[a], link_prims[b]):
                return True
    obj_prims = obj.world_primitives(obj_pose) if obj is not None and obj_pose is not None else []
    for name in names:
        clearance = HAND_OBJECT_CLEARANCE if name in hands else CONTACT_EPS
        for p in obj_prims:
            if primitives_collide(link_prims[name], p, clearance):
                return True
    env_prims = environment.collision_primitives() if environment is not None else []
    for name in names:
        for p in env_prims:
            if primitives_collide(link_prims[name], p):
                return True
    for op in obj_prims:
        for ep in env_prims:
            if primitives_collide(op, ep):
                return True
    return False
