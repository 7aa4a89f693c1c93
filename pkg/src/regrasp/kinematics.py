"""Rigid-body kinematic tree with link masses: FK, per-link CoMs, and DLS IK.

Units: millimetres, kilograms, radians. A robot model is loaded from a JSON
file (schema in README) and is immutable; all operations are pure functions
of (model, configuration).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import IkInfeasible, JointOutOfLimits, MissingFile, ParseError

ROT_TOL = 1e-9

# IK parameters: damped least-squares on the stacked 6D pose error.
IK_DAMPING = 0.05
IK_STEP_CAP = 0.2          # rad per joint per iteration
IK_BUDGET = 300            # iterations per target
IK_POS_TOL = 0.5           # mm   (half the 1 mm contract, for re-check headroom)
IK_ROT_TOL = 0.005         # rad

# Deterministic restart points (unit-box coordinates, mapped to joint ranges)
# used when the solver stalls in a local minimum.
_RESTART_RNG = np.random.default_rng(0x5EED)
_RESTART_POINTS = _RESTART_RNG.random(size=(24, 32))


class Transform:
    """Rotation (3x3, det +1) plus translation (mm). Immutable."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation, check: bool = True):
        r = np.asarray(rotation, dtype=float).reshape(3, 3)
        t = np.asarray(translation, dtype=float).reshape(3)
        if check:
            if not np.allclose(r @ r.T, np.eye(3), atol=1e-7):
                raise ValueError("rotation is not orthonormal")
            if abs(np.linalg.det(r) - 1.0) > 1e-7:
                raise ValueError("rotation determinant is not +1")
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def __setattr__(self, *_):
        raise AttributeError("Transform is immutable")

    @staticmethod
    def identity() -> "Transform":
        return Transform(np.eye(3), np.zeros(3), check=False)

    @staticmethod
    def from_rpy(xyz, rpy) -> "Transform":
        return Transform(rotation_rpy(*rpy), xyz, check=False)

    @staticmethod
    def rot_z(angle: float, xyz=(0.0, 0.0, 0.0)) -> "Transform":
        c, s = math.cos(angle), math.sin(angle)
        return Transform([[c, -s, 0], [s, c, 0], [0, 0, 1]], xyz, check=False)

    def compose(self, other: "Transform") -> "Transform":
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
            check=False,
        )

    def apply(self, point) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=float) + self.translation

    def inverse(self) -> "Transform":
        rt = self.rotation.T
        return Transform(rt, -(rt @ self.translation), check=False)

    def almost_equal(self, other: "Transform", pos_tol=1e-6, rot_tol=1e-9) -> bool:
        return (
            np.allclose(self.translation, other.translation, atol=pos_tol)
            and np.allclose(self.rotation, other.rotation, atol=max(rot_tol, 1e-9))
        )

    def __repr__(self):
        return f"Transform(t={self.translation.round(3).tolist()})"


def rotation_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return rz @ ry @ rx


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    kx, ky, kz = axis
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def rotation_log(r: np.ndarray) -> np.ndarray:
    """Axis-angle vector of a rotation matrix (magnitude = angle)."""
    cos_a = max(-1.0, min(1.0, (np.trace(r) - 1.0) / 2.0))
    angle = math.acos(cos_a)
    if angle < 1e-12:
        return np.zeros(3)
    if angle > math.pi - 1e-6:
        # Near pi: extract the axis from the symmetric part.
        m = (r + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diag(m), 0.0))
        signs = np.sign([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        signs[signs == 0] = 1.0
        axis = axis * signs
        n = np.linalg.norm(axis)
        if n < 1e-12:
            axis = np.array([1.0, 0.0, 0.0])
            n = 1.0
        return angle * axis / n
    vec = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    return angle / (2.0 * math.sin(angle)) * vec


@dataclass(frozen=True)
class Link:
    name: str
    parent: str | None
    origin: Transform                  # parent frame -> joint frame
    axis: tuple[float, float, float] | None = None   # None = fixed joint
    limits: tuple[float, float] | None = None        # radians, revolute only
    mass: float = 0.0
    local_com: tuple[float, float, float] = (0.0, 0.0, 0.0)
    collision: object | None = None    # scene.CollisionPrimitive, link frame

    @property
    def is_revolute(self) -> bool:
        return self.axis is not None


@dataclass(frozen=True)
class FootSpec:
    link: str
    corners: tuple[tuple[float, float, float], ...]   # 4 contact corners, link frame


@dataclass(frozen=True)
class RobotModel:
    name: str
    links: tuple[Link, ...]            # topological order, root first
    end_effectors: dict[str, str]      # {"left_hand": link, "right_hand": link}
    feet: dict[str, FootSpec]          # {"left": ..., "right": ...}
    rest_pose: dict[str, float] = field(default_factory=dict)
    collision_exclude: frozenset[frozenset[str]] = frozenset()

    def __post_init__(self):
        index = {l.name: l for l in self.links}
        if len(index) != len(self.links):
            raise ValueError("duplicate link names")
        roots = [l for l in self.links if l.parent is None]
        if len(roots) != 1:
            raise ValueError("link graph must have exactly one root")
        for l in self.links:
            if l.parent is not None and l.parent not in index:
                raise ValueError(f"link '{l.name}' has unknown parent '{l.parent}'")
            if l.mass < 0:
                raise ValueError(f"link '{l.name}' has negative mass")
            if l.is_revolute:
                n = math.sqrt(sum(a * a for a in l.axis))
                if abs(n - 1.0) > 1e-9:
                    raise ValueError(f"link '{l.name}' axis is not unit length")
                lo, hi = l.limits
                if lo > hi:
                    raise ValueError(f"link '{l.name}' has inverted limits")
        for hand in ("left_hand", "right_hand"):
            if self.end_effectors.get(hand) not in index:
                raise ValueError(f"end effector '{hand}' does not resolve to a link")
        for side in ("left", "right"):
            if side in self.feet and self.feet[side].link not in index:
                raise ValueError(f"foot '{side}' does not resolve to a link")
        if self.total_mass <= 0:
            raise ValueError("total mass must be positive")
        object.__setattr__(self, "_index", index)

    @property
    def total_mass(self) -> float:
        return sum(l.mass for l in self.links)

    def link(self, name: str) -> Link:
        return self._index[name]

    def revolute_joints(self) -> list[str]:
        return [l.name for l in self.links if l.is_revolute]

    def chain_to(self, link_name: str) -> list[str]:
        """Revolute joint names on the path root -> link_name, root side first."""
        out = []
        cur = self._index[link_name]
        while cur is not None:
            if cur.is_revolute:
                out.append(cur.name)
            cur = self._index[cur.parent] if cur.parent else None
        return list(reversed(out))

    def hand_link(self, hand: str) -> str:
        return self.end_effectors[f"{hand}_hand"]

    def replace_links(self, new_links: dict[str, Link]) -> "RobotModel":
        links = tuple(new_links.get(l.name, l) for l in self.links)
        return replace(self, links=links)


@dataclass(frozen=True)
class Configuration:
    base_pose: Transform
    joint_values: dict[str, float]

    def with_values(self, updates: dict[str, float]) -> "Configuration":
        merged = dict(self.joint_values)
        merged.update(updates)
        return Configuration(self.base_pose, merged)


def check_limits(model: RobotModel, q: Configuration) -> None:
    for link in model.links:
        if link.is_revolute:
            v = q.joint_values.get(link.name, 0.0)
            lo, hi = link.limits
            if v < lo - 1e-9 or v > hi + 1e-9:
                raise JointOutOfLimits(link.name, v, lo, hi)


def forward_kinematics(model: RobotModel, q: Configuration) -> dict[str, Transform]:
    """World transform of every link; raises JointOutOfLimits on bad values."""
    check_limits(model, q)
    world: dict[str, Transform] = {}
    for link in model.links:
        parent = q.base_pose if link.parent is None else world[link.parent]
        local = parent.compose(link.origin)
        if link.is_revolute:
            angle = q.joint_values.get(link.name, 0.0)
            local = Transform(
                local.rotation @ rotation_about_axis(link.axis, angle),
                local.translation,
                check=False,
            )
        world[link.name] = local
    return world


def link_coms_world(model: RobotModel, q: Configuration) -> list[tuple[float, np.ndarray]]:
    """(mass, world CoM) for every link, in model order."""
    world = forward_kinematics(model, q)
    return [(l.mass, world[l.name].apply(l.local_com)) for l in model.links]


def robot_com(model: RobotModel, q: Configuration) -> np.ndarray:
    acc = np.zeros(3)
    for m, p in link_coms_world(model, q):
        acc += m * p
    return acc / model.total_mass


def pose_error(target: Transform, current: Transform) -> np.ndarray:
    """6-vector [position error mm; axis-angle of R_target R_current^T]."""
    e = np.empty(6)
    e[:3] = target.translation - current.translation
    e[3:] = rotation_log(target.rotation @ current.rotation.T)
    return e


def _joint_frames(model, world, names):
    """World position and axis direction of each named revolute joint."""
    out = []
    for name in names:
        link = model.link(name)
        t = world[name]
        # The joint rotates about its axis expressed in the joint frame; the
        # frame in `world` already includes the joint rotation, which leaves
        # the axis direction unchanged.
        out.append((t.translation, t.rotation @ np.asarray(link.axis)))
    return out


def _stacked_jacobian(model, world, joint_names, task_links):
    rows = 6 * len(task_links)
    jac = np.zeros((rows, len(joint_names)))
    frames = _joint_frames(model, world, joint_names)
    chains = {link: set(model.chain_to(link)) for link in task_links}
    for ti, task_link in enumerate(task_links):
        p_task = world[task_link].translation
        for ji, name in enumerate(joint_names):
            if name not in chains[task_link]:
                continue
            p_j, axis = frames[ji]
            jac[6 * ti : 6 * ti + 3, ji] = np.cross(axis, p_task - p_j)
            jac[6 * ti + 3 : 6 * ti + 6, ji] = axis
    return jac


def _clamp_to_limits(model, names, values):
    out = {}
    for name, v in zip(names, values):
        lo, hi = model.link(name).limits
        out[name] = min(hi, max(lo, v))
    return out


def solve_ik_tasks(
    model: RobotModel,
    targets: dict[str, Transform],
    seed: Configuration,
    joint_names: list[str] | None = None,
    budget: int = IK_BUDGET,
) -> Configuration:
    """Damped least-squares IK over one or more (link -> target pose) tasks.

    Deterministic given (model, targets, seed). Joint limits are clamped at
    every step; the result always satisfies them. Raises IkInfeasible when the
    budget is exhausted without meeting the pose tolerances.
    """
    task_links = sorted(targets)
    if joint_names is None:
        joint_names = []
        for link in task_links:
            for j in model.chain_to(link):
                if j not in joint_names:
                    joint_names.append(j)
    check_limits(model, seed)
    q = seed.with_values({n: seed.joint_values.get(n, 0.0) for n in joint_names})
    n = len(joint_names)
    damping_sq = IK_DAMPING**2
    # Position is expressed in 100 mm units and rotation in radians so the
    # fixed damping and the weighted residual act on O(1) quantities. Each
    # attempt starts position-dominant and switches to the full 6D weighting
    # once the hand is close, which avoids orientation/position ridges.
    w_full = np.tile(np.array([0.01] * 3 + [1.0] * 3), len(task_links))
    w_pos = np.tile(np.array([0.01] * 3 + [0.05] * 3), len(task_links))
    w = w_pos

    def weighted_error(q_now):
        world = forward_kinematics(model, q_now)
        err = np.concatenate([pose_error(targets[l], world[l]) for l in task_links])
        return world, err, float(np.linalg.norm(err * w))

    restart = 0
    best_residual = np.inf
    stall = 0
    it = 0
    world, err, residual = weighted_error(q)
    while it < budget:
        it += 1
        pos_ok = all(
            np.linalg.norm(err[6 * i : 6 * i + 3]) <= IK_POS_TOL for i in range(len(task_links))
        )
        rot_ok = all(
            np.linalg.norm(err[6 * i + 3 : 6 * i + 6]) <= IK_ROT_TOL
            for i in range(len(task_links))
        )
        if pos_ok and rot_ok:
            return q
        if w is w_pos and pos_ok:
            w = w_full
            world, err, residual = weighted_error(q)
            best_residual = np.inf
            stall = 0
            continue
        if residual < best_residual - 1e-9:
            best_residual = residual
            stall = 0
        else:
            stall += 1
        if stall > 10:
            if w is w_pos:
                # Position phase converged as far as it will; switch weights.
                w = w_full
                world, err, residual = weighted_error(q)
                best_residual = np.inf
                stall = 0
                continue
            # Local minimum: deterministic restart scattered over the joint box.
            stall = 0
            unit = _RESTART_POINTS[restart % len(_RESTART_POINTS), :n]
            restart += 1
            vals = []
            for j, u in zip(joint_names, unit):
                lo, hi = model.link(j).limits
                vals.append(lo + u * (hi - lo))
            q = q.with_values(dict(zip(joint_names, vals)))
            w = w_pos
            world, err, residual = weighted_error(q)
            best_residual = np.inf
            continue
        jac = _stacked_jacobian(model, world, joint_names, task_links) * w[:, None]

        def try_step(j_mat):
            jjt = j_mat @ j_mat.T + damping_sq * np.eye(j_mat.shape[0])
            dq = j_mat.T @ np.linalg.solve(jjt, err * w)
            peak = np.abs(dq).max()
            if peak > IK_STEP_CAP:
                dq *= IK_STEP_CAP / peak
            # Backtracking keeps the weighted residual non-increasing per step.
            for _ in range(10):
                vals = [q.joint_values[j] + d for j, d in zip(joint_names, dq)]
                cand = q.with_values(_clamp_to_limits(model, joint_names, vals))
                cand_state = weighted_error(cand)
                if cand_state[2] < residual:
                    return cand, cand_state, dq
                dq = dq / 2.0
            return None

        accepted = try_step(jac)
        if accepted is None:
            # Active-set retry: joints pinned at a limit cannot contribute, so
            # drop their columns and re-solve once.
            saturated = []
            for ji, name in enumerate(joint_names):
                lo, hi = model.link(name).limits
                v = q.joint_values[name]
                if v <= lo + 1e-9 or v >= hi - 1e-9:
                    saturated.append(ji)
            if saturated and len(saturated) < n:
                jac_active = jac.copy()
                jac_active[:, saturated] = 0.0
                accepted = try_step(jac_active)
        if accepted is None:
            stall = 11  # genuinely stuck: force a restart next pass
            continue
        q, (world, err, residual), _ = accepted
    raise IkInfeasible(
        f"no solution for {task_links} within {budget} iterations "
        f"(best residual {best_residual:.3f})"
    )


def solve_ik(model: RobotModel, hand: str, target: Transform, seed: Configuration) -> Configuration:
    """IK for one hand ('left' or 'right'); see solve_ik_tasks for guarantees."""
    link = model.hand_link(hand)
    return solve_ik_tasks(model, {link: target}, seed)


def _parse_transform(node, path, where) -> Transform:
    xyz = node.get("xyz", [0.0, 0.0, 0.0])
    rpy = node.get("rpy", [0.0, 0.0, 0.0])
    if len(xyz) != 3 or len(rpy) != 3:
        raise ParseError(path, where, "xyz and rpy must have 3 entries")
    return Transform.from_rpy(xyz, rpy)


def load_robot_model(path) -> RobotModel:
    """Load and validate a robot model JSON file."""
    from . import scene  # collision primitives; deferred to avoid a cycle

    path = Path(path)
    if not path.exists():
        raise MissingFile(f"robot model file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(path, "-", f"invalid JSON: {exc}") from exc
    links = []
    for i, node in enumerate(raw.get("links", [])):
        where = f"links[{i}]"
        name = node.get("name")
        if not name:
            raise ParseError(path, where, "missing link name")
        joint = node.get("joint", {"type": "fixed"})
        axis = None
        limits = None
        if joint.get("type") == "revolute":
            axis = tuple(joint["axis"])
            limits = tuple(joint["limits"])
        elif joint.get("type") != "fixed":
            raise ParseError(path, f"{where}.joint", f"unknown joint type {joint.get('type')!r}")
        collision = None
        if node.get("collision") is not None:
            collision = scene.parse_primitive(node["collision"], path, f"{where}.collision")
        links.append(
            Link(
                name=name,
                parent=node.get("parent"),
                origin=_parse_transform(node.get("origin", {}), path, f"{where}.origin"),
                axis=axis,
                limits=limits,
                mass=float(node.get("mass", 0.0)),
                local_com=tuple(node.get("com", [0.0, 0.0, 0.0])),
                collision=collision,
            )
        )
    feet = {}
    for side, node in raw.get("feet", {}).items():
        corners = tuple(tuple(c) for c in node["corners"])
        if len(corners) != 4:
            raise ParseError(path, f"feet.{side}", "expected 4 contact corners")
        feet[side] = FootSpec(link=node["link"], corners=corners)
    exclude = frozenset(
        frozenset(pair) for pair in raw.get("collision_exclude", [])
    )
    try:
        return RobotModel(
            name=raw.get("name", path.stem),
            links=tuple(links),
            end_effectors=dict(raw.get("end_effectors", {})),
            feet=feet,
            rest_pose={k: float(v) for k, v in raw.get("rest_pose", {}).items()},
            collision_exclude=exclude,
        )
    except ValueError as exc:
        raise ParseError(path, "links", str(exc)) from exc
