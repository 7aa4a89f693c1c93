"""Static stability of the robot-object system.

The composite CoM is the mass-weighted combination of the robot CoM and the
held object CoM; a state is stable when the vertical ground projection of the
composite CoM lies inside the support polygon with at least the threshold
margin. Projection is along world -z and the ground plane is z = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput
from .geometry import ConvexPolygon, Point2, contains, convex_hull, signed_margin
from .kinematics import Configuration, RobotModel, Transform, forward_kinematics, robot_com
from .scene import Grasp, ObjectModel, Stance, foot_contact_corners


@dataclass(frozen=True)
class Hold:
    """One hand attached to the object via a grasp."""

    hand: str
    grasp: Grasp


@dataclass(frozen=True)
class SystemState:
    """Robot configuration plus object attachment and world pose.

    When held, the object pose equals the holding hand's world pose composed
    with the grasp; the from_holds constructor enforces that consistency.
    """

    q: Configuration
    holds: tuple[Hold, ...] = ()
    object_pose: Transform | None = None

    @staticmethod
    def from_holds(
        model: RobotModel,
        q: Configuration,
        holds: tuple[Hold, ...],
        world: dict[str, Transform] | None = None,
    ) -> "SystemState":
        if not holds:
            return SystemState(q=q, holds=(), object_pose=None)
        if world is None:
            world = forward_kinematics(model, q)
        first = holds[0]
        pose = first.grasp.object_pose(world[model.hand_link(first.hand)])
        for hold in holds[1:]:
            other = hold.grasp.object_pose(world[model.hand_link(hold.hand)])
            if not pose.almost_equal(other, pos_tol=2.0, rot_tol=0.02):
                raise ValueError("hands disagree about the held object pose")
        return SystemState(q=q, holds=tuple(holds), object_pose=pose)

    @staticmethod
    def placed(q: Configuration, pose: Transform) -> "SystemState":
        return SystemState(q=q, holds=(), object_pose=pose)

    @property
    def held(self) -> bool:
        return bool(self.holds)


@dataclass(frozen=True)
class StabilityVerdict:
    com_world: tuple[float, float, float]
    projection: Point2
    margin: float
    stable: bool
    threshold: float


def composite_com(
    model: RobotModel,
    q: Configuration,
    obj: ObjectModel | None,
    object_pose: Transform | None = None,
    world: dict[str, Transform] | None = None,
) -> np.ndarray:
    """Mass-weighted CoM of robot plus (optionally) the held object, mm."""
    if world is None:
        gamma_robot = robot_com(model, q)
    else:
        acc = np.zeros(3)
        for link in model.links:
            acc += link.mass * world[link.name].apply(link.local_com)
        gamma_robot = acc / model.total_mass
    if obj is None or obj.mass == 0.0:
        return gamma_robot
    if object_pose is None:
        raise ValueError("object present but no pose given")
    gamma_object = obj.com_world(object_pose)
    m_robot = model.total_mass
    return (m_robot * gamma_robot + obj.mass * gamma_object) / (m_robot + obj.mass)


def support_polygon(model: RobotModel, stance: Stance) -> ConvexPolygon:
    """Convex hull of the ground-projected contact corners of contacting feet."""
    corners = foot_contact_corners(model, stance)
    if not corners:
        raise DegenerateInput("stance has no foot contact corners on the ground plane")
    return convex_hull(corners)


def check_state(
    state: SystemState,
    model: RobotModel,
    obj: ObjectModel | None,
    polygon: ConvexPolygon,
    threshold: float,
    world: dict[str, Transform] | None = None,
) -> StabilityVerdict:
    """Stability verdict for one system state at the given margin threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    effective_obj = obj if state.held else None
    com = composite_com(model, state.q, effective_obj, state.object_pose, world=world)
    projection = Point2(float(com[0]), float(com[1]))
    margin = signed_margin(polygon, projection)
    stable = contains(polygon, projection) and margin >= threshold
    return StabilityVerdict(
        com_world=(float(com[0]), float(com[1]), float(com[2])),
        projection=projection,
        margin=float(margin),
        stable=bool(stable),
        threshold=float(threshold),
    )
