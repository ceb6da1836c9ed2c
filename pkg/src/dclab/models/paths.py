"""Models for piecewise-smooth loops in the punctured z-plane."""
import math
from typing import List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dclab.core.errors import InvariantViolation

GAP_TOL = 1e-12


class CircleArc(BaseModel):
    """Arc of the circle center + radius * exp(i theta), theta from start to end."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["arc"] = "arc"
    center: complex = Field(description="Circle center")
    radius: float = Field(gt=0.0, description="Circle radius")
    theta_start: float = Field(description="Start angle")
    theta_end: float = Field(description="End angle; above theta_start means counterclockwise")

    @property
    def sweep(self) -> float:
        """Signed swept angle."""
        return self.theta_end - self.theta_start

    @property
    def is_full_circle(self) -> bool:
        """Whether the arc is one full turn."""
        return abs(abs(self.sweep) - 2 * math.pi) < 1e-14

    @property
    def start(self) -> complex:
        """First point."""
        return complex(self.point(np.array([0.0]))[0])

    @property
    def end(self) -> complex:
        """Last point."""
        return complex(self.point(np.array([1.0]))[0])

    def point(self, t: np.ndarray) -> np.ndarray:
        """Points at parameters t in [0, 1]."""
        theta = self.theta_start + self.sweep * np.asarray(t, dtype=float)
        return self.center + self.radius * np.exp(1j * theta)

    def velocity(self, t: np.ndarray) -> np.ndarray:
        """dz/dt at parameters t in [0, 1]."""
        theta = self.theta_start + self.sweep * np.asarray(t, dtype=float)
        return 1j * self.sweep * self.radius * np.exp(1j * theta)

    def reversed(self) -> "CircleArc":
        """Same arc traversed backwards."""
        return CircleArc(
            center=self.center,
            radius=self.radius,
            theta_start=self.theta_end,
            theta_end=self.theta_start,
        )

    def distance_to(self, p: complex) -> float:
        """Distance from a point to the arc."""
        rel = p - self.center
        if self.is_full_circle or rel == 0:
            return abs(abs(rel) - self.radius)
        angle = math.atan2(rel.imag, rel.real)
        if self.sweep > 0:
            delta = (angle - self.theta_start) % (2 * math.pi)
        else:
            delta = (self.theta_start - angle) % (2 * math.pi)
        if delta <= abs(self.sweep):
            return abs(abs(rel) - self.radius)
        return min(abs(p - self.start), abs(p - self.end))


class LineSegment(BaseModel):
    """Straight segment from start to end."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["line"] = "line"
    start: complex = Field(description="First point")
    end: complex = Field(description="Last point")

    def point(self, t: np.ndarray) -> np.ndarray:
        """Points at parameters t in [0, 1]."""
        return self.start + (self.end - self.start) * np.asarray(t, dtype=float)

    def velocity(self, t: np.ndarray) -> np.ndarray:
        """dz/dt at parameters t in [0, 1]."""
        return np.full(np.shape(t), self.end - self.start, dtype=complex)

    def reversed(self) -> "LineSegment":
        """Same segment traversed backwards."""
        return LineSegment(start=self.end, end=self.start)

    def distance_to(self, p: complex) -> float:
        """Distance from a point to the segment."""
        d = self.end - self.start
        if d == 0:
            return abs(p - self.start)
        s = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        s = min(1.0, max(0.0, s))
        return abs(p - (self.start + s * d))


Segment = Union[CircleArc, LineSegment]


class PathLoop(BaseModel):
    """An oriented closed path made of arcs and segments, based at ``basepoint``."""
    model_config = ConfigDict(frozen=True)

    segments: Tuple[Segment, ...] = Field(description="Ordered smooth pieces")
    basepoint: complex = Field(description="Start and end point")
    label: str = Field(default="", description="Human readable name")

    @model_validator(mode="after")
    def check_closed(self) -> "PathLoop":
        """Check that the pieces chain up and close at the basepoint."""
        if not self.segments:
            raise InvariantViolation("a loop needs at least one segment")
        if abs(self.segments[0].start - self.basepoint) > GAP_TOL * max(1.0, abs(self.basepoint)):
            raise InvariantViolation("loop does not start at its basepoint")
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if abs(prev.end - nxt.start) > GAP_TOL * max(1.0, abs(prev.end)):
                raise InvariantViolation(f"gap between segments at {prev.end} and {nxt.start}")
        if abs(self.segments[-1].end - self.basepoint) > GAP_TOL * max(1.0, abs(self.basepoint)):
            raise InvariantViolation("loop is not closed")
        return self

    def reversed(self) -> "PathLoop":
        """The inverse loop."""
        return PathLoop(
            segments=tuple(s.reversed() for s in reversed(self.segments)),
            basepoint=self.basepoint,
            label=f"({self.label})^-1" if self.label else "",
        )

    def concatenated(self, other: "PathLoop") -> "PathLoop":
        """This loop followed by another one with the same basepoint."""
        if abs(self.basepoint - other.basepoint) > GAP_TOL * max(1.0, abs(self.basepoint)):
            raise InvariantViolation("loops must share the basepoint to be concatenated")
        return PathLoop(
            segments=self.segments + other.segments,
            basepoint=self.basepoint,
            label=f"{self.label}.{other.label}",
        )

    def distance_to(self, p: complex) -> float:
        """Distance from a point to the loop."""
        return min(s.distance_to(p) for s in self.segments)

    def sample(self, points_per_segment: int) -> np.ndarray:
        """Polygonal sample of the loop, closing point included."""
        t = np.linspace(0.0, 1.0, points_per_segment, endpoint=False)
        pieces: List[np.ndarray] = [s.point(t) for s in self.segments]
        pieces.append(np.array([self.basepoint]))
        return np.concatenate(pieces)
