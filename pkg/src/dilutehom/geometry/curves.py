"""
Smooth closed curves and model holes with periodic trapezoidal quadrature.

A curve is stored through its values on ``n`` equispaced parameter nodes in
[0, 2π). Normals point out of the enclosed region, i.e. out of the hole.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.signal

from ..core.errors import DomainError, GeometryError


logger = logging.getLogger("dilutehom.geometry")

CELL_RADIUS = 1.0 / 3.0
MAX_COMPONENTS = 8


@dataclass(frozen=True)
class EllipseRadial:
    """Radial description r(θ) of an origin-centred ellipse (circle if a == b)."""
    a: float
    b: float
    rotation: float = 0.0

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        s = np.asarray(theta, dtype=float) - self.rotation
        return self.a * self.b / np.hypot(self.b * np.cos(s), self.a * np.sin(s))

    def rotated(self, phi: float) -> "EllipseRadial":
        return EllipseRadial(self.a, self.b, self.rotation + phi)

    def scaled(self, s: float) -> "EllipseRadial":
        return EllipseRadial(self.a * s, self.b * s, self.rotation)


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Quadrature-ready parametrized smooth closed curve."""
    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    speeds: np.ndarray
    weights: np.ndarray
    curvature: np.ndarray
    radial: Optional[EllipseRadial] = field(default=None, repr=False)

    def __post_init__(self):
        n = self.points.shape[0]
        if n < 4 or n % 2:
            raise GeometryError(f"n_nodes must be a positive even integer, got {n}")

    @classmethod
    def from_derivatives(
        cls,
        z: np.ndarray,
        dz: np.ndarray,
        ddz: np.ndarray,
        radial: Optional[EllipseRadial] = None,
    ) -> "ClosedCurve":
        """
        Build a curve from complex positions and parameter derivatives.

        Args:
            z: Node positions x + iy.
            dz: First derivative with respect to the parameter.
            ddz: Second derivative with respect to the parameter.
            radial: Optional analytic radial description.
        """
        n = z.shape[0]
        speed = np.abs(dz)
        tangent = dz / speed
        normal = -1j * tangent
        curvature = -(np.conj(ddz) * normal).real / speed**2
        dt = 2.0 * np.pi / n
        return cls(
            points=np.column_stack([z.real, z.imag]),
            tangents=np.column_stack([tangent.real, tangent.imag]),
            normals=np.column_stack([normal.real, normal.imag]),
            speeds=speed,
            weights=dt * speed,
            curvature=curvature,
            radial=radial,
        )

    @classmethod
    def from_points(
        cls, points: np.ndarray, radial: Optional[EllipseRadial] = None
    ) -> "ClosedCurve":
        """Build a curve from node coordinates by spectral differentiation."""
        points = np.asarray(points, dtype=float)
        z = points[:, 0] + 1j * points[:, 1]
        n = z.shape[0]
        ik = 1j * np.fft.fftfreq(n, 1.0 / n)
        zhat = np.fft.fft(z)
        dz = np.fft.ifft(zhat * ik)
        ddz = np.fft.ifft(zhat * ik**2)
        return cls.from_derivatives(z, dz, ddz, radial)

    @property
    def n_nodes(self) -> int:
        return self.points.shape[0]

    @property
    def params(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * np.pi, self.n_nodes, endpoint=False)

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 0] + 1j * self.points[:, 1]

    @property
    def dz(self) -> np.ndarray:
        """Complex tangent scaled by the speed (dz/dt)."""
        return (self.tangents[:, 0] + 1j * self.tangents[:, 1]) * self.speeds

    @property
    def area(self) -> float:
        """Enclosed area, ½∮ x·N ds."""
        return 0.5 * float(np.sum(self.weights * np.sum(self.points * self.normals, axis=1)))

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.weights))

    @property
    def node_spacing(self) -> float:
        return float(np.max(self.weights))

    def resampled(self, n_nodes: int) -> "ClosedCurve":
        """Trigonometric interpolation of the curve onto ``n_nodes`` nodes."""
        if n_nodes == self.n_nodes:
            return self
        z = scipy.signal.resample(self.z, n_nodes)
        return ClosedCurve.from_points(np.column_stack([z.real, z.imag]), self.radial)

    def rotated(self, phi: float) -> "ClosedCurve":
        rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        return replace(
            self,
            points=self.points @ rot.T,
            tangents=self.tangents @ rot.T,
            normals=self.normals @ rot.T,
            radial=self.radial.rotated(phi) if self.radial else None,
        )

    def scaled(self, s: float) -> "ClosedCurve":
        return replace(
            self,
            points=self.points * s,
            speeds=self.speeds * s,
            weights=self.weights * s,
            curvature=self.curvature / s,
            radial=self.radial.scaled(s) if self.radial else None,
        )

    def translated(self, center: Sequence[float]) -> "ClosedCurve":
        return replace(self, points=self.points + np.asarray(center, dtype=float), radial=None)

    def with_weight_perturbation(self, delta: float) -> "ClosedCurve":
        """Debug hook: multiply the first quadrature weight by (1 + delta)."""
        weights = self.weights.copy()
        weights[0] *= 1.0 + delta
        return replace(self, weights=weights)

    def winding_number(self, point: Sequence[float]) -> int:
        """Winding number of the polygon through the nodes around ``point``."""
        d = self.z - complex(point[0], point[1])
        turns = np.angle(np.roll(d, -1) / d)
        return int(np.rint(np.sum(turns) / (2.0 * np.pi)))


def make_ellipse(
    a: float,
    b: float,
    center: Sequence[float] = (0.0, 0.0),
    rotation: float = 0.0,
    n_nodes: int = 128,
    contained: bool = True,
) -> ClosedCurve:
    """
    Exact ellipse parametrization x(t) = c + Rot(rotation)(a cos t, b sin t).

    Args:
        a: Semi-axis along the rotated first direction.
        b: Semi-axis along the rotated second direction.
        center: Centre of the ellipse.
        rotation: Rotation angle in radians.
        n_nodes: Even number of quadrature nodes.
        contained: Enforce the cell assumption T ⊂ B_{1/3}.

    Raises:
        GeometryError: Non-positive axes or containment violation.
    """
    if a <= 0 or b <= 0:
        raise GeometryError(f"ellipse axes must be positive, got a={a}, b={b}")
    if n_nodes < 4 or n_nodes % 2:
        raise GeometryError(f"n_nodes must be a positive even integer, got {n_nodes}")
    c = complex(center[0], center[1])
    t = np.linspace(0.0, 2.0 * np.pi, n_nodes, endpoint=False)
    rot = np.exp(1j * rotation)
    z = c + rot * (a * np.cos(t) + 1j * b * np.sin(t))
    dz = rot * (-a * np.sin(t) + 1j * b * np.cos(t))
    ddz = rot * (-a * np.cos(t) - 1j * b * np.sin(t))
    radial = EllipseRadial(a, b, rotation) if c == 0 else None
    curve = ClosedCurve.from_derivatives(z, dz, ddz, radial)
    if contained:
        _check_containment(curve, f"ellipse ({a}, {b}) at {tuple(center)}")
    return curve


def make_circle(
    radius: float,
    center: Sequence[float] = (0.0, 0.0),
    n_nodes: int = 128,
    contained: bool = True,
) -> ClosedCurve:
    """Exact circle; the degenerate ellipse with equal axes."""
    if radius <= 0:
        raise GeometryError(f"circle radius must be positive, got {radius}")
    return make_ellipse(radius, radius, center, 0.0, n_nodes, contained)


def _check_containment(curve: ClosedCurve, what: str) -> None:
    reach = float(np.max(np.hypot(curve.points[:, 0], curve.points[:, 1])))
    if reach >= CELL_RADIUS:
        raise GeometryError(
            f"{what} violates T ⊂ B_{{1/3}} (hole containment assumption): "
            f"reaches |x| = {reach:.6g}"
        )


def boundary_integral(curve, values: Sequence[float]) -> float:
    """
    Weighted trapezoidal rule Σ w_i v_i ≈ ∫ v ds.

    Args:
        curve: A ClosedCurve or a HoleShape.
        values: One value per quadrature node.
    """
    values = np.asarray(values, dtype=float)
    weights = curve.weights
    if values.shape[0] != weights.shape[0]:
        raise DomainError(
            f"boundary_integral expected {weights.shape[0]} values, got {values.shape[0]}"
        )
    return float(np.dot(weights, values))


@dataclass(frozen=True, eq=False)
class HoleShape:
    """Model hole T: a union of disjoint smooth closed curves (or a sphere tag)."""
    components: Tuple[ClosedCurve, ...]
    dim: int = 2
    label: str = "custom"
    sphere_radius: Optional[float] = None
    cell_scale: bool = True

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.dim == 3:
            if self.sphere_radius is None or not 0 < self.sphere_radius < CELL_RADIUS:
                raise GeometryError(
                    f"sphere radius {self.sphere_radius} violates T ⊂ B_{{1/3}} "
                    "(hole containment assumption)"
                )
            return
        if self.dim != 2:
            raise GeometryError(f"unsupported dimension {self.dim}")
        if not self.components:
            raise GeometryError("a hole shape needs at least one component")
        if len(self.components) > MAX_COMPONENTS:
            raise GeometryError(
                f"at most {MAX_COMPONENTS} components per cell, got {len(self.components)}"
            )
        for curve in self.components:
            if curve.area <= 0:
                raise GeometryError("component is clockwise or degenerate (area <= 0)")
            if self.cell_scale:
                _check_containment(curve, f"component of {self.label}")
        self._check_disjoint()

    def _check_disjoint(self) -> None:
        comps = self.components
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                a, b = comps[i], comps[j]
                gap = np.min(
                    np.linalg.norm(a.points[:, None, :] - b.points[None, :, :], axis=2)
                )
                if gap <= 0 or b.winding_number(a.points[0]) or a.winding_number(b.points[0]):
                    raise GeometryError(f"components {i} and {j} of {self.label} overlap")

    @cached_property
    def points(self) -> np.ndarray:
        return np.concatenate([c.points for c in self.components])

    @cached_property
    def normals(self) -> np.ndarray:
        return np.concatenate([c.normals for c in self.components])

    @cached_property
    def tangents(self) -> np.ndarray:
        return np.concatenate([c.tangents for c in self.components])

    @cached_property
    def weights(self) -> np.ndarray:
        return np.concatenate([c.weights for c in self.components])

    @cached_property
    def speeds(self) -> np.ndarray:
        return np.concatenate([c.speeds for c in self.components])

    @cached_property
    def curvature(self) -> np.ndarray:
        return np.concatenate([c.curvature for c in self.components])

    @cached_property
    def slices(self) -> List[slice]:
        out, start = [], 0
        for c in self.components:
            out.append(slice(start, start + c.n_nodes))
            start += c.n_nodes
        return out

    @property
    def n_nodes(self) -> int:
        return int(sum(c.n_nodes for c in self.components))

    @property
    def area(self) -> float:
        """|T|: enclosed area in 2D, volume of the ball for the sphere tag."""
        if self.dim == 3:
            return 4.0 * np.pi * self.sphere_radius**3 / 3.0
        return float(sum(c.area for c in self.components))

    @property
    def perimeter(self) -> float:
        if self.dim == 3:
            return 4.0 * np.pi * self.sphere_radius**2
        return float(sum(c.perimeter for c in self.components))

    @property
    def node_spacing(self) -> float:
        return max(c.node_spacing for c in self.components)

    @property
    def diameter(self) -> float:
        p = self.points
        return float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)))

    @property
    def radial_function(self) -> Optional[EllipseRadial]:
        """r(θ) when T is a single component star-shaped about the origin."""
        if self.dim == 2 and len(self.components) == 1:
            return self.components[0].radial
        return None

    def _map(self, fn, label: str, cell_scale: bool) -> "HoleShape":
        return HoleShape(
            components=tuple(fn(c) for c in self.components),
            dim=self.dim,
            label=label,
            cell_scale=cell_scale,
        )

    def rotated(self, phi: float) -> "HoleShape":
        return self._map(lambda c: c.rotated(phi), f"{self.label}@rot{phi:g}", self.cell_scale)

    def scaled(self, s: float) -> "HoleShape":
        return self._map(lambda c: c.scaled(s), f"{self.label}*{s:g}", False)

    def translated(self, center: Sequence[float]) -> "HoleShape":
        return self._map(lambda c: c.translated(center), self.label, False)

    def resampled(self, factor: int) -> "HoleShape":
        return self._map(lambda c: c.resampled(c.n_nodes * factor), self.label, False)

    def with_nodes(self, n_nodes: int) -> "HoleShape":
        """Every component resampled onto ``n_nodes`` nodes."""
        return self._map(lambda c: c.resampled(n_nodes), self.label, self.cell_scale)

    def with_weight_perturbation(self, delta: float) -> "HoleShape":
        first = self.components[0].with_weight_perturbation(delta)
        return HoleShape(
            components=(first,) + self.components[1:],
            dim=self.dim,
            label=self.label,
            cell_scale=self.cell_scale,
        )


def make_sphere(radius: float) -> HoleShape:
    """Analytic d = 3 ball tag; carries no quadrature nodes."""
    return HoleShape(components=(), dim=3, label=f"sphere:{radius:g}", sphere_radius=radius)


def _parse_center(text: str) -> Tuple[float, float]:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise GeometryError(f"center must be 'x,y', got {text!r}")
    if len(parts) != 2:
        raise GeometryError(f"center must be 'x,y', got {text!r}")
    return parts[0], parts[1]


def _parse_component(spec: str, n_nodes: int) -> ClosedCurve:
    body, _, center_text = spec.partition("@")
    center = _parse_center(center_text) if center_text else (0.0, 0.0)
    kind, _, params = body.partition(":")
    try:
        values = [float(p) for p in params.split(",") if p.strip()]
    except ValueError:
        raise GeometryError(f"malformed shape parameters in {spec!r}")
    kind = kind.strip().lower()
    if kind == "circle" and len(values) == 1:
        return make_circle(values[0], center, n_nodes)
    if kind == "ellipse" and len(values) in (2, 3):
        rotation = values[2] if len(values) == 3 else 0.0
        return make_ellipse(values[0], values[1], center, rotation, n_nodes)
    raise GeometryError(f"unknown shape component {spec!r}")


def parse_shape(spec: str, n_nodes: int = 128) -> HoleShape:
    """
    Parse a shape specification.

    Grammar: ``circle:R[@X,Y]``, ``ellipse:A,B[,ROT][@X,Y]``,
    ``multi:<component>;<component>...`` and ``sphere:R``.

    Raises:
        GeometryError: Malformed specification or violated assumption.
    """
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind == "sphere":
        try:
            radius = float(rest)
        except ValueError:
            raise GeometryError(f"malformed sphere radius in {spec!r}")
        return make_sphere(radius)
    if kind == "multi":
        parts = [p for p in rest.split(";") if p.strip()]
        components = tuple(_parse_component(p, n_nodes) for p in parts)
    else:
        components = (_parse_component(spec, n_nodes),)
    shape = HoleShape(components=components, label=spec)
    logger.debug(f"Parsed shape {spec!r}: {len(components)} component(s), |T| = {shape.area:.6g}")
    return shape


def circle_shape(radius: float = 0.25, n_nodes: int = 128) -> HoleShape:
    """Single origin-centred circle as a HoleShape."""
    return HoleShape(components=(make_circle(radius, n_nodes=n_nodes),), label=f"circle:{radius:g}")
