"""Array and cell geometry: element coordinates, user drops, per-element distances.

The base station is a uniform linear array on the x-axis, centered at the
origin.  Element n sits at coordinate ``delta_n = n * spacing`` with n running
over the symmetric index set {-(N-1)/2, ..., (N-1)/2} (half-integer steps when
N is even).  Users live in a semi-annulus: distance r in [r_min, r_max] with
density 2r / (r_max^2 - r_min^2), azimuth uniform on (0, pi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ApertureError, ConfigError


def symmetric_indices(num_elements: int) -> np.ndarray:
    """Index set {-(N-1)/2, ..., (N-1)/2}; half-integers for even N."""
    return np.arange(num_elements) - (num_elements - 1) / 2.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count, spacing (m), element coordinates (m)."""

    num_elements: int
    spacing: float
    element_coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.num_elements < 1:
            raise ConfigError("num_elements must be >= 1")
        if self.spacing <= 0:
            raise ConfigError("spacing must be > 0")
        coords = np.asarray(self.element_coords, dtype=float)
        if coords.shape != (self.num_elements,):
            raise ConfigError("element_coords must have exactly num_elements entries")
        expected = symmetric_indices(self.num_elements) * self.spacing
        if not np.allclose(coords, expected, rtol=0, atol=1e-12 * self.spacing):
            raise ConfigError("element_coords must be symmetric about 0 with uniform spacing")
        object.__setattr__(self, "element_coords", coords)

    @classmethod
    def ula(cls, num_elements: int, spacing: float) -> "ArrayGeometry":
        coords = symmetric_indices(num_elements) * spacing
        return cls(num_elements=num_elements, spacing=spacing, element_coords=coords)

    @property
    def half_aperture(self) -> float:
        """max |delta_n| = (N-1) * spacing / 2."""
        return (self.num_elements - 1) * self.spacing / 2.0


@dataclass(frozen=True)
class CellGeometry:
    """Annular service region, meters."""

    r_min: float
    r_max: float

    def __post_init__(self):
        if not (0 < self.r_min <= self.r_max):
            raise ConfigError(f"need 0 < r_min <= r_max, got ({self.r_min}, {self.r_max})")

    @property
    def r2_span(self) -> float:
        return self.r_max**2 - self.r_min**2


@dataclass(frozen=True)
class UserLocation:
    """Polar user coordinates relative to the array center."""

    distance: float
    azimuth: float

    def __post_init__(self):
        if self.distance <= 0:
            raise ConfigError("distance must be > 0")
        if not (0 < self.azimuth < np.pi):
            raise ConfigError("azimuth must lie in the open interval (0, pi)")


def sample_user_location(rng: np.random.Generator, cell: CellGeometry) -> UserLocation:
    """Draw one user position: inverse-CDF distance, uniform azimuth.

    r = sqrt(r_min^2 + u * (r_max^2 - r_min^2)) with u ~ U(0,1) realizes the
    density 2r / (r_max^2 - r_min^2).
    """
    u = rng.random()
    r = float(np.sqrt(cell.r_min**2 + u * cell.r2_span))
    phi = float(rng.uniform(0.0, np.pi))
    while phi == 0.0:  # open interval; probability ~2^-53
        phi = float(rng.uniform(0.0, np.pi))
    return UserLocation(distance=r, azimuth=phi)


def element_distances(loc: UserLocation, geom: ArrayGeometry) -> np.ndarray:
    """Law-of-cosines distance from the user to every array element.

    D_n = sqrt(r^2 + delta_n^2 - 2 r delta_n cos(phi)).  Raises ApertureError
    when the user does not clear the aperture (r <= max |delta_n|), where the
    closed-form analysis is undefined.
    """
    if loc.distance <= geom.half_aperture:
        raise ApertureError(
            f"user distance {loc.distance} m inside array aperture "
            f"(max element offset {geom.half_aperture} m)"
        )
    delta = geom.element_coords
    d2 = loc.distance**2 + delta**2 - 2.0 * loc.distance * delta * np.cos(loc.azimuth)
    return np.sqrt(d2)
