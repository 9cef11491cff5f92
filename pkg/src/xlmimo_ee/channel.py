"""Near-field channel generation for the three modeled system families.

Mid-band XL-MIMO channels follow h = gamma ⊙ (Theta_tilde^{1/2} g): per-element
large-scale amplitudes times correlated small-scale fading, where the
correlation is accumulated from near-field steering vectors over the angular
power support.  The comparison families use an i.i.d. Rayleigh vector with a
scalar gain (Sub-6 GHz) and a Rician mixture on a steering vector (mmWave).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ApertureError, ConfigError, NotPsdError
from .geometry import ArrayGeometry, UserLocation, element_distances

# Relative eigenvalue floor: below -REJECT_TOL * trace the matrix is rejected,
# in [-REJECT_TOL * trace, 0) it is clamped to zero.
_PSD_REJECT_TOL = 1e-8


@dataclass(frozen=True)
class PropagationProfile:
    """Carrier and propagation parameters shared by the channel generators.

    angular_spread is the half-width (rad) of the uniform angular power
    support centered on the user azimuth; 0 collapses the correlation matrix
    to the rank-one steering outer product.  rician_factor applies to the
    mmWave family only.
    """

    wavelength: float
    pathloss_constant: float = 1.0
    angular_spread: float = 0.0
    rician_factor: float = 10.0
    quadrature_points: int = 64

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ConfigError("wavelength must be > 0")
        if self.angular_spread < 0:
            raise ConfigError("angular_spread must be >= 0")
        if self.rician_factor < 0:
            raise ConfigError("rician_factor must be >= 0")
        if self.quadrature_points < 1:
            raise ConfigError("quadrature_points must be >= 1")


@dataclass(frozen=True)
class ChannelRealization:
    """One N x K channel draw plus the per-user large-scale amplitude vectors."""

    matrix: np.ndarray
    large_scale: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise ConfigError("matrix must be 2-D (N x K)")
        if self.large_scale.shape != self.matrix.shape:
            raise ConfigError("large_scale must match matrix shape")
        if not np.all(np.isfinite(self.matrix)):
            raise ConfigError("channel matrix contains non-finite entries")


def large_scale_gains(
    loc: UserLocation, geom: ArrayGeometry, prop: PropagationProfile
) -> np.ndarray:
    """Per-element amplitude gain C_PL * lambda / D_n."""
    dists = element_distances(loc, geom)
    return prop.pathloss_constant * prop.wavelength / dists


def steering_vector(
    loc: UserLocation, geom: ArrayGeometry, prop: PropagationProfile
) -> np.ndarray:
    """Unit-modulus near-field steering vector exp(-j 2 pi D_n / lambda)."""
    dists = element_distances(loc, geom)
    return np.exp(-2j * np.pi * dists / prop.wavelength)


def _steering_from_polar(
    distance: float, azimuth: float, geom: ArrayGeometry, prop: PropagationProfile
) -> np.ndarray:
    """Steering vector at an arbitrary scatter angle.

    Quadrature nodes of the angular power support may step outside the
    (0, pi) user sector; the phase model is valid for any azimuth as long as
    the range clears the aperture.
    """
    if distance <= geom.half_aperture:
        raise ApertureError(
            f"range {distance} m inside array aperture ({geom.half_aperture} m)"
        )
    delta = geom.element_coords
    d2 = distance**2 + delta**2 - 2.0 * distance * delta * np.cos(azimuth)
    return np.exp(-2j * np.pi * np.sqrt(d2) / prop.wavelength)


def _quadrature_azimuths(loc: UserLocation, prop: PropagationProfile) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes and uniform weights over the angular power support."""
    if prop.angular_spread == 0.0 or prop.quadrature_points == 1:
        return np.array([loc.azimuth]), np.array([1.0])
    m = prop.quadrature_points
    lo = loc.azimuth - prop.angular_spread
    width = 2.0 * prop.angular_spread
    nodes = lo + (np.arange(m) + 0.5) * width / m
    return nodes, np.full(m, 1.0 / m)


def correlation_factor(
    loc: UserLocation, geom: ArrayGeometry, prop: PropagationProfile
) -> np.ndarray:
    """N x M factor L with L L^H equal to the small-scale correlation matrix.

    Columns are weighted steering vectors at the quadrature azimuths, distance
    held at the user range (distance-domain spread neglected).  Useful both to
    assemble the correlation matrix and to sample from it without an
    eigendecomposition.
    """
    nodes, weights = _quadrature_azimuths(loc, prop)
    cols = []
    for phi, w in zip(nodes, weights):
        b = _steering_from_polar(loc.distance, float(phi), geom, prop)
        cols.append(np.sqrt(w) * b)
    return np.stack(cols, axis=1)


def channel_correlation(
    loc: UserLocation, geom: ArrayGeometry, prop: PropagationProfile
) -> np.ndarray:
    """Full channel correlation Theta = (gamma gamma^T) ⊙ Theta_tilde.

    Theta_tilde is the midpoint-quadrature accumulation of steering outer
    products over the angular support, normalized so trace(Theta_tilde) = N
    (automatic here: unit-modulus steering entries and weights summing to 1).
    Hermitian positive semidefinite by construction.
    """
    factor = correlation_factor(loc, geom, prop)
    theta_tilde = factor @ factor.conj().T
    gamma = large_scale_gains(loc, geom, prop)
    theta = np.outer(gamma, gamma) * theta_tilde
    return 0.5 * (theta + theta.conj().T)


def sample_channel(corr: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw h = Theta^{1/2} g with g circularly-symmetric standard Gaussian.

    The square root is spectral: eigenvalues in [-tol*trace, 0) are clamped to
    zero (quadrature-built correlation matrices can be numerically
    rank-deficient); anything below -tol*trace raises NotPsdError.
    """
    corr = np.asarray(corr)
    n = corr.shape[0]
    trace = float(np.real(np.trace(corr)))
    eigvals, eigvecs = np.linalg.eigh(corr)
    floor = -_PSD_REJECT_TOL * max(trace, np.finfo(float).tiny)
    if eigvals.min() < floor:
        raise NotPsdError(
            f"matrix is not PSD: min eigenvalue {eigvals.min():.3e} < {floor:.3e}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    g = _standard_complex_gaussian(rng, n)
    return eigvecs @ (np.sqrt(eigvals) * g)


def sample_channel_sub6(
    loc: UserLocation, prop: PropagationProfile, num_elements: int, rng: np.random.Generator
) -> np.ndarray:
    """I.i.d. Rayleigh vector scaled by lambda / r (no pathloss constant)."""
    gain = prop.wavelength / loc.distance
    return gain * _standard_complex_gaussian(rng, num_elements)


def sample_channel_mmwave(
    loc: UserLocation,
    geom: ArrayGeometry,
    prop: PropagationProfile,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rician draw: LoS steering component plus i.i.d. scatter, gain lambda / r.

    h = (sqrt(k/(k+1)) g b(r, phi) + sqrt(1/(k+1)) h_nlos) * lambda / r with
    scalar g ~ CN(0,1) and h_nlos ~ CN(0, I).
    """
    kappa = prop.rician_factor
    b = steering_vector(loc, geom, prop)
    g = _standard_complex_gaussian(rng, 1)[0]
    h_nlos = _standard_complex_gaussian(rng, geom.num_elements)
    gain = prop.wavelength / loc.distance
    los = np.sqrt(kappa / (kappa + 1.0)) * g * b
    nlos = np.sqrt(1.0 / (kappa + 1.0)) * h_nlos
    return gain * (los + nlos)


def _standard_complex_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    """CN(0, I_n): unit-variance circularly-symmetric complex Gaussian."""
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
