"""Zero-forcing combining/precoding and exact per-user SINR evaluation.

All operations work on an explicit N x K channel matrix (columns are user
channels) and only ever factor the K x K Gram matrix.  Draws whose Gram
condition number exceeds the threshold are rejected so that near-singular
realizations cannot corrupt Monte Carlo averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, RankDeficientError
from .channel import PropagationProfile, steering_vector
from .geometry import ArrayGeometry, UserLocation

GRAM_CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class LinkBudget:
    """Per-Hz transmit and noise powers, W/Hz.

    tx_power_density is the per-user uplink power; by uplink/downlink duality
    the total downlink power is K times it.
    """

    tx_power_density: float
    noise_density: float
    downlink_total_power_density: float

    def __post_init__(self):
        for name in ("tx_power_density", "noise_density", "downlink_total_power_density"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")

    @classmethod
    def from_per_user(cls, tx_power_density: float, noise_density: float, num_users: int) -> "LinkBudget":
        return cls(tx_power_density, noise_density, num_users * tx_power_density)


@dataclass(frozen=True)
class SinrReport:
    """Linear-scale per-user SINRs for one link direction."""

    per_user: np.ndarray
    link_direction: str

    def __post_init__(self):
        if self.link_direction not in ("uplink", "downlink"):
            raise ConfigError("link_direction must be 'uplink' or 'downlink'")
        arr = np.asarray(self.per_user, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ConfigError("per_user SINRs must be finite and nonnegative")
        object.__setattr__(self, "per_user", arr)


def _gram_inverse(h: np.ndarray) -> np.ndarray:
    """(H^H H)^{-1} with a conditioning guard."""
    n, k = h.shape
    if n < k:
        raise RankDeficientError(f"need N >= K for ZF, got N={n}, K={k}")
    gram = h.conj().T @ h
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_CONDITION_LIMIT:
        raise RankDeficientError(f"Gram condition {cond:.3e} exceeds {GRAM_CONDITION_LIMIT:.0e}")
    return np.linalg.inv(gram)


def zf_uplink_combiner(h: np.ndarray, tx_power_density: float) -> np.ndarray:
    """W = H (H^H H)^{-1} / sqrt(P); satisfies W^H H = I / sqrt(P)."""
    return h @ _gram_inverse(h) / np.sqrt(tx_power_density)


def uplink_sinr(h: np.ndarray, budget: LinkBudget) -> SinrReport:
    """SINR_k = P / (sigma^2 [(H^H H)^{-1}]_{kk}) after ZF detection."""
    inv_diag = np.real(np.diag(_gram_inverse(h)))
    sinr = budget.tx_power_density / (budget.noise_density * inv_diag)
    return SinrReport(per_user=sinr, link_direction="uplink")


def zf_downlink_precoder(h: np.ndarray, budget: LinkBudget) -> tuple[np.ndarray, np.ndarray]:
    """ZF precoder with per-user power normalization.

    W_bar = H (H^H H)^{-1}, rho_k = 1 / (sqrt(K) ||w_bar_k||), W = W_bar
    diag(rho); the columns then carry unit total power (||W||_F^2 = 1).
    """
    k = h.shape[1]
    w_bar = h @ _gram_inverse(h)
    norms = np.linalg.norm(w_bar, axis=0)
    rho = 1.0 / (np.sqrt(k) * norms)
    return w_bar * rho[np.newaxis, :], rho


def downlink_sinr(h: np.ndarray, budget: LinkBudget) -> SinrReport:
    """SINR_k = P_dl_sum rho_k^2 / sigma^2; cross-checked against the ratio form.

    The definitional ratio (desired power over residual interference plus
    noise) is evaluated alongside the normalization form; disagreement beyond
    1e-9 relative indicates numerical breakdown and raises.
    """
    w, rho = zf_downlink_precoder(h, budget)
    p_sum = budget.downlink_total_power_density
    sinr_rho = p_sum * rho**2 / budget.noise_density

    cross = h.conj().T @ w  # [k, j] = h_k^H w_j
    desired = np.abs(np.diag(cross)) ** 2
    interference = np.sum(np.abs(cross) ** 2, axis=1) - desired
    sinr_ratio = p_sum * desired / (p_sum * interference + budget.noise_density)

    rel = np.abs(sinr_ratio - sinr_rho) / np.maximum(sinr_rho, np.finfo(float).tiny)
    if np.any(rel > 1e-9):
        raise RankDeficientError(
            f"downlink SINR forms disagree by {rel.max():.3e}; channel too ill-conditioned"
        )
    return SinrReport(per_user=sinr_rho, link_direction="downlink")


def multicell_uplink_sinr(
    h_home: np.ndarray, intercell_gains: Sequence[float], budget: LinkBudget
) -> SinrReport:
    """Single-cell ZF SINR with noise inflated by the aggregate inter-cell term.

    Far-field interferers with per-element amplitude gains gamma contribute
    P * sum(gamma^2) of extra effective noise density:
    SINR_k = P / ([(H^H H)^{-1}]_{kk} (sigma^2 + P sum gamma^2)).
    """
    gains = np.asarray(list(intercell_gains), dtype=float)
    if gains.size and gains.min() < 0:
        raise ConfigError("intercell gains must be >= 0")
    inv_diag = np.real(np.diag(_gram_inverse(h_home)))
    effective_noise = budget.noise_density + budget.tx_power_density * float(np.sum(gains**2))
    sinr = budget.tx_power_density / (inv_diag * effective_noise)
    return SinrReport(per_user=sinr, link_direction="uplink")


def hybrid_chain(
    h: np.ndarray,
    user_locations: Sequence[UserLocation],
    geom: ArrayGeometry,
    prop: PropagationProfile,
) -> tuple[np.ndarray, np.ndarray]:
    """Analog beamformer from user steering vectors plus the effective channel.

    F has one column b(r_k, phi_k)/sqrt(N) per user (N_RF = K) and
    H_eq = F^H H feeds the digital ZF stage unchanged.
    """
    k = h.shape[1]
    if len(user_locations) != k:
        raise ConfigError(f"need one location per user: {len(user_locations)} != {k}")
    cols = [steering_vector(loc, geom, prop) for loc in user_locations]
    f = np.stack(cols, axis=1) / np.sqrt(geom.num_elements)
    return f, f.conj().T @ h
