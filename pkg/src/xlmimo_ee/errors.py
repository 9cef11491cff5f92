"""Exception hierarchy shared across the library.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numeric-domain problems with 3, and I/O failures with 4.
"""


class ConfigError(ValueError):
    """Invalid scenario/sweep configuration (bad key, bad value, violated invariant)."""


class NumericDomainError(ValueError):
    """An operation was evaluated outside its mathematical domain."""


class ApertureError(NumericDomainError):
    """User distance does not clear the array aperture (r <= max |element coord|)."""


class VacuousBoundError(NumericDomainError):
    """Closed-form SE bound has a non-positive log argument at this (N, K, P)."""


class OverheadError(NumericDomainError):
    """Pilot overhead exhausts the uplink fraction (tau*K >= S*xi_ul)."""


class RankDeficientError(NumericDomainError):
    """Channel Gram matrix is too ill-conditioned for ZF processing."""


class NotPsdError(NumericDomainError):
    """Matrix offered as a covariance is not positive semidefinite."""
