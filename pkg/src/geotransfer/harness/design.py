"""Random fixed designs and response sampling."""

import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .._validation import as_matrix, as_vector
from ..exceptions import ConfigInvalid, DimensionMismatch, InvalidRho
from ..seeding import make_rng

DEFAULT_RHO = 0.5


@dataclass(frozen=True)
class DesignKind:
    """``iid_gaussian`` rows, or Gaussian rows with covariance ``rho^|i-j|``."""

    name: str = "iid_gaussian"
    rho: float = 0.0

    def __post_init__(self):
        if self.name not in ("iid_gaussian", "toeplitz"):
            raise ConfigInvalid(f"unknown design kind {self.name!r}")
        if self.name == "toeplitz" and not -1.0 < self.rho < 1.0:
            raise InvalidRho(f"rho must lie in (-1, 1), got {self.rho}")

    @classmethod
    def parse(cls, text):
        if isinstance(text, DesignKind):
            return text
        text = str(text).strip().lower()
        if text in ("iid_gaussian", "iid", "gaussian"):
            return cls()
        if text == "toeplitz":
            return cls("toeplitz", DEFAULT_RHO)
        match = re.fullmatch(r"toeplitz\(\s*([-+0-9.eE]+)\s*\)", text)
        if not match:
            raise ConfigInvalid(f"cannot parse design kind {text!r}")
        return cls("toeplitz", float(match.group(1)))

    def __str__(self):
        return self.name if self.name == "iid_gaussian" else f"toeplitz({self.rho:g})"


def toeplitz_covariance(d, rho):
    return toeplitz(rho ** np.arange(d))


def generate_design(n, d, kind, seed):
    """Draw an ``n x d`` design.

    Rows are standard normal; for ``toeplitz(rho)`` they are multiplied by
    the transposed Cholesky factor of ``rho^|i-j|``.
    """
    if n < 1 or d < 1:
        raise ConfigInvalid("design dimensions must be positive")
    kind = DesignKind.parse(kind)
    Z = make_rng(seed).standard_normal((n, d))
    if kind.name == "iid_gaussian" or kind.rho == 0.0:
        return Z
    L = np.linalg.cholesky(toeplitz_covariance(d, kind.rho))
    return Z @ L.T


def sample_responses(design, theta, sigma2, seed):
    """``design @ theta`` plus iid ``N(0, sigma2)`` noise; ``sigma2 = 0`` is noiseless."""
    X = as_matrix(design, "design")
    theta = as_vector(theta, "theta")
    if X.shape[1] != theta.shape[0]:
        raise DimensionMismatch(f"design has {X.shape[1]} columns, theta has {theta.shape[0]}")
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    noise = make_rng(seed).standard_normal(X.shape[0])
    return X @ theta + np.sqrt(sigma2) * noise
