"""Generalized eigendecomposition of the Gram-matrix pencil (X'X, W'W).

The pencil basis ``E`` satisfies ``E' (W'W) E = I`` and
``E' (X'X) E = diag(lambda)``, so that in the coordinates ``theta = E beta``
the target Fisher metric is the identity and the source metric is diagonal.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ._validation import as_symmetric, as_vector, frozen
from .exceptions import DimensionMismatch, NotPositiveDefinite

DEFAULT_RANK_TOL = 1e-12


@dataclass(frozen=True)
class GramPair:
    """Source and target Gram matrices ``X'X`` and ``W'W``.

    Construction validates shapes and symmetry; positive-definiteness of the
    target Gram matrix is checked by :func:`decompose` against its ``rank_tol``.
    """

    gram_source: np.ndarray
    gram_target: np.ndarray

    def __post_init__(self):
        gs = as_symmetric(self.gram_source, "gram_source")
        gt = as_symmetric(self.gram_target, "gram_target")
        if gs.shape != gt.shape:
            raise DimensionMismatch(
                f"gram_source {gs.shape} and gram_target {gt.shape} differ in shape")
        object.__setattr__(self, "gram_source", frozen(gs))
        object.__setattr__(self, "gram_target", frozen(gt))

    @classmethod
    def from_designs(cls, source_design, target_design):
        X = np.asarray(source_design, dtype=float)
        W = np.asarray(target_design, dtype=float)
        return cls(X.T @ X, W.T @ W)

    @property
    def dim(self):
        return self.gram_target.shape[0]


@dataclass(frozen=True)
class PencilDecomposition:
    """Eigenvalues (descending) and basis of the pencil.

    Attributes
    ----------
    eigenvalues : ndarray of shape (d,)
        Generalized eigenvalues after clamping at ``rank_tol * lambda_1``;
        this is the vector every downstream formula uses.
    basis : ndarray of shape (d, d)
        Columns ``e_1, ..., e_d``.
    raw_eigenvalues : ndarray of shape (d,)
        Eigenvalues before clamping.
    clamped : ndarray of bool, shape (d,)
        Per-coordinate clamp flags.
    gram_target : ndarray of shape (d, d)
        ``W'W``; needed for the inverse coordinate map.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    raw_eigenvalues: np.ndarray
    clamped: np.ndarray
    gram_target: np.ndarray
    gram_source: np.ndarray = field(repr=False)
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def dim(self):
        return self.basis.shape[0]


def _fix_signs(vectors):
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def decompose(grams, rank_tol=DEFAULT_RANK_TOL):
    """Solve ``X'X e = lambda W'W e`` with the target-metric normalization.

    ``W'W = L L'`` is factored by Cholesky, the symmetric problem
    ``L^-1 X'X L^-T = Q diag(lambda) Q'`` is solved, and ``E = L^-T Q``.

    Parameters
    ----------
    grams : GramPair
    rank_tol : float, default=1e-12
        Relative threshold used both for the positive-definiteness check on
        ``W'W`` and for clamping small source eigenvalues.

    Returns
    -------
    PencilDecomposition

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue of ``W'W`` is not above ``rank_tol`` times
        its largest.
    """
    if not isinstance(grams, GramPair):
        grams = GramPair(*grams)
    if not 0.0 <= rank_tol < 1.0:
        raise ValueError(f"rank_tol must lie in [0, 1), got {rank_tol}")
    A, B = grams.gram_source, grams.gram_target

    b_eig = linalg.eigvalsh(B)
    if b_eig[-1] <= 0 or b_eig[0] <= rank_tol * b_eig[-1]:
        raise NotPositiveDefinite(
            f"gram_target is not positive-definite (eigenvalue range "
            f"[{b_eig[0]:.3e}, {b_eig[-1]:.3e}])")
    try:
        L = linalg.cholesky(B, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc

    tmp = linalg.solve_triangular(L, A, lower=True)
    M = linalg.solve_triangular(L, tmp.T, lower=True)
    M = 0.5 * (M + M.T)
    w, Q = linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    w, Q = w[order], Q[:, order]
    E = _fix_signs(linalg.solve_triangular(L.T, Q, lower=False))

    raw = w.copy()
    floor = max(rank_tol * raw[0], np.finfo(float).tiny)
    clamped = raw < floor
    lam = np.where(clamped, floor, raw)

    flags = np.array(clamped, dtype=bool)
    flags.setflags(write=False)
    return PencilDecomposition(
        eigenvalues=frozen(lam),
        basis=frozen(E),
        raw_eigenvalues=frozen(raw),
        clamped=flags,
        gram_target=grams.gram_target,
        gram_source=grams.gram_source,
        rank_tol=float(rank_tol),
    )


def to_eigenbasis(theta, decomp):
    """Coordinates ``beta`` with ``E beta = theta``, i.e. ``beta = E' (W'W) theta``."""
    theta = as_vector(theta, "theta", decomp.dim)
    return decomp.basis.T @ (decomp.gram_target @ theta)


def from_eigenbasis(beta, decomp):
    """Map eigenbasis coordinates back: ``theta = E beta``."""
    beta = as_vector(beta, "beta", decomp.dim)
    return decomp.basis @ beta


def discrepancy(theta_a, theta_b, gram_target):
    """Squared target-metric distance ``(a - b)' W'W (a - b)``."""
    gram_target = np.asarray(gram_target, dtype=float)
    d = gram_target.shape[0]
    diff = as_vector(theta_a, "theta_a", d) - as_vector(theta_b, "theta_b", d)
    return float(max(diff @ gram_target @ diff, 0.0))
