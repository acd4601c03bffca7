"""Normalized-Laplacian eigensolver and the Cheeger sweep-cut partitioner.

The operator is ``L = I - D^{-1/2} (A + diag(self_loops)) D^{-1/2}`` with
degree-0 rows acting as the identity. Small graphs (n <= 64) use a dense
direct solve, which doubles as the oracle path for tests; larger graphs use
an implicitly restarted Lanczos iteration on ``2I - L`` (largest-eigenvalue
form, which converges much faster than interior shifts for this spectrum).
All randomness is a fixed-key Philox start vector, so results are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import Graph, vertex_set

__all__ = [
    "SpectralResult",
    "SweepCut",
    "SpectralConvergenceError",
    "laplacian_apply",
    "smallest_eigenvalues",
    "spectral_partition",
]

DENSE_LIMIT = 64
DEFAULT_TOL = 1e-8


class SpectralConvergenceError(RuntimeError):
    """Eigensolver failed to reach the residual tolerance.

    Carries the best eigenvalue estimates and their residual norms.
    """

    def __init__(self, message, eigenvalues=None, residuals=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.residuals = residuals


@dataclass(frozen=True)
class SpectralResult:
    """Ascending eigenvalues, matching eigenvector columns, residual norms."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class SweepCut:
    """A sweep-cut set with vol(set) <= vol(V)/2 and its conductance."""
    set: np.ndarray
    conductance: float


def _inv_sqrt_degrees(G: Graph) -> np.ndarray:
    d = G.degrees
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = 1.0 / np.sqrt(d[pos])
    return out


def laplacian_apply(G: Graph, x: np.ndarray) -> np.ndarray:
    """Apply the normalized Laplacian edge-wise: ``y = x - D^-1/2 A D^-1/2 x``.

    Rows of degree-0 vertices act as the identity.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (G.n,):
        raise ValueError(f"vector length {x.shape} does not match n={G.n}")
    inv_sqrt = _inv_sqrt_degrees(G)
    s = x * inv_sqrt
    acc = G.self_loops * s
    np.add.at(acc, G.edges_u, G.edges_w * s[G.edges_v])
    np.add.at(acc, G.edges_v, G.edges_w * s[G.edges_u])
    return x - inv_sqrt * acc


def _normalized_adjacency(G: Graph) -> sp.csr_array:
    inv_sqrt = _inv_sqrt_degrees(G)
    rows = np.concatenate([G.edges_u, G.edges_v, np.arange(G.n)])
    cols = np.concatenate([G.edges_v, G.edges_u, np.arange(G.n)])
    vals = np.concatenate([G.edges_w, G.edges_w, G.self_loops])
    vals = vals * inv_sqrt[rows] * inv_sqrt[cols]
    return sp.csr_array(sp.coo_array((vals, (rows, cols)), shape=(G.n, G.n)))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return vectors


def _residual_norms(N: sp.csr_array, vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    # L x = x - N x
    lx = vecs - N @ vecs
    return np.linalg.norm(lx - vecs * vals[None, :], axis=0)


def smallest_eigenvalues(G: Graph, k: int, tol: float = DEFAULT_TOL,
                         max_iter: int | None = None,
                         method: str = "auto") -> SpectralResult:
    """The ``k`` smallest eigenpairs of the normalized Laplacian.

    Parameters
    ----------
    G : Graph
    k : int
        Number of eigenpairs, ``1 <= k <= n``.
    tol : float
        Residual tolerance; each returned pair satisfies
        ``||L x - lambda x|| <= tol``.
    max_iter : int, optional
        Iteration cap for the Lanczos path (default ``10 * n * k``).
    method : {"auto", "dense", "iterative"}
        "auto" picks dense for ``n <= 64``.

    Raises
    ------
    SpectralConvergenceError
        If the iterative solver cannot reach ``tol``; the error carries the
        best estimates and residuals.
    """
    n = G.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 10 * n * k
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    use_dense = method == "dense" or (method == "auto" and n <= DENSE_LIMIT)
    if method == "iterative" and k >= n:
        raise ValueError("iterative path needs k < n")
    N = _normalized_adjacency(G)
    if use_dense:
        L = np.eye(n) - N.toarray()
        vals, vecs = np.linalg.eigh(L)
        vals, vecs = vals[:k].copy(), vecs[:, :k].copy()
    else:
        vals, vecs = _lanczos_smallest(N, k, tol, max_iter)
    # Round-off can push lambda_1 a hair below zero; clamp the dust.
    if np.any(vals < -10 * tol):
        raise SpectralConvergenceError(
            f"eigenvalue {vals.min():.3e} below zero beyond tolerance",
            eigenvalues=vals, residuals=None)
    vals = np.maximum(vals, 0.0)
    vecs = _fix_signs(vecs)
    residuals = _residual_norms(N, vals, vecs)
    if np.any(residuals > tol):
        raise SpectralConvergenceError(
            f"residuals up to {residuals.max():.3e} exceed tol={tol:.1e}",
            eigenvalues=vals, residuals=residuals)
    return SpectralResult(vals, vecs, residuals)


def _lanczos_smallest(N: sp.csr_array, k: int, tol: float, max_iter: int):
    """Smallest eigenpairs of L = I - N via largest of 2I - L = I + N."""
    n = N.shape[0]

    def matvec(x):
        return x + N @ x

    op = spla.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    rng = np.random.Generator(np.random.Philox(key=0x5EED))
    v0 = rng.standard_normal(n)
    last_err = None
    for attempt_tol, attempt_iter in ((tol * 1e-2, max_iter),
                                      (tol * 1e-4, 4 * max_iter)):
        try:
            mu, vecs = spla.eigsh(op, k=k, which="LA", tol=attempt_tol,
                                  maxiter=attempt_iter, v0=v0)
        except spla.ArpackNoConvergence as exc:
            last_err = exc
            continue
        vals = 2.0 - mu
        order = np.argsort(vals, kind="stable")
        return vals[order], vecs[:, order]
    partial_vals = getattr(last_err, "eigenvalues", None)
    raise SpectralConvergenceError(
        f"Lanczos failed to converge within {4 * max_iter} iterations",
        eigenvalues=None if partial_vals is None else 2.0 - partial_vals,
        residuals=None) from last_err


def spectral_partition(G: Graph, eigs: SpectralResult | None = None) -> SweepCut:
    """Cheeger sweep cut from the second eigenvector.

    Vertices are ordered by ``v_u / sqrt(d_u)`` (ties by vertex id,
    degree-0 vertices last with entry 0); among the n-1 prefix cuts the
    returned set is the prefix or its complement, whichever has
    ``vol <= vol(V)/2``, of minimum conductance. The classical guarantee
    ``phi(S) <= 2 sqrt(phi_G)`` holds for any exact second eigenvector.

    An already-computed :class:`SpectralResult` with k >= 2 can be passed
    to skip the eigensolve.
    """
    n = G.n
    if n < 2:
        raise ValueError("sweep cut needs at least 2 vertices")
    if eigs is None:
        eigs = smallest_eigenvalues(G, 2)
    if eigs.eigenvectors.shape[1] < 2:
        raise ValueError("need at least 2 eigenvectors for the sweep")
    v = eigs.eigenvectors[:, 1]
    isolated = G.degrees == 0
    scaled = np.zeros(n)
    scaled[~isolated] = v[~isolated] / np.sqrt(G.degrees[~isolated])
    order = np.lexsort((np.arange(n), scaled, isolated))
    total = G.total_volume
    indptr, nbr, nbrw = G._indptr, G._nbr, G._nbrw
    placed = np.zeros(n, dtype=bool)
    loops = G.self_loops
    best_phi = np.inf
    best_t = -1
    cut = 0.0
    volume = 0.0
    for t in range(n - 1):
        u = int(order[t])
        lo, hi = indptr[u], indptr[u + 1]
        w_in = nbrw[lo:hi][placed[nbr[lo:hi]]].sum()
        cut += (G.degrees[u] - loops[u]) - 2.0 * w_in
        volume += G.degrees[u]
        placed[u] = True
        side_vol = min(volume, total - volume) if volume > total / 2 else volume
        phi = cut / side_vol if side_vol > 0 else 1.0
        if phi < best_phi:
            best_phi = phi
            best_t = t
    prefix = order[:best_t + 1]
    pre_vol = float(G.degrees[prefix].sum())
    if pre_vol <= total / 2:
        chosen = prefix
    else:
        chosen = order[best_t + 1:]
    return SweepCut(vertex_set(chosen, n), float(best_phi))
