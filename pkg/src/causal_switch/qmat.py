"""Dense complex linear algebra for qubit-sized operators.

Matrices are plain ``numpy`` complex arrays. Composite systems are laid out
left to right in tensor order, with the particle always to the left of the
control qubit.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_EIG = 1e-9

JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    """A matrix fails the density-matrix checks."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def proj(v) -> np.ndarray:
    """|v><v| for a state vector ``v`` (not normalized here)."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def outer(u, v) -> np.ndarray:
    """|u><v|."""
    return np.outer(np.asarray(u, dtype=complex).ravel(), np.asarray(v, dtype=complex).ravel().conj())


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def tensor(*factors) -> np.ndarray:
    """Kronecker product, leftmost factor first (particle before control)."""
    if not factors:
        raise ValueError("tensor needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced operator on the subsystems listed in ``keep``.

    ``dims`` gives the subsystem dimensions in tensor order; ``keep`` is an
    index or a collection of indices into ``dims``. Kept subsystems retain
    their original relative order.
    """
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"subsystem index out of range for dims {dims}: {keep}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionError(f"dims {dims} do not match operator shape {rho.shape}")

    traced = [k for k in range(n) if k not in keep]
    t = rho.reshape(dims + dims)
    # contract traced axes pairwise, highest index first so positions stay valid
    for k in sorted(traced, reverse=True):
        nk = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + nk)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_keep, d_keep)


def hermitian_eig(m, tol: float = JACOBI_OFF_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(eigenvalues, vectors)`` with eigenvalues real and descending and
    eigenvectors as the columns of a unitary matrix. Equal eigenvalues keep
    the order in which their columns emerged from the sweeps.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    if not is_hermitian(a):
        raise NotHermitianError("hermitian_eig requires a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p], a[q, q] = a[p, p].real, a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix through LAPACK.

    The fast route for hot loops (entropy evaluations inside optimizers).
    ``hermitian_eig`` is the in-repo solver the two are cross-checked against.
    """
    return np.linalg.eigvalsh(np.asarray(m))


def check_density_matrix(rho, dims: Sequence[int] | None = None) -> np.ndarray:
    """Validate and return ``rho`` as a density matrix; raises InvalidStateError."""
    rho = as_matrix(rho)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if dims is not None and int(np.prod(dims)) != d:
        raise InvalidStateError(f"dims {list(dims)} do not multiply to {d}")
    if not is_hermitian(rho, TOL_HERM):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TOL_TRACE:
        raise InvalidStateError(f"trace is {np.trace(rho).real:.3g}, expected 1")
    if np.min(eigvalsh(rho)) < -TOL_PSD:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape[0] == u.shape[1] and bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def fidelity_pure(psi, rho) -> float:
    """<psi|rho|psi> for a normalized ket ``psi``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    return float(np.real(psi.conj() @ np.asarray(rho) @ psi))


def bloch_ket(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


# random instances for tests and sampling


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)
