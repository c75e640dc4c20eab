"""Quantum channels in Kraus and Choi form, plus the qubit flip families.

Choi operators use the trace-one convention
``C = (N (x) id)(|Phi><Phi|)`` with ``|Phi> = sum_i |i>|i> / sqrt(d_in)``,
so the output factor sits to the left of the input factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmat
from .qmat import I2, X, Z, DimensionError

TOL_CPTP = 1e-9
KRAUS_PRUNE = 1e-10
CHANNEL_EQ_TOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """A channel given by Kraus operators, each ``d_out x d_in``.

    Trace preservation is not enforced on construction; use
    :func:`validate_cptp` to check it.
    """

    kraus: tuple

    def __init__(self, kraus: Sequence):
        ops = tuple(qmat.as_matrix(k) for k in kraus)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one shape")
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True)
class ChoiMatrix:
    mat: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        m = qmat.as_matrix(self.mat)
        n = self.d_in * self.d_out
        if m.shape != (n, n):
            raise DimensionError(f"Choi of a {self.d_in}->{self.d_out} map must be {n}x{n}")
        object.__setattr__(self, "mat", m)


@dataclass(frozen=True)
class CPTPReport:
    valid: bool
    max_violation: float

    def __bool__(self) -> bool:
        return self.valid


def validate_cptp(c: KrausChannel, tol: float = TOL_CPTP) -> CPTPReport:
    """Check sum_i K_i^dag K_i == I. The report carries the largest entrywise deviation."""
    s = sum(k.conj().T @ k for k in c.kraus)
    dev = float(np.max(np.abs(s - np.eye(c.d_in))))
    return CPTPReport(dev <= tol, dev)


def apply(c: KrausChannel, rho) -> np.ndarray:
    rho = qmat.as_matrix(rho)
    if rho.shape != (c.d_in, c.d_in):
        raise DimensionError(f"channel takes {c.d_in}-dim input, got {rho.shape}")
    return sum(k @ rho @ k.conj().T for k in c.kraus)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel ``second o first`` (``first`` acts first)."""
    if first.d_out != second.d_in:
        raise DimensionError(f"cannot feed {first.d_out}-dim output into {second.d_in}-dim input")
    return KrausChannel([k @ l for k in second.kraus for l in first.kraus])


def identity_channel(d: int = 2) -> KrausChannel:
    return KrausChannel([np.eye(d, dtype=complex)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([u])


def kraus_to_choi(c: KrausChannel) -> ChoiMatrix:
    # (K (x) I)|Phi> reshaped as d_out x d_in is K / sqrt(d_in); row-major vec gives the Choi ket
    vecs = np.stack([k.reshape(-1) for k in c.kraus], axis=1)
    mat = vecs @ vecs.conj().T / c.d_in
    return ChoiMatrix(mat, c.d_in, c.d_out)


def choi_to_kraus(c: ChoiMatrix, prune: float = KRAUS_PRUNE) -> KrausChannel:
    """Kraus operators from the Choi spectrum, dropping eigenvalues below ``prune``."""
    w, v = qmat.hermitian_eig(c.mat)
    if w[-1] < -qmat.TOL_PSD:
        raise ValueError(f"Choi matrix is not positive semidefinite (min eigenvalue {w[-1]:.3g})")
    ops = [np.sqrt(lam * c.d_in) * v[:, i].reshape(c.d_out, c.d_in) for i, lam in enumerate(w) if lam > prune]
    return KrausChannel(ops)


def apply_choi(c: ChoiMatrix, rho) -> np.ndarray:
    """Channel action reconstructed from its Choi operator: d_in * Tr_in[C (I (x) rho^T)]."""
    rho = qmat.as_matrix(rho)
    big = c.mat @ np.kron(np.eye(c.d_out), rho.T)
    return c.d_in * qmat.partial_trace(big, [c.d_out, c.d_in], keep=[0])


def choi_distance(a: ChoiMatrix, b: ChoiMatrix) -> float:
    return float(np.linalg.norm(a.mat - b.mat))


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = CHANNEL_EQ_TOL) -> bool:
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        return False
    return choi_distance(kraus_to_choi(a), kraus_to_choi(b)) < tol


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def pauli_channel(weights: Sequence[float], ops: Sequence = (I2, X, Z)) -> KrausChannel:
    ws = [_check_probability(w, "weight") for w in weights]
    if abs(sum(ws) - 1) > 1e-12:
        raise ValueError("Pauli weights must sum to 1")
    return KrausChannel([np.sqrt(w) * u for w, u in zip(ws, ops)])


def bit_flip(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p X rho X."""
    p = _check_probability(p)
    return KrausChannel([np.sqrt(1 - p) * I2, np.sqrt(p) * X])


def phase_flip(q: float) -> KrausChannel:
    """rho -> (1-q) rho + q Z rho Z."""
    q = _check_probability(q, "q")
    return KrausChannel([np.sqrt(1 - q) * I2, np.sqrt(q) * Z])


def depolarizing(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p I/2, written with the four Pauli Kraus operators."""
    p = _check_probability(p)
    w = [1 - 3 * p / 4, p / 4, p / 4, p / 4]
    return KrausChannel([np.sqrt(wi) * u for wi, u in zip(w, qmat.PAULIS)])


def dephasing_capacity(p: float) -> float:
    """Quantum capacity 1 - H2(p) of a bit-flip or phase-flip channel."""
    from .entropic import binary_entropy

    p = _check_probability(p)
    return 1.0 - binary_entropy(p)
