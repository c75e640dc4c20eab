"""Entropies and coherent information, with a multi-start maximizer.

All logarithms are base 2, so values are in qubits per channel use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qmat
from .channel import KrausChannel, _check_probability, dephasing_capacity
from .switch import SwitchedChannel

NEG_EIG_CLAMP = 1e-12
NEG_EIG_FAIL = 1e-9
PURITY_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerSettings:
    starts: int = 16
    max_iter: int = 2000
    xatol: float = 1e-10
    fatol: float = 1e-12
    seed: int = 42


@dataclass(frozen=True)
class CoherentInfoResult:
    value: float
    optimal_input: np.ndarray
    starts_used: int
    converged: bool
    value_at_max_entangled: float

    @property
    def entanglement_entropy(self) -> float:
        """Entropy of the reference half of the optimal input."""
        return von_neumann_entropy(qmat.partial_trace(self.optimal_input, [2, 2], keep=[0]))


def binary_entropy(x: float) -> float:
    x = _check_probability(x, "x")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def entropy_of_spectrum(eigenvalues) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size and lam.min() < -NEG_EIG_FAIL:
        raise qmat.InvalidStateError(f"negative eigenvalue {lam.min():.3g} in entropy evaluation")
    lam = lam[lam > NEG_EIG_CLAMP]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho) -> float:
    return entropy_of_spectrum(qmat.eigvalsh(qmat.as_matrix(rho)))


def _kraus_of(channel) -> KrausChannel:
    if isinstance(channel, SwitchedChannel):
        return channel.to_kraus_channel()
    if isinstance(channel, KrausChannel):
        return channel
    raise TypeError(f"expected a KrausChannel or SwitchedChannel, got {type(channel).__name__}")


def max_entangled_state(d: int = 2) -> np.ndarray:
    """Projector onto sum_i |ii> / sqrt(d)."""
    v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return qmat.proj(v)


def coherent_information_at(channel, phi) -> float:
    """H(B) - H(AB) of sigma = (id_A (x) N)(phi), for a pure input phi on A (x) A'.

    The raw value is returned; it can be negative.
    """
    ch = _kraus_of(channel)
    phi = qmat.check_density_matrix(phi)
    d_in = ch.d_in
    if phi.shape != (d_in * d_in, d_in * d_in):
        raise qmat.DimensionError(f"input must live on {d_in}x{d_in}, got {phi.shape}")
    if np.max(qmat.eigvalsh(phi)) < 1 - PURITY_TOL:
        raise ValueError("coherent information needs a pure bipartite input")

    lifted = [np.kron(np.eye(d_in), k) for k in ch.kraus]
    sigma = sum(m @ phi @ m.conj().T for m in lifted)
    dims = [d_in, ch.d_out]
    h_b = von_neumann_entropy(qmat.partial_trace(sigma, dims, keep=[1]))
    h_ab = von_neumann_entropy(sigma)
    return h_b - h_ab


def _coherent_info_ket(kraus: np.ndarray, psi: np.ndarray) -> float:
    """Fast path on a normalized ket; ``kraus`` has shape (r, d_out, d_in).

    With Psi the d x d amplitude matrix of psi, each branch (I (x) K)|psi> is
    Psi K^T. H(AB) comes from the r x r Gram matrix of the branches (same
    nonzero spectrum as sigma) and H(B) from sum_k K rho_A' K^dag.
    """
    d = kraus.shape[2]
    amp = psi.reshape(d, d)
    branches = np.einsum("ij,rbj->rib", amp, kraus).reshape(kraus.shape[0], -1)
    gram = branches.conj() @ branches.T
    rho_in = amp.T @ amp.conj()
    rho_b = np.einsum("rai,ij,rbj->ab", kraus, rho_in, kraus.conj())
    return entropy_of_spectrum(qmat.eigvalsh(rho_b)) - entropy_of_spectrum(qmat.eigvalsh(gram))


def _to_ket(x: np.ndarray) -> np.ndarray | None:
    n = x.size // 2
    v = x[:n] + 1j * x[n:]
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        return None
    return v / norm


def maximize_coherent_information(channel, settings: OptimizerSettings | None = None) -> CoherentInfoResult:
    """Maximize H(B) - H(AB) over pure inputs on A (x) A'.

    Nelder-Mead runs on the real and imaginary parts of the input
    amplitudes (normalized inside the objective). The first start is the
    maximally entangled state; the rest are drawn from ``settings.seed``.
    The best start wins, ties going to the lowest start index.
    """
    settings = settings or OptimizerSettings()
    ch = _kraus_of(channel)
    d = ch.d_in
    kraus = np.stack(ch.kraus)

    def objective(x):
        psi = _to_ket(x)
        if psi is None:
            return 1e3
        return -_coherent_info_ket(kraus, psi)

    me = np.eye(d).reshape(-1) / np.sqrt(d)
    rng = np.random.default_rng(settings.seed)
    starts = [np.concatenate([me, np.zeros(d * d)])]
    for _ in range(settings.starts):
        x = rng.standard_normal(2 * d * d)
        starts.append(x / np.linalg.norm(x))

    best = None
    for idx, x0 in enumerate(starts):
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": settings.max_iter, "xatol": settings.xatol, "fatol": settings.fatol},
        )
        # the simplex keeps its best vertex, but guard the start value anyway
        x, val = (res.x, -res.fun) if -res.fun >= -objective(x0) else (x0, -objective(x0))
        if best is None or val > best[0]:
            best = (val, x, bool(res.success), idx)

    value_me = _coherent_info_ket(kraus, me.astype(complex))
    value, x, converged, _ = best
    psi = _to_ket(x)
    return CoherentInfoResult(
        value=float(value),
        optimal_input=qmat.proj(psi),
        starts_used=len(starts),
        converged=converged,
        value_at_max_entangled=float(value_me),
    )


def switch_flip_coherent_info_raw(p: float) -> float:
    p = _check_probability(p)
    return 1.0 + binary_entropy(p * p) - 2.0 * binary_entropy(p)


def switch_flip_coherent_info_closed(p: float) -> float:
    """max(0, 1 + H2(p^2) - 2 H2(p)) for the flip SWITCH with p = q."""
    return max(0.0, switch_flip_coherent_info_raw(p))


def switch_advantage(p: float) -> bool:
    return switch_flip_coherent_info_closed(p) > dephasing_capacity(p)


def crossover_p(grid_step: float = 0.005) -> float:
    """Smallest grid point k*grid_step where the switch beats a single flip channel."""
    if not 0 < grid_step <= 0.01:
        raise ValueError("grid_step must lie in (0, 0.01]")
    n = int(np.floor(1.0 / grid_step + 1e-9))
    for k in range(n + 1):
        p = round(k * grid_step, 12)
        if switch_advantage(p):
            if p <= 0.5:
                raise RuntimeError(f"advantage found at p={p} <= 0.5; closed form has regressed")
            return p
    raise RuntimeError("no advantage found in (0.5, 1]")
