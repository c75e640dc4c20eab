"""Error filtration with two noisy paths, and why it cannot be made noiseless.

A particle crosses region 0 (unitary U0) or region 1 (unitary U1) depending
on a path qubit prepared in |alpha> and postselected on |beta>. Each noise
realization acts on the particle through

    A = alpha0 conj(beta0) U0 + alpha1 conj(beta1) U1.

For independent random unitaries with enough linearly independent values,
no choice of (|alpha>, |beta>) makes the postselected map unitary. The SWITCH
correlates the two paths (U0 = X^i Z^j, U1 = Z^j X^i) and escapes this.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qmat
from .channel import ChoiMatrix, _check_probability
from .qmat import I2, KET_MINUS, KET_PLUS, X, Y, Z

ACCEPT_MIN = 1e-14
RANK_TOL = 1e-9
CERT_MARGIN = 0.01


class PostselectionError(ValueError):
    """Postselection succeeds with (numerically) zero probability."""


def _normalized(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.shape != (2,) or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError(f"{name} must be a normalized qubit ket")
    return v


def _check_ensemble(ensemble, name: str) -> list:
    out = []
    for u, w in ensemble:
        u = qmat.as_matrix(u)
        if not qmat.is_unitary(u):
            raise ValueError(f"{name} contains a non-unitary matrix")
        out.append((u, float(w)))
    if not out or abs(sum(w for _, w in out) - 1) > 1e-10 or any(w < 0 for _, w in out):
        raise ValueError(f"{name} probabilities must be non-negative and sum to 1")
    return out


@dataclass(frozen=True)
class FiltrationSetup:
    """Path noise as a joint distribution over (U0, U1) pairs, plus the path states.

    ``ensemble0``/``ensemble1`` are kept when the pair distribution is the
    product of two independent ensembles, and are None otherwise.
    """

    pairs: tuple
    alpha: np.ndarray
    beta: np.ndarray
    ensemble0: tuple | None = None
    ensemble1: tuple | None = None

    @classmethod
    def independent(cls, ensemble0, ensemble1, alpha=KET_PLUS, beta=KET_PLUS) -> "FiltrationSetup":
        e0 = _check_ensemble(ensemble0, "ensemble0")
        e1 = _check_ensemble(ensemble1, "ensemble1")
        pairs = tuple((u0, u1, w0 * w1) for u0, w0 in e0 for u1, w1 in e1)
        return cls(pairs, _normalized(alpha, "alpha"), _normalized(beta, "beta"), tuple(e0), tuple(e1))

    @classmethod
    def correlated(cls, pairs, alpha=KET_PLUS, beta=KET_MINUS) -> "FiltrationSetup":
        checked = []
        for u0, u1, w in pairs:
            u0, u1 = qmat.as_matrix(u0), qmat.as_matrix(u1)
            if not (qmat.is_unitary(u0) and qmat.is_unitary(u1)):
                raise ValueError("pair ensemble contains a non-unitary matrix")
            checked.append((u0, u1, float(w)))
        if abs(sum(w for *_, w in checked) - 1) > 1e-10 or any(w < 0 for *_, w in checked):
            raise ValueError("pair probabilities must be non-negative and sum to 1")
        return cls(tuple(checked), _normalized(alpha, "alpha"), _normalized(beta, "beta"))

    def with_states(self, alpha, beta) -> "FiltrationSetup":
        return FiltrationSetup(
            self.pairs, _normalized(alpha, "alpha"), _normalized(beta, "beta"), self.ensemble0, self.ensemble1
        )


def filtration_operator(alpha, beta, u0, u1) -> np.ndarray:
    alpha = _normalized(alpha, "alpha")
    beta = _normalized(beta, "beta")
    return alpha[0] * beta[0].conj() * qmat.as_matrix(u0) + alpha[1] * beta[1].conj() * qmat.as_matrix(u1)


def two_path_gate(u0, u1) -> np.ndarray:
    """W = U0 (x) |0><0| + U1 (x) |1><1| on particle (x) path."""
    return np.kron(u0, np.diag([1, 0])) + np.kron(u1, np.diag([0, 1]))


def postselected_state(setup: FiltrationSetup, rho):
    """Normalized postselected particle state and its acceptance probability."""
    rho = qmat.as_matrix(rho)
    out = np.zeros((2, 2), dtype=complex)
    for u0, u1, w in setup.pairs:
        a = filtration_operator(setup.alpha, setup.beta, u0, u1)
        out += w * (a @ rho @ a.conj().T)
    acc = float(np.real(np.trace(out)))
    if acc < ACCEPT_MIN:
        raise PostselectionError(f"acceptance probability {acc:.3g} is zero")
    return out / acc, acc


def _pair_grams(pairs):
    """Weighted outer products of vec(U0), vec(U1) used to build Chois in bulk."""
    g00 = np.zeros((4, 4), dtype=complex)
    g11 = np.zeros((4, 4), dtype=complex)
    g01 = np.zeros((4, 4), dtype=complex)
    for u0, u1, w in pairs:
        v0, v1 = u0.reshape(-1), u1.reshape(-1)
        g00 += w * np.outer(v0, v0.conj())
        g11 += w * np.outer(v1, v1.conj())
        g01 += w * np.outer(v0, v1.conj())
    return g00, g11, g01


def postselected_channel_choi(setup: FiltrationSetup):
    """Trace-one Choi of the normalized postselected map, and acceptance at the maximally mixed input."""
    unnorm = np.zeros((4, 4), dtype=complex)
    for u0, u1, w in setup.pairs:
        v = filtration_operator(setup.alpha, setup.beta, u0, u1).reshape(-1)
        unnorm += w * np.outer(v, v.conj()) / 2
    acc = float(np.real(np.trace(unnorm)))
    if acc < ACCEPT_MIN:
        raise PostselectionError(f"acceptance probability {acc:.3g} is zero")
    return ChoiMatrix(unnorm / acc, 2, 2), acc


def unitarity_score(c: ChoiMatrix) -> float:
    """Largest Choi eigenvalue: 1 exactly for a unitary conjugation, 1/d^2 at full depolarization."""
    m = c.mat
    if not qmat.is_hermitian(m) or abs(np.trace(m) - 1) > qmat.TOL_TRACE:
        raise ValueError("unitarity_score needs a Hermitian trace-one Choi matrix")
    w, _ = qmat.hermitian_eig(m)
    if w[-1] < -qmat.TOL_PSD:
        raise ValueError("Choi matrix is not positive semidefinite")
    return float(w[0])


def recovered_unitary(c: ChoiMatrix) -> np.ndarray:
    """Kraus operator of the top Choi eigenvector, scaled to be unitary for a rank-one Choi."""
    w, v = qmat.hermitian_eig(c.mat)
    return np.sqrt(c.d_in) * v[:, 0].reshape(c.d_out, c.d_in)


@dataclass(frozen=True)
class HypothesisCheck:
    met: bool
    values0: int
    values1: int
    rank: int


def _distinct(mats) -> list:
    out = []
    for m in mats:
        if not any(np.allclose(m, o, atol=1e-12) for o in out):
            out.append(m)
    return out


def check_no_go_hypotheses(ensemble0, ensemble1) -> HypothesisCheck:
    """Whether U0 and U1 each take two distinct values, with three of the four linearly independent.

    Only values with positive probability count. ``rank`` is the best rank
    found over all choices of two values per side.
    """
    vals0 = _distinct([qmat.as_matrix(u) for u, w in ensemble0 if w > 0])
    vals1 = _distinct([qmat.as_matrix(u) for u, w in ensemble1 if w > 0])
    best = 0
    if len(vals0) >= 2 and len(vals1) >= 2:
        for v, w in itertools.combinations(vals0, 2):
            for s, t in itertools.combinations(vals1, 2):
                stack = np.stack([m.reshape(-1) for m in (v, w, s, t)], axis=1)
                sv = np.linalg.svd(stack, compute_uv=False)
                best = max(best, int(np.sum(sv > RANK_TOL)))
    return HypothesisCheck(best >= 3, len(vals0), len(vals1), best)


def _batch_scores(g00, g11, g01, a, b):
    """Unitarity score and acceptance for arrays of filtration coefficients a, b."""
    a = a[:, None, None]
    b = b[:, None, None]
    m = (np.abs(a) ** 2) * g00 + (np.abs(b) ** 2) * g11 + a * b.conj() * g01 + a.conj() * b * g01.conj().T[None]
    tr = np.real(np.trace(m, axis1=1, axis2=2))
    top = np.linalg.eigvalsh(m)[:, -1]
    ok = tr > 2 * ACCEPT_MIN
    score = np.where(ok, top / np.where(ok, tr, 1.0), -np.inf)
    return score, tr / 2


def _coefficients(theta_a, phi_a, theta_b, phi_b):
    a = np.cos(theta_a / 2) * np.cos(theta_b / 2)
    b = np.exp(1j * (phi_a - phi_b)) * np.sin(theta_a / 2) * np.sin(theta_b / 2)
    return a.astype(complex), b


@dataclass(frozen=True)
class PostselectionSearch:
    best_score: float
    grid_score: float
    angles: tuple  # (theta_alpha, phi_alpha, theta_beta, phi_beta)
    best_alpha: np.ndarray
    best_beta: np.ndarray
    acceptance: float
    grid: int

    def certified(self, margin: float = CERT_MARGIN) -> bool:
        return self.best_score <= 1 - margin

    def unitary_found(self, tol: float = 1e-6) -> bool:
        return self.best_score >= 1 - tol


def search_postselection_pairs(pairs, grid: int = 32, refine: bool = True, chunk: int = 1 << 16) -> PostselectionSearch:
    """Maximize the unitarity score over Bloch-angle grids for |alpha> and |beta>.

    theta runs over ``grid`` points of [0, pi] and phi over ``grid`` points of
    [0, 2 pi). The grid maximum (first in lexicographic order on ties) seeds a
    Nelder-Mead refinement over the four angles; the larger score is kept.
    """
    if grid < 8:
        raise ValueError("grid must have at least 8 points per angle")
    pairs = [(qmat.as_matrix(u0), qmat.as_matrix(u1), float(w)) for u0, u1, w in pairs]
    g00, g11, g01 = _pair_grams(pairs)

    thetas = np.linspace(0.0, np.pi, grid)
    phis = 2 * np.pi * np.arange(grid) / grid
    mesh = np.meshgrid(thetas, phis, thetas, phis, indexing="ij")
    flat = [m.reshape(-1) for m in mesh]
    n = flat[0].size

    best_idx, best_score = -1, -np.inf
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        a, b = _coefficients(*(f[sl] for f in flat))
        scores, _ = _batch_scores(g00, g11, g01, a, b)
        i = int(np.argmax(scores))
        if scores[i] > best_score:
            best_score, best_idx = float(scores[i]), start + i

    angles = np.array([f[best_idx] for f in flat])
    grid_score = best_score

    def score_at(x):
        a, b = _coefficients(*(np.atleast_1d(v) for v in x))
        s, acc = _batch_scores(g00, g11, g01, a, b)
        return float(s[0]), float(acc[0])

    if refine:
        res = minimize(
            lambda x: -max(score_at(x)[0], 0.0),
            angles,
            method="Nelder-Mead",
            options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-15},
        )
        if -res.fun > best_score:
            best_score, angles = float(-res.fun), np.asarray(res.x)

    best_score, acc = score_at(angles)
    return PostselectionSearch(
        best_score=best_score,
        grid_score=grid_score,
        angles=tuple(float(v) for v in angles),
        best_alpha=qmat.bloch_ket(angles[0], angles[1]),
        best_beta=qmat.bloch_ket(angles[2], angles[3]),
        acceptance=acc,
        grid=grid,
    )


def search_postselection(ensemble0, ensemble1, grid: int = 32, refine: bool = True) -> PostselectionSearch:
    setup = FiltrationSetup.independent(ensemble0, ensemble1)
    return search_postselection_pairs(setup.pairs, grid=grid, refine=refine)


def flip_ensembles(p: float, q: float):
    """Independent noise of a bit flip (path 0) and a phase flip (path 1)."""
    p = _check_probability(p)
    q = _check_probability(q, "q")
    return [(I2, 1 - p), (X, p)], [(I2, 1 - q), (Z, q)]


def pauli_ensemble():
    return [(u, 0.25) for u in qmat.PAULIS]


def switch_pairs(p: float, q: float) -> list:
    """Correlated pairs (X^i Z^j, Z^j X^i) weighted by the flip probabilities."""
    p = _check_probability(p)
    q = _check_probability(q, "q")
    out = []
    for i, j in ((0, 0), (1, 0), (0, 1), (1, 1)):
        xi = np.linalg.matrix_power(X, i)
        zj = np.linalg.matrix_power(Z, j)
        w = (p if i else 1 - p) * (q if j else 1 - q)
        out.append((xi @ zj, zj @ xi, w))
    return out


@dataclass(frozen=True)
class CorrelatedReport:
    p: float
    q: float
    score: float
    acceptance: float
    unitary: np.ndarray
    overlap_with_y: float  # |Tr(Y^dag U)| / 2, 1 when U is Y up to phase

    @property
    def is_unitary(self) -> bool:
        return abs(self.score - 1) < 1e-10


def switch_correlated_demo(p: float, q: float) -> CorrelatedReport:
    """Prepare the path in |+>, postselect |->, with SWITCH-correlated noise."""
    p = _check_probability(p)
    q = _check_probability(q, "q")
    if p * q == 0:
        raise PostselectionError("p*q = 0: the |-> outcome never occurs")
    setup = FiltrationSetup.correlated(switch_pairs(p, q), KET_PLUS, KET_MINUS)
    choi, acc = postselected_channel_choi(setup)
    u = recovered_unitary(choi)
    return CorrelatedReport(
        p=p,
        q=q,
        score=unitarity_score(choi),
        acceptance=acc,
        unitary=u,
        overlap_with_y=float(abs(np.trace(Y.conj().T @ u)) / 2),
    )
