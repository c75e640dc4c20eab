"""Heralded noiseless transmission through the flip SWITCH.

The receiver measures the control qubit in the {|+>, |->} basis. The |->
outcome leaves the particle in Y rho Y, which a Y correction undoes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmat
from .channel import _check_probability
from .qmat import KET0, KET1, KET_MINUS, KET_PLUS, Y
from .switch import pauli_switch_closed_form

ZERO_PROB = 1e-14

BB84_STATES = {"0": KET0, "1": KET1, "+": KET_PLUS, "-": KET_MINUS}


@dataclass(frozen=True)
class HeraldOutcome:
    """Control-measurement statistics. A state is None when its outcome has zero probability."""

    prob_plus: float
    prob_minus: float
    state_plus: np.ndarray | None
    state_minus: np.ndarray | None


def _condition(joint: np.ndarray, control_ket: np.ndarray):
    bra = np.kron(qmat.I2, control_ket.reshape(2, 1))
    block = bra.conj().T @ joint @ bra
    prob = float(np.real(np.trace(block)))
    if prob <= ZERO_PROB:
        return 0.0, None
    return prob, block / prob


def herald_measure(joint) -> HeraldOutcome:
    joint = qmat.as_matrix(joint)
    if joint.shape != (4, 4):
        raise qmat.DimensionError(f"expected a particle (x) control state, got {joint.shape}")
    pp, sp = _condition(joint, KET_PLUS)
    pm, sm = _condition(joint, KET_MINUS)
    return HeraldOutcome(pp, pm, sp, sm)


def correct_minus(state_minus) -> np.ndarray:
    s = qmat.as_matrix(state_minus)
    return Y @ s @ Y


def heralded_success_probability(p: float, q: float) -> float:
    return _check_probability(p) * _check_probability(q, "q")


@dataclass
class InputStats:
    label: str
    trials: int = 0
    successes: int = 0
    fidelity_sum: float = 0.0
    min_fidelity: float = float("nan")

    @property
    def success_frequency(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def mean_fidelity(self) -> float:
        return self.fidelity_sum / self.successes if self.successes else float("nan")


@dataclass
class HeraldStats:
    p: float
    q: float
    n_trials: int
    seed: int
    successes: int
    mean_fidelity: float
    min_fidelity: float
    max_fidelity_error: float
    per_input: list = field(default_factory=list)

    @property
    def analytic(self) -> float:
        return self.p * self.q

    @property
    def success_frequency(self) -> float:
        return self.successes / self.n_trials

    @property
    def std_error(self) -> float:
        f = self.success_frequency
        return float(np.sqrt(f * (1 - f) / self.n_trials))

    @property
    def analytic_sigma(self) -> float:
        a = self.analytic
        return float(np.sqrt(a * (1 - a) / self.n_trials))

    def within_sigmas(self, k: float = 3.0) -> bool:
        return abs(self.success_frequency - self.analytic) <= k * self.analytic_sigma + 1e-15

    @property
    def key_rate_factor(self) -> float:
        """Fraction of qubits that arrive heralded; a keyed protocol's rate scales by this."""
        return self.analytic


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; draws are identical on every platform for a given seed."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def monte_carlo_herald(p: float, q: float, n_trials: int, seed: int = 42, input_states=None) -> HeraldStats:
    """Simulate ``n_trials`` uses of the heralded channel.

    Trial t draws its input index and its control-outcome uniform as the
    t-th entries of two vectorized draws from one Philox stream, so the
    trajectory depends on the seed alone.
    """
    p = _check_probability(p)
    q = _check_probability(q, "q")
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if input_states is None:
        input_states = BB84_STATES
    if isinstance(input_states, dict):
        labels, kets = list(input_states), list(input_states.values())
    else:
        kets = list(input_states)
        labels = [str(i) for i in range(len(kets))]
    if not kets:
        raise ValueError("input_states must not be empty")
    kets = [np.asarray(k, dtype=complex) / np.linalg.norm(k) for k in kets]

    # joint output depends only on the input, so each distinct input is resolved once
    prob_minus = np.empty(len(kets))
    fids = np.full(len(kets), np.nan)
    for i, psi in enumerate(kets):
        out = herald_measure(pauli_switch_closed_form(p, q, qmat.proj(psi)))
        prob_minus[i] = out.prob_minus
        if out.state_minus is not None:
            fids[i] = qmat.fidelity_pure(psi, correct_minus(out.state_minus))

    rng = make_rng(seed)
    which = rng.integers(0, len(kets), size=n_trials)
    u = rng.random(n_trials)
    heralded = u < prob_minus[which]

    per_input = []
    for i, label in enumerate(labels):
        mask = which == i
        hits = int(np.count_nonzero(heralded & mask))
        st = InputStats(label, int(np.count_nonzero(mask)), hits)
        if hits:
            st.fidelity_sum = hits * fids[i]
            st.min_fidelity = fids[i]
        per_input.append(st)

    successes = int(np.count_nonzero(heralded))
    trial_fids = fids[which[heralded]]
    return HeraldStats(
        p=p,
        q=q,
        n_trials=n_trials,
        seed=int(seed),
        successes=successes,
        mean_fidelity=float(trial_fids.mean()) if successes else float("nan"),
        min_fidelity=float(trial_fids.min()) if successes else float("nan"),
        max_fidelity_error=float(np.max(np.abs(1 - trial_fids))) if successes else float("nan"),
        per_input=per_input,
    )
