"""The quantum SWITCH of two qubit channels.

For Kraus families {E_i}, {F_j} the switched Kraus operators are

    W_ij = E_i F_j (x) |0><0| + F_j E_i (x) |1><1|

acting on particle (x) control, and the switched channel sends a particle
state rho to sum_ij W_ij (rho (x) omega) W_ij^dag. The control state omega
belongs to the channel: callers only ever hand in a particle state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .channel import (
    ChoiMatrix,
    KrausChannel,
    _check_probability,
    bit_flip,
    kraus_to_choi,
    phase_flip,
    validate_cptp,
)
from .qmat import KET0, KET1, KET_MINUS, KET_PLUS, X, Y, Z, DimensionError

P0 = qmat.proj(KET0)
P1 = qmat.proj(KET1)
PLUS = qmat.proj(KET_PLUS)
MINUS = qmat.proj(KET_MINUS)


@dataclass(frozen=True)
class SwitchConfig:
    channel_e: KrausChannel
    channel_f: KrausChannel
    omega: np.ndarray = PLUS

    def __post_init__(self):
        for name, ch in (("channel_e", self.channel_e), ("channel_f", self.channel_f)):
            if (ch.d_in, ch.d_out) != (2, 2):
                raise DimensionError(f"{name} must be a qubit channel, got {ch.d_in}->{ch.d_out}")
            report = validate_cptp(ch)
            if not report:
                raise ValueError(f"{name} is not trace preserving (deviation {report.max_violation:.3g})")
        object.__setattr__(self, "omega", qmat.check_density_matrix(self.omega, [2]))


@dataclass(frozen=True)
class SwitchedChannel:
    kraus_w: tuple
    config: SwitchConfig

    @property
    def omega(self) -> np.ndarray:
        return self.config.omega

    def __call__(self, rho) -> np.ndarray:
        return apply_switch(self, rho)

    def to_kraus_channel(self) -> KrausChannel:
        """The 2 -> 4 map rho -> joint output as an ordinary Kraus channel.

        omega is split into its eigen-ensemble, so each term is
        sqrt(w) W_ij (I (x) |v>) for every eigenpair (w, v) of omega.
        """
        w, v = qmat.hermitian_eig(self.omega)
        ops = []
        for lam, vec in zip(w, v.T):
            if lam <= 1e-14:
                continue
            embed = np.kron(qmat.I2, vec.reshape(2, 1))
            ops.extend(np.sqrt(lam) * W @ embed for W in self.kraus_w)
        return KrausChannel(ops)


def switch_kraus(e_op, f_op) -> np.ndarray:
    return qmat.tensor(e_op @ f_op, P0) + qmat.tensor(f_op @ e_op, P1)


def build_switch(config: SwitchConfig) -> SwitchedChannel:
    ops = tuple(switch_kraus(e, f) for e in config.channel_e.kraus for f in config.channel_f.kraus)
    total = sum(w.conj().T @ w for w in ops)
    dev = float(np.max(np.abs(total - np.eye(4))))
    if dev > 1e-9:
        raise ValueError(f"switched Kraus family is not trace preserving (deviation {dev:.3g})")
    return SwitchedChannel(ops, config)


def flip_switch(p: float, q: float, omega=PLUS) -> SwitchedChannel:
    """SWITCH of bit_flip(p) and phase_flip(q)."""
    return build_switch(SwitchConfig(bit_flip(p), phase_flip(q), omega))


def apply_switch(sc: SwitchedChannel, rho) -> np.ndarray:
    rho = qmat.as_matrix(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"the switch takes a qubit particle state, got {rho.shape}")
    joint_in = np.kron(rho, sc.omega)
    return sum(w @ joint_in @ w.conj().T for w in sc.kraus_w)


def switched_choi(sc: SwitchedChannel) -> ChoiMatrix:
    return kraus_to_choi(sc.to_kraus_channel())


def split_control(joint) -> dict:
    """Slice a particle (x) control operator into its 2x2 particle blocks.

    Block ``(k, kk)`` is (I (x) <k|) joint (I (x) |kk>), unnormalized.
    """
    t = qmat.as_matrix(joint).reshape(2, 2, 2, 2)
    return {(k, kk): t[:, k, :, kk].copy() for k in (0, 1) for kk in (0, 1)}


def control_blocks(sc: SwitchedChannel, rho) -> dict:
    return split_control(apply_switch(sc, rho))


def assemble_control(blocks: dict) -> np.ndarray:
    return sum(np.kron(b, qmat.outer(np.eye(2)[k], np.eye(2)[kk])) for (k, kk), b in blocks.items())


def pauli_switch_closed_form(p: float, q: float, rho) -> np.ndarray:
    """Joint output of the flip SWITCH with the control prepared in |+>.

    [(1-p)(1-q) rho + p(1-q) X rho X + q(1-p) Z rho Z] (x) |+><+|
      + [p q Y rho Y] (x) |-><-|
    """
    p = _check_probability(p)
    q = _check_probability(q, "q")
    rho = qmat.as_matrix(rho)
    plus_part = (1 - p) * (1 - q) * rho + p * (1 - q) * (X @ rho @ X) + q * (1 - p) * (Z @ rho @ Z)
    minus_part = p * q * (Y @ rho @ Y)
    return np.kron(plus_part, PLUS) + np.kron(minus_part, MINUS)
