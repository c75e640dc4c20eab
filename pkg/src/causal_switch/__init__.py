"""Two noisy qubit channels in a superposition of orders."""

from .channel import (
    ChoiMatrix,
    KrausChannel,
    apply,
    bit_flip,
    choi_to_kraus,
    compose,
    dephasing_capacity,
    kraus_to_choi,
    phase_flip,
    validate_cptp,
)
from .entropic import (
    binary_entropy,
    coherent_information_at,
    crossover_p,
    maximize_coherent_information,
    switch_flip_coherent_info_closed,
    von_neumann_entropy,
)
from .herald import correct_minus, herald_measure, heralded_success_probability, monte_carlo_herald
from .switch import SwitchConfig, apply_switch, build_switch, flip_switch, pauli_switch_closed_form, switched_choi

__version__ = "0.1.0"
