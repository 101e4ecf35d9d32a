"""Experiment front-ends: cavity-QED Rabi and Ramsey, trapped-ion sidebands, interrupted evolution."""

from .cavity import (
    RabiQEDParams,
    jc_estimate_tau,
    jc_gamma_small_tau,
    jc_p_eg_averaged,
    jc_p_eg_ideal,
    jc_rates,
)
from .interrupted import interrupted_F, rescaled_time
from .ion import (
    IonParams,
    PowerLawSummary,
    ion_decay_rate,
    ion_estimate_tau,
    ion_p_down,
    ion_p_down_ideal,
    ion_power_law_exponents,
    ion_rabi_frequency,
    laguerre_gen1,
    rabi_ratios,
)
from .ramsey import (
    RamseyParams,
    fringe_offset,
    ramsey_epsilon_n,
    ramsey_p_eg_averaged,
    ramsey_p_eg_gaussian,
    ramsey_p_eg_theory,
    ramsey_shifted_offset,
    ramsey_statevector_sequence,
    ramsey_visibility,
    ramsey_width,
)
