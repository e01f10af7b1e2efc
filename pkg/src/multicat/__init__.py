"""Sequential weak-measurement preparation of multi-cat spin states.

Conditional-state simulation, quantum Fisher information (exact, brute force
and Monte Carlo), the continuous-time master equation, and NV coupling
geometry.
"""

__version__ = "0.1.0"

from .spin_ops import DICKE, FULL, SCSParams, State, collective_op, dicke_embed, expectation, scs_state
from .protocol import (
    MulticatDecomposition,
    ProtocolParams,
    TrajectorySample,
    apply_cycle,
    average_state,
    enumerate_trajectories,
    kraus_single,
    multicat_decomposition,
    sample_trajectory,
    step_operator,
)
from .qfi import (
    AvgQfiCurve,
    asymptotic_qfi,
    avg_qfi_brute,
    avg_qfi_exact,
    avg_qfi_exact_nonsym,
    avg_qfi_exact_sym,
    avg_qfi_mc,
    disorder_averaged_curve,
    entanglement_depth,
    pure_qfi_jz,
)
from .master_eq import (
    DensityOperator,
    LindbladParams,
    discrete_continuum_check,
    integrate,
    lindblad_rhs_nonsym,
    lindblad_rhs_sym,
    qfi_proxy,
    timescales,
)
from .nv_model import (
    DisorderModel,
    SpinGeometry,
    couplings_from_positions,
    disorder_sample,
    hyperfine_perp,
    init_pulse_time,
)
