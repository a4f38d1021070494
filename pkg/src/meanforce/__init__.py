"""Mean-force Gibbs states of qubits in a common bosonic reservoir.

Library layout:

- ``algebra``: small-Hilbert-space linear algebra (Pauli operators, thermal
  states, partial transpose/trace, negativity, purity);
- ``spectral``: spectral densities, reaction-coordinate mapping, and the
  thermal reservoir kernel (quadrature and residue routes);
- ``engine``: generic second-order perturbative mean-force construction;
- ``weak``: closed-form weak-coupling states for two and N qubits;
- ``narrow``: reaction-coordinate / polaron treatment of narrow densities;
- ``oracle``: exact diagonalization of qubits plus the extracted mode;
- ``sweep``: parameter sweeps, peak/threshold searches, CSV emission;
- ``cli``: the ``meanforce`` command-line entry point.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .algebra import (
    BETA_INF,
    DensityMatrix,
    collective_sx,
    gibbs_state,
    hermitian_eigensystem,
    negativity,
    partial_trace,
    partial_transpose,
    pauli,
    purity,
    two_qubit_hamiltonian,
)
from .engine import EigenOperatorDecomposition, MFGResult, eigenoperator_decompose, \
    mfg_perturbative, validity_metric
from .narrow import (
    EffectiveSystem,
    NarrowResult,
    direct_gibbs_state,
    effective_hamiltonian,
    energy_gap,
    gap_asymptotic,
    narrow_state,
    narrow_state_fixed_g,
    polaron_channel,
    zero_width_state,
)
from .oracle import TruncatedDicke, dicke_hamiltonian, reduced_thermal_state
from .spectral import RCParams, ReservoirKernel, SpectralDensity, density_for_fixed_g, \
    rc_density, rc_params
from .sweep import SweepConfig, SweepResult, find_g_peak, find_t_n, phase_map, run_sweep, \
    width_slope
from .weak import (
    WeakCouplingContext,
    dressing_strength,
    dressing_strength_derivative,
    dressing_strength_pv,
    negativity_small_gap,
    small_gap_state,
    weak_state,
    weak_state_engine,
    weak_state_n,
)
