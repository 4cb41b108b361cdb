"""Fourier coefficients of Pauli-encoded circuits and learning on top of them."""
from .circuit import (
    Encode,
    Fixed,
    FrequencyLattice,
    LatticeKind,
    ParametrizedCircuit,
    encode,
    fixed,
    lattice,
    normalize_to_z,
    random_circuit,
    upload_counts,
    validate,
)
from .circuit_io import DocumentError, load_circuit, parse, save_circuit, serialize
from .errors import BoundError, BudgetError, ConvergenceError
from .fourier import (
    CompiledFourierCircuit,
    FourierTable,
    compile_expectation,
    compile_state,
    extract_coefficient,
    extract_table,
    grid_dft_oracle,
    qft_pathway,
    reconstruct,
    success_probability,
)
from .hamiltonian import (
    ParamHamiltonian,
    Trotter,
    TrotterPlan,
    build_ising,
    commutator_bound,
    eval_dynamics,
    plan_trotter,
    trotterize,
)
from .learning import (
    clip_psd,
    covering_grid,
    fit_flipped,
    generate_dataset,
    krr_error_bound,
    krr_fit,
    krr_predict,
    lasso_fit,
    plan_lasso,
    predict,
    risk,
    true_weights,
)
from .pauli import Combination, PauliObs, PauliString, ZeroProjector, combination, pauli_obs
from .shots import EXACT, Exact, Shots, gram_entry, sample_bernoulli_mean, shots_for
from .statevector import controlled_run, eval_concept, exact_evolution, expectation, postselect, run

__version__ = "0.1.0"
