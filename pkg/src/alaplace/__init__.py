"""Quasilinear Dirichlet problems driven by a general Young function.

Solves -div(A'(|grad u|) grad u/|grad u|) = f(x, u, grad u) with zero boundary
values between an ordered subsolution/supersolution pair, and verifies the
structural inequalities (growth indices, ellipticity constants, doubling,
duality, positivity) that the construction rests on.
"""

from .youngfn import (
    YoungFunction,
    IndexBounds,
    DoublingConstants,
    ConjugateFunction,
    HolderReport,
    make_young,
    default_grid,
    estimate_index_bounds,
    doubling_constants,
    conjugate,
    luxemburg_norm,
    check_holder,
)
from .operators import ALaplacianOperator, StructureReport, make_operator, flux, hessian, verify_structure
from .discretize import (
    Mesh,
    DiscreteField,
    AssembledSystem,
    interval_mesh,
    rectangle_mesh,
    constant_field,
    field_from_callable,
    assemble,
    assemble_energy,
    write_field_csv,
    read_field_csv,
)
from .solver import (
    ConvectionTerm,
    OneSidedGrowth,
    TruncatedConvection,
    SubSuperPair,
    SolveReport,
    SolveError,
    truncate_convection,
    solve_frozen,
    solve_problem,
    mirror_problem,
    auxiliary_supersolution,
)
from .analysis import (
    HypothesisReport,
    GrowthReport,
    ResidualReport,
    PositivityCertificate,
    PositivityReport,
    SignReport,
    check_hypothesis_H,
    check_growth_H,
    verify_subsolution,
    verify_supersolution,
    build_positivity_certificate,
    check_positivity_certificate,
    check_interior_sign,
)
from .scenario import Scenario, ScenarioError, load_scenario, corpus_ids, corpus_entry, run_scenario

__version__ = "0.1.0"
