"""Lagrangian mechanics on the standard Cliffordian Kähler manifold R^{8n}."""

from .dynamics import (
    KahlerForm,
    SingularHessian,
    StageNotConverged,
    Trajectory,
    diagnose,
    el_residual,
    energy_differential,
    expansion_oracle_kahler,
    integrate,
    kahler_form,
    pairing_table,
    solve_semispray,
)
from .geometry import (
    Dimension,
    StructureMatrix,
    apply,
    compose,
    fundamental_form,
    make_structure,
    metric_compatibility,
    verify_algebra,
)
from .lagrangian import (
    BuiltinLagrangian,
    ExpressionLagrangian,
    LagrangianField,
    SemisprayState,
    energy,
    eval_jet,
    liouville,
    vertical_derivation_form,
    vertical_differential,
)
from .parser import eval_expr_jet, parse

__version__ = "0.1.0"
