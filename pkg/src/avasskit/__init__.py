"""Exact reachability and coverability analysis for affine counter machines.

The package is organised around one data model (:mod:`avasskit.machine`) and
one symbolic set representation (:mod:`avasskit.semiset`); everything else is
an analysis on top: symbolic backward reachability with cycle acceleration
(:mod:`avasskit.prestar`), decision procedures (:mod:`avasskit.decide`), a
finite abstraction for totally positive machines (:mod:`avasskit.omega`),
ordering and functionality tests (:mod:`avasskit.presburger`), bounded
concrete exploration (:mod:`avasskit.simulator`), machine constructions
(:mod:`avasskit.generators`), and a text format (:mod:`avasskit.frontend`).
"""

from .errors import (
    ArityError,
    AvassKitError,
    BudgetExceededError,
    FlavorError,
    GuardedMachineError,
    MachineError,
    ParseError,
)
from .frontend import (
    parse_configuration,
    parse_formula,
    parse_formula_file,
    parse_machine,
    serialize_formula,
    serialize_machine,
    serialize_payload,
)
from .machine import (
    AffineMap1,
    AffineMapD,
    Configuration,
    Machine,
    MinskyOp,
    RelationalUpdate,
    Transition,
    UpwardTarget,
    apply_payload,
    classify,
)
from .semiset import Clause, SemilinearSet
from .presburger import evaluate, exists_solution, is_functional, is_wqo
from .prestar import compute_pre_star, compute_pre_star_upward
from .decide import (
    control_state_reachable,
    coverable,
    coverable_via_reduction,
    covering_reduction,
    is_strongly_monotone,
    is_well_structured,
    reachable,
)
from .omega import OMEGA, OmegaVector, abstract, reachable_totally_positive
from .simulator import Budget, find_path, post_star, pre_star_bounded
from .generators import (
    PCPInstance,
    build_n1,
    build_n2,
    build_pcp_machine,
    builtin_examples,
    machine_m1,
    machine_m2,
    pcp_witness,
    zero_test_gadget,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap1",
    "AffineMapD",
    "ArityError",
    "AvassKitError",
    "Budget",
    "BudgetExceededError",
    "Clause",
    "Configuration",
    "FlavorError",
    "GuardedMachineError",
    "Machine",
    "MachineError",
    "MinskyOp",
    "OMEGA",
    "OmegaVector",
    "PCPInstance",
    "ParseError",
    "RelationalUpdate",
    "SemilinearSet",
    "Transition",
    "UpwardTarget",
    "abstract",
    "apply_payload",
    "build_n1",
    "build_n2",
    "build_pcp_machine",
    "builtin_examples",
    "classify",
    "compute_pre_star",
    "compute_pre_star_upward",
    "control_state_reachable",
    "coverable",
    "coverable_via_reduction",
    "covering_reduction",
    "evaluate",
    "exists_solution",
    "find_path",
    "is_functional",
    "is_strongly_monotone",
    "is_well_structured",
    "is_wqo",
    "machine_m1",
    "machine_m2",
    "parse_configuration",
    "parse_formula",
    "parse_formula_file",
    "parse_machine",
    "pcp_witness",
    "post_star",
    "pre_star_bounded",
    "reachable",
    "reachable_totally_positive",
    "serialize_formula",
    "serialize_machine",
    "serialize_payload",
    "zero_test_gadget",
    "__version__",
]
