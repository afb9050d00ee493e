"""nslab: a numerical laboratory for viscous flow in a slab with a
slip-length (Robin) wall condition.

Subpackages cover: grids/norms (`grid`), mollified reflection operators
(`mollify`), half-space heat and vorticity kernels (`heatkern`), divergence
-free test-field construction (`testfields`), distributional residual checks
(`weakforms`), the time-stepping field solver (`solver`), and the experiment
harness (`harness`).  Command line entry point: ``nslab``.
"""

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    InvalidFieldError,
    NslabError,
    PreconditionError,
    RegionError,
    ResolutionError,
)
from .grid import (
    CutoffFamily,
    FieldSeries,
    MixedNormSpec,
    ScalarField,
    SlabGrid,
    TensorField,
    VectorField,
    build_cutoffs,
    curl,
    div,
    dump_series,
    grad,
    load_series,
    mixed_norm,
    norm_report,
    q_star,
)
from .testfields import (
    BaseField,
    MeanZeroDisk,
    TestField,
    bogovskii_kernel,
    bogovskii_solve,
    build_battery,
    curl_test_field,
    disk_norm_report,
    interior_bump_field,
    navier_eps_ladder,
    navier_test_field,
    random_base_field,
    sample_series,
    w_field,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DegenerateInputError", "InvalidFieldError",
    "NslabError", "PreconditionError", "RegionError", "ResolutionError",
    "SlabGrid", "ScalarField", "VectorField", "TensorField", "FieldSeries",
    "MixedNormSpec", "mixed_norm", "norm_report", "q_star",
    "grad", "div", "curl", "CutoffFamily", "build_cutoffs",
    "dump_series", "load_series",
    "BaseField", "MeanZeroDisk", "TestField",
    "bogovskii_kernel", "bogovskii_solve", "build_battery",
    "curl_test_field", "disk_norm_report", "interior_bump_field",
    "navier_eps_ladder", "navier_test_field", "random_base_field",
    "sample_series", "w_field", "__version__",
]
