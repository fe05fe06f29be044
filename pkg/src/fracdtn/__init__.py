"""Fractional powers of non-negative operators and their Dirichlet-to-Neumann realization."""

from .balakrishnan import PowerResult, balakrishnan_power, scalar_balakrishnan, shifted_power
from .errors import (
    ConvergenceError,
    CrossCheckError,
    DimensionError,
    DomainError,
    FitError,
    FracDtnError,
    NonNegativityError,
    SingularSystemError,
)
from .extension import (
    DtnReport,
    ExtensionTrace,
    dtn_extract,
    extension_derivative,
    extension_second_derivative,
    extension_trace,
    extension_value,
    ode_residual,
)
from .mulop import (
    SymbolGrid,
    closed_form_derivative,
    closed_form_extension,
    closed_form_power,
    shift_decay_exponent,
    small_t_asymptotics_check,
)
from .operators import (
    OperatorHandle,
    SectorReport,
    load_operator,
    operator_from_dict,
    operator_to_dict,
    spectral_power_oracle,
    validate_nonnegativity,
)
from .special import (
    FractionalOrder,
    bessel_i,
    bessel_k,
    bessel_k_integral,
    c_alpha,
    gamma,
    principal_power,
)

__version__ = "0.1.0"
