"""Exact computation with congruence subgroups, modular units and the levels of their p-th roots."""

from .arith import CycloNumber, RootOfUnity, bernoulli2, cyclo_arith, galois_sigma
from .cusps import (
    Cusp,
    CuspClassSet,
    conductor_lcm_widths,
    conductor_modular,
    cusp_classes,
    cusp_equivalent,
    fan_width,
)
from .grammar import UnitParseError, format_unit, parse_unit
from .level import (
    AmbiguityChar,
    RootLevelReport,
    detect_root_level,
    is_pth_power,
    quad_extension_test,
    root_ambiguity,
    stabilizer_handle,
)
from .psl2 import (
    MatModN,
    SubgroupHandle,
    UniMatrix,
    enumerate_psl2_modn,
    gamma,
    index_gamma,
    lift_modn,
    schreier_generators,
)
from .qseries import QSeries, series_arith, series_eq, series_eval_numeric, series_invert, series_root
from .units import (
    EtaPower,
    SiegelSymbol,
    UnitProduct,
    is_invariant,
    j_qexp,
    product_qexp,
    product_slash,
    siegel_qexp,
    siegel_slash,
    sqrt_j_minus_1728,
)

__version__ = "0.1.0"
