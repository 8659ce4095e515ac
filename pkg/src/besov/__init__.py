"""Weighted Besov spaces on the polydisc: norms, Hankel and Berezin-type operators, verification."""
from .holocalc import D, PolySeries, TruncationError, extremal_f_r, frac_diff, symbol_g_r
from .operators import (FiniteSection, OperatorConfig, berezin_apply, finite_section,
                        hankel_apply, operator_norm_probe, operator_ratio)
from .partition import build_partition, check_proposition1, covering_multiplicity
from .quadrature import (DiscRule, QuadratureError, QuadratureScheme, integrate,
                         integrate_kernel, mc_integrate)
from .report import VerificationReport, emit_report
from .spaces import MeasureConditionError, SpaceParams, besov_norm, lemma1_ratio, lp_norm
from .symbols import Symbol
from .verify import ExperimentSpec, InvalidSpecError, run
from .weights import (ProductWeight, WeightFactor, lemma2_ratio, regularity_indices,
                      verify_class_S, weight_from_config)

__version__ = "0.1.0"
