"""Zames-Falb multiplier certificates for slope-restricted Lur'e systems."""

from .iqc import Certificate, FrequencyGrid, UnstablePlantError, fdi_margin, log_grid
from .lti import TransferFunction, freq_response, is_hurwitz, tf_to_ss, validate_tf
from .multiplier import MultiplierBasis, l1_norm_exact, make_multiplier, multiplier_valid_for_class
from .nonlin import NonlinearitySpec, check_class, parse_shape
from .search import SearchConfig, bisect_alpha, certify, circle_baseline, lp_feasibility
from .sim import falsify, simulate_lure

__version__ = "0.1.0"
