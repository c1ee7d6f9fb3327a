"""Continued-fraction digit-sum level sets: exact cylinder arithmetic,
growth-rate classification, dimension estimates, explicit constructions
and finite checks of the supporting inequalities."""

__version__ = "0.1.0"

from .cf import (  # noqa: E402
    Cylinder, DigitStats, Word, continuants, convergent, convergents, cylinder,
    cylinder_length, digit_stats, expand, gauss_step, iter_words,
)
from .errors import BudgetExceeded, HypothesisNotMet, RefusalError  # noqa: E402
from .growth import (  # noqa: E402
    AsymptoticHints, ClassifierVerdict, ExponentReport, GrowthSequence,
    classify_necessary, growth_exponents, make_phi,
)
from .dimension import (  # noqa: E402
    DimensionEstimate, PressureConfig, cover_dimension, cv_gap, flww_dimension,
    lr_dimension, pressure, solve_root, ww_dimension,
)
from .constructions import (  # noqa: E402
    ConstructionSpec, PinnedWord, delete_pinned, generate, generate_all, perturb,
    track_phi,
)
from .verify import (  # noqa: E402
    CheckReport, PairInstance, check_comparison, check_deletion_inequality,
    check_interval_bounds, check_ratio_bounds,
)

__all__ = [
    "Word", "Cylinder", "DigitStats", "expand", "convergents", "convergent", "continuants",
    "cylinder", "cylinder_length", "gauss_step", "digit_stats", "iter_words",
    "RefusalError", "BudgetExceeded", "HypothesisNotMet",
    "GrowthSequence", "AsymptoticHints", "ExponentReport", "ClassifierVerdict", "make_phi",
    "growth_exponents", "classify_necessary",
    "PressureConfig", "DimensionEstimate", "pressure", "solve_root", "ww_dimension",
    "flww_dimension", "lr_dimension", "cv_gap", "cover_dimension",
    "ConstructionSpec", "PinnedWord", "generate", "generate_all", "track_phi", "perturb",
    "delete_pinned",
    "PairInstance", "CheckReport", "check_ratio_bounds", "check_comparison",
    "check_interval_bounds", "check_deletion_inequality",
]
