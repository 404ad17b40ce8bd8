"""Periodic points and large-deviation rate functions of the Dyck shift."""

from .dyck import ZERO, ReducedForm, Symbol, format_word, height_profile, parse_word, reduce_word, reduced_concat
from .observable import Observable, indicator_close
from .periodic import (
    MultiplierClass,
    PeriodicCensus,
    WorkBudgetExceeded,
    birkhoff_average,
    census,
    classify,
    empirical_cylinders,
    enumerate_periodic,
    is_periodic_admissible,
)

__version__ = "0.1.0"
