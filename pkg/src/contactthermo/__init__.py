"""Contact geometry of the thermodynamic phase space: metric structure, gauge and
Legendre transformations, contact Hamiltonian flows and model fluids."""

from .chart import TpsPoint, ScalarField, VectorAt, CovectorAt
from .errors import (ContactThermoError, ConvergenceError, DegenerateMetricError,
                     DimensionError, DivergenceError, DomainError, GaugeSingularError,
                     LegendreBreakdown, NumericError, PhaseRuleError,
                     UnsupportedDimensionError)
from .legendre import LegendreSpec, Potential
from .metric import StructureBundle, default_bundle
from .models import IdealGasModel, VdwModel

__version__ = "0.1.0"

__all__ = [
    "TpsPoint", "ScalarField", "VectorAt", "CovectorAt",
    "ContactThermoError", "ConvergenceError", "DegenerateMetricError", "DimensionError",
    "DivergenceError", "DomainError", "GaugeSingularError", "LegendreBreakdown",
    "NumericError", "PhaseRuleError", "UnsupportedDimensionError",
    "LegendreSpec", "Potential", "StructureBundle", "default_bundle",
    "IdealGasModel", "VdwModel",
]
