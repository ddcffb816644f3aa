"""Coverage of Poisson-Boolean and Markov-Poisson-Boolean sensor fields."""

from .analytic import PBParams
from .geometry import Region, ShapeSpec
from .simulator import SensorField, PathSpec, VacancyMeasurement

__all__ = ["PBParams", "Region", "ShapeSpec", "SensorField", "PathSpec", "VacancyMeasurement"]
__version__ = "0.1.0"
