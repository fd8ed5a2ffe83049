"""Large deviations and exact tail asymptotics for self-normalized sums."""
from .distributions import (CustomConvex, FiniteDiscrete, Gaussian, PowerLaw,
                            ShiftedPareto, TwoPoint, cumulant, cumulant_grad,
                            cumulant_hess, tilted_sample, z_star)

__all__ = [
    "CustomConvex", "FiniteDiscrete", "Gaussian", "PowerLaw", "ShiftedPareto",
    "TwoPoint", "cumulant", "cumulant_grad", "cumulant_hess", "tilted_sample", "z_star",
]
