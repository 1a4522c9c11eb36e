"""
Simulation Designs
Single source of the true parameter vectors used by the Monte Carlo harness,
the CLI `tables` command and the slow acceptance tests
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from backend.exceptions import ParameterError
from backend.sagarch_model import ParamVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Design:
    """A named true theta with the regime it is meant to exercise"""

    design_id: str
    theta: ParamVector
    regime: str
    description: str
    # reference (bias, ESD, ASD) rows keyed by n, in (phi_plus, phi_minus, psi, alpha) order
    reference: Optional[Dict[int, Dict[str, Tuple[float, ...]]]] = None


class DesignRegistry:
    """
    All simulation designs in one place
    Think of this as the lab notebook the experiments are read from
    """

    def __init__(self):
        self._designs: Dict[str, Design] = {}
        for design in self._stationary_designs() + self._other_designs():
            self._designs[design.design_id] = design

    def _stationary_designs(self) -> List[Design]:
        return [
            Design(
                "stationary_a15",
                ParamVector(0.2, 0.1, 0.2, 0.5, 1.5),
                "stationary",
                "moderate tails, phi_minus > phi_plus",
                reference={
                    1000: {
                        "bias": (0.0008, 0.0005, -0.0002, 0.0052),
                        "esd": (0.0239, 0.0361, 0.0409, 0.0474),
                        "asd": (0.0225, 0.0364, 0.0392, 0.0485),
                    },
                },
            ),
            Design(
                "stationary_a10",
                ParamVector(0.1, 0.1, 0.2, 0.3, 1.0),
                "stationary",
                "Cauchy innovations",
                reference={500: {"esd_psi": (0.0440,)}},
            ),
            Design(
                "stationary_a05",
                ParamVector(0.05, 0.02, 0.05, 0.1, 0.5),
                "stationary",
                "very heavy tails, small ARCH effects",
            ),
        ]

    def _other_designs(self) -> List[Design]:
        return [
            Design(
                "explosive_a10",
                ParamVector(0.1, 0.1, 0.2, 0.41, 1.0),
                "explosive",
                "Cauchy innovations, gamma about 0.04 so n = 5000 paths stay finite",
            ),
            Design(
                "boundary_a10",
                ParamVector(0.1, 0.09, 0.09, 0.49, 1.0),
                "boundary",
                "Cauchy innovations with gamma = 0, size design for the stationarity tests",
            ),
            Design(
                "symmetric_a15",
                ParamVector(0.2, 0.15, 0.15, 0.5, 1.5),
                "stationary",
                "phi_plus = phi_minus, size design for the symmetry test",
            ),
        ]

    def get(self, design_id: str) -> Design:
        if design_id not in self._designs:
            raise ParameterError(f"unknown design {design_id!r}; known: {', '.join(self.names())}")
        return self._designs[design_id]

    def names(self) -> List[str]:
        return sorted(self._designs)

    def stationary(self) -> List[Design]:
        """The designs of the MLE table, in table order"""
        return [self._designs[name] for name in ("stationary_a15", "stationary_a10", "stationary_a05")]


# ============================================
# Global instance
# ============================================

_registry = None


def get_registry() -> DesignRegistry:
    """Get or create the design registry"""
    global _registry
    if _registry is None:
        _registry = DesignRegistry()
    return _registry


def get_design(design_id: str) -> Design:
    return get_registry().get(design_id)
