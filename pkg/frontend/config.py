"""
Frontend Configuration
Centralized display settings for the aligned text tables printed by the CLI
"""

from dataclasses import dataclass
from typing import Dict, List


@dataclass
class TableConfig:
    """Column widths and number formats"""
    LABEL_WIDTH: int = 10
    COLUMN_WIDTH: int = 12
    ESTIMATE_FORMAT: str = ".4f"
    STATISTIC_FORMAT: str = ".3f"
    MISSING: str = "-"


@dataclass
class ParameterLabels:
    """Row labels in theta order"""
    LABELS: Dict[str, str] = None
    ORDER: List[str] = None

    def __post_init__(self):
        self.ORDER = ["omega", "phi_plus", "phi_minus", "psi", "alpha"]
        self.LABELS = {
            'omega': 'omega',
            'phi_plus': 'phi+',
            'phi_minus': 'phi-',
            'psi': 'psi',
            'alpha': 'alpha',
        }


@dataclass
class TestLabels:
    """Row labels for the test block of a fit table"""
    LABELS: Dict[str, str] = None

    def __post_init__(self):
        self.LABELS = {
            'stationarity': 'T_n (ST)',
            'explosivity': 'T_n (ET)',
            'symmetry': 'T_n^S',
            'diagnostic': 'T_n^D',
        }


@dataclass
class ExperimentRows:
    """Row order of a Monte Carlo MLE block"""
    ROWS: List[str] = None
    LABELS: Dict[str, str] = None

    def __post_init__(self):
        self.ROWS = ["bias", "esd", "asd", "asd_int", "asd_res", "asd_universal"]
        self.LABELS = {
            'bias': 'Bias',
            'esd': 'ESD',
            'asd': 'ASD',
            'asd_int': 'ASD^int',
            'asd_res': 'ASD^res',
            'asd_universal': 'ASD^univ',
        }


# Initialize configurations
tables = TableConfig()
parameters = ParameterLabels()
tests = TestLabels()
experiment_rows = ExperimentRows()
