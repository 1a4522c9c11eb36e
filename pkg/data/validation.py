"""
Run Input Validation
Checks paths, levels and parameter strings before any work starts
Every check returns (ok, message_or_value) so callers decide how to fail
"""

import logging
import os
from pathlib import Path
from typing import List, Optional, Tuple

logger = logging.getLogger(__name__)


class RunValidator:
    """
    Validates command-line inputs
    Think of this as the checklist run before an expensive fit or experiment
    """

    ALLOWED_INPUT_EXTENSIONS = {".csv", ".txt"}
    ALLOWED_SPEC_EXTENSIONS = {".json"}

    @staticmethod
    def validate_input_path(path: Optional[str], extensions: Optional[set] = None) -> Tuple[bool, str]:
        """
        Existing, readable regular file with an allowed extension

        Example valid: "returns.csv"
        """
        if not path:
            return False, "Input path cannot be empty"
        candidate = Path(path)
        allowed = extensions or RunValidator.ALLOWED_INPUT_EXTENSIONS
        if candidate.suffix.lower() not in allowed:
            return False, f"File type not allowed. Allowed: {', '.join(sorted(allowed))}"
        if not candidate.is_file():
            return False, f"Input file does not exist: {path}"
        if not os.access(candidate, os.R_OK):
            return False, f"Input file is not readable: {path}"
        return True, str(candidate)

    @staticmethod
    def validate_output_path(path: Optional[str]) -> Tuple[bool, str]:
        """Parent directory must exist and be writable; the file itself may be overwritten"""
        if not path:
            return False, "Output path cannot be empty"
        candidate = Path(path)
        if candidate.is_dir():
            return False, f"Output path is a directory: {path}"
        parent = candidate.parent if str(candidate.parent) else Path(".")
        if not parent.is_dir():
            return False, f"Output directory does not exist: {parent}"
        if not os.access(parent, os.W_OK):
            logger.warning(f"Unwritable output directory requested: {parent}")
            return False, f"Output directory is not writable: {parent}"
        return True, str(candidate)

    @staticmethod
    def validate_level(level: float) -> Tuple[bool, str]:
        if not 0.0 < level < 1.0:
            return False, f"Significance level must lie in (0, 1), got {level}"
        return True, "Valid level"

    @staticmethod
    def validate_alpha_star(alpha_star: Optional[float]) -> Tuple[bool, str]:
        if alpha_star is None:
            return True, "Defaults to the fitted alpha"
        if not 0.0 < alpha_star < 2.0:
            return False, f"alpha_star must lie in (0, 2), got {alpha_star}"
        return True, "Valid alpha_star"

    @staticmethod
    def parse_theta(text: Optional[str]) -> Tuple[bool, object]:
        """
        Parse 'omega,phi_plus,phi_minus,psi,alpha'

        Example valid: "0.2,0.1,0.2,0.5,1.5"
        """
        if not text:
            return False, "theta cannot be empty"
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 5:
            return False, f"theta needs 5 comma-separated values, got {len(parts)}"
        try:
            values: List[float] = [float(p) for p in parts]
        except ValueError:
            return False, f"theta contains a non-numeric value: {text}"
        return True, values


# Quick helper functions
def validate_input_path(path: Optional[str], extensions: Optional[set] = None) -> Tuple[bool, str]:
    return RunValidator.validate_input_path(path, extensions)


def validate_spec_path(path: Optional[str]) -> Tuple[bool, str]:
    return RunValidator.validate_input_path(path, RunValidator.ALLOWED_SPEC_EXTENSIONS)


def validate_output_path(path: Optional[str]) -> Tuple[bool, str]:
    return RunValidator.validate_output_path(path)


def validate_level(level: float) -> Tuple[bool, str]:
    return RunValidator.validate_level(level)


def validate_alpha_star(alpha_star: Optional[float]) -> Tuple[bool, str]:
    return RunValidator.validate_alpha_star(alpha_star)


def parse_theta(text: Optional[str]) -> Tuple[bool, object]:
    return RunValidator.parse_theta(text)
