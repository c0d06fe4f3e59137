"""Configuration management for the obstruction engine."""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Central configuration class."""

    # Paths
    BASE_DIR = Path(__file__).parent.parent
    SPECS_PATH = os.getenv("SPECS_PATH", str(BASE_DIR / "data" / "specs"))

    # Lefschetz sequences
    LEFSCHETZ_LENGTH = int(os.getenv("LEFSCHETZ_LENGTH", "30"))

    # Spectral analysis
    GROUPING_TOLERANCE = float(os.getenv("GROUPING_TOLERANCE", "1e-9"))
    EIGEN_PRECISION = int(os.getenv("EIGEN_PRECISION", "60"))
    RESIDUE_PERIOD_LIMIT = int(os.getenv("RESIDUE_PERIOD_LIMIT", "360"))
    GROWTH_RELATIVE_TOLERANCE = float(os.getenv("GROWTH_RELATIVE_TOLERANCE", "1e-6"))
    CASCADE_STEP_LIMIT = int(os.getenv("CASCADE_STEP_LIMIT", "64"))

    # Isometry searches
    ISOMETRY_ENTRY_BOUND = int(os.getenv("ISOMETRY_ENTRY_BOUND", "3"))
    ISOMETRY_NODE_LIMIT = int(os.getenv("ISOMETRY_NODE_LIMIT", "200000"))
    FORM_SEARCH_LIMIT = int(os.getenv("FORM_SEARCH_LIMIT", "5"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")

    @classmethod
    def validate(cls):
        """Validate configuration values."""
        positive_ints = {
            "LEFSCHETZ_LENGTH": cls.LEFSCHETZ_LENGTH,
            "EIGEN_PRECISION": cls.EIGEN_PRECISION,
            "RESIDUE_PERIOD_LIMIT": cls.RESIDUE_PERIOD_LIMIT,
            "CASCADE_STEP_LIMIT": cls.CASCADE_STEP_LIMIT,
            "ISOMETRY_ENTRY_BOUND": cls.ISOMETRY_ENTRY_BOUND,
            "ISOMETRY_NODE_LIMIT": cls.ISOMETRY_NODE_LIMIT,
            "FORM_SEARCH_LIMIT": cls.FORM_SEARCH_LIMIT,
        }
        for name, value in positive_ints.items():
            if value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")
        if not 0 < cls.GROUPING_TOLERANCE < 1:
            raise ValueError(f"GROUPING_TOLERANCE must lie in (0, 1), got {cls.GROUPING_TOLERANCE}")
        if not 0 < cls.GROWTH_RELATIVE_TOLERANCE < 1:
            raise ValueError(
                f"GROWTH_RELATIVE_TOLERANCE must lie in (0, 1), got {cls.GROWTH_RELATIVE_TOLERANCE}"
            )
        if cls.EIGEN_PRECISION < 20:
            raise ValueError("EIGEN_PRECISION below 20 digits cannot certify the grouping tolerance")
        if cls.LOG_LEVEL.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"LOG_LEVEL not recognised: {cls.LOG_LEVEL}")
