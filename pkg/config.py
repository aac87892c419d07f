"""
Configuration file for the chocolate-bar toolkit
"""
import logging
import os
from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger("chocolate.config").warning("Ignoring non-integer %s=%r", name, raw)
        return default


class Config:
    # Diagnostics
    LOG_LEVEL = os.getenv("CHOC_LOG", "WARNING").upper()

    # Reproducibility
    SEED = _env_int("CHOC_SEED", 20240601)
    SPOT_CHECKS = _env_int("CHOC_SPOT_CHECKS", 1000)

    # Guards
    MAX_POSITIONS = _env_int("CHOC_MAX_POSITIONS", 2_000_000)
    ORACLE_MAX_NODES = _env_int("CHOC_ORACLE_MAX_NODES", 5_000_000)
    WITNESS_MAX_NODES = _env_int("CHOC_WITNESS_MAX_NODES", 200_000)
    ENUM_CAP = _env_int("CHOC_ENUM_CAP", 100_000)

    # Sweeps
    JOBS = _env_int("CHOC_JOBS", 1)
    NS_BOUND = _env_int("CHOC_NS_BOUND", 64)
    ENUM_D = 10
    ENUM_V = 3

    # Reports
    TOOL_VERSION = "1.0.0"
    SCHEMA_VERSION = "1"


def setup_logging(level: str = None) -> None:
    """Configure root logging once; later calls only change the level."""
    level_name = (level or Config.LOG_LEVEL).upper()
    numeric = getattr(logging, level_name, logging.WARNING)
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(
            level=numeric,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
    root.setLevel(numeric)
