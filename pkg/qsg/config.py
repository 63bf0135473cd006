# config.py

import os
from fractions import Fraction
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()

# --- Fixed defaults ---
DEFAULT_DELTA = Fraction(1, 100)
DEFAULT_WITNESS_MAX = 4
DEFAULT_HITTING_K = 5
DEFAULT_SEED = 42


class Settings(BaseModel):
    budget_degree: int = 24               # max total degree of any expanded product
    denominator_bound: int = 2 ** 16      # projection alpha sampling
    ek_partial_constant: int = 512        # C in the C/delta^3 report
    oracle_max_vars: int = 10             # expand_oracle variable cap
    resample_limit: int = 64              # generator / alpha re-draws
    event_log: Optional[Path] = None      # JSON history file, None = logger only


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


def get_settings() -> Settings:
    """Read the QSG_* environment on every call so overrides apply immediately."""
    event_log = os.getenv("QSG_EVENT_LOG")
    return Settings(
        budget_degree=_int_env("QSG_BUDGET_DEGREE", 24),
        denominator_bound=_int_env("QSG_DENOMINATOR_BOUND", 2 ** 16),
        ek_partial_constant=_int_env("QSG_EK_PARTIAL_C", 512),
        oracle_max_vars=_int_env("QSG_ORACLE_MAX_VARS", 10),
        resample_limit=_int_env("QSG_RESAMPLE_LIMIT", 64),
        event_log=Path(event_log) if event_log else None,
    )
