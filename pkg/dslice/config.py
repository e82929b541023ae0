"""
Runtime configuration for dslice.

Defaults live here; the only environment override is the subgroup
enumeration cap (DSLICE_ENUMERATION_CAP), which may also come from a .env
file in the working directory.
"""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

CAP_ENV_VAR = "DSLICE_ENUMERATION_CAP"
DEFAULT_ENUMERATION_CAP = 65536
CORPUS_DIR = Path(__file__).parent / "corpus"
SCHEMA_DIR = Path(__file__).parent / "schemas"


class Settings(BaseModel):
    """Convention flags and limits in force for a run."""

    enumeration_cap: int = Field(DEFAULT_ENUMERATION_CAP, ge=1, description="Largest group order to enumerate")
    sign: int = Field(-1, description="Linking form sign: lambda = sign * L_q^-1 mod Z")
    require_lambda: bool = Field(False, description="Require Lambda-invariant metabolizer pairs")
    corpus_dir: Path = Field(CORPUS_DIR, description="Bundled knot and d-record corpus")

    @field_validator("sign")
    @classmethod
    def _check_sign(cls, value: int) -> int:
        if value not in (-1, 1):
            raise ValueError("sign must be -1 or +1")
        return value

    def conventions(self) -> dict:
        """Flags recorded verbatim in every report."""
        return {"sign": self.sign, "require_lambda": self.require_lambda, "cap": self.enumeration_cap}


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Load settings once per process."""
    global _settings
    if _settings is None:
        load_dotenv()
        raw_cap = os.environ.get(CAP_ENV_VAR)
        cap = int(raw_cap) if raw_cap else DEFAULT_ENUMERATION_CAP
        _settings = Settings(enumeration_cap=cap)
    return _settings


def reset_settings() -> None:
    """Forget cached settings (tests change the environment)."""
    global _settings
    _settings = None


def resolve_cap(cap: Optional[int]) -> int:
    return cap if cap is not None else get_settings().enumeration_cap
