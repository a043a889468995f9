"""Witness configuration via pydantic-settings (.env + CZW_* env vars)."""

from __future__ import annotations

import sys
from pathlib import Path

from loguru import logger
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models import LEMMA_TOL, MAX_QUBITS, TAU_ETA, TAU_NORM, TAU_SEP, TAU_ZERO


class WitnessConfig(BaseSettings):
    """All tolerances and runtime knobs with layered resolution:
    .env file < CZW_* environment variables < constructor kwargs.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="CZW_",
        extra="ignore",
    )

    # -- Tolerances --
    tau_norm: float = TAU_NORM
    tau_eta: float = TAU_ETA
    tau_sep: float = TAU_SEP
    tau_zero: float = TAU_ZERO
    lemma_tol: float = LEMMA_TOL

    # -- Scale --
    max_qubits: int = Field(default=MAX_QUBITS, ge=1, le=MAX_QUBITS)

    # -- Fuzzing --
    seed: int = 7
    max_workers: int = 0  # 0 = auto (CPU-based)

    # -- Behavior --
    verbose: bool = False
    log_level: str = "INFO"
    log_dir: Path | None = None

    def setup_logging(self) -> None:
        """Configure loguru for czw."""
        logger.remove()

        log_format = (
            "{time:YYYY-MM-DDTHH:mm:ssZ} | {level:<8} | "
            "{extra[component]:<13} | {message}"
        )

        def _default_extra(record):
            record["extra"].setdefault("component", "")
            return True

        logger.add(
            sys.stderr,
            format=log_format,
            level="DEBUG" if self.verbose else self.log_level.upper(),
            filter=_default_extra,
        )

        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            logger.add(
                str(self.log_dir / "czw.log"),
                format=log_format,
                level="DEBUG",
                rotation="10 MB",
                retention="30 days",
                filter=_default_extra,
            )
