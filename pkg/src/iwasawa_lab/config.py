"""Configuration for the lab."""

from pathlib import Path
from typing import Literal

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from iwasawa_lab.errors import UsageError


class Settings(BaseSettings):
    """Lab settings.

    Values come from (lowest to highest priority) defaults, environment variables
    prefixed with ``IWASAWA_LAB_``, a key=value config file and command line flags.
    """

    model_config = SettingsConfigDict(
        env_prefix="IWASAWA_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="forbid",
    )

    # Runtime
    log_level: str = "INFO"
    output_dir: Path = Path("out")

    # Sampling
    seed: int = 1
    dim: int = 2
    space_dim: int = 2
    samples: int = 1000

    # Tolerances
    tol_structural: float = 1e-12
    tol_factorization: float = 1e-10
    tol_claim: float = 1e-8
    tol_golden_rel: float = 0.10

    # Numerical thresholds
    det_renorm_threshold: float = 1e-12
    pivot_floor: float = 1e-13
    log_fallback_radius: float = 1.0

    # Closed-form domains
    range_check: bool = True
    literal_inner_radius: bool = False

    # Harmonicity residual
    residual_stencil: Literal["compact", "centered"] = "compact"


def parse_config_file(path: Path) -> dict[str, str]:
    """Parse a flat key=value file.

    Blank lines and lines starting with ``#`` are ignored. Keys may use dashes or
    underscores.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot read config file {path}: {e}") from e

    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def load_settings(config_file: Path | None = None, **overrides: object) -> Settings:
    """Build settings from environment, an optional config file and explicit overrides."""
    values: dict[str, object] = {}
    if config_file is not None:
        values.update(parse_config_file(config_file))
    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)  # type: ignore[arg-type]
    except ValidationError as e:
        raise UsageError(f"Invalid configuration: {e}") from e
