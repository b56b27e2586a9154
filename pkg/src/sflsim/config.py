"""Runtime configuration objects."""

from typing import Literal

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppConfig(BaseSettings):
    """Application settings loaded from env variables and .env files."""

    model_config = SettingsConfigDict(
        env_prefix="SFLSIM_",
        env_file=".env",
        extra="ignore",
        populate_by_name=True,
    )

    threads: int | None = Field(
        default=None,
        ge=1,
        validation_alias=AliasChoices("SFLSIM_THREADS", "NAUTICLE_THREADS", "threads"),
    )
    seed: int = Field(default=0)
    outdir: str = Field(default="results")
    output_format: Literal["ascii", "binary"] = Field(default="ascii")
