"""Request and response schemas for the Green's-function service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class RunSettings(BaseModel):
    """Numeric knobs shared by the gf/fci/freeze-oracle endpoints."""

    beta: float = 100.0
    n_max: int = Field(default=1000, ge=1)
    seed: int = 0


class GfRequest(RunSettings):
    fcidump: str
    fcidump_path: str = ""  # label echoed into the manifest
    rotation: Optional[str] = None
    rotation_path: Optional[str] = None
    ansatz_mode: Literal["full", "single-xxxy"] = "full"
    gtol: float = 1e-7
    max_iter: int = Field(default=500, ge=1)
    mode: Literal["statevector", "shots"] = "statevector"
    shots: int = Field(default=10000, ge=1)
    bins: int = Field(default=10, ge=2)
    epsilon: Optional[float] = None
    with_oracle: bool = True
    dump_subspace: bool = False


class FciRequest(RunSettings):
    fcidump: str
    fcidump_path: str = ""


class CompareRequest(BaseModel):
    g_a: str
    g_b: str


class RunResponse(BaseModel):
    summary: dict
    files: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str
