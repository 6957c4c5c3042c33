"""Response shells for the HTTP boundary.

Request bodies reuse the job configs from :mod:`torusdyn.jobs` directly;
only service-specific response shapes live here.
"""

from __future__ import annotations

from pydantic import BaseModel

from ..loops import ALPHA_PRESETS


class SliceRegistered(BaseModel):
    slice: str
    rect: tuple[float, float, float, float]


class MapRegistered(BaseModel):
    map: str


class MetaResponse(BaseModel):
    name: str
    version: str
    alpha_presets: dict[str, float]
    palette: list[tuple[int, int, int]]
    tile_size: int
    endpoints: list[str]


class ErrorBody(BaseModel):
    error: str
    message: str


def alpha_preset_values() -> dict[str, float]:
    return {name: float(value) for name, value in ALPHA_PRESETS.items()}
