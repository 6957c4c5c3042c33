"""HTTP service over the job layer (FastAPI)."""

from .app import create_app

__all__ = ["create_app"]
