"""Shipped example presentations."""

from importlib import resources
from pathlib import Path

SHIPPED = ("free2", "genus2_e1")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__) / f"{name}.xcent"))


def load(name: str, **kw):
    from ..presentation import load_spec

    return load_spec(path(name), **kw)
