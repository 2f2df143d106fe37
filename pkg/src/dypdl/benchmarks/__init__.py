"""Builders, generators and text formats for the six benchmark classes.

Each class module exposes ``Instance``, ``build``, ``generate``, ``read``,
``write`` and ``problem_yaml``; the matching parameterized domain lives in
``dypdl/domains/<name>.yaml``.
"""

from __future__ import annotations

from importlib import resources

from ..model import Model
from ..yaml_io import load
from . import bin_packing, cvrp, graph_clear, mosp, salbp, tsptw
from ._text import InstanceFormatError, InvalidInstance

ParseError = InstanceFormatError

CLASSES = {m.NAME: m for m in (tsptw, cvrp, salbp, bin_packing, mosp, graph_clear)}

# Desk-scale sizes used by the tests and the bench ladder.
DESK_SIZES = {"tsptw": 7, "cvrp": 6, "salbp1": 10, "bin_packing": 9, "mosp": 7, "graph_clear": 7}


def module(name: str):
    try:
        return CLASSES[name]
    except KeyError:
        raise ValueError(f"unknown class {name!r}; choose from {', '.join(CLASSES)}") from None


def domain_text(name: str) -> str:
    module(name)
    return resources.files("dypdl").joinpath("domains", f"{name}.yaml").read_text()


def generate(name: str, n: int, seed: int):
    return module(name).generate(n, seed)


def build(name: str, instance) -> Model:
    return module(name).build(instance)


def yaml_model(name: str, instance) -> Model:
    """Load the class domain together with the instance's problem file."""
    return load(domain_text(name), module(name).problem_yaml(instance))


def read_instance(name: str, path) -> object:
    with open(path) as fh:
        return module(name).read(fh.read())


__all__ = [
    "CLASSES",
    "DESK_SIZES",
    "InstanceFormatError",
    "InvalidInstance",
    "ParseError",
    "build",
    "domain_text",
    "generate",
    "module",
    "read_instance",
    "yaml_model",
]
