"""JSON interchange: matrix literals, projection systems, source declarations.

A matrix literal is an array-of-arrays of [re, im] pairs. A projection system
is a list of matrix literals. A source declaration is either
{"kind": ..., "components": [{"weight": w, "matrix": M}, ...]} or
{"quadrature": {"model": "example", "c": c, "prior": "uniform", "nodes": N}}.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .projlat import ProjSystem
from .qsource import BetaExampleSource, MixtureSource, example_uniform_source

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "system_to_json",
    "system_from_json",
    "source_from_json",
]


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data, field: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"not a matrix literal: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(
            field, f"expected square array-of-arrays of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def system_to_json(system: ProjSystem) -> list:
    return [matrix_to_json(p) for p in system]


def system_from_json(data, field: str = "system") -> ProjSystem:
    if not isinstance(data, list) or not data:
        raise ConfigError(field, "expected a nonempty list of matrix literals")
    return ProjSystem(
        [matrix_from_json(m, f"{field}[{i}]") for i, m in enumerate(data)]
    )


def source_from_json(data, field: str = "source"):
    if not isinstance(data, dict):
        raise ConfigError(field, "expected an object")
    if "quadrature" in data:
        quad = data["quadrature"]
        if quad.get("model") != "example":
            raise ConfigError(f"{field}.quadrature.model", "only 'example' is supported")
        if quad.get("prior", "uniform") != "uniform":
            raise ConfigError(f"{field}.quadrature.prior", "only 'uniform' is supported")
        c = float(quad.get("c", 0.0))
        nodes = int(quad.get("nodes", 2048))
        if nodes < 1:
            raise ConfigError(f"{field}.quadrature.nodes", "must be positive")
        return example_uniform_source(c, nodes)
    if data.get("kind") == "beta-example":
        return BetaExampleSource(float(data.get("c", 0.0)))
    if "components" in data:
        kind = data.get("kind", "source")
        comps = []
        for i, comp in enumerate(data["components"]):
            if "weight" not in comp or "matrix" not in comp:
                raise ConfigError(
                    f"{field}.components[{i}]", "needs 'weight' and 'matrix'"
                )
            comps.append(
                (
                    float(comp["weight"]),
                    matrix_from_json(comp["matrix"], f"{field}.components[{i}].matrix"),
                )
            )
        return MixtureSource(comps, kind=kind)
    raise ConfigError(field, "expected 'components' or 'quadrature'")
