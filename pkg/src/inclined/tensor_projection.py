"""Axis projections on tensor powers and their products.

An axis projection acts as the rank-one projection R_v on one tensor factor
and as the identity on every other factor.  Specs are stored structurally
(axis label + direction); dense matrices exist only in the small-instance
Kronecker oracle, because the interesting spaces are far too large to
materialize.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .hilbert import DENSE_ORACLE_CAP, as_vector, dense_rank_one, normalized
from .tensor_index import TensorIndexSpace, blocks_matrix, unblocks_matrix


def _frozen_unit(v, dim: int) -> np.ndarray:
    u = normalized(as_vector(v, dim=dim))
    u.flags.writeable = False
    return u


@dataclass(frozen=True)
class AxisProjectionSpec:
    """Projection acting as R_direction on ``axis`` and identity elsewhere.

    The direction is normalized on construction; scaling a direction does not
    change the projection.
    """

    space: TensorIndexSpace
    axis: str
    direction: np.ndarray

    def __post_init__(self):
        self.space.axis_position(self.axis)  # raises if the axis is unknown
        object.__setattr__(
            self, "direction", _frozen_unit(self.direction, self.space.alphabet_size)
        )


@dataclass(frozen=True)
class ProductProjectionSpec:
    """Product of axis projections over a set of distinct axes."""

    space: TensorIndexSpace
    directions: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not self.directions:
            raise ValueError("need at least one axis direction")
        normed = {}
        for axis, v in self.directions.items():
            self.space.axis_position(axis)
            normed[axis] = _frozen_unit(v, self.space.alphabet_size)
        object.__setattr__(self, "directions", normed)


def apply_axis(spec: AxisProjectionSpec, x) -> np.ndarray:
    """Apply R_v to every block x(s) along the spec's axis."""
    v = spec.direction
    blocks = blocks_matrix(spec.space, x, spec.axis)
    coeff = blocks @ v.conj()  # inner(x(s), v) per block, first-slot linear
    return unblocks_matrix(spec.space, np.multiply.outer(coeff, v), spec.axis)


def apply_product(spec: ProductProjectionSpec, x) -> np.ndarray:
    """Apply the participating axis projections sequentially.

    The factors act on distinct axes, so they commute and any application
    order gives the same result.
    """
    out = as_vector(x, dim=spec.space.dim)
    for axis, v in spec.directions.items():
        out = apply_axis(AxisProjectionSpec(spec.space, axis, v), out)
    return out


def joint_fixed_vector(spec: ProductProjectionSpec) -> np.ndarray:
    """Unit vector fixed by every factor of a full product projection.

    Requires a direction for every axis; the coordinates are the products
    v_t = prod_a v_{a, t(a)}, i.e. the elementary tensor of the directions.
    Witnesses that the product projection is nonzero.
    """
    missing = [a for a in spec.space.axes if a not in spec.directions]
    if missing:
        raise ValueError(f"missing directions for axes {missing}")
    out = np.ones(1, dtype=np.complex128)
    for a in spec.space.axes:
        out = np.multiply.outer(out, spec.directions[a]).reshape(-1)
    return out


def dense_materialize(spec: AxisProjectionSpec | ProductProjectionSpec) -> np.ndarray:
    """Dense Kronecker-product matrix of a spec, for cross-checking only.

    Kronecker factors follow the coordinate layout: first axis most
    significant.  Refuses total dimension above DENSE_ORACLE_CAP.
    """
    space = spec.space
    if space.dim > DENSE_ORACLE_CAP:
        raise ValueError(f"total dimension {space.dim} exceeds dense oracle cap {DENSE_ORACLE_CAP}")
    if isinstance(spec, AxisProjectionSpec):
        directions = {spec.axis: spec.direction}
    else:
        directions = dict(spec.directions)
    d = space.alphabet_size
    out = np.ones((1, 1), dtype=np.complex128)
    for a in space.axes:
        factor = dense_rank_one(directions[a]) if a in directions else np.eye(d, dtype=np.complex128)
        out = np.kron(out, factor)
    return out
