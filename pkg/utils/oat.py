"""
Initial State Preparation

Fully inverted ensemble, optional y-rotation and the one-axis-twisting
unitary exp(-i chi S_x^2), composed in either order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from utils.dicke import (
    DickeState, SpinOperators, apply_function_of, apply_rotation_y, basis_state, build_operators, check_dims,
)
from utils.errors import InvalidParameterError


class PrepOrder(str, Enum):
    ROTATE_THEN_TWIST = "rotate_then_twist"
    TWIST_THEN_ROTATE = "twist_then_rotate"


@dataclass(frozen=True)
class PrepSpec:
    """Preparation recipe: |N/2> -> rotation by theta about y and twist by chi."""

    n_atoms: int
    chi: float
    theta: float = 0.0
    order: PrepOrder = PrepOrder.ROTATE_THEN_TWIST

    def __post_init__(self):
        if not 0.0 <= self.chi <= math.pi:
            raise InvalidParameterError(f"chi must lie in [0, pi], got {self.chi}")
        if not -math.pi <= self.theta <= math.pi:
            raise InvalidParameterError(f"theta must lie in [-pi, pi], got {self.theta}")
        object.__setattr__(self, "order", PrepOrder(self.order))


def fully_inverted(n_atoms: int) -> DickeState:
    """All atoms excited, |N/2>."""
    return basis_state(n_atoms, n_atoms / 2)


def apply_oat(state: DickeState, chi: float, ops: SpinOperators = None) -> DickeState:
    """Return exp(-i chi S_x^2) |state> via the eigendecomposition of S_x."""
    ops = ops or build_operators(state.n_atoms)
    check_dims(state, ops.n_atoms)
    if chi == 0:
        return state
    eigvals = ops.eig_sx[0]
    phases = np.exp(-1j * chi * eigvals * eigvals)
    return apply_function_of(ops.eig_sx, phases, state)


def prepare(spec: PrepSpec) -> DickeState:
    """
    Prepare the seeded initial state described by a PrepSpec.

    Args:
        spec: Atom number, twisting strength, rotation angle and their order

    Returns:
        DickeState: Normalized prepared state
    """
    ops = build_operators(spec.n_atoms)
    state = fully_inverted(spec.n_atoms)
    if spec.order is PrepOrder.ROTATE_THEN_TWIST:
        state = apply_oat(apply_rotation_y(state, spec.theta, ops), spec.chi, ops)
    else:
        state = apply_rotation_y(apply_oat(state, spec.chi, ops), spec.theta, ops)
    return state.normalized()
