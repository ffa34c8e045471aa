"""Bessel and Hankel functions of orders 0 and 1.

Thin validated wrappers over ``scipy.special``; the kernels only ever
need J0, J1, Y0, Y1 at nonnegative real arguments.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import special

from qelab.errors import SingularityError

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

EULER_GAMMA = float(np.euler_gamma)


class BesselFamily(str, Enum):
    J0 = "J0"
    J1 = "J1"
    Y0 = "Y0"
    Y1 = "Y1"


_FUNCS = {
    BesselFamily.J0: special.j0,
    BesselFamily.J1: special.j1,
    BesselFamily.Y0: special.y0,
    BesselFamily.Y1: special.y1,
}


def bessel(family: BesselFamily | str, x: npt.ArrayLike) -> FloatArray:
    """Evaluate J0, J1, Y0 or Y1 at nonnegative ``x``.

    Raises:
        ValueError: If any ``x`` is negative.
        SingularityError: If a Y family is evaluated at 0.
    """
    family = BesselFamily(family)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bessel argument must be nonnegative")
    if family in (BesselFamily.Y0, BesselFamily.Y1) and np.any(arr == 0):
        raise SingularityError(f"{family.value} is singular at x = 0")
    return _FUNCS[family](arr)


def hankel0(x: FloatArray) -> ComplexArray:
    """H0^(1)(x) = J0 + i Y0 for x > 0."""
    return special.j0(x) + 1j * special.y0(x)


def hankel1(x: FloatArray) -> ComplexArray:
    """H1^(1)(x) = J1 + i Y1 for x > 0."""
    return special.j1(x) + 1j * special.y1(x)
