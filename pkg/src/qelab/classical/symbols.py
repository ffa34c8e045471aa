"""Symbols a(s, eta) on the coball bundle and the observable registry."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
SymbolFn = Callable[[FloatArray, FloatArray], npt.ArrayLike]


@dataclass(frozen=True)
class Symbol:
    """Vectorised evaluator ``a(s, eta)`` with band-limit metadata.

    Attributes:
        func: Callable taking broadcastable arrays ``(s, eta)``.
        name: Registry name, used in reports.
        max_mode: Largest Fourier mode in s, if band-limited.
        eta_max: a vanishes for |eta| >= eta_max when set.
        depends_on_eta: False for pure multiplication symbols a(s).
        smooth: C-infinity on the closed coball bundle.
        real: a is real valued (quantization is then Hermitian).
    """

    func: SymbolFn
    name: str = "custom"
    max_mode: int | None = None
    eta_max: float | None = None
    depends_on_eta: bool = True
    smooth: bool = True
    real: bool = True

    def __call__(self, s: npt.ArrayLike, eta: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        s_arr, eta_arr = np.broadcast_arrays(
            np.asarray(s, dtype=float), np.asarray(eta, dtype=float)
        )
        out = np.broadcast_to(np.asarray(self.func(s_arr, eta_arr)), s_arr.shape)
        out = out.astype(complex)
        if self.eta_max is not None:
            out = np.where(np.abs(eta_arr) < self.eta_max, out, 0.0)
        return out

    def __mul__(self, other: Symbol) -> Symbol:
        return product(self, other)


def const(c: float = 1.0) -> Symbol:
    return Symbol(
        func=lambda s, eta: np.full(np.shape(s), c),
        name="const" if c == 1.0 else f"const:{c:g}",
        max_mode=0,
        depends_on_eta=False,
    )


def fourier(m: int, length: float) -> Symbol:
    """cos(2 pi m s / L)."""
    k = 2.0 * math.pi * m / length
    return Symbol(
        func=lambda s, eta: np.cos(k * s),
        name=f"fourier:{m}",
        max_mode=abs(m),
        depends_on_eta=False,
    )


def eta_power(p: int = 1) -> Symbol:
    """eta ** p; odd powers are odd in eta."""
    return Symbol(func=lambda s, eta: eta**p, name=f"eta^{p}", max_mode=0)


def bump(x: FloatArray) -> FloatArray:
    """exp(1 - 1/(1 - x^2)) on |x| < 1, zero outside; bump(0) = 1."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    safe = np.where(inside, x, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe * safe)), 0.0)


def eta_window(center: float, width: float) -> Symbol:
    """Smooth bump in eta supported in [center - width, center + width].

    Raises:
        ValueError: If the support reaches |eta| = 1.
    """
    if width <= 0:
        raise ValueError("window width must be positive")
    reach = abs(center) + width
    if reach >= 1.0:
        raise ValueError(f"eta window reaches |eta| = {reach:g} >= 1")
    return Symbol(
        func=lambda s, eta: bump((eta - center) / width),
        name=f"eta_window:{center:g},{width:g}",
        max_mode=0,
        eta_max=reach,
    )


def product(a: Symbol, b: Symbol) -> Symbol:
    modes = None if a.max_mode is None or b.max_mode is None else a.max_mode + b.max_mode
    caps = [e for e in (a.eta_max, b.eta_max) if e is not None]
    return Symbol(
        func=lambda s, eta: a(s, eta) * b(s, eta),
        name=f"{a.name}*{b.name}",
        max_mode=modes,
        eta_max=min(caps) if caps else None,
        depends_on_eta=a.depends_on_eta or b.depends_on_eta,
        smooth=a.smooth and b.smooth,
        real=a.real and b.real,
    )


def from_function(
    func: SymbolFn,
    name: str = "custom",
    *,
    depends_on_eta: bool = True,
    eta_max: float | None = None,
    smooth: bool = False,
) -> Symbol:
    return Symbol(
        func=func,
        name=name,
        depends_on_eta=depends_on_eta,
        eta_max=eta_max,
        smooth=smooth,
    )


DEFAULT_WINDOW_WIDTH = 0.25


def _parse_one(token: str, length: float) -> Symbol:
    name, _, arg = token.strip().partition(":")
    name = name.strip().lower()
    if name == "const":
        return const(float(arg) if arg else 1.0)
    if name == "fourier":
        return fourier(int(arg) if arg else 1, length)
    if name == "eta_window":
        parts = [p for p in arg.split(",") if p.strip()]
        if not parts:
            return eta_window(0.5, DEFAULT_WINDOW_WIDTH)
        width = float(parts[1]) if len(parts) > 1 else DEFAULT_WINDOW_WIDTH
        return eta_window(float(parts[0]), width)
    if name == "eta":
        return eta_power(int(arg) if arg else 1)
    raise ValueError(
        f"unknown observable '{name}' (expected const, fourier:m, eta_window:c,w, eta)"
    )


def parse_observable(text: str, length: float) -> Symbol:
    """Build a symbol from a registry expression such as ``fourier:2*eta_window:0.5,0.2``.

    Args:
        text: ``*``-joined factors.
        length: Boundary length, needed by ``fourier``.

    Raises:
        ValueError: On unknown names or bad arguments.
    """
    factors = [_parse_one(tok, length) for tok in text.split("*") if tok.strip()]
    if not factors:
        raise ValueError("empty observable expression")
    out = factors[0]
    for f in factors[1:]:
        out = product(out, f)
    if len(factors) > 1:
        out = Symbol(
            func=out.func,
            name=text.strip(),
            max_mode=out.max_mode,
            eta_max=out.eta_max,
            depends_on_eta=out.depends_on_eta,
            smooth=out.smooth,
            real=out.real,
        )
    return out
