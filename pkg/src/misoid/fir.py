"""MISO FIR systems, regressor windows and output simulation.

A system is a bank of FIR modules, each a finite polynomial in the delay
operator.  The regressor of module i is the window of its ``n_i`` most
recent input samples, newest first, so that the module output is a plain
dot product between the window and the coefficient vector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class FirModule:
    """One FIR subsystem: coefficients (b_0, ..., b_{n-1}), newest tap first."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ParameterError("FIR module needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ParameterError("FIR coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size


@dataclass(frozen=True)
class MisoSystem:
    """m FIR modules feeding one summed output with additive noise."""

    modules: tuple[FirModule, ...]
    noise_std: float = 0.0

    def __post_init__(self):
        mods = tuple(self.modules)
        if len(mods) < 1:
            raise ParameterError("a MISO system needs at least one module")
        if self.noise_std < 0:
            raise ParameterError("noise_std must be >= 0")
        object.__setattr__(self, "modules", mods)

    @property
    def m(self) -> int:
        return len(self.modules)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(mod.order for mod in self.modules)

    @property
    def n(self) -> int:
        return sum(self.orders)

    def theta_parts(self) -> list[np.ndarray]:
        """True coefficient vectors, one per module."""
        return [mod.coeffs.copy() for mod in self.modules]

    def theta_true(self) -> np.ndarray:
        """Stacked true parameter vector."""
        return np.concatenate([mod.coeffs for mod in self.modules])


@dataclass(frozen=True)
class RegressorBank:
    """Per-module sliding input windows, newest sample first.

    Samples before the first push are taken to be zero.
    """

    windows: tuple[np.ndarray, ...]

    @classmethod
    def zeros(cls, orders) -> "RegressorBank":
        return cls(tuple(np.zeros(ni) for ni in orders))

    @classmethod
    def for_system(cls, system: MisoSystem) -> "RegressorBank":
        return cls.zeros(system.orders)

    @property
    def m(self) -> int:
        return len(self.windows)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(w.size for w in self.windows)

    def stacked(self) -> np.ndarray:
        """The stacked regressor: all windows concatenated in module order."""
        return np.concatenate(self.windows)


def push_inputs(bank: RegressorBank, u) -> RegressorBank:
    """Shift every window one step and insert the new samples u[i] in front."""
    u = np.asarray(u, dtype=float)
    if u.shape != (bank.m,):
        raise DimensionError(
            f"expected {bank.m} input samples, got shape {u.shape}"
        )
    if not np.all(np.isfinite(u)):
        raise ParameterError("input samples must be finite")
    new_windows = []
    for ui, w in zip(u, bank.windows):
        shifted = np.empty_like(w)
        shifted[0] = ui
        shifted[1:] = w[:-1]
        new_windows.append(shifted)
    return RegressorBank(tuple(new_windows))


def _check_alignment(system: MisoSystem, bank: RegressorBank):
    if bank.orders != system.orders:
        raise DimensionError(
            f"bank orders {bank.orders} do not match system orders {system.orders}"
        )


def noise_free_output(system: MisoSystem, bank: RegressorBank) -> float:
    """Sum of per-module window/coefficient dot products."""
    _check_alignment(system, bank)
    return float(
        sum(w @ mod.coeffs for w, mod in zip(bank.windows, system.modules))
    )


def noisy_output(system: MisoSystem, bank: RegressorBank, noise_sample: float) -> float:
    """Noise-free output plus an externally drawn noise sample."""
    return noise_free_output(system, bank) + noise_sample


def predict(theta_parts, bank: RegressorBank) -> float:
    """Predicted output for candidate per-module parameter vectors."""
    if len(theta_parts) != bank.m:
        raise DimensionError(
            f"expected {bank.m} parameter blocks, got {len(theta_parts)}"
        )
    total = 0.0
    for i, (theta_i, w) in enumerate(zip(theta_parts, bank.windows)):
        theta_i = np.asarray(theta_i, dtype=float)
        if theta_i.shape != w.shape:
            raise DimensionError(
                f"parameter block {i} has shape {theta_i.shape}, window {w.shape}"
            )
        total += float(w @ theta_i)
    return total


def save_system(system: MisoSystem, path):
    """Write a system file: {"modules": [[b0, ...], ...], "noise_std": s}."""
    doc = {
        "modules": [mod.coeffs.tolist() for mod in system.modules],
        "noise_std": system.noise_std,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_system(path) -> MisoSystem:
    with open(path) as fh:
        doc = json.load(fh)
    modules = tuple(FirModule(np.asarray(c, dtype=float)) for c in doc["modules"])
    return MisoSystem(modules, float(doc.get("noise_std", 0.0)))
