"""Eigendecomposition and simulated spectroscopy."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InvalidSpec
from .model import HermitianMatrix

__all__ = ["Spectrum", "EigenBasis", "NoiseModel", "eigen_decompose", "spectrum", "perturb_spectrum"]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending list of eigenvalues, as a spectroscopy run would report them."""

    eigenvalues: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.array(self.eigenvalues, dtype=float).reshape(-1)
        if e.size == 0:
            raise InvalidSpec("empty spectrum")
        if not np.all(np.isfinite(e)):
            raise InvalidSpec("spectrum contains non-finite values")
        if np.any(np.diff(e) < 0):
            raise InvalidSpec("eigenvalues must be sorted ascending")
        e.setflags(write=False)
        object.__setattr__(self, "eigenvalues", e)

    def __len__(self):
        return self.eigenvalues.size

    def to_dict(self):
        return {"label": self.label, "eigenvalues": self.eigenvalues.tolist()}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["eigenvalues"], str(d.get("label", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed spectrum: {exc}") from exc

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Eigenvalues (ascending) with eigenvectors as the columns of ``vectors``."""

    eigenvalues: np.ndarray
    vectors: np.ndarray = field(repr=False)

    def reassemble(self) -> np.ndarray:
        v = self.vectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidSpec("sigma must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")


def eigen_decompose(h: HermitianMatrix) -> EigenBasis:
    try:
        e, v = np.linalg.eigh(np.asarray(h, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    e.setflags(write=False)
    v.setflags(write=False)
    return EigenBasis(e, v)


def spectrum(h: HermitianMatrix, label="") -> Spectrum:
    """Eigenvalues only; the eigenvectors are discarded like in a real measurement."""
    return Spectrum(eigen_decompose(h).eigenvalues, label)


def perturb_spectrum(s: Spectrum, noise: NoiseModel) -> Spectrum:
    """Add iid Gaussian deviates to every eigenvalue and re-sort.

    The deviates come from a fresh generator seeded with ``noise.seed``, so the
    result depends only on the arguments.
    """
    if noise.sigma == 0:
        return s
    rng = np.random.default_rng(int(noise.seed))
    noisy = s.eigenvalues + rng.normal(0.0, noise.sigma, size=len(s))
    return Spectrum(np.sort(noisy), s.label)
