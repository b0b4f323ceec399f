"""Hamiltonians: tight-binding chains, XXZ spin chains and general networks.

All matrices are stored dense and complex. Sites are indexed from 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, ZeroCoupling

__all__ = [
    "ChainSpec",
    "SpinChainSpec",
    "NetworkSpec",
    "Perturbation",
    "HermitianMatrix",
    "build_chain_matrix",
    "build_spin_single_excitation",
    "apply_perturbation",
    "gauge_reduce",
    "tridiagonal_matrix",
    "site_vector",
    "pair_probe",
]

HERMITIAN_RTOL = 1e-12
NORM_TOL = 1e-12


def _frozen(values):
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    Hermiticity is checked against ``1e-12 * max|entry|``.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidSpec(f"expected a non-empty square matrix, got shape {arr.shape}")
        scale = max(np.abs(arr).max(), 1.0)
        if np.abs(arr - arr.conj().T).max() > HERMITIAN_RTOL * scale:
            raise InvalidSpec("matrix is not Hermitian")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dimension(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(dimension={self.dimension})"


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Couplings ``c_n > 0`` and onsite fields ``b_n`` of an open chain."""

    n_sites: int
    couplings: np.ndarray
    onsite: np.ndarray = None

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise InvalidSpec("n_sites must be positive")
        couplings = _frozen(self.couplings)
        onsite = _frozen(np.zeros(n) if self.onsite is None else self.onsite)
        if couplings.shape != (n - 1,):
            raise InvalidSpec(f"need {n - 1} couplings, got {couplings.size}")
        if onsite.shape != (n,):
            raise InvalidSpec(f"need {n} onsite fields, got {onsite.size}")
        if not (np.all(np.isfinite(couplings)) and np.all(np.isfinite(onsite))):
            raise InvalidSpec("parameters must be finite")
        if np.any(couplings <= 0):
            raise InvalidSpec("couplings must be positive (use gauge_reduce first)")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "onsite", onsite)

    @classmethod
    def uniform(cls, n_sites, coupling=1.0, onsite=0.0):
        return cls(n_sites, np.full(n_sites - 1, coupling), np.full(n_sites, onsite))

    def to_dict(self):
        return {
            "n_sites": self.n_sites,
            "couplings": self.couplings.tolist(),
            "onsite": self.onsite.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(int(d["n_sites"]), d["couplings"], d.get("onsite"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed chain spec: {exc}") from exc


@dataclass(frozen=True, eq=False)
class SpinChainSpec:
    """Open XXZ chain ``sum c_n (XX + YY + anisotropy ZZ) + sum b_n Z_n``."""

    n_sites: int
    couplings: np.ndarray
    onsite: np.ndarray = None
    anisotropy: float = 0.0

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise InvalidSpec("n_sites must be positive")
        couplings = _frozen(self.couplings)
        onsite = _frozen(np.zeros(n) if self.onsite is None else self.onsite)
        if couplings.shape != (n - 1,) or onsite.shape != (n,):
            raise InvalidSpec("need n_sites - 1 couplings and n_sites onsite fields")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "anisotropy", float(self.anisotropy))

    def to_dict(self):
        return {
            "n_sites": self.n_sites,
            "couplings": self.couplings.tolist(),
            "onsite": self.onsite.tolist(),
            "anisotropy": self.anisotropy,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(int(d["n_sites"]), d["couplings"], d.get("onsite"), d.get("anisotropy", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed spin chain spec: {exc}") from exc


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Arbitrary Hermitian Hamiltonian on ``dimension`` sites."""

    dimension: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        n = int(self.dimension)
        if arr.shape != (n, n) or n < 1:
            raise InvalidSpec(f"entries must be {n}x{n}")
        if not np.array_equal(arr, arr.conj().T):
            raise InvalidSpec("network entries must be exactly Hermitian")
        arr.setflags(write=False)
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_matrix(cls, h):
        """Wrap ``h``, symmetrizing it so the stored entries are exactly Hermitian."""
        h = np.asarray(h, dtype=complex)
        h = 0.5 * (h + h.conj().T)
        return cls(h.shape[0], h)

    def matrix(self) -> HermitianMatrix:
        return HermitianMatrix(self.entries)

    def to_dict(self):
        flat = self.entries.reshape(-1)
        return {
            "n_sites": self.dimension,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            n = int(d["n_sites"])
            pairs = np.array(d["entries"], dtype=float)
            entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InvalidSpec(f"malformed network spec: {exc}") from exc
        return cls(n, entries)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Rank-one marker ``strength * |vector><vector|`` with a unit vector."""

    vector: np.ndarray
    strength: float

    def __post_init__(self):
        vec = np.array(self.vector, dtype=complex).reshape(-1)
        if vec.size == 0:
            raise InvalidSpec("empty probe vector")
        if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
            raise InvalidSpec("probe vector must have unit norm")
        strength = float(self.strength)
        if strength == 0.0 or not np.isfinite(strength):
            raise InvalidSpec("field strength must be finite and nonzero")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "strength", strength)

    @classmethod
    def at_site(cls, site, n_sites, strength):
        return cls(site_vector(site, n_sites), strength)


def site_vector(site, n_sites):
    if not 0 <= site < n_sites:
        raise InvalidSpec(f"site {site} out of range for {n_sites} sites")
    vec = np.zeros(n_sites, dtype=complex)
    vec[site] = 1.0
    return vec


def pair_probe(n, m, n_sites, imaginary=False):
    """Return ``(|n> + |m>)/sqrt(2)``, or ``(|n> + i|m>)/sqrt(2)`` if ``imaginary``."""
    if n == m:
        raise InvalidSpec("pair probe needs two distinct sites")
    vec = site_vector(n, n_sites) + (1j if imaginary else 1.0) * site_vector(m, n_sites)
    return vec / np.sqrt(2.0)


def tridiagonal_matrix(couplings, onsite=None) -> np.ndarray:
    """Dense ``H[n, n+1] = c_n``, ``H[n+1, n] = conj(c_n)``, ``H[n, n] = b_n``.

    Accepts complex couplings; returns a complex ndarray.
    """
    c = np.asarray(couplings, dtype=complex).reshape(-1)
    n = c.size + 1
    b = np.zeros(n) if onsite is None else np.asarray(onsite, dtype=float).reshape(-1)
    if b.size != n:
        raise DimensionMismatch(f"need {n} onsite fields, got {b.size}")
    h = np.diag(b.astype(complex))
    idx = np.arange(n - 1)
    h[idx, idx + 1] = c
    h[idx + 1, idx] = c.conj()
    return h


def build_chain_matrix(spec: ChainSpec) -> HermitianMatrix:
    return HermitianMatrix(tridiagonal_matrix(spec.couplings, spec.onsite))


def build_spin_single_excitation(spec: SpinChainSpec) -> ChainSpec:
    """Effective tight-binding model of the one-excitation sector.

    The excitation is a spin up on a spin-down background, ``Z|down> = -|down>``.
    Hopping between neighbours is ``2 c_n``; the diagonal is

        d_n = 2 b_n - sum(b) + anisotropy * (sum(c) - 2 (c_{n-1} + c_n))

    with ``c_{-1} = c_{N-1} = 0``. Negative couplings are returned by
    magnitude, which is a diagonal change of basis and leaves the spectrum
    unchanged.
    """
    c = spec.couplings
    b = spec.onsite
    padded = np.concatenate(([0.0], c, [0.0]))
    touching = padded[:-1] + padded[1:]
    diagonal = 2.0 * b - b.sum() + spec.anisotropy * (c.sum() - 2.0 * touching)
    hopping = 2.0 * np.abs(c)
    if np.any(hopping == 0):
        raise InvalidSpec("zero coupling splits the chain")
    return ChainSpec(spec.n_sites, hopping, diagonal)


def apply_perturbation(h: HermitianMatrix, p: Perturbation) -> HermitianMatrix:
    if p.vector.size != h.dimension:
        raise DimensionMismatch(f"probe has {p.vector.size} components, matrix is {h.dimension}")
    psi = p.vector
    return HermitianMatrix(h.entries + p.strength * np.outer(psi, psi.conj()))


def gauge_reduce(complex_couplings):
    """Split complex chain couplings into magnitudes and phases.

    The chain built from the magnitudes is related to the original by the
    diagonal unitary ``|n+1> -> exp(-i(phi_0 + ... + phi_n)) |n+1>``, so both
    have the same spectrum and the same local weights at site 0.

    Returns
    -------
    magnitudes, phases : numpy.ndarray
        ``phases`` lie in ``(-pi, pi]``.
    """
    c = np.asarray(complex_couplings, dtype=complex).reshape(-1)
    mags = np.abs(c)
    if np.any(mags < 1e-14):
        raise ZeroCoupling("coupling with magnitude below 1e-14 cannot be gauged away")
    return mags, np.angle(c)


def gauge_unitary(phases) -> np.ndarray:
    """Diagonal ``U`` with ``U^dag H(c) U = H(|c|)`` for ``c = |c| exp(i phases)``."""
    return np.diag(np.exp(-1j * np.concatenate(([0.0], np.cumsum(phases)))))


def load_spec(path):
    """Read a chain, spin-chain or network spec from JSON, dispatching on keys."""
    with open(path) as fh:
        d = json.load(fh)
    if not isinstance(d, dict):
        raise InvalidSpec("spec file must hold a JSON object")
    if "entries" in d:
        return NetworkSpec.from_dict(d)
    if "anisotropy" in d:
        return SpinChainSpec.from_dict(d)
    return ChainSpec.from_dict(d)
