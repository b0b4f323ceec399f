"""Local spectral weights from the spectra of H and of H + f|psi><psi|.

For a rank-one update the characteristic polynomials of the two matrices
are tied together through the weights ``w_k = |<e_k|psi>|^2``; evaluating
that relation at each eigenvalue ``e_k`` of H isolates ``w_k`` as a ratio
of products of spectral differences. Comparing the ``x^(N-1)``
coefficients shows ``f = sum(e') - sum(e)`` whenever the weights sum to one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InconsistentData,
    InvalidSpec,
    SpectraOverlap,
    ZeroField,
)
from .spectral import Spectrum

__all__ = [
    "SpectralMeasure",
    "infer_field_strength",
    "recover_weights",
    "check_interlacing",
    "default_gap_tol",
]

ZERO_FIELD_TOL = 1e-10
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Discrete measure: strictly increasing ``nodes`` carrying ``weights``.

    ``degraded`` records that negative weights were clipped or the weights
    were rescaled to sum to one.
    """

    nodes: np.ndarray
    weights: np.ndarray
    degraded: bool = False

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if nodes.shape != weights.shape or nodes.size == 0:
            raise InvalidSpec("nodes and weights must be non-empty and of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidSpec("nodes must be strictly increasing")
        if np.any(weights < 0):
            raise InvalidSpec("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > NORMALIZATION_TOL:
            raise InvalidSpec(f"weights sum to {weights.sum()!r}, not 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "degraded", bool(self.degraded))

    def __len__(self):
        return self.nodes.size

    def to_dict(self):
        return {"nodes": self.nodes.tolist(), "weights": self.weights.tolist(), "degraded": self.degraded}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["nodes"], d["weights"], bool(d.get("degraded", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed spectral measure: {exc}") from exc

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _values(s):
    return s.eigenvalues if isinstance(s, Spectrum) else np.sort(np.asarray(s, dtype=float).reshape(-1))


def default_gap_tol(e) -> float:
    e = np.asarray(e, dtype=float)
    return 1e-8 * float(e.max() - e.min())


def infer_field_strength(s, s_prime) -> float:
    """Marker strength from the trace shift ``tr H' - tr H``."""
    e, ep = _values(s), _values(s_prime)
    if e.size != ep.size:
        raise DimensionMismatch(f"spectra have {e.size} and {ep.size} eigenvalues")
    return float(np.sum(ep - e))


def _weights(e, ep, f):
    same = e[:, None] - e[None, :]
    np.fill_diagonal(same, 1.0)
    ratios = (e[:, None] - ep[None, :]) / same
    np.fill_diagonal(ratios, 1.0)
    return (ep - e) / f * np.prod(ratios, axis=1)


def _coincidences(e, ep, tol):
    """One-to-one pairs ``(k, m)`` with ``|e_k - e'_m| <= tol``."""
    pairs, used = [], set()
    for k in range(e.size):
        close = [m for m in np.nonzero(np.abs(e[k] - ep) <= tol)[0] if m not in used]
        if close:
            m = min(close, key=lambda m: abs(e[k] - ep[m]))
            used.add(m)
            pairs.append((k, m))
    return pairs


def recover_weights(s, s_prime, f=None, *, tol_gap=None, deflate=False) -> SpectralMeasure:
    """Recover ``|<e_k|psi>|^2`` from the spectra of H and H'.

    Parameters
    ----------
    s, s_prime : Spectrum or array_like
        Spectra of H and of ``H' = H + f|psi><psi|``. Plain arrays are sorted.
    f : float, optional
        Marker strength. Inferred from the trace shift when omitted.
    tol_gap : float, optional
        Minimal separation between eigenvalues of H, and between any
        eigenvalue of H and any of H'. Defaults to ``1e-8 * (max e - min e)``.
    deflate : bool
        Treat an eigenvalue of H that reappears in H' as orthogonal to the
        probe (weight 0) instead of raising SpectraOverlap. Exact for
        noiseless data on a nondegenerate H; the remaining weights are
        computed from the spectra with those pairs removed.

    Returns
    -------
    SpectralMeasure
        Nodes are the eigenvalues of H. If any weight comes out negative
        (noisy data) it is set to zero, the vector is rescaled to unit sum
        and ``degraded`` is set.

    Raises
    ------
    DimensionMismatch, ZeroField, DegenerateSpectrum, SpectraOverlap
    InconsistentData
        Every weight is negative.
    """
    e, ep = _values(s), _values(s_prime)
    if e.size != ep.size:
        raise DimensionMismatch(f"spectra have {e.size} and {ep.size} eigenvalues")
    if f is None:
        f = infer_field_strength(e, ep)
    f = float(f)
    if not abs(f) >= ZERO_FIELD_TOL:
        raise ZeroField(f"field strength {f!r} is indistinguishable from zero")
    tol = default_gap_tol(e) if tol_gap is None else float(tol_gap)
    if e.size > 1 and np.diff(e).min() <= tol:
        raise DegenerateSpectrum(f"eigenvalue gap {np.diff(e).min()!r} below {tol!r}")
    if np.abs(e[:, None] - ep[None, :]).min() > tol:
        weights = _weights(e, ep, f)
    elif not deflate:
        raise SpectraOverlap("an eigenvalue of H coincides with one of H'")
    else:
        pairs = _coincidences(e, ep, tol)
        keep_e = np.setdiff1d(np.arange(e.size), [k for k, _ in pairs])
        keep_ep = np.setdiff1d(np.arange(ep.size), [m for _, m in pairs])
        if np.abs(e[keep_e][:, None] - ep[keep_ep][None, :]).min(initial=np.inf) <= tol:
            raise SpectraOverlap("coincident eigenvalues could not be paired one-to-one")
        weights = np.zeros(e.size)
        if keep_e.size:
            weights[keep_e] = _weights(e[keep_e], ep[keep_ep], f)

    degraded = False
    if np.any(weights < 0):
        weights = np.clip(weights, 0.0, None)
        degraded = True
    total = weights.sum()
    if total <= 0:
        raise InconsistentData("no positive weight left; spectra are not a rank-one pair")
    if abs(total - 1.0) > NORMALIZATION_TOL:
        weights = weights / total
        degraded = True
    return SpectralMeasure(e, weights, degraded)


def check_interlacing(s, s_prime, field_sign=1) -> bool:
    """Whether the spectra interlace as a rank-one update of sign ``field_sign`` requires.

    For a positive field ``e_k <= e'_k <= e_{k+1}``; for a negative one
    ``e_{k-1} <= e'_k <= e_k``.
    """
    e, ep = _values(s), _values(s_prime)
    if e.size != ep.size:
        raise DimensionMismatch(f"spectra have {e.size} and {ep.size} eigenvalues")
    if field_sign not in (1, -1):
        raise ValueError("field_sign must be +1 or -1")
    if field_sign < 0:
        e, ep = -e[::-1], -ep[::-1]
    return bool(np.all(e <= ep) and np.all(ep[:-1] <= e[1:]))
