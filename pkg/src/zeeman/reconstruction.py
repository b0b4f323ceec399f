"""Hamiltonian parameters from spectral measures.

Chains are recovered with the Lanczos three-term recurrence run on the
discrete measure (the diagonal operator ``diag(nodes)`` started from
``sqrt(weights)``), which produces the unique Jacobi matrix whose first-site
measure is the input. General networks are assembled eigenvector by
eigenvector from site weights and pairwise cross terms.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    DisconnectedPhaseGraph,
    InconsistentData,
    InvalidSpec,
    NodeMismatch,
    ReconstructionBreakdown,
)
from .inversion import SpectralMeasure, default_gap_tol, recover_weights
from .model import ChainSpec, HermitianMatrix, NetworkSpec, Perturbation, apply_perturbation, pair_probe, site_vector
from .spectral import Spectrum, spectrum

__all__ = [
    "CrossTermData",
    "moment",
    "reconstruct_chain",
    "estimate_chain",
    "recover_cross_terms",
    "assemble_network",
    "network_measurements",
]

BREAKDOWN_TOL = 1e-12
CAUCHY_SCHWARZ_SLACK = 1e-9
CONSISTENCY_TOL = 1e-6
LINK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CrossTermData:
    """``values[k] = <n|e_k><e_k|m>`` for the site pair ``(n, m)``."""

    site_pair: tuple
    values: np.ndarray

    def __post_init__(self):
        n, m = (int(i) for i in self.site_pair)
        if n == m:
            raise InvalidSpec("cross terms need two distinct sites")
        values = np.array(self.values, dtype=complex).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "site_pair", (n, m))
        object.__setattr__(self, "values", values)

    def check_bounds(self, w_n, w_m):
        """Raise InconsistentData unless ``|t_k|^2 <= w_k(n) w_k(m)`` up to slack."""
        excess = np.abs(self.values) ** 2 - np.asarray(w_n) * np.asarray(w_m)
        if excess.max() > CAUCHY_SCHWARZ_SLACK:
            raise InconsistentData(f"cross terms for {self.site_pair} exceed the diagonal weights")

    def to_dict(self):
        return {"pair": list(self.site_pair), "values": [[float(z.real), float(z.imag)] for z in self.values]}

    @classmethod
    def from_dict(cls, d):
        try:
            pairs = np.array(d["values"], dtype=float).reshape(-1, 2)
            return cls(tuple(d["pair"]), pairs[:, 0] + 1j * pairs[:, 1])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed cross-term data: {exc}") from exc

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def moment(measure: SpectralMeasure, m: int) -> float:
    """``sum_k e_k**m w_k``, which equals ``<1|H**m|1>`` for the site-1 measure."""
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    return float(np.sum(measure.nodes ** m * measure.weights))


def reconstruct_chain(measure: SpectralMeasure, breakdown_tol=BREAKDOWN_TOL) -> ChainSpec:
    """Jacobi matrix with positive couplings whose first-site measure is ``measure``.

    Lanczos with two passes of full reorthogonalization on ``diag(nodes)``.

    Raises
    ------
    ReconstructionBreakdown
        If a squared coupling falls to ``breakdown_tol`` or below. This happens
        when fewer than ``N`` weights are nonzero; the exception carries the
        parameters recovered up to that point.
    """
    x = measure.nodes
    n = x.size
    basis = np.zeros((n, n))
    onsite = np.zeros(n)
    couplings = np.zeros(n - 1)
    q = np.sqrt(measure.weights)
    q /= np.linalg.norm(q)
    basis[:, 0] = q
    for j in range(n):
        xq = x * q
        onsite[j] = q @ xq
        if j == n - 1:
            break
        r = xq - onsite[j] * q
        if j > 0:
            r -= couplings[j - 1] * basis[:, j - 1]
        for _ in range(2):
            r -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ r)
        c2 = r @ r
        if not c2 > breakdown_tol:
            raise ReconstructionBreakdown(j, couplings, onsite)
        couplings[j] = np.sqrt(c2)
        q = r / couplings[j]
        basis[:, j + 1] = q
    return ChainSpec(n, couplings, onsite)


def estimate_chain(s, s_prime, f=None) -> ChainSpec:
    """Spectra of H and of H with a marker on site 0, to chain parameters."""
    return reconstruct_chain(recover_weights(s, s_prime, f))


def _check_nodes(reference, measures, tol):
    for mu in measures:
        if mu.nodes.shape != reference.shape or np.abs(mu.nodes - reference).max() > tol:
            raise NodeMismatch("measures do not share the same eigenvalues")


def recover_cross_terms(w_n, w_m, w_plus, w_imag, pair, *, tol=None) -> CrossTermData:
    """Cross terms from the site measures and the two superposition-probe measures.

    ``w_plus`` comes from the probe ``(|n> + |m>)/sqrt(2)`` and ``w_imag`` from
    ``(|n> + i|m>)/sqrt(2)``; then

        Re t_k = w_plus,k - (w_n,k + w_m,k)/2
        Im t_k = (w_n,k + w_m,k)/2 - w_imag,k
    """
    tol = default_gap_tol(w_n.nodes) if tol is None else tol
    _check_nodes(w_n.nodes, (w_m, w_plus, w_imag), tol)
    mean = 0.5 * (w_n.weights + w_m.weights)
    return CrossTermData(pair, (w_plus.weights - mean) + 1j * (mean - w_imag.weights))


def _component(t_pm, v_p, p_first):
    # t(p, m) = v_p conj(v_m); stored the other way round it is v_m conj(v_p)
    return np.conj(t_pm) / np.conj(v_p) if p_first else t_pm / np.conj(v_p)


def assemble_network(diagonal_measures, cross, s, *, tol_gap=None) -> NetworkSpec:
    """Rebuild a Hermitian matrix from per-site weights and pair cross terms.

    For every eigenvalue the site of largest weight fixes the phase (its
    component is taken real and positive). The remaining components follow
    along the pairs in ``cross``, preferring the largest cross terms. Pairs
    not used for propagation are checked for consistency.

    Parameters
    ----------
    diagonal_measures : sequence of SpectralMeasure
        One per site, in site order.
    cross : iterable of CrossTermData
        Must connect every site carrying weight in each eigenvector.
    s : Spectrum
        Spectrum of H; nondegenerate.
    """
    e = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    n = e.size
    if len(diagonal_measures) != n:
        raise DimensionMismatch(f"need {n} site measures, got {len(diagonal_measures)}")
    tol = default_gap_tol(e) if tol_gap is None else tol_gap
    if n > 1 and np.diff(e).min() <= tol:
        raise DegenerateSpectrum("network assembly needs a nondegenerate spectrum")
    _check_nodes(e, diagonal_measures, tol)
    weights = np.array([mu.weights for mu in diagonal_measures])

    links = {}
    for ct in cross:
        p, m = ct.site_pair
        if not (0 <= p < n and 0 <= m < n):
            raise DimensionMismatch(f"pair {ct.site_pair} out of range")
        if ct.values.size != n:
            raise DimensionMismatch("cross terms have the wrong length")
        ct.check_bounds(weights[p], weights[m])
        links.setdefault(p, []).append((m, ct.values, True))
        links.setdefault(m, []).append((p, ct.values, False))

    vectors = np.zeros((n, n), dtype=complex)
    for k in range(n):
        w = weights[:, k]
        pivot = int(np.argmax(w))
        v = vectors[:, k]
        v[pivot] = np.sqrt(w[pivot])
        known = {pivot}
        heap = []

        def push(p):
            for m, t, p_first in links.get(p, ()):
                if m not in known and abs(t[k]) > LINK_TOL:
                    heapq.heappush(heap, (-abs(t[k]), p, m, p_first))

        push(pivot)
        while heap:
            _, p, m, p_first = heapq.heappop(heap)
            if m in known:
                continue
            t = next(tt for mm, tt, pf in links[p] if mm == m and pf == p_first)
            v[m] = _component(t[k], v[p], p_first)
            known.add(m)
            push(m)
        missing = [m for m in range(n) if m not in known and w[m] > LINK_TOL]
        if missing:
            raise DisconnectedPhaseGraph(f"sites {missing} unreachable for eigenvalue {k}")

        for p, adj in links.items():
            for m, t, p_first in adj:
                if p_first and abs(v[p] * np.conj(v[m]) - t[k]) > CONSISTENCY_TOL:
                    raise InconsistentData(f"pair {(p, m)} disagrees for eigenvalue {k}")

    h = (vectors * e) @ vectors.conj().T
    return NetworkSpec.from_matrix(h)


def network_measurements(h, f=10.0, pairs=None):
    """Simulate the all-pairs marker protocol on a known Hamiltonian.

    Runs spectroscopy on ``h`` and on ``h + f|psi><psi|`` for every site
    probe and both superposition probes of each pair, then inverts the
    spectra. Probes orthogonal to an eigenvector are handled by deflation.
    Intended for testing and demonstrations.

    Returns
    -------
    s : Spectrum
    site_measures : list of SpectralMeasure
    cross : list of CrossTermData
    """
    h = h if isinstance(h, HermitianMatrix) else HermitianMatrix(np.asarray(h))
    n = h.dimension
    s = spectrum(h, "H")
    if pairs is None:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]

    def measure(psi):
        sp = spectrum(apply_perturbation(h, Perturbation(psi, f)))
        return recover_weights(s, sp, f, deflate=True)

    site_measures = [measure(site_vector(i, n)) for i in range(n)]
    cross = []
    for a, b in pairs:
        w_plus = measure(pair_probe(a, b, n))
        w_imag = measure(pair_probe(a, b, n, imaginary=True))
        cross.append(recover_cross_terms(site_measures[a], site_measures[b], w_plus, w_imag, (a, b)))
    return s, site_measures, cross
