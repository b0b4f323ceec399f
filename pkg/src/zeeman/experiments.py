"""Monte Carlo study of how spectral noise degrades chain estimation.

Every trial draws its noise from a generator keyed on
``(master_seed, N, sigma index, trial index)``, so results do not depend on
how trials are scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, ReconstructionBreakdown, ZeemanError
from .inversion import recover_weights
from .model import ChainSpec, Perturbation, apply_perturbation, build_chain_matrix
from .reconstruction import reconstruct_chain
from .spectral import NoiseModel, perturb_spectrum, spectrum

__all__ = [
    "SweepConfig",
    "SweepResult",
    "chain_error",
    "run_stability_sweep",
    "breakdown_length",
    "trial_seeds",
    "FIG2_SIGMAS",
]

FIG2_SIGMAS = (0.01, 0.02, 0.04, 0.08)
CSV_HEADER = ("N", "sigma", "mean_error", "failure_fraction", "samples")


@dataclass(frozen=True)
class SweepConfig:
    n_min: int = 2
    n_max: int = 20
    sigmas: tuple = FIG2_SIGMAS
    samples: int = 1000
    field_strength: float = 10.0
    true_coupling: float = 1.0
    master_seed: int = 0
    use_known_field: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        if not 2 <= self.n_min <= self.n_max:
            raise InvalidSpec("need 2 <= n_min <= n_max")
        if self.samples < 1:
            raise InvalidSpec("samples must be at least 1")
        if not self.sigmas or any(not s >= 0 for s in self.sigmas):
            raise InvalidSpec("sigmas must be a non-empty list of nonnegative values")
        if self.field_strength == 0:
            raise InvalidSpec("field_strength must be nonzero")
        if self.true_coupling <= 0:
            raise InvalidSpec("true_coupling must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidSpec("master_seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise InvalidSpec("sweep config must be a JSON object")
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidSpec(f"unknown config keys: {sorted(unknown)}")
        try:
            kw = dict(d)
            for key in ("n_min", "n_max", "samples", "master_seed"):
                if key in kw:
                    kw[key] = int(kw[key])
            for key in ("field_strength", "true_coupling"):
                if key in kw:
                    kw[key] = float(kw[key])
            if "use_known_field" in kw:
                kw["use_known_field"] = bool(kw["use_known_field"])
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed sweep config: {exc}") from exc

    def to_dict(self):
        d = asdict(self)
        d["sigmas"] = list(self.sigmas)
        return d


@dataclass(frozen=True)
class SweepRow:
    n: int
    sigma: float
    mean_error: float
    failure_fraction: float
    samples: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple = field(default_factory=tuple)

    def table(self):
        """``{sigma: (N array, mean_error array)}`` for plotting."""
        out = {}
        for sigma in sorted({r.sigma for r in self.rows}):
            sel = [r for r in self.rows if r.sigma == sigma]
            out[sigma] = (np.array([r.n for r in sel]), np.array([r.mean_error for r in sel]))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.n, f"{r.sigma:.17g}", f"{r.mean_error:.17g}", f"{r.failure_fraction:.17g}", r.samples])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.DictReader(io.StringIO(text))
        rows = [
            SweepRow(int(d["N"]), float(d["sigma"]), float(d["mean_error"]), float(d["failure_fraction"]), int(d["samples"]))
            for d in reader
        ]
        return cls(tuple(rows))


def chain_error(true_spec: ChainSpec, est) -> float:
    """Mean squared coupling error over the ``N - 1`` couplings.

    ``est`` may be a ChainSpec or a plain coupling array (for partial
    estimates whose unrecovered couplings are zero). Returns 0 for ``N = 1``.
    """
    est_c = est.couplings if isinstance(est, ChainSpec) else np.asarray(est, dtype=float)
    if est_c.shape != true_spec.couplings.shape:
        raise DimensionMismatch("chains have different lengths")
    if est_c.size == 0:
        return 0.0
    return float(np.mean((true_spec.couplings - est_c) ** 2))


def trial_seeds(master_seed, n, sigma_index, trial):
    """Two independent 64-bit seeds (for H and H') for one trial."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(n, sigma_index, trial))
    return [int(x) for x in ss.generate_state(2, dtype=np.uint64)]


def _run_cell(config: SweepConfig, n: int, sigma_index: int) -> SweepRow:
    sigma = config.sigmas[sigma_index]
    true_spec = ChainSpec.uniform(n, config.true_coupling)
    h = build_chain_matrix(true_spec)
    s = spectrum(h, "H")
    s_prime = spectrum(apply_perturbation(h, Perturbation.at_site(0, n, config.field_strength)), "H'")
    known = config.field_strength if config.use_known_field else None

    total = 0.0
    failures = 0
    for trial in range(config.samples):
        seed_h, seed_hp = trial_seeds(config.master_seed, n, sigma_index, trial)
        noisy = perturb_spectrum(s, NoiseModel(sigma, seed_h))
        noisy_prime = perturb_spectrum(s_prime, NoiseModel(sigma, seed_hp))
        try:
            est = reconstruct_chain(recover_weights(noisy, noisy_prime, known)).couplings
        except ReconstructionBreakdown as exc:
            est = exc.couplings
            failures += 1
        except ZeemanError:
            est = np.zeros(n - 1)
            failures += 1
        total += chain_error(true_spec, est)
    return SweepRow(n, sigma, total / config.samples, failures / config.samples, config.samples)


def _run_cell_args(args):
    return _run_cell(*args)


def _default_workers():
    try:
        requested = int(os.environ.get("ZEEMAN_THREADS", "0"))
    except ValueError:
        requested = 0
    return requested if requested > 0 else (os.cpu_count() or 1)


def run_stability_sweep(config: SweepConfig, workers=None) -> SweepResult:
    """Average coupling error over noisy trials for each chain length and noise level.

    Each trial takes a uniform chain with couplings ``true_coupling`` and zero
    fields, adds independent Gaussian noise to the spectra of H and of H with
    a marker on the first site, and runs the full estimation. Trials in
    which estimation fails count as failures; couplings not recovered are
    scored as zero.

    Parameters
    ----------
    workers : int, optional
        Worker processes. Defaults to ``ZEEMAN_THREADS`` (0 or unset means
        one per CPU). The result does not depend on this value.
    """
    workers = _default_workers() if workers is None else max(1, int(workers))
    cells = [(config, n, si) for n in range(config.n_min, config.n_max + 1) for si in range(len(config.sigmas))]
    if workers == 1 or len(cells) == 1:
        rows = [_run_cell(*c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_args, cells))
    return SweepResult(tuple(rows))


def breakdown_length(result: SweepResult, sigma, factor=10.0):
    """First N whose mean error exceeds ``factor`` times the error at the shortest N.

    Returns None if no such N exists in the sweep.
    """
    ns, err = result.table()[sigma]
    threshold = factor * err[0]
    above = np.nonzero(err > threshold)[0]
    return int(ns[above[0]]) if above.size else None


def load_config(path) -> SweepConfig:
    with open(path) as fh:
        return SweepConfig.from_dict(json.load(fh))
