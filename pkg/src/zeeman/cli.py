"""Command-line front end.

Subcommands::

    zeeman gen chain|spin|network|network-data|sweep-config ...
    zeeman spectrum --spec SPEC [--site N | --probe VEC] --field F [--sigma S --seed K] --out DIR
    zeeman estimate-chain H.json HPRIME.json [--field F] --out DIR
    zeeman estimate-network DIR --out network.json
    zeeman sweep --config CFG.json --out table.csv [--known-field]
    zeeman replay MANIFEST.json

Sites on the command line count from 1; library and file indices count
from 0. Every command writes a ``manifest.json`` (or ``<out>.manifest.json``)
next to its outputs; ``zeeman replay`` reruns it.

Exit codes: 0 success, 2 invalid input, 3 numerical failure,
4 reconstruction breakdown (partial result written), 5 spectra overlap,
degenerate spectrum or zero field.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    DegenerateSpectrum,
    InvalidSpec,
    ReconstructionBreakdown,
    SpectraOverlap,
    ZeemanError,
    ZeroField,
)
from .experiments import SweepConfig, run_stability_sweep
from .inversion import SpectralMeasure, infer_field_strength, recover_weights
from .model import (
    ChainSpec,
    NetworkSpec,
    Perturbation,
    SpinChainSpec,
    apply_perturbation,
    build_chain_matrix,
    build_spin_single_excitation,
    load_spec,
    site_vector,
)
from .reconstruction import CrossTermData, assemble_network, network_measurements, reconstruct_chain
from .spectral import NoiseModel, Spectrum, perturb_spectrum, spectrum

log = logging.getLogger("zeeman")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_BREAKDOWN = 4
EXIT_ILLPOSED = 5


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _manifest(command, argv, inputs, outputs, seed=None, **params):
    return {
        "command": command,
        "argv": [str(a) for a in argv],
        "cwd": os.getcwd(),
        "parameters": params,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "master_seed": seed,
        "version": __version__,
    }


def _matrix_for(spec):
    if isinstance(spec, ChainSpec):
        return build_chain_matrix(spec)
    if isinstance(spec, SpinChainSpec):
        return build_chain_matrix(build_spin_single_excitation(spec))
    return spec.matrix()


def _parse_probe(text, n):
    source = Path(text)
    raw = _read_json(source) if source.exists() else json.loads(text)
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        vec = arr[:, 0] + 1j * arr[:, 1]
    elif arr.ndim == 1:
        vec = arr.astype(complex)
    else:
        raise InputError("probe must be a list of reals or of [re, im] pairs")
    if vec.size != n:
        raise InputError(f"probe has {vec.size} components, system has {n} sites")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise InputError("probe vector is zero")
    return vec / norm


# --------------------------------------------------------------------------- #


def cmd_gen(args, argv):
    kind = args.kind
    rng = np.random.default_rng(args.seed)
    if kind == "chain":
        n = args.n
        if args.random:
            spec = ChainSpec(n, rng.uniform(0.5, 1.5, n - 1), rng.uniform(-0.5, 0.5, n))
        else:
            spec = ChainSpec.uniform(n, args.coupling)
        text = _dump(spec.to_dict())
    elif kind == "spin":
        n = args.n
        spec = SpinChainSpec(n, np.full(n - 1, args.coupling), np.zeros(n), args.anisotropy)
        text = _dump(spec.to_dict())
    elif kind == "network":
        a = rng.normal(size=(args.n, args.n)) + 1j * rng.normal(size=(args.n, args.n))
        text = _dump(NetworkSpec.from_matrix(0.5 * (a + a.conj().T)).to_dict())
    elif kind == "sweep-config":
        text = _dump(SweepConfig(master_seed=args.seed).to_dict())
    elif kind == "network-data":
        if not args.spec:
            raise InputError("network-data needs --spec")
        spec = _load(args.spec)
        h = _matrix_for(spec)
        s, sites, cross = network_measurements(h, args.field)
        out = Path(args.out)
        files = write_network_dir(out, s, sites, cross)
        _write_atomic(out / "manifest.json", _dump(_manifest("gen", argv, [args.spec], files, field=args.field)))
        return EXIT_OK
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(kind)
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def write_network_dir(out, s, site_measures, cross):
    """Write the file layout consumed by ``estimate-network``.

    ``spectrum.json`` plus ``site_<i>.json`` per site and one
    ``cross_<n>_<m>.json`` per pair, with 0-based indices.
    """
    out = Path(out)
    files = [out / "spectrum.json"]
    _write_atomic(files[0], _dump(s.to_dict()))
    for i, mu in enumerate(site_measures):
        files.append(out / f"site_{i}.json")
        _write_atomic(files[-1], _dump(mu.to_dict()))
    for ct in cross:
        n, m = ct.site_pair
        files.append(out / f"cross_{n}_{m}.json")
        _write_atomic(files[-1], _dump(ct.to_dict()))
    return files


def _load(path):
    try:
        return load_spec(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, InvalidSpec) as exc:
        raise InputError(f"invalid spec {path}: {exc}") from exc


def cmd_spectrum(args, argv):
    spec = _load(args.spec)
    try:
        h = _matrix_for(spec)
        n = h.dimension
        if args.probe is not None:
            psi = _parse_probe(args.probe, n)
        else:
            psi = site_vector(args.site - 1, n)
        pert = Perturbation(psi, args.field)
        noise_seeds = [int(x) for x in np.random.SeedSequence(args.seed).generate_state(2, dtype=np.uint64)]
        noise_h = NoiseModel(args.sigma, noise_seeds[0])
        noise_hp = NoiseModel(args.sigma, noise_seeds[1])
    except (InvalidSpec, ValueError) as exc:
        raise InputError(str(exc)) from exc
    try:
        s = perturb_spectrum(spectrum(h, "H"), noise_h)
        sp = perturb_spectrum(spectrum(apply_perturbation(h, pert), "H'"), noise_hp)
    except ZeemanError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    out = Path(args.out)
    files = [out / "H.json", out / "Hprime.json"]
    _write_atomic(files[0], _dump(s.to_dict()))
    _write_atomic(files[1], _dump(sp.to_dict()))
    manifest = _manifest(
        "spectrum", argv, [args.spec], files, seed=args.seed,
        site=None if args.probe is not None else args.site, probe=args.probe,
        field=args.field, sigma=args.sigma,
    )
    _write_atomic(out / "manifest.json", _dump(manifest))
    return EXIT_OK


def _load_spectrum(path):
    try:
        return Spectrum.from_dict(_read_json(path))
    except InvalidSpec as exc:
        raise InputError(f"invalid spectrum {path}: {exc}") from exc


def cmd_estimate_chain(args, argv):
    s = _load_spectrum(args.spectrum_h)
    sp = _load_spectrum(args.spectrum_hprime)
    if len(s) != len(sp):
        raise InputError("spectra have different lengths")
    try:
        f = infer_field_strength(s, sp) if args.field is None else args.field
        measure = recover_weights(s, sp, f)
    except (ZeroField, DegenerateSpectrum, SpectraOverlap) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ILLPOSED
    except ZeemanError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC

    code = EXIT_OK
    chain = {"n_sites": len(s), "field": f, "degraded": measure.degraded, "breakdown_index": None}
    try:
        est = reconstruct_chain(measure)
        chain.update(couplings=est.couplings.tolist(), onsite=est.onsite.tolist())
    except ReconstructionBreakdown as exc:
        chain.update(couplings=exc.couplings.tolist(), onsite=exc.onsite.tolist(), breakdown_index=exc.index)
        code = EXIT_BREAKDOWN
    out = Path(args.out)
    files = [out / "measure.json", out / "chain.json"]
    _write_atomic(files[0], _dump(measure.to_dict()))
    _write_atomic(files[1], _dump(chain))
    manifest = _manifest(
        "estimate-chain", argv, [args.spectrum_h, args.spectrum_hprime], files, field=args.field
    )
    _write_atomic(out / "manifest.json", _dump(manifest))
    return code


def cmd_estimate_network(args, argv):
    src = Path(args.directory)
    if not src.is_dir():
        raise InputError(f"{src} is not a directory")
    s = _load_spectrum(src / "spectrum.json")
    n = len(s)
    try:
        sites = [SpectralMeasure.from_dict(_read_json(src / f"site_{i}.json")) for i in range(n)]
        cross = [CrossTermData.from_dict(_read_json(p)) for p in sorted(src.glob("cross_*.json"))]
    except InvalidSpec as exc:
        raise InputError(str(exc)) from exc
    try:
        net = assemble_network(sites, cross, s)
    except DegenerateSpectrum as exc:
        log.error("%s", exc)
        return EXIT_ILLPOSED
    except ZeemanError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC
    out = Path(args.out)
    _write_atomic(out, _dump(net.to_dict()))
    inputs = [src / "spectrum.json"] + [src / f"site_{i}.json" for i in range(n)] + sorted(src.glob("cross_*.json"))
    _write_atomic(out.with_name(out.name + ".manifest.json"), _dump(_manifest("estimate-network", argv, inputs, [out])))
    return EXIT_OK


def cmd_sweep(args, argv):
    raw = _read_json(args.config)
    try:
        config = SweepConfig.from_dict(raw)
        if args.known_field:
            config = SweepConfig.from_dict({**config.to_dict(), "use_known_field": True})
    except InvalidSpec as exc:
        raise InputError(str(exc)) from exc
    result = run_stability_sweep(config)
    out = Path(args.out)
    _write_atomic(out, result.to_csv())
    manifest = _manifest("sweep", argv, [args.config], [out], seed=config.master_seed, config=config.to_dict())
    _write_atomic(out.with_name(out.name + ".manifest.json"), _dump(manifest))
    return EXIT_OK


def cmd_replay(args, argv):
    manifest = _read_json(args.manifest)
    try:
        replay_argv = list(manifest["argv"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"not a manifest: {args.manifest}") from exc
    if replay_argv and replay_argv[0] == "replay":
        raise InputError("refusing to replay a replay")
    here = os.getcwd()
    os.chdir(manifest.get("cwd", here))
    try:
        return main(replay_argv)
    finally:
        os.chdir(here)


# --------------------------------------------------------------------------- #


def build_parser():
    parser = argparse.ArgumentParser(prog="zeeman", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit example specs and configs")
    p.add_argument("kind", choices=["chain", "spin", "network", "network-data", "sweep-config"])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--anisotropy", type=float, default=0.0)
    p.add_argument("--random", action="store_true", help="random disordered chain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", help="network spec (network-data only)")
    p.add_argument("--field", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("spectrum", help="simulate spectroscopy of H and H'")
    p.add_argument("--spec", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--site", type=int, default=1, help="marker site, counted from 1")
    group.add_argument("--probe", help="probe vector: JSON file or inline JSON list")
    p.add_argument("--field", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("estimate-chain", help="recover chain parameters from two spectra")
    p.add_argument("spectrum_h")
    p.add_argument("spectrum_hprime")
    p.add_argument("--field", type=float, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_estimate_chain)

    p = sub.add_parser("estimate-network", help="assemble a network from measure files")
    p.add_argument("directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate_network)

    p = sub.add_parser("sweep", help="noise stability sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--known-field", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args, argv)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
