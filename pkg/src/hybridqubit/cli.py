"""Command-line interface.

Exit codes: 0 ok, 2 bad input, 3 numerical regime (near-degeneracy or
sign condition), 4 search failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from importlib import resources
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import jsonschema
import numpy as np

from . import dynamics, encoded, hubbard
from . import schrieffer_wolff as sw
from .optimizer import Objective, SearchConfig, Target, hybrid_search
from .optimizer.search import as_fractions, thread_count
from .optimizer.templates import preset_template, random_template

log = logging.getLogger("hybridqubit")

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_SEARCH = 0, 2, 3, 4
SCALING_RATIOS = (0.02, 0.05, 0.1)


class InputError(Exception):
    pass


def tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:  # pragma: no cover
        return "0.0.0"


def load_schema(name: str) -> dict:
    text = resources.files("hybridqubit").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str, source="input"):
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{source}: field {where}: {exc.message}") from None


def read_json(path, schema: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    validate(doc, schema, str(path))
    return doc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def dump(obj, path: Path, schema: str | None = None):
    if schema:
        validate(obj, schema, f"output {path.name}")
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n")
    return path


def write_manifest(args, subcommand, resolved_input, outputs):
    man = {
        "subcommand": subcommand,
        "config_digest": digest(resolved_input),
        "tool_version": tool_version(),
        "seed": args.seed,
        "outputs": sorted(p.name for p in outputs),
    }
    return dump(man, args.out_dir / f"manifest_{subcommand.replace('-', '_')}.json", "manifest")


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _mat(m):
    return [[float(v) for v in row] for row in np.real_if_close(np.asarray(m)).real]


# --------------------------------------------------------------------------
# derive-effective


def effective_report(params: hubbard.HubbardParams) -> dict:
    delta = sw.charge_gap(params)
    if delta <= 0:
        raise sw.RegimeError(f"need E_S^R - E_T^L > 0, got {delta:.6g} meV")
    eq_t = params.equal_tunneling()
    t = eq_t if eq_t is not None else float(params.t_LR[0, 0])
    q = sw.effective_hamiltonian_analytic(params, t=t)
    h_num = sw.effective_hamiltonian_numeric(params)
    h_full = sw.effective_hamiltonian_numeric(params, convention="full-commutator")
    ts = [r * delta for r in SCALING_RATIOS]
    err_a, err_n, err_3 = [], [], []
    for tt in ts:
        p = params.with_tunneling(tt)
        exact = sw.exact_gap(p)
        err_a.append(abs(sw.effective_hamiltonian_analytic(p, t=tt).gap - exact))
        err_n.append(abs(sw.gap_of(sw.effective_hamiltonian_numeric(p)) - exact))
        h3 = sw.effective_hamiltonian_numeric(p, include_triply_occupied=True)
        err_3.append(abs(sw.gap_of(h3) - exact))

    def slope(errs):
        return sw.scaling_exponent(ts, errs) if min(errs) > 0 else None

    return {
        "inputs": params.to_dict(),
        "J1": q.J1,
        "J2": q.J2,
        "Jp": q.Jp,
        "E_ST_L": q.E_ST_L,
        "H2_analytic": _mat(q.H2),
        "H2_numeric": _mat(h_num),
        "H2_numeric_full_commutator": _mat(h_full),
        "gap_analytic": q.gap,
        "gap_numeric": sw.gap_of(h_num),
        "gap_exact": sw.exact_gap(params),
        "scaling_exponent": {
            "analytic": slope(err_a),
            "numeric": slope(err_n),
            "numeric_triply_occupied": slope(err_3),
            "t_values": ts,
        },
    }


def cmd_derive_effective(args) -> int:
    if args.params == "default":
        params = hubbard.default_params()
    else:
        doc = read_json(args.params, "params")
        try:
            params = hubbard.HubbardParams.from_dict(doc)
        except ValueError as exc:
            raise InputError(f"{args.params}: {exc}") from None
    report = effective_report(params)
    out = dump(report, args.out_dir / (args.out or "effective_report.json"), "effective_report")
    write_manifest(args, "derive-effective", params.to_dict(), [out])
    print(out)
    return EXIT_OK


# --------------------------------------------------------------------------
# graphs and sequences


def resolve_graph(graph_arg) -> tuple[encoded.ConnectivityGraph, str]:
    if isinstance(graph_arg, dict):
        try:
            g = encoded.ConnectivityGraph.from_dict(graph_arg)
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"graph: {exc}") from None
        return g, g.label
    try:
        g = encoded.preset(graph_arg)
        name = next(k for k, v in encoded.PRESETS.items() if v is g)
        return g, name
    except KeyError:
        pass
    path = Path(graph_arg)
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return resolve_graph(doc)
    raise InputError(f"unknown graph {graph_arg!r}; use d, e, f or a graph JSON file")


def _encoding(graph):
    if graph.n_spins != 6:
        raise InputError("two three-spin qubits need a six-spin graph")
    try:
        return encoded.encoding_for(graph)
    except ValueError as exc:
        raise InputError(f"graph: {exc}") from None


def verification(seq: encoded.GateSequence, graph, graph_name) -> dict:
    """Dense matrix products on the S_z = -1 block; shares no code with the
    search objective."""
    try:
        seq.validate(graph)
    except encoded.EdgeNotInGraphError as exc:
        raise InputError(str(exc)) from None
    enc = _encoding(graph)
    u = encoded.sequence_unitary(seq, graph, enc.space)
    unit_err = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))
    m, leak = encoded.logical_block(u, enc)
    g1, g2 = encoded.makhlin_invariants(encoded.closest_unitary(m))
    diag = None
    off = m - np.diag(np.diag(m))
    if leak < 1e-10 and np.max(np.abs(off)) < 1e-10:
        ref = m[0, 0] / abs(m[0, 0])
        diag = [float(np.angle(v / ref)) for v in np.diag(m)]
    cls = encoded.cnot_class_residual(g1, g2)
    return {
        "graph": graph_name,
        "n_pulses": len(seq),
        "time_steps": len(seq.time_steps()),
        "leakage": leak,
        "G1": {"re": float(g1.real), "im": float(g1.imag)},
        "G2": g2,
        "cnot_class_distance": float(cls),
        "exact_cnot_distance": encoded.phase_distance(m, encoded.CNOT),
        "cnot_class": bool(leak < 1e-8 and abs(g1) < 1e-4 and abs(g2 - 1) < 1e-4),
        "logical_block": {"re": _mat(m.real), "im": _mat(m.imag)},
        "unitarity_error": unit_err,
        "diagonal_phases": diag,
    }


def load_sequence(path):
    doc = read_json(path, "sequence")
    graph, name = resolve_graph(doc["graph"])
    try:
        seq = encoded.GateSequence.from_dict({**doc, "graph": name})
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    for k, p in enumerate(seq.pulses):
        for s in p.edge:
            if s >= graph.n_spins:
                raise InputError(f"{path}: field pulses/{k}/edge: spin {s} outside 0..{graph.n_spins - 1}")
    return doc, seq, graph, name


def cmd_verify_sequence(args) -> int:
    doc, seq, graph, name = load_sequence(args.sequence)
    rep = verification(seq, graph, name)
    out = dump(rep, args.out_dir / (args.out or "verification.json"), "verification")
    write_manifest(args, "verify-sequence", doc, [out])
    print(out)
    return EXIT_OK


# --------------------------------------------------------------------------
# search-cnot


def cmd_search_cnot(args) -> int:
    graph, name = resolve_graph(args.graph)
    enc = _encoding(graph)
    if args.template:
        try:
            tmpl = [tuple(e) for e in json.loads(Path(args.template).read_text())]
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise InputError(f"{args.template}: {exc}") from None
        source = "file"
    else:
        tmpl = preset_template(name, args.length)
        source = "preset"
        if tmpl is None:
            tmpl = random_template(graph, args.length, np.random.default_rng(args.seed))
            source = "random"
    if args.length is not None and len(tmpl) != args.length:
        raise InputError(f"template has {len(tmpl)} pulses, --length asks for {args.length}")
    try:
        obj = Objective(graph, tuple(tmpl), enc, Target(args.target))
    except (ValueError, encoded.EdgeNotInGraphError) as exc:
        raise InputError(str(exc)) from None
    config = SearchConfig(
        seed=args.seed,
        restarts=args.restarts,
        generations=args.generations,
        population_size=args.population,
        threads=thread_count(args.threads),
        time_budget=args.time_budget,
    )
    res = hybrid_search(obj, config, progress=not args.quiet, graph_name=name)
    seq = res.sequence
    m, leak = encoded.logical_block(encoded.sequence_unitary(seq, graph, enc.space), enc)
    g1, g2 = encoded.makhlin_invariants(encoded.closest_unitary(m))
    cfg = config.to_dict()
    cfg.pop("threads")  # does not change the result
    result = {
        "graph": name,
        "length": len(seq),
        "target": args.target,
        "template_source": source,
        "sequence": seq.to_dict(),
        "objective_value": res.objective_value,
        "success": res.success,
        "leakage": leak,
        "G1": {"re": float(g1.real), "im": float(g1.imag)},
        "G2": g2,
        "time_steps": len(seq.time_steps()),
        "rational_taus": as_fractions(seq.taus),
        "config": cfg,
        "restarts_used": res.restarts_used,
        "evaluations": res.evaluations,
    }
    out_path = args.out_dir / (args.out or "search_result.json")
    out = dump(result, out_path, "search_result")
    timing = out_path.with_suffix(".timing.json")
    timing.write_text(json.dumps({"wall_time_s": res.wall_time}) + "\n")
    resolved = {"graph": graph.to_dict(), "template": [list(e) for e in obj.template], "target": args.target, **cfg}
    write_manifest(args, "search-cnot", resolved, [out])
    print(f"{'success' if res.success else 'FAILED'} objective {res.objective_value:.3e} "
          f"wall {res.wall_time:.1f}s -> {out}", file=sys.stderr)
    print(out)
    return EXIT_OK if res.success else EXIT_SEARCH


# --------------------------------------------------------------------------
# simulate-rabi


def _drive_qubit(doc, base_dir: Path):
    if "qubit" in doc:
        qd = doc["qubit"]
        j1, j2 = qd.get("J1", 0.0), qd.get("J2", 0.0)
        return sw.EffectiveQubit.from_couplings(j1, j2, qd.get("Jp", (j1 + j2) / 2), qd["E_ST"])
    p = doc.get("params", "default")
    if p == "default":
        params = hubbard.default_params()
    elif isinstance(p, str):
        pp = Path(p) if Path(p).is_absolute() else base_dir / p
        params = hubbard.HubbardParams.from_dict(read_json(pp, "params"))
    else:
        params = hubbard.HubbardParams.from_dict(p)
    return sw.effective_hamiltonian_analytic(params)


def rabi_run(doc, base_dir=Path(".")):
    try:
        q = _drive_qubit(doc, base_dir)
    except ValueError as exc:
        if isinstance(exc, sw.RegimeError):
            raise
        raise InputError(f"drive: {exc}") from None
    frame = doc.get("frame", "eigen")
    h2 = dynamics.eigenbasis_drive(q) if frame == "eigen" else q.H2
    gap = dynamics.energy_gap(h2)
    f = doc.get("frequency_ghz", "resonant")
    omega = gap / dynamics.HBAR_MEV_S if f == "resonant" else 2 * math.pi * float(f) * 1e9
    try:
        drive = dynamics.DriveSpec(
            h2,
            doc.get("modulated_term", "off-diagonal"),
            float(doc["amplitude"]),
            omega,
            float(doc["duration"]),
            doc.get("timestep"),
            bool(doc.get("square", False)),
        )
    except ValueError as exc:
        raise InputError(f"drive: {exc}") from None
    init = (1.0, 0.0) if doc.get("initial", "0") == "0" else (0.0, 1.0)
    trace = dynamics.propagate(drive, init)
    rwa = dynamics.rwa_rabi_rate(drive.amplitude)
    fitted = None
    if drive.amplitude != 0 and np.ptp(trace.p1) > 1e-6:
        try:
            fitted = dynamics.fit_rabi_rate(trace)
        except RuntimeError:
            fitted = None
    summary = {
        "qubit_frequency_ghz": dynamics.resonance_frequency(q),
        "drive_frequency_ghz": omega / (2 * math.pi) / 1e9,
        "amplitude": drive.amplitude,
        "timestep": drive.duration / drive.n_steps,
        "n_samples": len(trace.times),
        "rwa_rabi_rate": rwa,
        "fitted_rabi_rate": _finite(fitted) if fitted is not None else None,
        "relative_error": abs(fitted - rwa) / rwa if fitted is not None and rwa > 0 else None,
        "p1_max": float(trace.p1.max()),
        "max_norm_drift": float(np.max(np.abs(trace.norm - 1))),
        "frame": frame,
    }
    return trace, summary


def cmd_simulate_rabi(args) -> int:
    doc = read_json(args.drive, "drive")
    trace, summary = rabi_run(doc, Path(args.drive).parent)
    csv_path = args.out_dir / (args.out or "rabi_trace.csv")
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_s", "p0", "p1"])
        for t, (a, b) in zip(trace.times, trace.populations):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(b))])
    js = dump(summary, csv_path.with_name(csv_path.stem + "_summary.json"), "rabi_summary")
    write_manifest(args, "simulate-rabi", doc, [csv_path, js])
    print(js)
    return EXIT_OK


# --------------------------------------------------------------------------


def _global_flags(ap, default):
    ap.add_argument("--seed", type=int, default=default)
    ap.add_argument("--out-dir", type=Path, default=default)
    ap.add_argument("--threads", type=int, default=default, help="objective threads (env HYBRIDQUBIT_THREADS wins)")
    ap.add_argument("-v", "--verbose", action="store_true", default=default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridqubit", description=__doc__.splitlines()[0])
    _global_flags(ap, argparse.SUPPRESS)
    ap.set_defaults(seed=0, out_dir=Path("."), threads=None, verbose=False)
    # the same flags are accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive-effective", parents=[common], help="effective 2x2 Hamiltonian from Hubbard parameters")
    p.add_argument("params", help="parameter JSON file, or 'default'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive_effective)

    p = sub.add_parser("search-cnot", parents=[common], help="search exchange durations for a CNOT-class gate")
    p.add_argument("--graph", default="d", help="d, e, f or a graph JSON file")
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--template", help="JSON list of edges to use instead of a preset")
    p.add_argument("--target", choices=["class", "exact"], default="class")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--generations", type=int, default=60)
    p.add_argument("--population", type=int, default=48)
    p.add_argument("--time-budget", type=float, default=None, help="seconds; results then depend on speed")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search_cnot)

    p = sub.add_parser("verify-sequence", parents=[common], help="recompute leakage and invariants of a sequence")
    p.add_argument("sequence")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_sequence)

    p = sub.add_parser("simulate-rabi", parents=[common], help="driven two-level evolution, CSV trace")
    p.add_argument("drive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate_rabi)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "search-cnot" and args.length is None and not args.template:
        ap.error("search-cnot needs --length or --template")
    if not 0 <= args.seed < 2**64:
        ap.error("--seed must be a 64-bit unsigned integer")
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (sw.NearDegeneracyError, sw.RegimeError, dynamics.TimestepTooCoarseError) as exc:
        code = EXIT_INPUT if isinstance(exc, dynamics.TimestepTooCoarseError) else EXIT_REGIME
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
