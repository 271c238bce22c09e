"""Command-line entry point: optimize, place, characterize, verify.

Machine-readable JSON goes to stdout (or ``--out``); progress and timing go
to stderr.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from pathlib import Path

import click

from .circuit import Circuit, CircuitError, QasmError, builtin_circuit, load_qasm, parse_qasm, to_qasm
from .mapped import MappedCircuit, check_valid
from .topology import TopologyError, load_topology

EXIT_OK, EXIT_FAIL, EXIT_TIMEOUT = 0, 1, 2


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fail(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_FAIL)


def _seed(seed: int) -> int:
    return int(os.environ.get("REUSEQ_SOLVER_SEED", seed))


def _load_circuit(name: str | None, qasm: str | None) -> Circuit:
    if (name is None) == (qasm is None):
        _fail("give exactly one of --circuit or --qasm")
    try:
        return builtin_circuit(name) if name else load_qasm(qasm)
    except (CircuitError, QasmError, OSError) as exc:
        _fail(str(exc))


def _load_graph(spec: str):
    try:
        return load_topology(spec)
    except (TopologyError, OSError, ValueError) as exc:
        _fail(str(exc))


def _load_mapped(path: str) -> MappedCircuit:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return MappedCircuit.from_json(data.get("mapped", data))
    except (OSError, KeyError, ValueError, TypeError, AttributeError) as exc:
        _fail(f"cannot read mapped circuit {path}: {exc}")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log solver progress to stderr.")
def main(verbose: bool) -> None:
    """Exact swap insertion with qubit reuse, placement and reset characterization."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--circuit", "name", help="Built-in circuit: bv<n>[:secret], h_ladder<n>, xor5_254.")
@click.option("--qasm", type=click.Path(exists=True, dir_okay=False), help="OpenQASM 2 input file.")
@click.option("--topology", required=True, help="Preset (line5, heavy_hex_27, ...) or coupling-graph JSON.")
@click.option("--objective", type=click.Choice(["depth", "swaps", "qubits"]), default="swaps", show_default=True)
@click.option("--reuse", default="on", show_default=True, help="off | on | exact:K | max-qubits:K")
@click.option("--secondary-objective", "secondary", multiple=True,
              type=click.Choice(["depth", "swaps", "qubits", "resets"]), help="Repeatable; default depends on objective.")
@click.option("--budget", type=float, default=None, help="Solver budget in seconds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--T", "horizon", type=int, default=None, help="Initial step horizon.")
@click.option("--backend", default=None, help="SAT engine: cadical195 (default), glucose4, embedded, ...")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON result file.")
@click.option("--qasm-out", type=click.Path(dir_okay=False), default=None, help="Also write the mapped circuit as QASM.")
def optimize(name, qasm, topology, objective, reuse, secondary, budget, seed, horizon, backend, out, qasm_out):
    """Map a circuit with optimal swap insertion and qubit reuse."""
    from .mapper import InfeasibleError, ReuseMode, optimize_circuit

    c = _load_circuit(name, qasm)
    g = _load_graph(topology)
    try:
        mode = ReuseMode.parse(reuse)
    except ValueError as exc:
        _fail(f"--reuse: {exc}")
    start = time.monotonic()
    try:
        res = optimize_circuit(c, g, objective, mode, secondary=tuple(secondary) or None, budget=budget,
                               T=horizon, seed=_seed(seed), backend=backend)
    except InfeasibleError as exc:
        _emit({"status": "infeasible", "reason": str(exc)}, out)
        sys.exit(EXIT_FAIL)
    click.echo(f"{c.name} on {g.name}: {res.status} {res.values} in {time.monotonic() - start:.2f}s", err=True)
    summary = res.summary()
    summary.pop("runtime_s", None)
    data = {"summary": summary, "attempts": res.attempts}
    if res.mapped is not None:
        data["mapped"] = res.mapped.to_json()
        if qasm_out:
            Path(qasm_out).write_text(res.mapped.to_qasm(), encoding="utf-8")
    _emit(data, out)
    if res.status == "optimal":
        sys.exit(EXIT_OK)
    sys.exit(EXIT_TIMEOUT if res.status == "timeout" else EXIT_FAIL)


@main.command()
@click.option("--mapped", "mapped_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Output of `optimize` or a bare mapped-circuit JSON.")
@click.option("--topology", required=True)
@click.option("--calibration", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def place(mapped_path, topology, calibration, out):
    """Choose the cheapest embedding and reset repetitions for a mapped circuit."""
    from .placement import CalibrationError, CalibrationSet, PlacementError
    from .placement import place as run_place

    mc = _load_mapped(mapped_path)
    g = _load_graph(topology)
    try:
        cal = CalibrationSet.load(calibration)
        res = run_place(mc, g, cal)
    except (CalibrationError, PlacementError, ValueError, OSError) as exc:
        _fail(str(exc))
    _emit(res.to_json(), out)


@main.group()
def characterize():
    """Reset-error characterization batches."""


@characterize.command()
@click.option("--kind", required=True, type=click.Choice(["individual_random", "simultaneous_random", "simultaneous_x"]))
@click.option("--P", "P", type=int, required=True, help="Number of qubits.")
@click.option("--W", "W", type=int, default=50, show_default=True, help="Random preparations.")
@click.option("--R", "R", type=int, default=5, show_default=True, help="Maximum reset repetitions.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory.")
def generate(kind, P, W, R, seed, out_dir):
    """Write a batch manifest and one QASM file per circuit."""
    from .characterization import generate_batch

    try:
        batch = generate_batch(kind, P, W, R, seed)
    except ValueError as exc:
        _fail(str(exc))
    root = Path(out_dir)
    (root / "circuits").mkdir(parents=True, exist_ok=True)
    for exp in batch.circuits:
        (root / "circuits" / f"{exp.id}.qasm").write_text(to_qasm(exp.circuit), encoding="utf-8")
    manifest = batch.manifest()
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    _emit({"kind": kind, "circuits": len(batch), "manifest": str(root / "manifest.json")}, None)


def _batch_from_manifest(path: str):
    from .characterization import generate_batch

    try:
        man = json.loads(Path(path).read_text(encoding="utf-8"))
        batch = generate_batch(man["kind"], man["P"], man["W"], man["R"], man["seed"])
    except (OSError, KeyError, ValueError) as exc:
        _fail(f"bad manifest {path}: {exc}")
    if [c["id"] for c in man["circuits"]] != [c.id for c in batch.circuits]:
        _fail("manifest circuits do not match a regenerated batch")
    return batch


@characterize.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--shots", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eta", multiple=True, help="Reset failure probability as QUBIT=VALUE (repeatable) or a single VALUE for all.")
@click.option("--mode", type=click.Choice(["leave_state", "flip_to_one"]), default="leave_state", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def simulate(manifest, shots, seed, eta, mode, out):
    """Synthetic counts for a batch from the exact simulator with reset noise."""
    from .characterization import simulate_batch
    from .simulator import ResetNoise

    batch = _batch_from_manifest(manifest)
    rates: dict[int, float] = {}
    for item in eta:
        if "=" in item:
            q, v = item.split("=", 1)
            rates[int(q)] = float(v)
        else:
            rates.update({q: float(item) for q in range(batch.P)})
    records = simulate_batch(batch, shots, seed, ResetNoise(rates, mode))
    _emit({exp.id: rec.to_json() for exp, rec in zip(batch.circuits, records)}, out)


@characterize.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--counts", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report JSON.")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), default=None, help="Reset-error table as CSV.")
def analyze(manifest, counts, out, csv_out):
    """Reset fidelities, outliers, best repetition counts and correlations."""
    from .characterization import AnalysisError
    from .characterization import analyze as run_analyze
    from .simulator import CountsRecord

    batch = _batch_from_manifest(manifest)
    try:
        raw = json.loads(Path(counts).read_text(encoding="utf-8"))
        records = {cid: CountsRecord({k: int(v) for k, v in c.items()}, sum(int(v) for v in c.values()))
                   for cid, c in raw.items()}
        report = run_analyze(batch, records)
    except (AnalysisError, OSError, ValueError, AttributeError) as exc:
        _fail(str(exc))
    if csv_out:
        Path(csv_out).write_text(report.to_csv(), encoding="utf-8")
    _emit(report.to_json(), out)


@main.command()
@click.option("--circuit", "name", help="Built-in original circuit.")
@click.option("--qasm", type=click.Path(exists=True, dir_okay=False), help="Original circuit as QASM.")
@click.option("--mapped", "mapped_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Mapped-circuit JSON, or a QASM file over physical qubits.")
@click.option("--topology", default=None, help="Also run the structural validity check against this host.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(name, qasm, mapped_path, topology, out):
    """Compare output distributions of an original and a mapped circuit."""
    from .simulator import SimulationError, equivalent

    original = _load_circuit(name, qasm)
    report: dict = {}
    if mapped_path.endswith(".qasm"):
        try:
            mapped = parse_qasm(Path(mapped_path).read_text(encoding="utf-8"), "mapped", free_resets=True)
        except QasmError as exc:
            _fail(str(exc))
    else:
        mapped = _load_mapped(mapped_path)
        if topology:
            rep = check_valid(mapped, _load_graph(topology), original)
            report["violations"] = rep.violations
    try:
        same, fid = equivalent(original, mapped)
    except SimulationError as exc:
        _fail(str(exc))
    report.update({"equivalent": same, "hellinger_fidelity": fid})
    ok = same and not report.get("violations")
    report["pass"] = ok
    _emit(report, out)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


if __name__ == "__main__":
    main()
