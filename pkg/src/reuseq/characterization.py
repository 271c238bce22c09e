"""Reset-error characterization batches and their analysis."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Op, canonical_angle
from .simulator import CountsRecord

KINDS = ("individual_random", "simultaneous_random", "simultaneous_x")
_KIND_ORDER = {k: i for i, k in enumerate(KINDS)}


class AnalysisError(ValueError):
    pass


def zero_overlap(theta: float, phi: float = 0.0, lam: float = 0.0) -> float:
    """Probability of |0> after preparing U(theta, phi, lam)|0>."""
    return math.cos(theta / 2.0) ** 2


def prep_ops(q: int, angles: tuple[float, float, float] | None) -> list[Op]:
    """U(theta, phi, lam) as rz(lam) sdg h rz(theta) h s rz(phi); ``None`` prepares |1> with X."""
    if angles is None:
        return [Op("x", (q,))]
    theta, phi, lam = angles
    return [Op("rz", (q,), angle=lam), Op("sdg", (q,)), Op("h", (q,)), Op("rz", (q,), angle=theta),
            Op("h", (q,)), Op("s", (q,)), Op("rz", (q,), angle=phi)]


def haar_angles(rng: np.random.Generator) -> tuple[float, float, float]:
    theta = math.acos(1.0 - 2.0 * rng.random())
    phi = 2.0 * math.pi * rng.random()
    lam = 2.0 * math.pi * rng.random()
    return canonical_angle(theta), canonical_angle(phi), canonical_angle(lam)


@dataclass(frozen=True)
class ExperimentCircuit:
    id: str
    kind: str
    circuit: Circuit
    qubits: tuple[int, ...]
    r: int
    w: int                                                   # preparation index, 0 for X preparations
    preps: tuple[tuple[float, float, float] | None, ...]     # per qubit in ``qubits``

    def to_json(self) -> dict:
        return {"id": self.id, "kind": self.kind, "qubits": list(self.qubits), "r": self.r, "w": self.w,
                "preps": [None if a is None else list(a) for a in self.preps]}


@dataclass
class ExperimentBatch:
    kind: str
    P: int
    W: int
    R: int
    seed: int
    circuits: list[ExperimentCircuit] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.circuits)

    def manifest(self) -> dict:
        return {"kind": self.kind, "P": self.P, "W": self.W, "R": self.R, "seed": self.seed,
                "circuits": [c.to_json() for c in self.circuits]}


def _experiment(kind: str, P: int, qubits: tuple[int, ...], preps, r: int, w: int) -> ExperimentCircuit:
    ops: list[Op] = []
    for q, a in zip(qubits, preps):
        ops += prep_ops(q, a)
    for q in qubits:
        ops += [Op("reset", (q,))] * r
    for i, q in enumerate(qubits):
        ops.append(Op("measure", (q,), clbit=i))
    tag = f"q{qubits[0]}" if len(qubits) == 1 else "all"
    cid = f"{kind}-w{w}-r{r}-{tag}"
    c = Circuit(P, len(qubits), ops, cid, free_resets=True)
    return ExperimentCircuit(cid, kind, c, qubits, r, w, tuple(preps))


def generate_batch(kind: str, P: int, W: int, R: int, seed: int = 0) -> ExperimentBatch:
    """Circuits for one experiment kind, ordered by (w, r, qubit)."""
    if kind not in KINDS:
        raise ValueError(f"unknown experiment kind {kind!r}")
    if P < 1 or W < 1 or R < 1:
        raise ValueError("P, W and R must be at least 1")
    rng = np.random.default_rng(seed)
    batch = ExperimentBatch(kind, P, W, R, seed)
    if kind == "simultaneous_x":
        for r in range(1, R + 1):
            batch.circuits.append(_experiment(kind, P, tuple(range(P)), [None] * P, r, 0))
        return batch
    if kind == "individual_random":
        preps = [[haar_angles(rng) for _ in range(P)] for _ in range(W)]
        for w in range(W):
            for r in range(1, R + 1):
                for q in range(P):
                    batch.circuits.append(_experiment(kind, P, (q,), [preps[w][q]], r, w))
        return batch
    for w in range(W):
        prep = [haar_angles(rng) for _ in range(P)]
        for r in range(1, R + 1):
            batch.circuits.append(_experiment(kind, P, tuple(range(P)), prep, r, w))
    return batch


def interleave(*batches: ExperimentBatch) -> list[ExperimentCircuit]:
    """Submission order across experiment kinds: by (w, r, kind), stable within."""
    allc = [c for b in batches for c in b.circuits]
    return sorted(allc, key=lambda c: (c.w, c.r, _KIND_ORDER[c.kind]))


def _tukey_outliers(values: np.ndarray) -> int:
    if values.size < 4:
        return 0
    q1, q3 = np.percentile(values, [25, 75])
    spread = 1.5 * (q3 - q1)
    return int(np.sum((values < q1 - spread) | (values > q3 + spread)))


def _pearson(x: list[float], y: list[float]) -> float | None:
    if len(x) < 2:
        return None
    xa, ya = np.asarray(x), np.asarray(y)
    dx, dy = xa - xa.mean(), ya - ya.mean()
    den = math.sqrt(float(np.sum(dx * dx)) * float(np.sum(dy * dy)))
    if den == 0.0:
        return None
    return float(np.sum(dx * dy) / den)


@dataclass
class ResetStats:
    mean: float
    min: float
    max: float
    outlier_rate: float
    samples: int


@dataclass
class ResetReport:
    kind: str
    stats: dict[tuple[int, int], ResetStats]          # (p, r)
    best_r: dict[int, int]
    pearson_by_r: dict[int, float]                   # absent when undefined

    def reset_error(self) -> dict[int, list[float]]:
        """R(r, p) = 1 - mean fidelity, as per-qubit rows over r = 1..r_max."""
        table: dict[int, list[float]] = {}
        for (p, r) in sorted(self.stats):
            table.setdefault(p, []).append(1.0 - self.stats[p, r].mean)
        return table

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "stats": [{"qubit": p, "r": r, "mean": s.mean, "min": s.min, "max": s.max,
                       "outlier_rate": s.outlier_rate, "samples": s.samples}
                      for (p, r), s in sorted(self.stats.items())],
            "best_r": {str(p): r for p, r in sorted(self.best_r.items())},
            "pearson_by_r": {str(r): v for r, v in sorted(self.pearson_by_r.items())},
            "reset_error": {str(p): row for p, row in self.reset_error().items()},
        }

    def to_csv(self) -> str:
        table = self.reset_error()
        rmax = max((len(v) for v in table.values()), default=0)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["qubit"] + [f"r{r}" for r in range(1, rmax + 1)])
        for p, row in table.items():
            w.writerow([p] + [repr(v) for v in row])
        return buf.getvalue()


def zero_fraction(counts: CountsRecord, position: int, width: int) -> float:
    """Share of shots whose classical bit ``position`` reads 0 (bit 0 is the rightmost character)."""
    if counts.shots <= 0:
        raise AnalysisError("counts record has no shots")
    zeros = 0
    for key, n in counts.counts.items():
        if len(key) != width:
            raise AnalysisError(f"bitstring {key!r} does not have {width} bits")
        if key[width - 1 - position] == "0":
            zeros += n
    return zeros / counts.shots


def analyze(batch: ExperimentBatch, counts: list[CountsRecord] | dict[str, CountsRecord]) -> ResetReport:
    if isinstance(counts, dict):
        missing = [c.id for c in batch.circuits if c.id not in counts]
        if missing or len(counts) != len(batch.circuits):
            raise AnalysisError(f"counts do not match the batch (missing {missing[:3]})")
        counts = [counts[c.id] for c in batch.circuits]
    if len(counts) != len(batch.circuits):
        raise AnalysisError(f"{len(counts)} counts records for {len(batch.circuits)} circuits")
    samples: dict[tuple[int, int], list[float]] = {}
    pairs: dict[int, tuple[list[float], list[float]]] = {}
    for exp, rec in zip(batch.circuits, counts):
        if sum(rec.counts.values()) != rec.shots:
            raise AnalysisError(f"counts of {exp.id} do not sum to {rec.shots}")
        for i, (p, prep) in enumerate(zip(exp.qubits, exp.preps)):
            fid = zero_fraction(rec, i, len(exp.qubits))
            samples.setdefault((p, exp.r), []).append(fid)
            xs, ys = pairs.setdefault(exp.r, ([], []))
            xs.append(0.0 if prep is None else zero_overlap(*prep))
            ys.append(fid)
    stats = {}
    for key, vals in sorted(samples.items()):
        arr = np.asarray(vals)
        stats[key] = ResetStats(float(arr.mean()), float(arr.min()), float(arr.max()),
                                _tukey_outliers(arr) / arr.size, int(arr.size))
    best_r: dict[int, int] = {}
    for (p, r), s in stats.items():
        if p not in best_r or s.mean > stats[p, best_r[p]].mean:
            best_r[p] = r
    pearson = {}
    for r, (xs, ys) in sorted(pairs.items()):
        v = _pearson(xs, ys)
        if v is not None:
            pearson[r] = v
    return ResetReport(batch.kind, stats, best_r, pearson)


def simulate_batch(batch: ExperimentBatch, shots: int, seed: int = 0, noise=None) -> list[CountsRecord]:
    """Sampled counts for every circuit; circuit ``i`` draws with seed ``seed + i``."""
    from .simulator import sample_counts

    return [sample_counts(exp.circuit, shots, seed + i, noise) for i, exp in enumerate(batch.circuits)]
