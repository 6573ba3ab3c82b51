"""Two-phase pruning pipeline: utopia-based Phase A, center-point Phase B,
final front assembly, and full solve accounting."""

from __future__ import annotations

import dataclasses
import os
import pickle
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    ObjectivePoint,
    ParetoSolution,
    ProblemSpec,
    Realization,
    nondominated_filter,
)
from .decomposition import (
    Status,
    SubproblemRecord,
    build_subproblem_front,
    compute_anchors_utopia,
    compute_center,
    enumerate_realizations,
)
from .solver import InfeasibleError, SolverConfig, add_solve_count, reset_solve_count, solve_count

__all__ = [
    "PipelineError",
    "NlpCounts",
    "PruneReport",
    "PhaseAResult",
    "master_candidates",
    "build_master_front",
    "phase_a",
    "phase_b",
    "run_pipeline",
    "resolve_workers",
    "parallel_map",
]


class PipelineError(RuntimeError):
    """No subproblem produced a usable solution."""


def resolve_workers(workers: int | None) -> int:
    """Explicit worker count, or the PARETO_PRUNE_THREADS env var when
    None (0 means one worker per CPU; unset means serial)."""
    if workers is None:
        raw = os.environ.get("PARETO_PRUNE_THREADS", "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"PARETO_PRUNE_THREADS must be an integer, got {raw!r}") from None
    if workers == 0:
        workers = os.cpu_count() or 1
    return max(1, workers)


def _counted_call(task):
    fn, args = task
    before = solve_count()
    out = fn(*args)
    return out, solve_count() - before


def parallel_map(fn, argtuples, workers: int = 1) -> list:
    """Map fn over argument tuples, optionally across worker processes.

    Results keep input order and the workers' solve counts are folded
    back into this process, so totals match serial execution exactly.
    Falls back to serial when the task does not pickle (e.g. closures in
    user-defined problem evaluators).
    """
    argtuples = list(argtuples)
    if workers <= 1 or len(argtuples) <= 1:
        return [fn(*a) for a in argtuples]
    tasks = [(fn, a) for a in argtuples]
    try:
        pickle.dumps(tasks[0])
    except Exception:
        return [fn(*a) for a in argtuples]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        outcomes = list(ex.map(_counted_call, tasks, chunksize=chunk))
    add_solve_count(sum(delta for _, delta in outcomes))
    return [out for out, _ in outcomes]


@dataclass(frozen=True)
class NlpCounts:
    a1: int = 0
    a2: int = 0
    b1: int = 0
    b3: int = 0

    @property
    def total(self) -> int:
        return self.a1 + self.a2 + self.b1 + self.b3


@dataclass(frozen=True)
class PruneReport:
    """Everything a run produced: retained/pruned index sets, per-phase
    solve counts, and the final front.  ``phases`` is "ab", "a", or
    "none" (exhaustive oracle)."""

    problem: str
    beta: int
    phases: str
    eps: float
    seed: int
    k_total: int
    k1m: tuple[int, ...]
    k1u: tuple[int, ...]
    k1c: tuple[int, ...]
    pruned_a: tuple[int, ...]
    pruned_b: tuple[int, ...]
    infeasible: tuple[int, ...]
    nlp: NlpCounts
    front: tuple[ParetoSolution, ...]
    wallclock_ms: int = 0

    def front_realizations(self) -> set[tuple[float, ...]]:
        """Distinct discrete vectors appearing in the final front."""
        return {sol.realization.z for sol in self.front}

    def to_json_dict(self) -> dict:
        return {
            "problem": self.problem,
            "beta": self.beta,
            "phases": self.phases,
            "eps": self.eps,
            "seed": self.seed,
            "k_total": self.k_total,
            "k1m": list(self.k1m),
            "k1u": list(self.k1u),
            "k1c": list(self.k1c),
            "pruned_a": list(self.pruned_a),
            "pruned_b": list(self.pruned_b),
            "infeasible": list(self.infeasible),
            "nlp": {
                "a1": self.nlp.a1,
                "a2": self.nlp.a2,
                "b1": self.nlp.b1,
                "b3": self.nlp.b3,
                "total": self.nlp.total,
            },
            "front": [
                {
                    "k": sol.realization.k,
                    "z": list(sol.realization.z),
                    "y": list(sol.y),
                    "j1": sol.point.j1,
                    "j2": sol.point.j2,
                    "provenance": sol.provenance,
                }
                for sol in self.front
            ],
            "wallclock_ms": self.wallclock_ms,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PruneReport":
        try:
            nlp = d["nlp"]
            counts = NlpCounts(a1=int(nlp["a1"]), a2=int(nlp["a2"]),
                               b1=int(nlp["b1"]), b3=int(nlp["b3"]))
            if counts.total != int(nlp["total"]):
                raise ValueError("nlp total does not match per-phase counts")
            front = tuple(
                ParetoSolution(
                    y=tuple(float(v) for v in e["y"]),
                    realization=Realization(k=int(e["k"]), z=tuple(float(v) for v in e["z"])),
                    point=ObjectivePoint(float(e["j1"]), float(e["j2"])),
                    provenance=str(e["provenance"]),
                )
                for e in d["front"]
            )
            return cls(
                problem=str(d["problem"]),
                beta=int(d["beta"]),
                phases=str(d["phases"]),
                eps=float(d["eps"]),
                seed=int(d["seed"]),
                k_total=int(d["k_total"]),
                k1m=tuple(int(k) for k in d["k1m"]),
                k1u=tuple(int(k) for k in d["k1u"]),
                k1c=tuple(int(k) for k in d["k1c"]),
                pruned_a=tuple(int(k) for k in d["pruned_a"]),
                pruned_b=tuple(int(k) for k in d["pruned_b"]),
                infeasible=tuple(int(k) for k in d["infeasible"]),
                nlp=counts,
                front=front,
                wallclock_ms=int(d["wallclock_ms"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed report document: {exc}") from exc


@dataclass
class PhaseAResult:
    records: dict[int, SubproblemRecord]
    k1m: list[int]
    k1u: list[int]
    pruned_a: list[int]
    infeasible: list[int]
    master_front: list[ParetoSolution]
    nlp_a1: int
    nlp_a2: int


def master_candidates(records: list[SubproblemRecord], eps: float = 0.0) -> list[int]:
    """Indices whose utopia point no other utopia strictly dominates.
    Identical utopias all survive; infeasible records are skipped."""
    usable = [rec for rec in records if rec.utopia is not None]
    if not usable:
        return []
    pts = np.array([[rec.utopia.j1, rec.utopia.j2] for rec in usable])
    out = []
    for i, rec in enumerate(usable):
        le = (pts[:, 0] <= pts[i, 0] + eps) & (pts[:, 1] <= pts[i, 1] + eps)
        lt = (pts[:, 0] < pts[i, 0] - eps) | (pts[:, 1] < pts[i, 1] - eps)
        le[i] = False
        if not bool(np.any(le & lt)):
            out.append(rec.realization.k)
    return sorted(out)


def build_master_front(
    spec: ProblemSpec,
    k1m: list[int],
    beta: int,
    config: SolverConfig,
    eps: float = 0.0,
    workers: int = 1,
    records: dict[int, SubproblemRecord] | None = None,
) -> list[ParetoSolution]:
    """Union of the k1m subproblem fronts, filtered.  When ``records``
    is given the per-subproblem fronts are stored there for reuse."""
    if not k1m:
        raise PipelineError("cannot build a master front from an empty candidate set")
    if records is None:
        raise ValueError("records mapping is required to resolve realizations")
    fronts = parallel_map(
        build_subproblem_front,
        [(spec, records[k].realization, beta, config, eps) for k in k1m],
        workers=workers,
    )
    merged: list[ParetoSolution] = []
    for k, front in zip(k1m, fronts):
        records[k].front = front
        merged.extend(front)
    return nondominated_filter(merged, eps)


def _weakly_dominated_by(front_pts: np.ndarray, p: ObjectivePoint, eps: float) -> bool:
    return bool(np.any((front_pts[:, 0] <= p.j1 + eps) & (front_pts[:, 1] <= p.j2 + eps)))


def phase_a(
    spec: ProblemSpec,
    beta: int,
    config: SolverConfig,
    eps: float = 0.0,
    workers: int = 1,
) -> PhaseAResult:
    """A-1 anchors/utopias for all realizations, A-2 master front from
    non-dominated utopias, A-3 pruning of subproblems whose utopia the
    master front weakly dominates."""
    reals = enumerate_realizations(spec)
    mark = solve_count()
    recs = parallel_map(compute_anchors_utopia, [(spec, r, config) for r in reals], workers=workers)
    records = {rec.realization.k: rec for rec in recs}
    nlp_a1 = solve_count() - mark

    infeasible = sorted(k for k, rec in records.items() if rec.status is Status.INFEASIBLE)
    if len(infeasible) == len(records):
        raise PipelineError("every subproblem is infeasible")

    k1m = master_candidates(list(records.values()), eps)
    for k in k1m:
        records[k].status = Status.MASTER

    mark = solve_count()
    master_front = build_master_front(spec, k1m, beta, config, eps, workers, records)
    nlp_a2 = solve_count() - mark

    mpts = np.array([[s.point.j1, s.point.j2] for s in master_front])
    pruned_a: list[int] = []
    k1u: list[int] = list(k1m)
    for k, rec in records.items():
        if rec.status is not Status.UNPROCESSED:
            continue
        if _weakly_dominated_by(mpts, rec.utopia, eps):
            rec.status = Status.PRUNED_A
            pruned_a.append(k)
        else:
            k1u.append(k)
    return PhaseAResult(
        records=records,
        k1m=sorted(k1m),
        k1u=sorted(k1u),
        pruned_a=sorted(pruned_a),
        infeasible=infeasible,
        master_front=master_front,
        nlp_a1=nlp_a1,
        nlp_a2=nlp_a2,
    )


def phase_b(
    spec: ProblemSpec,
    records: dict[int, SubproblemRecord],
    k1u: list[int],
    master_front: list[ParetoSolution],
    beta: int,
    config: SolverConfig,
    *,
    eps: float = 0.0,
    workers: int = 1,
    nlp_a1: int = 0,
    nlp_a2: int = 0,
    infeasible: list[int] | None = None,
) -> PruneReport:
    """B-1 centers for surviving non-master subproblems, B-2 pruning of
    those whose center the master front weakly dominates, B-3 fronts for
    the rest and final assembly."""
    infeasible = list(infeasible or [])
    k1m = sorted(k for k in k1u if records[k].status is Status.MASTER)
    targets = [k for k in k1u if records[k].status is not Status.MASTER]
    mpts = np.array([[s.point.j1, s.point.j2] for s in master_front])

    mark = solve_count()
    centers = parallel_map(
        _center_or_none, [(spec, records[k].realization, config) for k in targets], workers=workers
    )
    nlp_b1 = solve_count() - mark

    pruned_b: list[int] = []
    retained: list[int] = []
    for k, center in zip(targets, centers):
        if center is None:
            records[k].status = Status.PRUNED_B
            pruned_b.append(k)
            continue
        records[k].center = center
        if _weakly_dominated_by(mpts, center.point, eps):
            records[k].status = Status.PRUNED_B
            pruned_b.append(k)
        else:
            retained.append(k)

    mark = solve_count()
    fronts = parallel_map(
        build_subproblem_front,
        [(spec, records[k].realization, beta, config, eps) for k in retained],
        workers=workers,
    )
    nlp_b3 = solve_count() - mark
    for k, front in zip(retained, fronts):
        records[k].front = front
        records[k].status = Status.RETAINED_B

    k1c = sorted(k1m + retained)
    final = _assemble_front(records, k1c, eps)
    return PruneReport(
        problem=spec.name,
        beta=beta,
        phases="ab",
        eps=eps,
        seed=config.seed,
        k_total=len(records),
        k1m=tuple(k1m),
        k1u=tuple(sorted(k1u)),
        k1c=tuple(k1c),
        pruned_a=tuple(sorted(k for k, r in records.items() if r.status is Status.PRUNED_A)),
        pruned_b=tuple(sorted(pruned_b)),
        infeasible=tuple(infeasible),
        nlp=NlpCounts(a1=nlp_a1, a2=nlp_a2, b1=nlp_b1, b3=nlp_b3),
        front=tuple(final),
    )


def _center_or_none(spec: ProblemSpec, r: Realization, config: SolverConfig):
    try:
        return compute_center(spec, r, config)
    except InfeasibleError:
        return None


def _assemble_front(
    records: dict[int, SubproblemRecord], ks: list[int], eps: float
) -> list[ParetoSolution]:
    merged: list[ParetoSolution] = []
    for k in ks:
        front = records[k].front
        if front:
            merged.extend(front)
    final = nondominated_filter(merged, eps)
    final.sort(key=lambda s: s.point.j1)
    return final


def run_pipeline(
    spec: ProblemSpec,
    beta: int = 21,
    phases: str = "ab",
    config: SolverConfig | None = None,
    eps: float = 0.0,
    workers: int | None = None,
) -> PruneReport:
    """Run the pruning pipeline end to end.

    phases "ab" runs utopia pruning then center-point pruning; "a" skips
    the center tests and builds fronts for everything Phase A retained
    (which preserves the true front exactly).  The solve counter is reset
    on entry.
    """
    if phases not in ("a", "ab"):
        raise ValueError(f'phases must be "a" or "ab", got {phases!r}')
    if beta < 2:
        raise ValueError(f"beta must be >= 2, got {beta}")
    config = config or SolverConfig()
    nworkers = resolve_workers(workers)
    t0 = time.perf_counter()
    reset_solve_count()

    pa = phase_a(spec, beta, config, eps, nworkers)
    if phases == "ab":
        report = phase_b(
            spec,
            pa.records,
            pa.k1u,
            pa.master_front,
            beta,
            config,
            eps=eps,
            workers=nworkers,
            nlp_a1=pa.nlp_a1,
            nlp_a2=pa.nlp_a2,
            infeasible=pa.infeasible,
        )
    else:
        rest = [k for k in pa.k1u if pa.records[k].status is not Status.MASTER]
        mark = solve_count()
        fronts = parallel_map(
            build_subproblem_front,
            [(spec, pa.records[k].realization, beta, config, eps) for k in rest],
            workers=nworkers,
        )
        nlp_b3 = solve_count() - mark
        for k, front in zip(rest, fronts):
            pa.records[k].front = front
            pa.records[k].status = Status.RETAINED_B
        final = _assemble_front(pa.records, pa.k1u, eps)
        report = PruneReport(
            problem=spec.name,
            beta=beta,
            phases="a",
            eps=eps,
            seed=config.seed,
            k_total=len(pa.records),
            k1m=tuple(pa.k1m),
            k1u=tuple(pa.k1u),
            k1c=tuple(pa.k1u),
            pruned_a=tuple(pa.pruned_a),
            pruned_b=(),
            infeasible=tuple(pa.infeasible),
            nlp=NlpCounts(a1=pa.nlp_a1, a2=pa.nlp_a2, b1=0, b3=nlp_b3),
            front=tuple(final),
        )
    wall = int(round((time.perf_counter() - t0) * 1000))
    return dataclasses.replace(report, wallclock_ms=wall)
