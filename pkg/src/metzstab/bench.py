"""Benchmark harness reproducing the iteration-count experiment shapes.

Runs the greedy family optimizers and the l-inf stabilizers on random
instances over a grid of (dimension, menu size) cells, reporting mean/max
iteration counts and wall time. Timings are reported, never asserted.
Trials are seeded independently via SeedSequence spawning, so results are
deterministic for a given master seed and independent of worker count.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import core, family, gen, infnorm

OPS = ("family-max", "family-min", "stab-inf", "stab-schur")


def _run_trial(op: str, dim: int, count: int, kind: str, density, seed_seq) -> tuple[int, float]:
    rng = np.random.default_rng(seed_seq)
    start = time.perf_counter()
    if op == "family-max":
        fam = gen.generate_family(dim, count, kind=kind, density=density, rng=rng)
        out = family.optimize_with_irreducibility_patch(fam, "max")
        iters = out.iterations
    elif op == "family-min":
        fam = gen.generate_family(dim, count, kind=kind, density=density, rng=rng)
        out = family.selective_greedy(fam, "min")
        iters = out.iterations
    elif op == "stab-inf":
        a = gen.generate_metzler(dim, unstable=True, rng=rng)
        iters = infnorm.closest_stable_inf_hurwitz(a).iterations
    elif op == "stab-schur":
        a = np.abs(gen.generate_metzler(dim, rng=rng))
        rho = core.spectral_radius(a)
        if rho <= 1.0:
            a = a * ((1.0 + rng.uniform(0.5, 1.5)) / max(rho, 1e-6))
        iters = infnorm.closest_stable_inf_schur(a).iterations
    else:
        raise ValueError(f"op must be one of {OPS}, got {op!r}")
    return iters, time.perf_counter() - start


def run_bench(*, ops=("family-max",), dims=(25,), counts=(50,), kind: str = "full",
              density=None, trials: int = 10, seed: int = 0,
              workers: int = 1) -> list[dict]:
    """Run the benchmark grid; one result row per (op, dim, count) cell."""
    rows = []
    cell = 0
    for op in ops:
        for dim in dims:
            for count in counts:
                seqs = np.random.SeedSequence((seed, cell)).spawn(trials)
                cell += 1
                if workers > 1:
                    with ThreadPoolExecutor(max_workers=workers) as pool:
                        results = list(pool.map(
                            lambda s: _run_trial(op, dim, count, kind, density, s), seqs))
                else:
                    results = [_run_trial(op, dim, count, kind, density, s) for s in seqs]
                iters = np.array([r[0] for r in results], dtype=float)
                secs = np.array([r[1] for r in results])
                rows.append({
                    "op": op, "dim": dim, "count": count, "kind": kind,
                    "density_lo": density[0] if density else "",
                    "density_hi": density[1] if density else "",
                    "trials": trials,
                    "iterations_mean": float(iters.mean()),
                    "iterations_max": int(iters.max()),
                    "seconds_mean": float(secs.mean()),
                })
    return rows


def write_csv(rows: list[dict], stream) -> None:
    if not rows:
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(no results)\n"
    headers = ["op", "dim", "count", "kind", "trials", "iterations_mean",
               "iterations_max", "seconds_mean"]
    table = [headers] + [
        [f"{row[h]:.3g}" if isinstance(row[h], float) else str(row[h])
         for h in headers]
        for row in rows]
    widths = [max(len(line[k]) for line in table) for k in range(len(headers))]
    out = io.StringIO()
    for line in table:
        out.write("  ".join(cell.rjust(w) for cell, w in zip(line, widths)) + "\n")
    return out.getvalue()
