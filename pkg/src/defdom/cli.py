"""Command-line interface: gen / solve / verify / bench."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .graph import GenSpec, Graph, generate, read_edge_list, write_edge_list
from .master import SolveConfig, SolveReport, solve
from .verify import DefenderSet, find_hall_violator
from .separation import DEFAULT_BUDGET, DEFAULT_CAPACITY, cut_from_violator, violation

CSV_COLUMNS = [
    "family", "n", "p", "k", "mode", "opt", "avg_time_s", "avg_gap_pct",
    "avg_cuts", "avg_nodes", "lb0", "ub0", "avg_obj",
]

_MODE_FLAG = {"bbc": "bbc_single", "bbmc": "bbmc", "iterative": "iterative"}


# ---------------------------------------------------------------------------
# shared flag plumbing

def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="attack size")
    p.add_argument("--mode", choices=sorted(_MODE_FLAG), help="solve mode")
    p.add_argument("--initial-cuts", action="store_true", default=None,
                   help="seed the master with independent-set cuts")
    p.add_argument("--warm-start", action="store_true", default=None,
                   help="install a clique-cover incumbent")
    p.add_argument("--cover", choices=["dsatur", "peo", "auto"],
                   help="clique-cover method for the warm start")
    p.add_argument("--budget", type=int, help="separation DFS budget")
    p.add_argument("--buffer", type=int, help="cut-buffer capacity")
    p.add_argument("--time-limit", type=float, help="wall-clock limit in seconds")
    p.add_argument("--seed", type=int, help="solver seed")


def _config_from_args(args, base: Optional[SolveConfig] = None) -> SolveConfig:
    kw = {}
    if args.k is not None:
        kw["k"] = args.k
    if args.mode is not None:
        kw["mode"] = _MODE_FLAG[args.mode]
    if args.initial_cuts is not None:
        kw["use_initial_cuts"] = args.initial_cuts
    if args.warm_start is not None:
        kw["use_warm_start"] = args.warm_start
    if args.cover is not None:
        kw["cover_method"] = args.cover
    if args.budget is not None:
        kw["budget"] = args.budget
    if args.buffer is not None:
        kw["capacity"] = args.buffer
    if args.time_limit is not None:
        kw["time_limit"] = args.time_limit
    if args.seed is not None:
        kw["seed"] = args.seed
    if base is not None:
        return replace(base, **kw)
    if "k" not in kw:
        raise SystemExit("error: --k is required")
    return SolveConfig(**kw)


def _load_graph(path: str) -> Graph:
    return read_edge_list(Path(path).read_text())


# ---------------------------------------------------------------------------
# gen

def cmd_gen(args) -> int:
    spec = GenSpec(family=args.family, n=args.n, density=args.p, seed=args.seed)
    g = generate(spec)
    out = Path(args.out)
    out.write_text(write_edge_list(g))
    sidecar = dict(g.meta)
    out.with_suffix(out.suffix + ".meta").write_text(json.dumps(sidecar) + "\n")
    print(f"wrote {out} (n={g.n}, m={g.edge_count}, "
          f"density={g.meta['achieved_density']:.3f})")
    return 0


# ---------------------------------------------------------------------------
# solve

def _print_report(r: SolveReport) -> None:
    print(f"status           {r.status}")
    print(f"best_value       {'-' if r.best_value is None else r.best_value}")
    print(f"lower_bound      {r.lower_bound}")
    print(f"gap_percent      {r.gap_percent:.2f}")
    print(f"wall_time_s      {r.wall_time:.1f}")
    print(f"cuts_added       {r.cuts_added}")
    print(f"nodes_explored   {r.nodes_explored}")
    print(f"lb0              {'-' if r.lb0 is None else r.lb0}")
    print(f"ub0              {'-' if r.ub0 is None else r.ub0}")
    if r.defenders is not None:
        print("defenders        " + " ".join(map(str, r.defenders.members.vertices())))


def cmd_solve(args) -> int:
    g = _load_graph(args.instance)
    cfg = _config_from_args(args)
    report = solve(g, cfg)
    _print_report(report)
    if report.status == "optimal":
        return 0
    if report.status == "feasible":
        return 2
    return 3


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    g = _load_graph(args.instance)
    members = [int(t) for t in args.defenders.split(",") if t.strip() != ""]
    for v in members:
        if not (0 <= v < g.n):
            raise SystemExit(f"error: defender {v} out of range for n={g.n}")
    d = DefenderSet.of(members)
    s = find_hall_violator(g, d, args.k)
    if s is None:
        print("feasible")
        return 0
    cut = cut_from_violator(g, s)
    assert violation(cut, d) > 0, "certificate failed its own re-check"
    print("violator: " + " ".join(map(str, s.vertices())))
    return 1


# ---------------------------------------------------------------------------
# bench

@dataclass(frozen=True)
class BenchPlan:
    grid: tuple[tuple[str, int, float, int], ...]  # (family, n, density, k)
    replications: int
    cfg: SolveConfig
    load_dir: Optional[str] = None


def replication_seed(family: str, n: int, density: float, k: int, rep: int) -> int:
    """Stable 64-bit seed derived from the benchmark-cell identity."""
    key = f"{family}:{n}:{density:g}:{k}:{rep}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def parse_plan(text: str, cfg: SolveConfig) -> BenchPlan:
    """Plan files are key=value lines; '#' starts a comment.

    Keys: families, n, density, k (comma-separated lists), reps, and any
    solver setting (mode, initial_cuts, warm_start, cover, budget, buffer,
    time_limit, seed).
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad plan line {lineno}: expected key=value")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()

    def split(key: str, cast, default=None):
        if key not in values:
            if default is None:
                raise ValueError(f"plan is missing required key {key!r}")
            return default
        return [cast(t.strip()) for t in values[key].split(",")]

    families = split("families", str)
    ns = split("n", int)
    densities = split("density", float)
    ks = split("k", int)
    reps = int(values.get("reps", "5"))
    kw = {}
    if "mode" in values:
        kw["mode"] = _MODE_FLAG.get(values["mode"], values["mode"])
    for key, attr, cast in [
        ("initial_cuts", "use_initial_cuts", lambda s: s.lower() in ("1", "true", "yes")),
        ("warm_start", "use_warm_start", lambda s: s.lower() in ("1", "true", "yes")),
        ("cover", "cover_method", str),
        ("budget", "budget", int),
        ("buffer", "capacity", int),
        ("time_limit", "time_limit", float),
        ("seed", "seed", int),
    ]:
        if key in values:
            kw[attr] = cast(values[key])
    cfg = replace(cfg, k=ks[0], **kw)
    grid = tuple(
        (fam, n, p, k)
        for fam in families for n in ns for p in densities for k in ks
    )
    return BenchPlan(grid=grid, replications=reps, cfg=cfg)


def _bench_instance(task) -> tuple[tuple, Optional[SolveReport], Optional[str]]:
    """Worker: build one replication instance and solve it."""
    (family, n, density, k, rep), cfg, load_dir = task
    try:
        if load_dir is not None:
            path = Path(load_dir) / f"{family}_n{n}_p{density:g}_r{rep}.txt"
            g = read_edge_list(path.read_text())
        else:
            seed = replication_seed(family, n, density, k, rep)
            g = generate(GenSpec(family=family, n=n, density=density, seed=seed))
        report = solve(g, replace(cfg, k=k))
        return (family, n, density, k), report, None
    except Exception as exc:  # per-instance failure: row records it, run continues
        return (family, n, density, k), None, f"{type(exc).__name__}: {exc}"


def _aggregate(cell, mode: str, reports: list[Optional[SolveReport]]) -> dict:
    family, n, density, k = cell
    done = [r for r in reports if r is not None]
    solved = [r for r in done if r.status == "optimal"]
    gaps = [r.gap_percent for r in done if r.gap_percent > 0]
    with_obj = [r for r in done if r.best_value is not None]
    lb0s = [r.lb0 for r in done if r.lb0 is not None]
    ub0s = [r.ub0 for r in done if r.ub0 is not None]

    def avg(xs, fmt="{:.1f}"):
        return fmt.format(sum(xs) / len(xs)) if xs else ""

    return {
        "family": family,
        "n": n,
        "p": f"{density:g}",
        "k": k,
        "mode": mode,
        "opt": f"{len(solved)}/{len(reports)}",
        "avg_time_s": avg([r.wall_time for r in solved]),
        "avg_gap_pct": avg(gaps) if gaps else "0.0",
        "avg_cuts": avg([r.cuts_added for r in done]),
        "avg_nodes": avg([r.nodes_explored for r in done]),
        "lb0": avg(lb0s),
        "ub0": avg(ub0s),
        "avg_obj": avg([r.best_value for r in with_obj]),
    }


def run_bench(plan: BenchPlan, out_path: str, jobs: int = 1) -> int:
    tasks = [
        ((family, n, density, k, rep), plan.cfg, plan.load_dir)
        for (family, n, density, k) in plan.grid
        for rep in range(plan.replications)
    ]
    results: dict[tuple, list] = {cell: [] for cell in plan.grid}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_bench_instance, tasks))
    else:
        outcomes = [_bench_instance(t) for t in tasks]
    for cell, report, err in outcomes:
        if err is not None:
            print(f"warning: {cell} failed: {err}", file=sys.stderr)
        results[cell].append(report)
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        fh.flush()
        for cell in plan.grid:
            writer.writerow(_aggregate(cell, plan.cfg.mode, results[cell]))
            fh.flush()
    print(f"wrote {out_path} ({len(plan.grid)} rows)")
    return 0


def cmd_bench(args) -> int:
    base = SolveConfig(k=1)
    plan = parse_plan(Path(args.plan).read_text(), base)
    cfg = _config_from_args(args, base=plan.cfg)
    plan = BenchPlan(grid=plan.grid, replications=plan.replications,
                     cfg=cfg, load_dir=args.load_dir)
    return run_bench(plan, args.out, jobs=args.jobs)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="defdom",
        description="Exact solver and benchmark toolkit for k-defensive domination.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("family", choices=["erdos_renyi", "barabasi_albert", "chordal"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True, help="target edge density")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance", help="edge-list file")
    _add_solve_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a defender set")
    v.add_argument("instance")
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--defenders", required=True,
                   help="comma-separated vertex ids, e.g. 0,2,5")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a benchmark plan to CSV")
    b.add_argument("plan", help="key=value plan file")
    _add_solve_flags(b)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--load-dir", default=None,
                   help="load pre-generated instances instead of generating")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
