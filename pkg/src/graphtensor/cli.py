"""Command-line entry point: ``graphtensor <command> ...``.

Every command emits a DerivationReport as text or JSON.  Exit status is 0
on success, 1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from . import circuits, exponents, graphs, laser, reductions, suites, tensors
from .treewidth import dumps_pace, exact_treewidth, ltw

SCHEMA = "graphtensor.report/1"
CONFIG_ENV = "GRAPHTENSOR_CONFIG"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    omega_table: str | None = None
    nonzero_limit: int = tensors.DEFAULT_NONZERO_LIMIT
    treewidth_vertex_limit: int = 24
    sweep_grid: int = 1000
    ipf_tol: float = laser.IPF_TOL
    output_dir: str | None = None
    format: str = "text"
    threads: int = 1

    def __post_init__(self) -> None:
        for name in ("nonzero_limit", "treewidth_vertex_limit", "sweep_grid", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"config: {name} must be positive")
        if self.ipf_tol <= 0:
            raise ValueError("config: ipf_tol must be positive")
        if self.format not in ("text", "json"):
            raise ValueError("config: format must be 'text' or 'json'")

    @classmethod
    def load(cls, path: str | Path | None) -> RunConfig:
        """Defaults, overridden by the JSON object at ``path`` when given."""
        if path is None:
            return cls()
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"config: unknown keys {sorted(unknown)}")
        return cls(**data)

    def table(self) -> exponents.OmegaTable:
        if self.omega_table:
            return exponents.OmegaTable.load(self.omega_table)
        return exponents.OmegaTable.default()


@dataclass
class DerivationReport:
    command: str
    inputs: dict
    result: dict
    passed: bool = True
    omega_table: dict = field(default_factory=dict)
    seconds: float = 0.0
    text: str = ""
    schema: str = SCHEMA

    def payload(self) -> dict:
        """Everything except timing: identical for identical inputs."""
        out = asdict(self)
        del out["seconds"], out["text"]
        return out

    def to_json(self) -> str:
        return json.dumps(self.payload() | {"seconds": round(self.seconds, 4)},
                          indent=2, default=_jsonable)

    @classmethod
    def from_json(cls, text: str) -> DerivationReport:
        return cls(**json.loads(text))


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


# -- input helpers ------------------------------------------------------------------------------


def _read_graph(args) -> graphs.FractionalGraph:
    if getattr(args, "graph", None):
        return graphs.loads_graph(Path(args.graph).read_text())
    if getattr(args, "family", None):
        name, *params = args.family
        return graphs.named_graph(name, *map(int, params))
    raise ValueError("give --graph FILE or --family NAME PARAMS")


def _graph_inputs(args) -> dict:
    return {"graph": args.graph} if getattr(args, "graph", None) else {"family": args.family}


def _read_rows(path: str) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in line.split()]
            for line in Path(path).read_text().splitlines() if line.strip() and not line.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no rows")
    return rows


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _graph_summary(g: graphs.FractionalGraph) -> dict:
    return {"vertices": len(g.vertices), "edges": g.num_edges, "text": graphs.dumps_graph(g)}


# -- commands -----------------------------------------------------------------------------------


def cmd_graph(args, cfg: RunConfig) -> DerivationReport:
    g = _read_graph(args)
    _write(args.output, graphs.dumps_graph(g))
    result = _graph_summary(g)
    if args.matchings:
        parts = graphs.edge_partition_into_matchings(g)
        result["matchings"] = [graphs.dumps_graph(p) for p in parts]
    text = "" if args.output else result["text"]
    if args.matchings:
        text += f"matchings: {len(result['matchings'])}\n"
    return DerivationReport("graph", _graph_inputs(args), result, text=text)


def cmd_tensor(args, cfg: RunConfig) -> DerivationReport:
    if args.action == "build":
        g = _read_graph(args)
        t = tensors.graph_tensor(g, args.n, limit=cfg.nonzero_limit)
        text = tensors.dumps(t)
        _write(args.output, text)
        inputs = _graph_inputs(args) | {"n": args.n}
    else:
        t = tensors.loads(Path(args.file).read_text())
        text = ""
        inputs = {"file": args.file}
    result = {"dims": list(t.dims), "nonzeros": t.nnz, "concise": tensors.is_concise(t)}
    if args.rows is not None:
        result["flattening_rank"] = tensors.flattening_rank(t, args.rows)
    summary = " ".join(f"{k}={v}" for k, v in result.items())
    shown = "" if args.output else text
    return DerivationReport("tensor " + args.action, inputs, result, text=shown + summary + "\n")


def cmd_circuit(args, cfg: RunConfig) -> DerivationReport:
    if args.action == "build":
        g = _read_graph(args)
        gc = circuits.treedec_circuit(g, args.n)
        text = circuits.dumps(gc.circuit)
        _write(args.output, text)
        result = {"wires": gc.circuit.size, "mul_wires": gc.circuit.mul_wires, "ltw": gc.width,
                  "bound_unit": gc.bound, "within_bound": gc.passed}
        return DerivationReport("circuit build", _graph_inputs(args) | {"n": args.n}, result,
                                passed=gc.passed,
                                text=("" if args.output else text) + _kv(result))
    c = circuits.loads(Path(args.file).read_text())
    if args.action == "eval":
        x = _read_rows(args.inputs)
        values = circuits.evaluate_circuit(c, x)
        result = {"outputs": [str(v) for v in values]}
        return DerivationReport("circuit eval", {"file": args.file, "inputs": args.inputs}, result,
                                text="\n".join(result["outputs"]) + "\n")
    # check: compare against brute-force evaluation of the graph tensor on random inputs
    g = _read_graph(args)
    rng = random.Random(args.seed)
    bad = 0
    for _ in range(args.batches):
        x = [[Fraction(rng.randint(-5, 5)) for _ in range(d)] for d in c.input_dims]
        bad += circuits.evaluate_scalar(c, x) != tensors.evaluate_graph_tensor(g, args.n, x)
    result = {"batches": args.batches, "mismatches": bad, "wires": c.size}
    return DerivationReport("circuit check", {"file": args.file, "n": args.n} | _graph_inputs(args),
                            result, passed=bad == 0, text=_kv(result))


def cmd_tw(args, cfg: RunConfig) -> DerivationReport:
    g = _read_graph(args)
    if args.line:
        res = ltw(g, cfg.treewidth_vertex_limit)
        result = {"lower": res.lower, "upper": res.upper, "exact": res.exact,
                  "decomposition": dumps_pace(res.decomposition, res.line.vertices)}
    else:
        w, td = exact_treewidth(g, cfg.treewidth_vertex_limit)
        result = {"lower": w, "upper": w, "exact": True,
                  "decomposition": dumps_pace(td, g.vertices)}
    head = f"{'line-' if args.line else ''}treewidth in [{result['lower']}, {result['upper']}]\n"
    return DerivationReport("tw", _graph_inputs(args) | {"line": args.line}, result,
                            text=head + result["decomposition"])


def _bound_report(command: str, inputs: dict, bound: exponents.ExponentBound,
                  extra: dict | None = None) -> DerivationReport:
    result = bound.to_dict() | {"rounded": bound.rounded(), "verified": bound.verify()} | (extra or {})
    text = f"{exponents.round_up(bound.value, 6)} (exact {bound.value})\n" + bound.derivation.render()
    return DerivationReport(command, inputs, result, passed=result["verified"], text=text + "\n")


def cmd_bound(args, cfg: RunConfig) -> DerivationReport:
    b = exponents.star_sum_bound(args.d, args.method, cfg.table())
    return _bound_report("bound", {"d": args.d, "method": args.method}, b)


def cmd_decompose(args, cfg: RunConfig) -> DerivationReport:
    g = _read_graph(args)
    res = exponents.decompose_optimize(g, cfg.table(), copies=args.copies)
    return _bound_report("decompose", _graph_inputs(args) | {"copies": args.copies}, res.bound,
                         {"total": str(res.total), "search": res.report.to_dict()})


def cmd_table(args, cfg: RunConfig) -> DerivationReport:
    t = exponents.table1(cfg.table())
    return DerivationReport("table", {}, t.to_dict(), text=t.render() + "\n")


def cmd_reduce(args, cfg: RunConfig) -> DerivationReport:
    if args.kind == "permanent":
        rows = _read_rows(args.matrix)
        if any(v.denominator != 1 for r in rows for v in r):
            raise ValueError("matrix entries must be integers")
        a = [[int(v) for v in r] for r in rows]
        pc, value = reductions.permanent_reduction(a)
        ryser = reductions.ryser(a)
        result = {"permanent": value, "ryser": ryser, "wires": pc.circuit.circuit.size,
                  "ltw": pc.circuit.width}
        return DerivationReport("reduce permanent", {"matrix": a}, result, passed=value == ryser,
                                text=_kv(result))
    rep = reductions.hyperclique_projection_check(args.N)
    result = rep.to_dict()
    return DerivationReport("reduce hyperclique", {"N": args.N}, result, passed=rep.equal,
                            text=_kv(result))


def cmd_laser(args, cfg: RunConfig) -> DerivationReport:
    inputs = {"q": args.q, "gamma": args.gamma, "optimize": args.optimize, "sweep": args.sweep}
    result: dict = {}
    passed = True
    lines = []
    if args.gamma is not None or not (args.optimize or args.sweep):
        q = args.q[0] if args.q else 7
        g = args.gamma or 0.0
        result["bound"] = {"q": q, "gamma": g, "value": laser.tau_k4_bound(q, g),
                           "mu": laser.mu(g)}
        lines.append(f"tau(K4) <= {result['bound']['value']:.10f} at q={q}, gamma={g}")
    if args.optimize:
        opt = laser.optimize_tau_k4(args.q or range(2, 17))
        result["optimum"] = opt.to_dict()
        lines.append(f"optimum tau(K4) <= {opt.bound:.10f} at q={opt.q}, gamma={opt.gamma:.10f}")
    if args.sweep:
        rep = laser.verify_lemmas_sweep(args.sweep)
        result["sweep"] = rep.to_dict()
        passed = rep.passed
        lines.append(f"sweep over {args.sweep} points: {'pass' if rep.passed else 'FAIL'} "
                     f"(min D = {rep.min_d:.3e}, max D'' error = {rep.max_dd_error:.2e})")
    return DerivationReport("laser tau-k4", inputs, result, passed=passed,
                            text="\n".join(lines) + "\n")


def cmd_verify(args, cfg: RunConfig) -> DerivationReport:
    results = suites.SUITES[args.suite]()
    passed = all(r.passed for r in results)
    text = "\n".join(r.line() for r in results)
    text += f"\n{sum(r.passed for r in results)}/{len(results)} passed\n"
    return DerivationReport("verify", {"suite": args.suite},
                            {"checks": [r.to_dict() for r in results]}, passed=passed, text=text)


def _kv(d: dict) -> str:
    return "".join(f"{k}: {v}\n" for k, v in d.items())


# -- parser -----------------------------------------------------------------------------------


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="graph file ('d', 'e' lines)")
    src.add_argument("--family", nargs="+", metavar="ARG",
                     help=f"named family and parameters: {', '.join(graphs.FAMILIES)}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphtensor", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("text", "json"), help="output format")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.add_argument("--threads", type=int, help="worker cap; commands currently run serially")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("graph", help="generate or normalize a graph file")
    _add_graph_source(s)
    s.add_argument("-o", "--output")
    s.add_argument("--matchings", action="store_true", help="also split into matchings")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("tensor", help="build or inspect a graph tensor")
    s.add_argument("action", choices=("build", "info"))
    _add_graph_source(s)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--file", help="tensor dump for 'info'")
    s.add_argument("--rows", type=int, nargs="+", help="row modes for a flattening rank")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("circuit", help="build, evaluate or check a treewidth circuit")
    s.add_argument("action", choices=("build", "eval", "check"))
    _add_graph_source(s)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--file", help="circuit dump for 'eval' and 'check'")
    s.add_argument("--inputs", help="one line of rationals per input mode")
    s.add_argument("--batches", type=int, default=20)
    s.add_argument("--seed", type=int, default=suites.SEED)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_circuit)

    s = sub.add_parser("tw", help="treewidth or line-treewidth with a decomposition")
    _add_graph_source(s)
    s.add_argument("--line", action="store_true")
    s.set_defaults(func=cmd_tw)

    s = sub.add_parser("bound", help="exponent bound for generic d-mode tensors")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--method", choices=("rank", "treewidth", "mixed"), default="rank")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("decompose", help="search conic decompositions of a graph")
    _add_graph_source(s)
    s.add_argument("--copies", type=int, default=1, help="divide the total by this")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("table", help="reproduce the exponent table")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("reduce", help="permanent or hyperclique reductions")
    s.add_argument("kind", choices=("permanent", "hyperclique"))
    s.add_argument("--matrix", help="whitespace-separated integer rows")
    s.add_argument("--N", type=int, default=1)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("laser", help="the tau(K4) bound")
    s.add_argument("target", nargs="?", choices=("tau-k4",), default="tau-k4")
    s.add_argument("--q", type=int, nargs="+")
    s.add_argument("--gamma", type=float)
    s.add_argument("--optimize", action="store_true")
    s.add_argument("--sweep", type=int, metavar="N")
    s.set_defaults(func=cmd_laser)

    s = sub.add_parser("verify", help="run a verification suite")
    s.add_argument("suite", choices=sorted(suites.SUITES))
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config or os.environ.get(CONFIG_ENV))
        if args.format:
            cfg.format = args.format
        if args.threads is not None:
            cfg = RunConfig(**(asdict(cfg) | {"threads": args.threads}))
        if args.command == "reduce" and args.kind == "permanent" and not args.matrix:
            raise ValueError("reduce permanent needs --matrix FILE")
        start = time.perf_counter()
        report = args.func(args, cfg)
        report.seconds = time.perf_counter() - start
        report.omega_table = cfg.table().as_dict()
    except (ValueError, OSError, KeyError) as exc:
        print(f"graphtensor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = report.to_json() + "\n" if cfg.format == "json" else report.text
    sys.stdout.write(out)
    if cfg.output_dir:
        path = Path(cfg.output_dir) / f"{report.command.replace(' ', '_')}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
