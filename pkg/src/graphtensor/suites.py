"""The end-to-end verification suite: one function per acceptance check.

Each check returns a CheckResult with the numbers it compared, so the CLI
and the test suite report the same evidence.
"""

from __future__ import annotations

import math
import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from . import circuits, exponents, laser, reductions, tensors
from .graphs import (FractionalGraph, clique, cycle, edge_partition_into_matchings, grid,
                     hyperclique_incidence, is_matching, line_graph, matching, multiple, cat)
from .treewidth import exact_treewidth, ltw_clique_closed_form

SEED = 20240601


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "details": self.details}


def _timed(key: str, title: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    start = time.perf_counter()
    passed, details = fn()
    return CheckResult(key, title, bool(passed), details, time.perf_counter() - start)


def random_graph(rng: random.Random, max_vertices: int = 5, max_edges: int = 6) -> FractionalGraph:
    """Random multigraph on 1..v with at most ``max_edges`` unit edges and no loops."""
    v = rng.randint(2, max_vertices)
    m = rng.randint(1, max_edges)
    edges = []
    for _ in range(m):
        a, b = rng.sample(range(1, v + 1), 2)
        edges.append((a, b))
    return FractionalGraph.build(range(1, v + 1), edges)


def _inputs(rng: random.Random, dims) -> list[list[Fraction]]:
    return [[Fraction(rng.randint(-4, 4), rng.choice((1, 1, 2, 3))) for _ in range(d)]
            for d in dims]


# -- the eleven checks -------------------------------------------------------------------------

TABLE_EXPECTED = {
    "AR upper (star sums)": ["1.59", "2.32", "3.09", "3.87", "6.96"],
    "AC upper (treewidth)": ["2.00", "2.50", "3.20", "3.67", "5.80"],
    "AC upper (decompositions)": ["--", "2.30", "2.88", "--", "--"],
    "AR lower (flattening)": ["1", "2", "2", "3", "5"],
}


def check_table() -> CheckResult:
    def run():
        t = exponents.table1()
        got = {r.label: [r.formatted()[d] for d in exponents.TABLE_DS] for r in t.rows}
        ok = got == TABLE_EXPECTED
        ok &= all(b.verify() for r in t.rows for b in r.cells.values() if b is not None)
        return ok, {"rows": got, "rendered": t.render()}
    return _timed("table", "exponent table reproduction", run)


def check_tau() -> CheckResult:
    def run():
        b0 = laser.tau_k4_bound(7, 0)
        b1 = laser.tau_k4_bound(7, 0.0012105179)
        opt = laser.optimize_tau_k4(range(2, 17))
        ok = abs(b0 - 0.772943) <= 1e-6 and abs(b1 - 0.77231702) <= 5e-6
        ok &= opt.q == 7 and opt.bound < 0.772318
        return ok, {"bound(7, 0)": b0, "bound(7, 0.0012105179)": b1, "q*": opt.q,
                    "gamma*": opt.gamma, "bound*": opt.bound}
    return _timed("tau", "tau(K4) bound and optimizer", run)


def check_decompositions() -> CheckResult:
    def run():
        table = exponents.OmegaTable.default()
        r4 = exponents.decompose_optimize(multiple(clique(4), 2), table, copies=4)
        want4 = Fraction(1, 4) + table.omega_of(Fraction(1, 2))
        r5 = exponents.decompose_optimize(cat(3, 5), table, copies=3)
        want5 = (3 + table.omega1 + table.omega_of(2)) / 3
        ok = r4.bound.value == want4 and r4.bound.value <= Fraction("2.296682")
        ok &= r5.bound.value == want5 and r4.bound.verify() and r5.bound.verify()
        return ok, {"2K4 per copy": str(r4.bound.value), "1/4 + omega(1/2)": str(want4),
                    "cat(3,5) per copy": str(r5.bound.value), "(3+omega+omega(2))/3": str(want5),
                    "search 2K4": r4.report.to_dict(), "search cat(3,5)": r5.report.to_dict()}
    return _timed("decompose", "4- and 5-mode decomposition bounds", run)


def check_line_treewidth() -> CheckResult:
    def run():
        got = {d: exact_treewidth(line_graph(clique(d)))[0] for d in range(3, 8)}
        want = {d: ltw_clique_closed_form(d) for d in range(3, 8)}
        return got == want == {3: 2, 4: 4, 5: 7, 6: 10, 7: 14}, {"ltw": got, "closed form": want}
    return _timed("ltw", "line-treewidth of cliques", run)


def check_graph_sum(fixtures: int = 20) -> CheckResult:
    def run():
        rng = random.Random(SEED)
        results = []
        for _ in range(fixtures):
            g, h = random_graph(rng), random_graph(rng)
            n = rng.choice((2, 3))
            if n == 3 and g.num_edges + h.num_edges > 9:
                n = 2  # keeps T_{G+H,n} under 3^9 entries
            results.append((str(g), str(h), n, tensors.check_product_identity(g, h, n),
                            tensors.check_length_rule(g, n, 2)))
        ok = all(p and l for *_, p, l in results)
        return ok, {"fixtures": len(results),
                    "product identity": sum(r[3] for r in results),
                    "length rule": sum(r[4] for r in results)}
    return _timed("identities", "graph-sum identity and length rule", run)


CIRCUIT_GRAPHS = {"C4": lambda: cycle(4), "K4": lambda: clique(4), "grid3x3": lambda: grid(3, 3)}


def _yates_fixtures():
    t_k3 = tensors.graph_tensor(clique(3), 2)
    t_m2 = tensors.graph_tensor(matching(2), 2)
    unit = tensors.unit_tensor(3, 2)
    unit_dec = circuits.RankDecomposition.of([[[1, 0]] * 3, [[0, 1]] * 3])
    return [("K3,n=2", t_k3, circuits.monomial_decomposition(t_k3), (1, 2)),
            ("M2,n=2", t_m2, circuits.monomial_decomposition(t_m2), (1, 2, 3)),
            ("unit(3,2)", unit, unit_dec, (1, 2, 3, 4))]


def check_circuits(batches: int = 20) -> CheckResult:
    def run():
        rng = random.Random(SEED + 6)
        rows, ok = [], True
        for name, build in CIRCUIT_GRAPHS.items():
            g = build()
            for n in (2, 3):
                gc = circuits.treedec_circuit(g, n)
                good = all(circuits.evaluate_scalar(gc.circuit, x)
                           == tensors.evaluate_graph_tensor(g, n, x)
                           for x in (_inputs(rng, gc.circuit.input_dims) for _ in range(batches)))
                bound_ok = gc.passed and gc.circuit.recount() == gc.circuit.size
                ok &= good and bound_ok
                rows.append({"graph": name, "n": n, "ltw": gc.width, "wires": gc.circuit.size,
                             "mul wires": gc.circuit.mul_wires, "|V| n^(ltw+1)": gc.bound,
                             "matches": good, "within bound": bound_ok})
        for name, t, dec, ks in _yates_fixtures():
            for k in ks:
                yc = circuits.yates_circuit(dec, k, t)
                tk = tensors.kronecker_power(t, k)
                good = all(circuits.evaluate_scalar(yc.circuit, x) == tensors.evaluate(tk, x)
                           for x in (_inputs(rng, yc.circuit.input_dims) for _ in range(batches)))
                limit = circuits.YATES_CONSTANT * yc.bound_unit
                bound_ok = yc.circuit.size <= limit and yc.circuit.presimplified_size <= limit
                ok &= good and bound_ok
                rows.append({"tensor": name, "k": k, "r": yc.rank, "wires": yc.circuit.size,
                             "before folding": yc.circuit.presimplified_size,
                             "c d k r^(k+1)": limit, "matches": good, "within bound": bound_ok})
        return ok, {"treedec constant": circuits.TREEDEC_CONSTANT,
                    "yates constant": circuits.YATES_CONSTANT, "rows": rows}
    return _timed("circuits", "decomposition and Yates circuits", run)


def check_permanent(per_n: int = 30) -> CheckResult:
    def run():
        rng = random.Random(SEED + 7)
        counts, ok = {}, True
        for n in range(1, 5):
            pc = reductions.permanent_circuit(n)
            good = 0
            for _ in range(per_n):
                a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
                good += pc.evaluate(a) == reductions.ryser(a)
            counts[n] = good
            ok &= good == per_n
        a = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
        brute = reductions.permanent_bruteforce_check(a)
        ok &= brute.passed
        return ok, {"matches per n": counts, "brute force": brute.to_dict()}
    return _timed("permanent", "permanent from grid signatures", run)


def check_hyperclique() -> CheckResult:
    def run():
        reports = [reductions.hyperclique_projection_check(n) for n in (1, 2)]
        parts = edge_partition_into_matchings(hyperclique_incidence(3, 4))
        perfect = [is_matching(p) and p.num_edges == 4 for p in parts]
        ok = all(r.equal for r in reports) and len(parts) == 3 and all(perfect)
        return ok, {"projection": [r.to_dict() for r in reports], "matchings": len(parts),
                    "perfect": perfect}
    return _timed("hyperclique", "hyperclique projection", run)


def check_cw() -> CheckResult:
    def run():
        reps = [tensors.cw_degeneration_check(q, k) for q in (2, 3) for k in (3, 4)]
        return all(r.passed for r in reps), {
            f"q={r.q},k={r.k}": {"vanishing": r.vanishing_ok, "leading": r.leading_matches}
            for r in reps}
    return _timed("cw", "CW border-rank degeneration", run)


def check_laser() -> CheckResult:
    def run():
        sweep = laser.verify_lemmas_sweep(1000)
        d0, d1 = laser.D_of_gamma(0), laser.D_of_gamma(0.25)
        ok = sweep.passed
        ok &= abs(d0 - math.log2(27 / 25)) <= 1e-9 and abs(d1 - (-1 + 0.75 * math.log2(3))) <= 1e-9
        ipf_err = 0.0
        for i in range(50):
            g = 0.25 * i / 49
            target = dict(zip(laser.ALPHABET, laser.MarginalSpec(g).distribution))
            res = laser.max_entropy_ipf(laser.PHI, [target] * 4)
            ipf_err = max(ipf_err, abs(res.entropy - laser.max_entropy_closed_form(g)))
        ranks = tuple(laser.r_alpha_rank(r) for r in laser.REPRESENTATIVES)
        ok &= ipf_err <= 1e-10 and ranks == (2, 1, 1)
        return ok, {"sweep": sweep.to_dict(), "D(0)": d0, "D(1/4)": d1,
                    "ipf max error": ipf_err, "ranks": ranks}
    return _timed("laser", "fixed-marginal laser sweeps", run)


def check_flattening() -> CheckResult:
    def run():
        rows, ok = [], True
        for k in (1, 2):
            for n in (2, 3):
                t = tensors.graph_tensor(matching(k), n)
                r = tensors.flattening_rank(t, range(0, 2 * k, 2))
                rows.append({"k": k, "n": n, "rank": r})
                ok &= r == n ** k
        concise = {}
        for name, g, n in (("K3", clique(3), 2), ("K4", clique(4), 2), ("C4", cycle(4), 3),
                           ("M2", matching(2), 3), ("grid2x3", grid(2, 3), 2)):
            concise[name] = tensors.is_concise(tensors.graph_tensor(g, n))
        ok &= all(concise.values())
        return ok, {"matching ranks": rows, "concise": concise}
    return _timed("flattening", "flattening ranks and conciseness", run)


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "table": check_table,
    "tau": check_tau,
    "decompose": check_decompositions,
    "ltw": check_line_treewidth,
    "identities": check_graph_sum,
    "circuits": check_circuits,
    "permanent": check_permanent,
    "hyperclique": check_hyperclique,
    "cw": check_cw,
    "laser": check_laser,
    "flattening": check_flattening,
}


def lemma_decomp(fixtures: int = 20) -> CheckResult:
    """Product identity alone on the standard random fixtures."""
    def run():
        rng = random.Random(SEED)
        passed = 0
        for _ in range(fixtures):
            g, h = random_graph(rng), random_graph(rng)
            n = 2 if g.num_edges + h.num_edges > 9 else rng.choice((2, 3))
            passed += tensors.check_product_identity(g, h, n)
        return passed == fixtures, {"passed": passed, "fixtures": fixtures}
    return _timed("lemma-decomp", "graph-sum identity", run)


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "lemma-decomp": lambda: [lemma_decomp()],
    "all": lambda: [fn() for fn in CHECKS.values()],
    **{key: (lambda fn=fn: [fn()]) for key, fn in CHECKS.items()},
}


__all__ = ["CHECKS", "CheckResult", "SUITES", "random_graph", "lemma_decomp",
           *[f.__name__ for f in CHECKS.values()]]
