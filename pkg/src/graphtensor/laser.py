"""Fixed-marginal laser bound for the big 4-mode CW tensor and the resulting tau(K4) bound.

Entropies are in bits with 0 lg 0 = 0.  Exact rationals are used only for
the r_alpha ranks and type-class counting.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .tensors import _integer_rank

K = 4
ALPHABET = (0, 1, 2)
GAMMA_MAX = 0.25
IPF_TOL = 1e-12
IPF_MAX_ITER = 100_000

Point = tuple[int, ...]


class LaserError(ValueError):
    """Raised on out-of-range parameters, non-integral types and infeasible marginals."""


def support_set(k: int = K) -> tuple[Point, ...]:
    """Phi: words over {0,1,2} of length k with coordinate sum 2, in lex order."""
    return tuple(p for p in itertools.product(ALPHABET, repeat=k) if sum(p) == 2)


PHI = support_set()


def lg(x: float) -> float:
    return math.log2(x)


def entropy(probs: Iterable[float]) -> float:
    return -sum(p * lg(p) for p in probs if p > 0)


def _check_gamma(gamma: float, upper_open: bool = False) -> float:
    gamma = float(gamma)
    if not 0 <= gamma <= GAMMA_MAX or (upper_open and gamma >= GAMMA_MAX):
        interval = "[0, 1/4)" if upper_open else "[0, 1/4]"
        raise LaserError(f"gamma must lie in {interval}, got {gamma}")
    return gamma


@dataclass(frozen=True)
class MarginalSpec:
    """Identical marginals (alpha, beta, gamma) on {0,1,2} in every mode."""

    gamma: float

    def __post_init__(self):
        _check_gamma(self.gamma)

    @property
    def alpha(self) -> float:
        return 0.5 + self.gamma

    @property
    def beta(self) -> float:
        return 0.5 - 2 * self.gamma

    @property
    def distribution(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    @property
    def entropy(self) -> float:
        return entropy(self.distribution)


def marginal_entropy(gamma: float) -> float:
    """H(1/2 + gamma, 1/2 - 2 gamma, gamma)."""
    return MarginalSpec(_check_gamma(gamma)).entropy


# -- maximum-entropy distributions ------------------------------------------------------------


def max_entropy_symmetric(gamma: float) -> tuple[dict[Point, float], float]:
    """P*: gamma on each 2-type point, beta/3 on each 1+1-type point."""
    spec = MarginalSpec(_check_gamma(gamma))
    dist = {p: (spec.gamma if 2 in p else spec.beta / 3) for p in PHI}
    return dist, entropy(dist.values())


def max_entropy_closed_form(gamma: float) -> float:
    """-4 gamma lg gamma - 2 beta lg(beta/3)."""
    spec = MarginalSpec(_check_gamma(gamma))
    g, b = spec.gamma, spec.beta
    return (-4 * g * lg(g) if g else 0.0) - (2 * b * lg(b / 3) if b else 0.0)


@dataclass(frozen=True)
class IPFResult:
    distribution: dict[tuple, float]
    entropy: float
    iterations: int
    violation: float


def max_entropy_ipf(support: Sequence[tuple], marginals: Sequence[Mapping[int, float]],
                    tol: float = IPF_TOL, max_iter: int = IPF_MAX_ITER) -> IPFResult:
    """Maximum-entropy distribution on ``support`` with the given coordinate marginals.

    Iterative proportional fitting from the uniform distribution converges to
    the entropy maximizer of the linear family when it is nonempty.
    """
    pts = np.asarray(support, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != len(marginals):
        raise LaserError("each support point needs one coordinate per marginal")
    masks = []
    for u, target in enumerate(marginals):
        for value in np.unique(pts[:, u]):
            masks.append((pts[:, u] == value, float(target.get(int(value), 0.0))))
    for u, target in enumerate(marginals):
        missing = [v for v, p in target.items() if p > tol and not np.any(pts[:, u] == v)]
        if missing:
            raise LaserError(f"coordinate {u} needs values {missing} absent from the support")
    p = np.full(len(pts), 1.0 / len(pts))
    best, stale = math.inf, 0
    for it in range(1, max_iter + 1):
        for mask, target in masks:
            cur = p[mask].sum()
            if cur > 0:
                p[mask] *= target / cur
            elif target > tol:
                raise LaserError("marginals are infeasible on this support")
        p /= p.sum()
        violation = max(abs(p[mask].sum() - target) for mask, target in masks)
        if violation <= tol:
            break
        if violation < best * (1 - 1e-9):
            best, stale = violation, 0
        else:
            stale += 1
            if stale > 1000:
                raise LaserError(f"proportional fitting stalled at violation {violation:.3e}")
    else:
        raise LaserError(f"proportional fitting did not converge in {max_iter} iterations")
    dist = {tuple(map(int, x)): float(v) for x, v in zip(pts, p)}
    return IPFResult(dist, entropy(p.tolist()), it, float(violation))


# -- relations and ranks -----------------------------------------------------------------------


@dataclass(frozen=True)
class TightnessMap:
    """Integer relabelings alpha_u of the alphabet, one per mode."""

    maps: tuple[tuple[int, ...], ...] = tuple(ALPHABET for _ in range(K))

    def __call__(self, x: Point) -> tuple[int, ...]:
        return tuple(self.maps[u][b] for u, b in enumerate(x))

    def is_tight(self, support: Iterable[Point] = PHI) -> bool:
        return len({sum(self(x)) for x in support}) == 1


@dataclass(frozen=True)
class RRelation:
    """An equivalence relation on Phi given by its nontrivial classes."""

    name: str
    classes: tuple[tuple[Point, ...], ...] = ()
    pairs: frozenset = field(default=frozenset(), compare=False)

    @classmethod
    def from_classes(cls, name: str, classes: Iterable[Iterable[Point]],
                     support: Sequence[Point] = PHI) -> RRelation:
        classes = tuple(tuple(c) for c in classes)
        pairs = {(x, x) for x in support}
        for c in classes:
            pairs.update(itertools.product(c, repeat=2))
        return cls(name, classes, frozenset(pairs))

    @classmethod
    def coordinate(cls, i: int, support: Sequence[Point] = PHI) -> RRelation:
        """R_i: pairs agreeing in coordinate i (0-based)."""
        groups: dict[int, list[Point]] = {}
        for x in support:
            groups.setdefault(x[i], []).append(x)
        return cls.from_classes(f"R_{i + 1}", [tuple(g) for g in groups.values() if len(g) > 1],
                                support)

    @property
    def support(self) -> list[tuple]:
        """Pairs (x, y) as flat 2k-tuples, sorted."""
        return sorted(x + y for x, y in self.pairs)

    def is_admissible(self, support: Sequence[Point] = PHI) -> bool:
        """Not inside the diagonal, and inside R_i for some coordinate i."""
        off_diagonal = any(x != y for x, y in self.pairs)
        k = len(support[0])
        return off_diagonal and any(all(x[i] == y[i] for x, y in self.pairs) for i in range(k))


R_1 = RRelation.from_classes("R(1)", RRelation.coordinate(0).classes)
R_2 = RRelation.from_classes("R(2)", [((0, 1, 1, 0), (0, 0, 0, 2))])
R_3 = RRelation.from_classes("R(3)", [((0, 0, 1, 1), (0, 1, 0, 1)),
                                      ((1, 1, 0, 0), (1, 0, 1, 0)),
                                      ((0, 2, 0, 0), (0, 0, 2, 0))])
DIAGONAL = RRelation.from_classes("diagonal", [])
REPRESENTATIVES = (R_1, R_2, R_3)


def r_alpha_rank(relation: RRelation | Iterable[tuple[Point, Point]],
                 maps: TightnessMap = TightnessMap()) -> int:
    """Rank over Q of the rows alpha(x) - alpha(y) for (x, y) in the relation."""
    pairs = relation.pairs if isinstance(relation, RRelation) else relation
    rows = []
    for x, y in pairs:
        ax, ay = maps(x), maps(y)
        rows.append({u: a - b for u, (a, b) in enumerate(zip(ax, ay)) if a != b})
    return _integer_rank(rows)


# -- closed forms -------------------------------------------------------------------------------


def _xlgx(x: float) -> float:
    return x * lg(x) if x > 0 else 0.0


def U_of_gamma(gamma: float) -> float:
    """Upper bound on H(Q*) for R(3)."""
    g = _check_gamma(gamma)
    b = 0.5 - 2 * g
    return -4 * _xlgx(g) - 4 * _xlgx(2 * b / 5) - 2 * _xlgx(b / 5) + 2 * g + 8 * b / 5


def D_of_gamma(gamma: float) -> float:
    """3 H(P*) - 2 U(gamma) - H(alpha, beta, gamma)."""
    return 3 * max_entropy_closed_form(gamma) - 2 * U_of_gamma(gamma) - marginal_entropy(gamma)


def D_second_derivative(gamma: float) -> float:
    """3 / (gamma (2 gamma + 1) (4 gamma - 1) ln 2) on the open interval."""
    g = float(gamma)
    if not 0 < g < GAMMA_MAX:
        raise LaserError("D'' is defined on the open interval (0, 1/4)")
    return 3 / (g * (2 * g + 1) * (4 * g - 1) * math.log(2))


@dataclass(frozen=True)
class FRReport:
    relation: str
    rank: int
    gamma: float
    h_pstar: float
    h_q_upper: float
    value: float
    exact: bool
    h_q_numeric: float | None = None

    @property
    def numeric_value(self) -> float | None:
        if self.h_q_numeric is None:
            return None
        return self.h_pstar - (K - 2) * (self.h_q_numeric - self.h_pstar) / self.rank

    def to_dict(self) -> dict:
        return {"relation": self.relation, "rank": self.rank, "gamma": self.gamma,
                "H(P*)": self.h_pstar, "H(Q*) upper": self.h_q_upper, "F_R": self.value,
                "exact": self.exact, "H(Q*) numeric": self.h_q_numeric,
                "F_R numeric": self.numeric_value}


def q_max_entropy(gamma: float, relation: RRelation) -> IPFResult:
    """Maximum-entropy Q on the relation whose 2k coordinate marginals are all P_1."""
    spec = MarginalSpec(_check_gamma(gamma))
    target = dict(zip(ALPHABET, spec.distribution))
    return max_entropy_ipf(relation.support, [target] * (2 * K))


def F_R(gamma: float, relation: RRelation, numeric: bool = False) -> FRReport:
    """F_R = H(P*) - (k-2)(H(Q*_R) - H(P*)) / r_alpha(R), via the certified H(Q*) bounds.

    R(1) is exact; R(2) and R(3) give lower bounds on F_R.
    """
    g = _check_gamma(gamma)
    h_star = max_entropy_closed_form(g)
    rank = r_alpha_rank(relation)
    if relation.name == R_1.name:
        h_q, exact = 2 * h_star - marginal_entropy(g), True
    elif relation.name == R_2.name:
        h_q, exact = h_star + 0.5 - g, False
    elif relation.name == R_3.name:
        h_q, exact = U_of_gamma(g), False
    else:
        raise LaserError(f"no closed form for relation {relation.name!r}")
    value = h_star - (K - 2) * (h_q - h_star) / rank
    numeric_h = q_max_entropy(g, relation).entropy if numeric else None
    return FRReport(relation.name, rank, g, h_star, h_q, value, exact, numeric_h)


@dataclass(frozen=True)
class MuReport:
    gamma: float
    mu: float
    f_values: dict[str, float]

    @property
    def consistent(self) -> bool:
        return abs(min(self.f_values.values()) - self.mu) <= 1e-9


def mu(gamma: float) -> float:
    """mu(gamma) = H(alpha, beta, gamma)."""
    return marginal_entropy(gamma)


def mu_report(gamma: float) -> MuReport:
    g = _check_gamma(gamma)
    return MuReport(g, mu(g), {r.name: F_R(g, r).value for r in REPRESENTATIVES})


# -- the tau(K4) bound ----------------------------------------------------------------------------


def tau_k4_bound(q: int, gamma: float) -> float:
    """(1 / (1 - 4 gamma)) log_q((q + 2) / 2^mu(gamma))."""
    if q < 2 or int(q) != q:
        raise LaserError("q must be an integer >= 2")
    g = _check_gamma(gamma, upper_open=True)
    return math.log((q + 2) / 2 ** mu(g), q) / (1 - 4 * g)


def tau_k4_bound_rearranged(q: int, gamma: float) -> float:
    """(lg(q + 2) - mu) / ((1 - 4 gamma) lg q), a second evaluation path."""
    g = _check_gamma(gamma, upper_open=True)
    return (lg(q + 2) - mu(g)) / ((1 - 4 * g) * lg(q))


@dataclass(frozen=True)
class TauOptimum:
    q: int
    gamma: float
    bound: float
    per_q: dict[int, tuple[float, float]]

    def to_dict(self) -> dict:
        return {"q": self.q, "gamma": self.gamma, "bound": self.bound,
                "per_q": {q: {"gamma": g, "bound": b} for q, (g, b) in self.per_q.items()}}


GAMMA_SEARCH_HI = 0.24
GAMMA_TOL = 1e-10


def optimize_tau_k4(qs: Iterable[int] = range(2, 17), hi: float = GAMMA_SEARCH_HI,
                    tol: float = GAMMA_TOL) -> TauOptimum:
    """Minimize the bound over gamma in [0, hi] for each q; return the best q."""
    per_q = {}
    for q in qs:
        res = minimize_scalar(lambda g, q=q: tau_k4_bound(q, g), bounds=(0.0, hi),
                              method="bounded", options={"xatol": tol, "maxiter": 10_000})
        candidates = [(float(res.fun), float(res.x)), (tau_k4_bound(q, 0.0), 0.0)]
        bound, gamma = min(candidates)
        per_q[q] = (gamma, bound)
    if not per_q:
        raise LaserError("no q values given")
    q = min(per_q, key=lambda x: (per_q[x][1], x))
    return TauOptimum(q, per_q[q][0], per_q[q][1], per_q)


# -- sweeps and counting ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepReport:
    points: int
    fr2_chain: bool
    d_nonnegative: bool
    d_second_derivative: bool
    numeric_below_bounds: bool
    min_d: float
    max_dd_error: float
    max_numeric_excess: float
    numeric_points: int

    @property
    def passed(self) -> bool:
        return self.fr2_chain and self.d_nonnegative and self.d_second_derivative \
            and self.numeric_below_bounds

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"passed": self.passed}


def verify_lemmas_sweep(grid_size: int = 1000, numeric_stride: int = 10) -> SweepReport:
    """Check the R(2) and R(3) lemmas on a uniform grid over [0, 1/4].

    The proportional-fitting cross-check runs on every ``numeric_stride``-th point.
    """
    if grid_size < 2:
        raise LaserError("grid needs at least two points")
    gammas = [GAMMA_MAX * i / (grid_size - 1) for i in range(grid_size)]
    chain = dpos = True
    min_d = math.inf
    max_err = 0.0
    excess = -math.inf
    numeric = 0
    for i, g in enumerate(gammas):
        h_star, h1 = max_entropy_closed_form(g), marginal_entropy(g)
        chain &= (1 - g) * lg(3) >= 1 - 2 * g and h_star - 1 + 2 * g >= h1 - 1e-12
        d = D_of_gamma(g)
        min_d = min(min_d, d)
        dpos &= d >= 0
        if 0 < g < GAMMA_MAX:
            h = 1e-3 * min(g, GAMMA_MAX - g)
            fd = (D_of_gamma(g + h) - 2 * d + D_of_gamma(g - h)) / h ** 2
            exact = D_second_derivative(g)
            max_err = max(max_err, abs(fd - exact) / abs(exact))
        if i % numeric_stride == 0:
            numeric += 1
            for rel, bound in ((R_2, h_star + 0.5 - g), (R_3, U_of_gamma(g))):
                excess = max(excess, float(q_max_entropy(g, rel).entropy) - bound)
    return SweepReport(grid_size, chain, dpos, max_err <= 1e-5, excess <= 1e-9,
                       min_d, max_err, excess, numeric)


@dataclass(frozen=True)
class TypeClassReport:
    gamma: Fraction
    n: int
    counts: tuple[int, int, int]
    m: int
    symbol_ones: int
    symbol_twos: int
    blocks_checked: int
    enumerated: bool

    @property
    def identities_hold(self) -> bool:
        a, b, c = self.counts
        return 2 * self.m == K * b and self.n - self.m == K * c and self.m == (1 - K * self.gamma) * self.n

    def to_dict(self) -> dict:
        return {"gamma": str(self.gamma), "n": self.n, "counts": list(self.counts), "m": self.m,
                "identities_hold": self.identities_hold, "blocks_checked": self.blocks_checked,
                "enumerated": self.enumerated}


def type_class_counting(gamma, n: int, enumerate_limit: int = 200_000) -> TypeClassReport:
    """m = (1 - 4 gamma) n one-edge positions in every nonzero block of the type class W_gamma.

    For small n every nonzero block is enumerated and its one-edge count checked.
    """
    g = Fraction(gamma).limit_denominator(10 ** 12) if isinstance(gamma, float) else Fraction(gamma)
    if not 0 <= g <= Fraction(1, 4):
        raise LaserError("gamma must lie in [0, 1/4]")
    dist = (Fraction(1, 2) + g, Fraction(1, 2) - 2 * g, g)
    counts = [p * n for p in dist]
    if any(c.denominator != 1 for c in counts):
        raise LaserError(f"alpha n, beta n, gamma n must be integers; got {counts}")
    counts = tuple(int(c) for c in counts)
    m = int((1 - K * g) * n)
    words = _type_class(counts, n)
    checked = 0
    enumerated = len(words) ** (K - 1) <= enumerate_limit
    if enumerated:
        for combo in itertools.product(words, repeat=K - 1):
            # The last word is forced: each position sums to 2 over the k modes.
            last = tuple(2 - sum(w[p] for w in combo) for p in range(n))
            if any(v not in ALPHABET for v in last) or _counts(last) != counts:
                continue
            ones = sum(1 for p in range(n) if (*[w[p] for w in combo], last[p]).count(1) == 2)
            if ones != m:
                raise AssertionError(f"block with {ones} one-edge positions, expected {m}")
            checked += 1
    return TypeClassReport(g, n, counts, m, 2 * m, n - m, checked, enumerated)


def _counts(word: Sequence[int]) -> tuple[int, int, int]:
    return tuple(word.count(b) for b in ALPHABET)


def _type_class(counts: tuple[int, int, int], n: int) -> list[tuple[int, ...]]:
    return [w for w in itertools.product(ALPHABET, repeat=n) if _counts(w) == counts]


__all__ = [
    "ALPHABET", "DIAGONAL", "FRReport", "F_R", "IPFResult", "LaserError", "MarginalSpec",
    "MuReport", "PHI", "REPRESENTATIVES", "RRelation", "R_1", "R_2", "R_3", "SweepReport",
    "TauOptimum", "TightnessMap", "TypeClassReport", "D_of_gamma", "D_second_derivative",
    "U_of_gamma", "entropy", "marginal_entropy", "max_entropy_closed_form", "max_entropy_ipf",
    "max_entropy_symmetric", "mu", "mu_report", "optimize_tau_k4", "q_max_entropy",
    "r_alpha_rank", "support_set", "tau_k4_bound", "tau_k4_bound_rearranged",
    "type_class_counting", "verify_lemmas_sweep",
]
