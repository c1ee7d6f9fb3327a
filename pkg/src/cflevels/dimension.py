"""Hausdorff-dimension estimators for continued-fraction sets.

Two routes to the pressure function are provided and are meant to be
checked against each other:

* ``cylinder_sum``: exhaustive sums over all words of a given depth over the
  alphabet ``{1..M}``. Exact up to float rounding, exponential cost.
* ``collocation``: the transfer operator
  ``L_s f(x) = sum_a (a + x)^(-2s) f(1 / (a + x))`` discretised on a
  Chebyshev grid, with its leading eigenvalue found by power iteration.
  With ``M=None`` the whole alphabet is used; digits above a cutoff are
  summed through Hurwitz zeta values against a Taylor expansion at 0.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.special import zeta

from . import _kernels
from .errors import BudgetExceeded, HypothesisNotMet

INF = math.inf

DEFAULT_TOL = 1e-10
DEFAULT_BRACKET = (0.0, 1.5)

# Full-alphabet collocation: digits 1..TAIL_START are summed directly, the rest
# through a Taylor expansion of order TAIL_ORDER at x = 0.
TAIL_START = 2000
TAIL_ORDER = 3

METHODS = ("cylinder_sum", "collocation")
WEIGHTS = ("continuant", "length")


def parse_extended(value, name):
    """Accept a float or the symbolic infinity ``"inf"``."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        raise ValueError(f"{name}={value!r} is neither a number nor 'inf'")
    return float(value)


@dataclass(frozen=True)
class PressureConfig:
    """Parameters of a finite approximation to the pressure function.

    ``weight`` selects the cylinder weight used by ``cylinder_sum``:
    ``"continuant"`` sums ``q_n^(-2s)``; ``"length"`` sums the exact cylinder
    lengths ``|I_n|^s``. Both have the same limit.
    """

    B: float = 1.0
    M: int | None = 2
    depth: int = 12
    method: str = "cylinder_sum"
    collocation_order: int = 32
    weight: str = "continuant"
    min_depth: int = 1
    max_words: int = 1 << 23
    threads: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method={self.method!r} not in {METHODS}")
        if self.weight not in WEIGHTS:
            raise ValueError(f"weight={self.weight!r} not in {WEIGHTS}")
        if not (self.B >= 1.0) or math.isinf(self.B):
            raise ValueError(f"B={self.B} must be a finite real >= 1")
        if self.M is not None and self.M < 1:
            raise ValueError(f"M={self.M} must be >= 1")
        if self.depth < 1:
            raise ValueError(f"depth={self.depth} must be >= 1")
        if not 1 <= self.min_depth <= self.depth:
            raise ValueError(f"min_depth={self.min_depth} must lie in [1, depth]")
        if self.collocation_order < 8:
            raise ValueError(f"collocation_order={self.collocation_order} must be >= 8")
        if self.method == "cylinder_sum" and self.M is None:
            raise ValueError("cylinder_sum needs a finite alphabet size M")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def log_B(self):
        return math.log(self.B)

    def to_json(self):
        return asdict(self)


@dataclass
class DimensionEstimate:
    value: float
    method: str
    params: dict
    bracket: tuple
    extrapolation: list = field(default_factory=list)

    def to_json(self):
        return {
            "value": self.value,
            "method": self.method,
            "params": self.params,
            "bracket": list(self.bracket),
            "extrapolation": self.extrapolation,
        }

    def csv_rows(self):
        """``(depth, root, bracket_lo, bracket_hi)`` rows for convergence plots."""
        return [(r["depth"], r["root"], r["bracket_lo"], r["bracket_hi"])
                for r in self.extrapolation if "depth" in r]


# ---------------------------------------------------------------------------
# cylinder sums


def _check_budget(M, depth, max_words):
    total = sum(M ** k for k in range(1, depth + 1))
    if total > max_words:
        raise BudgetExceeded(
            "max_words",
            f"{total} words needed for M={M}, depth={depth} exceeds max_words={max_words}")


@lru_cache(maxsize=4)
def _level_log_weights(M, depth, weight, threads):
    """Per-level arrays of ``-log(weight)`` for every word, in lexicographic order."""
    shards = np.array_split(np.arange(1, M + 1), min(threads, M))
    jobs = [(int(s[0]), int(s[-1])) for s in shards if len(s)]

    def run(bounds):
        return _kernels.continuant_levels(M, depth, bounds[0], bounds[1])

    if len(jobs) > 1:
        with ThreadPoolExecutor(len(jobs)) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(jobs[0])]

    levels = []
    for k in range(depth):
        q = np.concatenate([p[0][p[2][k]:p[2][k + 1]] for p in parts])
        q_prev = np.concatenate([p[1][p[2][k]:p[2][k + 1]] for p in parts])
        if weight == "continuant":
            levels.append(2.0 * np.log(q))
        else:
            levels.append(np.log(q) + np.log(q + q_prev))
    return tuple(levels)


def _levels(cfg):
    _check_budget(cfg.M, cfg.depth, cfg.max_words)
    return _level_log_weights(cfg.M, cfg.depth, cfg.weight, cfg.threads)


def log_partition_sums(s, cfg):
    """``log Z_k(s)`` for k = 1..depth, where ``Z_k = sum_{|w|=k} weight(w)^s``."""
    return np.array([_kernels.log_partition(lw, float(s)) for lw in _levels(cfg)])


# ---------------------------------------------------------------------------
# collocation


@lru_cache(maxsize=16)
def chebyshev_grid(order):
    """Chebyshev extreme points on [0, 1] and their barycentric weights."""
    k = np.arange(order)
    x = (np.cos(np.pi * k / (order - 1)) + 1.0) / 2.0
    bary = (-1.0) ** k
    bary[0] *= 0.5
    bary[-1] *= 0.5
    return x, bary


@lru_cache(maxsize=16)
def _taylor_at_zero(order, terms):
    """Rows k = 0..terms: Taylor coefficients at x=0 of each Lagrange basis polynomial."""
    x, _ = chebyshev_grid(order)
    coef = np.linalg.solve(cheb.chebvander(2.0 * x - 1.0, order - 1), np.eye(order))
    rows = []
    for k in range(terms + 1):
        d = cheb.chebder(coef, k, axis=0) if k else coef
        rows.append(cheb.chebval(-1.0, d) * 2.0 ** k / math.factorial(k))
    return np.array(rows)


def transfer_matrix(s, M, order):
    """Collocation matrix of the transfer operator at exponent ``s``."""
    x, bary = chebyshev_grid(order)
    amax = TAIL_START if M is None else M
    mat = _kernels.collocation_matrix(float(s), x, bary, amax)
    if M is None:
        taylor = _taylor_at_zero(order, TAIL_ORDER)
        for k in range(TAIL_ORDER + 1):
            mat += zeta(2.0 * s + k, TAIL_START + 1 + x)[:, None] * taylor[k][None, :]
    return mat


def power_iteration(A, tol=1e-14, max_iter=2000):
    """Leading eigenvalue of ``A`` (assumed real, positive and simple)."""
    v = np.ones(A.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        lam_new = float(v @ w) / float(v @ v)
        v = w / np.linalg.norm(w)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


def transfer_eigenvalue(s, M, order):
    if M is None and s <= 0.5:
        return INF
    return power_iteration(transfer_matrix(s, M, order))


# ---------------------------------------------------------------------------
# pressure and roots


def pressure(s, cfg: PressureConfig):
    """Finite approximation of ``P(s)``.

    ``cylinder_sum``: ``(1/n) log sum_{|w|=n} weight(w)^s - s log B`` at
    ``n = cfg.depth``. ``collocation``: ``log lambda(s) - s log B``.
    """
    if s < 0:
        raise ValueError(f"s={s} must be >= 0")
    if cfg.method == "cylinder_sum":
        lw = _levels(cfg)[-1]
        return _kernels.log_partition(lw, float(s)) / cfg.depth - s * cfg.log_B
    lam = transfer_eigenvalue(s, cfg.M, cfg.collocation_order)
    return math.log(lam) - s * cfg.log_B if lam < INF else INF


def _bisect(f, lo, hi, tol):
    """``inf {s in [lo, hi] : f(s) <= 0}`` for decreasing ``f``; None without a sign change."""
    if f(lo) <= 0:
        return lo, lo, lo
    if f(hi) > 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), lo, hi


def aitken(a, b, c):
    denom = (c - b) - (b - a)
    if denom == 0.0:
        return c
    return c - (c - b) ** 2 / denom


def solve_root(cfg: PressureConfig, tol=DEFAULT_TOL, bracket=None) -> DimensionEstimate:
    """Root of the pressure equation ``P(s) = 0`` by bisection.

    For ``cylinder_sum`` two per-depth roots are recorded at every depth k:
    ``mean_root`` solves ``(1/k) log Z_k(s) = s log B`` and ``root`` solves
    ``log Z_k(s) - log Z_{k-1}(s) = s log B``. The latter converges
    geometrically and is the sequence extrapolated (Aitken, last three depths)
    into ``value``.
    """
    lo, hi = bracket if bracket is not None else DEFAULT_BRACKET
    if cfg.method == "collocation":
        return _solve_collocation(cfg, tol, lo, hi)

    levels = _levels(cfg)
    log_B = cfg.log_B
    records = []
    for k in range(cfg.min_depth, cfg.depth + 1):
        cur, prev = levels[k - 1], (levels[k - 2] if k > 1 else None)

        def mean_f(s):
            return _kernels.log_partition(cur, s) / k - s * log_B

        def inc_f(s):
            z_prev = _kernels.log_partition(prev, s) if prev is not None else 0.0
            return _kernels.log_partition(cur, s) - z_prev - s * log_B

        mean = _bisect(mean_f, lo, hi, tol)
        inc = _bisect(inc_f, lo, hi, tol)
        records.append({
            "depth": k,
            "root": inc[0] if inc else None,
            "bracket_lo": inc[1] if inc else None,
            "bracket_hi": inc[2] if inc else None,
            "mean_root": mean[0] if mean else None,
        })

    if records[-1]["root"] is None:
        raise HypothesisNotMet(
            "bracket", f"pressure has no sign change on [{lo}, {hi}] at depth {cfg.depth}")
    roots = [r["root"] for r in records if r["root"] is not None]
    value = aitken(*roots[-3:]) if len(roots) >= 3 else roots[-1]
    tail = roots[-2:] + [value]
    return DimensionEstimate(
        value=float(value),
        method="cylinder_sum",
        params=cfg.to_json() | {"tol": tol, "extrapolation": "aitken"},
        bracket=(min(tail), max(tail)),
        extrapolation=records,
    )


def _solve_collocation(cfg, tol, lo, hi):
    orders = sorted({max(8, cfg.collocation_order // 2),
                     max(8, (3 * cfg.collocation_order) // 4),
                     cfg.collocation_order})
    records = []
    result = None
    for order in orders:
        sub = replace(cfg, collocation_order=order)
        result = _bisect(lambda s: pressure(s, sub), lo, hi, tol)
        if result is None:
            raise HypothesisNotMet(
                "bracket", f"pressure has no sign change on [{lo}, {hi}] (order {order})")
        # the CSV "depth" column carries the collocation order for this method
        records.append({"depth": order, "order": order, "root": result[0],
                        "bracket_lo": result[1], "bracket_hi": result[2]})
    value, b_lo, b_hi = result
    return DimensionEstimate(
        value=float(value),
        method="collocation",
        params=cfg.to_json() | {"tol": tol},
        bracket=(b_lo, b_hi),
        extrapolation=records,
    )


def full_alphabet_config(B, order=32):
    return PressureConfig(B=B, M=None, method="collocation", collocation_order=order)


def ww_dimension(B, b=None, solver_cfg: PressureConfig | None = None, tol=DEFAULT_TOL):
    """Dimension of ``{x : a_n(x) >= phi(n) i.o.}`` by the three-case rule.

    ``B = exp(liminf log phi(n) / n)``; when ``B`` is infinite,
    ``b = exp(liminf log log phi(n) / n)`` is required. ``B`` and ``b``
    accept the string ``"inf"``.
    """
    B = parse_extended(B, "B")
    if not B >= 1.0:
        raise ValueError(f"B={B} must be >= 1")
    if B == 1.0:
        return DimensionEstimate(1.0, "ww:B=1", {"B": 1.0}, (1.0, 1.0))
    if math.isinf(B):
        if b is None:
            raise ValueError("b is required when B is infinite")
        b = parse_extended(b, "b")
        if not b >= 1.0:
            raise ValueError(f"b={b} must be >= 1")
        value = 0.0 if math.isinf(b) else 1.0 / (1.0 + b)
        return DimensionEstimate(value, "ww:B=inf", {"B": "inf", "b": b if b < INF else "inf"},
                                 (value, value))
    cfg = replace(solver_cfg, B=B) if solver_cfg is not None else full_alphabet_config(B)
    est = solve_root(cfg, tol)
    est.method = f"ww:{est.method}"
    return est


# ---------------------------------------------------------------------------
# closed-form evaluators


def _log_values(seq, depth):
    ns = np.arange(1, depth + 1)
    if callable(seq):
        vals = seq(ns)
    elif hasattr(seq, "log_phi_array"):
        vals = seq.log_phi_array(ns)
    else:
        vals = np.asarray(seq, dtype=float)[:depth]
        if len(vals) < depth:
            raise ValueError(f"need {depth} values, got {len(vals)}")
    return np.asarray(vals, dtype=float)


def _ratio_limit(log_s, limit_hint):
    """Tail statistics of ``r_n = log s_{n+1} / (log s_1 + ... + log s_n)``."""
    csum = np.cumsum(log_s)[:-1]
    ns = np.arange(1, len(log_s))
    ok = csum > 0
    ratios = log_s[1:][ok] / csum[ok]
    ns = ns[ok]
    if len(ratios) < 2:
        raise ValueError("window too short to form ratios")
    envelope = np.maximum.accumulate(ratios[::-1])[::-1]
    start = len(ratios) // 2
    tail_n, tail_u = ns[start:], envelope[start:]
    tail_sup = float(tail_u[0])
    if limit_hint is not None:
        limit = float(limit_hint)
    elif len(tail_n) >= 3:
        design = np.column_stack([np.ones(len(tail_n)), 1.0 / tail_n])
        limit = float(np.linalg.lstsq(design, tail_u, rcond=None)[0][0])
        limit = min(max(limit, 0.0), tail_sup)
    else:
        limit = float(tail_u[-1])
    return ns, ratios, tail_sup, float(envelope[-1]), limit


def _formula_estimate(method, log_s, limit_hint, params):
    ns, ratios, tail_sup, last_sup, limit = _ratio_limit(log_s, limit_hint)
    value = 1.0 / (2.0 + limit)
    picks = np.unique(np.geomspace(1, len(ns), num=min(len(ns), 64)).astype(int) - 1)
    return DimensionEstimate(
        value=value,
        method=method,
        params=params | {"tail_sup": tail_sup, "limit": limit,
                         "limit_source": "hint" if limit_hint is not None else "tail_fit"},
        bracket=(1.0 / (2.0 + tail_sup), max(value, 1.0 / (2.0 + last_sup))),
        extrapolation=[{"n": int(ns[i]), "value": float(ratios[i])} for i in picks],
    )


def flww_dimension(s_seq, depth, limit_hint=None) -> DimensionEstimate:
    """``(2 + limsup log s_{n+1} / log(s_1 ... s_n))^(-1)`` from a finite window.

    ``s_seq`` gives ``log s_n``: a callable on an integer array, an object with
    ``log_phi_array``, or a plain sequence. The limsup is the tail envelope
    extrapolated by a fit in ``1/n`` unless ``limit_hint`` supplies it.
    """
    log_s = _log_values(s_seq, depth)
    bad = np.nonzero(log_s < math.log(3.0) - 1e-12)[0]
    if len(bad):
        raise HypothesisNotMet("s_n>=3", f"s_{bad[0] + 1} < 3; the formula needs s_n >= 3")
    return _formula_estimate("flww", log_s, limit_hint, {"depth": depth})


def lr_dimension(s_seq, log_t_minus_one, depth, limit_hint=None,
                 inapplicable_above=0.1) -> DimensionEstimate:
    """Same formula as :func:`flww_dimension` for ``s_n <= a_n <= s_n t_n``.

    ``log_t_minus_one`` gives ``log(t_n - 1)`` (callable, or a sequence) so
    that huge ``t_n`` stay in log space. The diagnostic
    ``log(t_n - 1) / log s_n`` must tend to 0; its tail value is attached and
    the estimate is flagged when it exceeds ``inapplicable_above``.
    """
    log_s = _log_values(s_seq, depth)
    log_tm1 = _log_values(log_t_minus_one, depth)
    if np.any(log_s < 0):
        raise ValueError("s_n must be >= 1")
    invalid = np.isnan(log_tm1) | (log_tm1 == -INF)
    if np.any(invalid):
        raise ValueError(f"t_{int(np.nonzero(invalid)[0][0]) + 1} must be > 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = log_tm1 / log_s
    tail = diag[len(diag) // 2:]
    tail = tail[np.isfinite(tail)]
    diagnostic = float(np.max(np.abs(tail))) if len(tail) else INF
    return _formula_estimate("lr", log_s, limit_hint, {
        "depth": depth,
        "hypothesis_ratio": float(diag[-1]),
        "hypothesis_tail_max": diagnostic,
        "formula_applicable": diagnostic <= inapplicable_above,
    })


CV_CONSTANT = 6.0 / math.pi ** 2 * math.exp(-1.0 - float(np.euler_gamma))


def cv_gap(alpha) -> float:
    """Leading term ``(6/pi^2) e^(-1-gamma) 2^(-alpha)`` of ``1 - dim F_alpha``."""
    if alpha < 0:
        raise ValueError(f"alpha={alpha} must be >= 0")
    return CV_CONSTANT * 2.0 ** (-alpha)


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def cover_dimension(cover: Sequence, tol=1e-13) -> DimensionEstimate:
    """Unique ``s >= 0`` with ``sum |I|^s = 1`` over a disjoint cover.

    Items need ``left``, ``right`` and ``length`` attributes (exact rationals),
    e.g. :class:`cflevels.cf.Cylinder`.
    """
    if not cover:
        raise ValueError("cover must be non-empty")
    ordered = sorted(cover, key=lambda c: c.left)
    for a, c in zip(ordered, ordered[1:]):
        if c.left < a.right:
            raise ValueError(f"overlapping cylinders: [{a.left}, {a.right}] and [{c.left}, {c.right}]")
    if len(ordered) == 1:
        return DimensionEstimate(0.0, "cover", {"size": 1}, (0.0, 0.0))
    neg_log_len = np.array([-_log_fraction(Fraction(c.length)) for c in ordered])

    def f(s):
        return _kernels.log_partition(neg_log_len, s)

    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
    value, lo, hi = _bisect(f, 0.0, hi, tol)
    return DimensionEstimate(value, "cover", {"size": len(ordered), "tol": tol}, (lo, hi))

