"""Finite checks of the cylinder inequalities.

Polynomial comparisons (ratio bounds, interval bounds, the algebra of
convergents) are exact. Comparisons between powers of lengths are done on
logarithms of the exact rationals at 100 significant digits.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .cf import Word, as_word, continuants, convergents, cylinder, iter_words
from .constructions import PinnedWord, delete_pinned
from .errors import BudgetExceeded

LOG_DPS = 100
MAX_BITS = 1 << 20


@dataclass(frozen=True)
class PairInstance:
    sigma: Word
    tau: Word
    omega: tuple = ()

    def __post_init__(self):
        sigma, tau = as_word(self.sigma), as_word(self.tau)
        if len(sigma) != len(tau):
            raise ValueError(f"|sigma|={len(sigma)} != |tau|={len(tau)}")
        omega = tuple(i for i, (a, b) in enumerate(zip(sigma, tau), 1) if a != b)
        if self.omega and tuple(sorted(self.omega)) != omega:
            raise ValueError(f"omega={self.omega} is not the differing set {omega}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega", omega)

    @property
    def n(self):
        return len(self.sigma)

    @property
    def t(self):
        return len(self.omega)

    def to_json(self):
        return {"sigma": [str(a) for a in self.sigma], "tau": [str(a) for a in self.tau],
                "omega": list(self.omega)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, mpmath.mpf):
        return float(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


@dataclass
class CheckReport:
    check: str
    instance: dict
    hypothesis_satisfied: bool
    conclusion_holds: bool | None
    margin: Fraction | float | None
    vacuous: bool = False
    edge_case: bool = False
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        """The implication hypothesis -> conclusion did not fail."""
        return not self.hypothesis_satisfied or self.conclusion_holds is not False

    def to_json(self):
        return {
            "check": self.check,
            "instance": self.instance,
            "hypothesis_satisfied": self.hypothesis_satisfied,
            "conclusion_holds": self.conclusion_holds,
            "margin": _jsonable(self.margin),
            "vacuous": self.vacuous,
            "edge_case": self.edge_case,
            "counterexample": self.counterexample,
            "details": _jsonable(self.details),
        }


@dataclass
class SweepReport:
    """Aggregate of many checks; ``merge`` is associative."""

    check: str
    params: dict
    checked: int = 0
    vacuous: int = 0
    hypothesis_satisfied: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)
    edge_cases: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    def add(self, rep: CheckReport, keep=False):
        self.checked += 1
        self.vacuous += rep.vacuous
        self.hypothesis_satisfied += rep.hypothesis_satisfied
        if rep.ok:
            self.passed += 1
        else:
            self.failures.append(rep)
        if rep.edge_case:
            self.edge_cases.append(rep)
        if keep:
            self.reports.append(rep)

    def merge(self, other: "SweepReport") -> "SweepReport":
        return SweepReport(
            self.check, self.params,
            self.checked + other.checked, self.vacuous + other.vacuous,
            self.hypothesis_satisfied + other.hypothesis_satisfied,
            self.passed + other.passed,
            self.failures + other.failures, self.edge_cases + other.edge_cases,
            self.reports + other.reports)

    @property
    def counterexamples(self):
        return len(self.failures)

    def to_json(self):
        return {
            "check": self.check, "params": _jsonable(self.params), "checked": self.checked,
            "vacuous": self.vacuous, "hypothesis_satisfied": self.hypothesis_satisfied,
            "passed": self.passed, "counterexamples": self.counterexamples,
            "failures": [r.to_json() for r in self.failures],
            "edge_cases": [r.instance for r in self.edge_cases],
        }


def _q(w):
    return continuants(w)[1]


def _log_length(w):
    """``log |I_n(w)|`` from the exact continuants."""
    q_prev, q = continuants(w)
    if q.bit_length() > MAX_BITS:
        raise BudgetExceeded("rational_budget", f"q_n has {q.bit_length()} bits (max {MAX_BITS})")
    with mpmath.workdps(LOG_DPS):
        return -(mpmath.log(q) + mpmath.log(q + q_prev))


def _log(x):
    with mpmath.workdps(LOG_DPS):
        return mpmath.log(x)


# ---------------------------------------------------------------------------
# ratio bounds


def _products(inst):
    num_lo = den_lo = num_hi = den_hi = 1
    for i in inst.omega:
        s, t = inst.sigma[i - 1], inst.tau[i - 1]
        num_lo *= s
        den_lo *= t + 1
        num_hi *= s + 1
        den_hi *= t
    return Fraction(num_lo, den_lo), Fraction(num_hi, den_hi)


def check_ratio_bounds(inst: PairInstance) -> CheckReport:
    """Strict bounds on ``q_n(sigma)/q_n(tau)`` by products over the differing digits."""
    ratio = Fraction(_q(inst.sigma), _q(inst.tau))
    lo, hi = _products(inst)
    if not inst.omega:
        return CheckReport("ratio_bounds", inst.to_json(), True, True, Fraction(0), vacuous=True,
                           details={"ratio": ratio, "lower": lo, "upper": hi})
    holds = lo < ratio < hi
    margin = min(ratio - lo, hi - ratio)
    return CheckReport("ratio_bounds", inst.to_json(), True, holds, margin,
                       counterexample=None if holds else inst.to_json(),
                       details={"ratio": ratio, "lower": lo, "upper": hi})


def _ratio_shard(first, max_len, max_digit, keep=False):
    rep = SweepReport("ratio_bounds", {})
    for n in range(1, max_len + 1):
        words = [w for w in iter_words(n, max_digit)]
        for sigma in words:
            if sigma[0] != first:
                continue
            for tau in words:
                rep.add(check_ratio_bounds(PairInstance(sigma, tau)), keep)
    return rep


def _sharded(check, shard, firsts, args, threads):
    params = {"args": list(args)}
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda d: shard(d, *args), firsts))
    else:
        parts = [shard(d, *args) for d in firsts]
    out = SweepReport(check, params)
    for p in parts:
        out = out.merge(p)
    out.params = params
    return out


def sweep_ratio_bounds(max_len=5, max_digit=3, threads=1, keep=False) -> SweepReport:
    """Every ordered pair of equal-length words over ``{1..max_digit}``, sharded by sigma's first digit."""
    rep = _sharded("ratio_bounds", _ratio_shard, range(1, max_digit + 1), (max_len, max_digit, keep), threads)
    rep.params = {"max_len": max_len, "max_digit": max_digit}
    return rep


# ---------------------------------------------------------------------------
# comparison of lengths


def _gate(n, epsilon, log_rhs):
    """``2^((n-1) eps) >= 2 * exp(log_rhs)`` in log space."""
    with mpmath.workdps(LOG_DPS):
        lhs = (n - 1) * mpmath.mpf(epsilon) * mpmath.log(2)
        rhs = mpmath.log(2) + log_rhs
        return bool(lhs >= rhs), lhs - rhs


def check_comparison(inst: PairInstance, epsilon: float, psi: float) -> CheckReport:
    """``|I(tau)|^(1+eps) <= |I(sigma)| <= |I(tau)|^(1-eps)`` under the digit and growth gate.

    The margin is the smaller slack of the two inequalities in log space. The
    deviation ``log|I(sigma)|/log|I(tau)| - 1`` (zero for identical words) is
    kept in ``details``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    digits = [inst.sigma[i - 1] + 1 for i in inst.omega] + [inst.tau[i - 1] + 1 for i in inst.omega]
    bounded = all(d <= psi for d in digits)
    with mpmath.workdps(LOG_DPS):
        grows, gate_slack = _gate(inst.n, epsilon, 2 * inst.t * _log(mpmath.mpf(psi)))
        ls, lt = _log_length(inst.sigma), _log_length(inst.tau)
        eps = mpmath.mpf(epsilon)
        lower = ls - (1 + eps) * lt
        upper = (1 - eps) * lt - ls
        margin = min(lower, upper)
        deviation = ls / lt - 1
    hyp = bounded and grows
    observed = bool(lower >= 0 and upper >= 0)
    return CheckReport(
        "comparison", {**inst.to_json(), "epsilon": epsilon, "psi": psi}, hyp,
        observed if hyp else None, float(margin),
        counterexample=inst.to_json() if hyp and not observed else None,
        details={"digits_bounded": bounded, "gate_slack": float(gate_slack),
                 "log_len_sigma": float(ls), "log_len_tau": float(lt),
                 "deviation": float(deviation), "conclusion_observed": observed})


def check_comparison_sides(inst: PairInstance, epsilon: float) -> tuple[CheckReport, CheckReport]:
    """One-sided version: each product hypothesis gives one inequality.

    ``lower``: ``2^((n-1)eps) >= 2 (prod(sigma+1)/prod tau)^2`` gives
    ``|I(sigma)| >= |I(tau)|^(1+eps)``; ``upper`` is the same with the roles
    swapped, giving ``|I(tau)| >= |I(sigma)|^(1+eps)`` and hence
    ``|I(sigma)| <= |I(tau)|^(1-eps)``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    lo, hi = _products(inst)
    swapped = Fraction(1, 1) / lo if inst.omega else Fraction(1)  # prod(tau+1)/prod(sigma)
    out = []
    with mpmath.workdps(LOG_DPS):
        ls, lt = _log_length(inst.sigma), _log_length(inst.tau)
        eps = mpmath.mpf(epsilon)
        for side, prod, slack in (
            ("lower", hi, ls - (1 + eps) * lt),
            ("upper", swapped, lt - (1 + eps) * ls),
        ):
            log_prod = _log(mpmath.mpf(prod.numerator)) - _log(mpmath.mpf(prod.denominator))
            hyp, gate_slack = _gate(inst.n, epsilon, 2 * log_prod)
            observed = bool(slack >= 0)
            extra = {}
            if side == "upper":
                extra["stated_form_slack"] = float((1 - eps) * lt - ls)
            out.append(CheckReport(
                f"comparison_{side}", {**inst.to_json(), "epsilon": epsilon}, hyp,
                observed if hyp else None, float(slack),
                counterexample=inst.to_json() if hyp and not observed else None,
                details={"gate_slack": float(gate_slack), "product": prod, **extra}))
    return tuple(out)


def _min_epsilon(n, log_rhs):
    """Smallest eps with ``(n-1) eps log 2 >= log 2 + log_rhs``, floored at a tiny positive value."""
    return max((math.log(2) + log_rhs) / ((n - 1) * math.log(2)), 1e-6)


def random_pair_instances(count=1000, seed=0, n_max=20, digit_max=8):
    """Seeded pairs: sigma uniform, a uniform random differing set, tau uniform off sigma there."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        sigma = [int(a) for a in rng.integers(1, digit_max + 1, size=n)]
        t = int(rng.integers(1, n + 1))
        omega = sorted(int(i) for i in rng.choice(n, size=t, replace=False))
        tau = list(sigma)
        for i in omega:
            choices = [d for d in range(1, digit_max + 1) if d != sigma[i]]
            tau[i] = choices[int(rng.integers(len(choices)))]
        out.append(PairInstance(Word(sigma), Word(tau)))
    return out


def sweep_comparison(count=1000, seed=0, n_max=20, digit_max=8, keep=False) -> dict:
    """Random instances with eps tuned so the gate holds, plus the one-sided variants."""
    rng = np.random.default_rng([seed, 1])
    params = {"count": count, "seed": seed, "n_max": n_max, "digit_max": digit_max}
    both = SweepReport("comparison", params)
    sides = SweepReport("comparison_sides", params)
    for inst in random_pair_instances(count, seed, n_max, digit_max):
        psi = max(max(inst.sigma[i - 1], inst.tau[i - 1]) + 1 for i in inst.omega)
        eps = _min_epsilon(inst.n, 2 * inst.t * math.log(psi)) * (1 + 1e-9) * float(rng.uniform(1, 2))
        both.add(check_comparison(inst, eps, psi), keep)
        lo, hi = _products(inst)
        for prod in (hi, 1 / lo):
            eps_side = _min_epsilon(inst.n, 2 * math.log(prod)) * (1 + 1e-9) * float(rng.uniform(1, 2))
            for rep in check_comparison_sides(inst, eps_side):
                sides.add(rep, keep)
    return {"comparison": both, "comparison_sides": sides}


# ---------------------------------------------------------------------------
# interval bounds and convergent algebra


def check_interval_bounds(w) -> CheckReport:
    """``1/(2 q_n^2) < |I_n| < 1/q_n^2``; the lower bound is attained only by the word (1)."""
    w = as_word(w)
    if not w:
        raise ValueError("check_interval_bounds needs a non-empty word")
    q = _q(w)
    length = cylinder(w).length
    lo, hi = Fraction(1, 2 * q * q), Fraction(1, q * q)
    strict = lo < length < hi
    edge = length == lo
    return CheckReport(
        "interval_bounds", {"word": [str(a) for a in w]}, True, strict or edge,
        min(length - lo, hi - length), edge_case=edge,
        counterexample=None if strict or edge else {"word": [str(a) for a in w]},
        details={"length": length, "lower": lo, "upper": hi, "strict": strict})


def _algebra_check(w) -> CheckReport:
    pairs = convergents(w)
    failures = []
    p_prev, q_prev = 0, 1
    for k, (p, q) in enumerate(pairs, 1):
        if p * q_prev - p_prev * q != (-1) ** (k + 1):
            failures.append(f"determinant at k={k}")
        if q * q < 2 ** (k - 1):
            failures.append(f"q_k^2 < 2^(k-1) at k={k}")
        p_prev, q_prev = p, q
    cyl = cylinder(w)
    q_prev, q = continuants(w)
    if cyl.length != Fraction(1, q * (q + q_prev)):
        failures.append("length formula")
    if cyl.right - cyl.left != cyl.length:
        failures.append("endpoint difference")
    bounds = check_interval_bounds(w)
    if not bounds.conclusion_holds:
        failures.append("interval bounds")
    ok = not failures
    return CheckReport("cf_algebra", {"word": [str(a) for a in w]}, True, ok, None,
                       edge_case=bounds.edge_case,
                       counterexample=None if ok else {"word": [str(a) for a in w]},
                       details={"failures": failures})


def _algebra_shard(first, max_len, max_digit, keep=False):
    rep = SweepReport("cf_algebra", {})
    for n in range(1, max_len + 1):
        for rest in itertools.product(range(1, max_digit + 1), repeat=n - 1):
            rep.add(_algebra_check(Word((first,) + rest)), keep)
    return rep


def sweep_cf_algebra(max_len=8, max_digit=4, threads=1, keep=False) -> SweepReport:
    """Determinant identity, length formula, interval bounds and ``q_n^2 >= 2^(n-1)`` on a grid."""
    rep = _sharded("cf_algebra", _algebra_shard, range(1, max_digit + 1), (max_len, max_digit, keep), threads)
    rep.params = {"max_len": max_len, "max_digit": max_digit}
    return rep


# ---------------------------------------------------------------------------
# deletion


def check_deletion_inequality(pw: PinnedWord, epsilon: float) -> CheckReport:
    """``|I_n(w)| >= |I_{n-t}(w without pinned digits)|^(1+eps)`` in log space."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    full = pw.word
    reduced = delete_pinned(pw)
    with mpmath.workdps(LOG_DPS):
        lf = _log_length(full)
        lr = _log_length(reduced) if reduced else mpmath.mpf(0)
        margin = lf - (1 + mpmath.mpf(epsilon)) * lr
    holds = bool(margin >= 0)
    inst = {"word": [str(a) for a in full], "pinned": sorted(pw.pinned), "epsilon": epsilon}
    return CheckReport(
        "deletion", inst, True, holds, float(margin),
        vacuous=not pw.pinned,
        counterexample=None if holds else inst,
        details={"n": len(full), "t": len(pw.pinned), "log_len_full": float(lf),
                 "log_len_reduced": float(lr)})


# ---------------------------------------------------------------------------
# export


def to_jsonl(reports) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in reports)


def to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance_id", "hypothesis", "conclusion", "margin"])
    for i, r in enumerate(reports):
        writer.writerow([i, r.hypothesis_satisfied, r.conclusion_holds, _jsonable(r.margin)])
    return buf.getvalue()
