"""Growth sequences phi(n), their window exponents, and the necessary-condition classifier.

A :class:`GrowthSequence` is evaluated in log space. The vectorised path
(``log_phi_array``/``loglog_phi_array``) uses closed forms with ``log1p`` and
running log-sum-exp so it never overflows; ``log_phi`` evaluates one index
with mpmath at 128-bit precision and is what reported extrema are
recomputed from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import numpy as np
from scipy.integrate import quad

from .errors import BudgetExceeded

FAMILIES = ("linear", "n_log_n", "theorem2", "irregular", "double_exp_sum",
            "max_digit_integral", "table")

PRECISION_BITS = 128
# a trend slope of log phi(n) below this is read as liminf log phi(n)/n = 0
ZERO_TOL = 1e-2
# per-decade growth of sup log(phi(n)/n) above this is read as divergence
DIVERGENCE_TOL = 1e-2

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _exact_number(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _iroot(ns, N):
    """Integer floor of ``n^(1/N)`` for an int64 array."""
    k = np.floor(ns.astype(np.float64) ** (1.0 / N)).astype(np.int64)
    k = np.maximum(k, 1)
    k = np.where(k ** N > ns, k - 1, k)
    k = np.where((k + 1) ** N <= ns, k + 1, k)
    return k


def _irregular_level(n):
    """Smallest ``l >= 2`` with ``n < l^l``."""
    l = 2
    while n >= l ** l:
        l += 1
    return l


def _max_digit_integrand(x):
    return x / np.log(np.log(x))


def _max_digit_cumulative(n_max):
    """``1 + int_3^n x / log log x dx`` for n = 0..n_max (flat 1 below 3)."""
    out = np.ones(n_max + 1)
    if n_max > 3:
        k = np.arange(3, n_max, dtype=np.float64)
        x = k[:, None] + 0.5 * (_GL_NODES[None, :] + 1.0)
        pieces = 0.5 * _max_digit_integrand(x) @ _GL_WEIGHTS
        # the integrand is steep just above 3; redo the first unit intervals adaptively
        for i in range(min(len(pieces), 16)):
            pieces[i] = quad(_max_digit_integrand, 3 + i, 4 + i, epsabs=0, epsrel=1e-13)[0]
        out[4:] = 1.0 + np.cumsum(pieces)
    return out


@dataclass(frozen=True)
class AsymptoticHints:
    """Asserted limits of the growth exponents; ``None`` means unknown."""

    limsup_phi_over_n: float | None = None
    liminf_log_phi_over_n: float | None = None
    liminf_loglog_phi_over_n: float | None = None
    limsup_loglog_phi_over_log_n: float | None = None
    source: str = "user"

    FIELDS = ("limsup_phi_over_n", "liminf_log_phi_over_n",
              "liminf_loglog_phi_over_n", "limsup_loglog_phi_over_log_n")

    def to_json(self):
        out = {"source": self.source}
        for name in self.FIELDS:
            v = getattr(self, name)
            out[name] = None if v is None else ("inf" if v == math.inf else v)
        return out

    @classmethod
    def from_json(cls, data):
        kw = {}
        for name in cls.FIELDS:
            v = data.get(name)
            kw[name] = math.inf if v in ("inf", "Infinity") else (None if v is None else float(v))
        return cls(source=data.get("source", "user"), **kw)


@dataclass(frozen=True)
class GrowthSequence:
    family: str
    params: dict
    scale: float | int | Fraction = 1

    # -- vectorised log-space evaluation ---------------------------------

    def log_phi_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if np.any(ns < 1):
            raise ValueError("indices must be >= 1")
        out = _LOG_ARRAY[self.family](self.params, ns)
        return out + math.log(self.scale) if self.scale != 1 else out

    def loglog_phi_array(self, ns) -> np.ndarray:
        """``log log phi(n)``; NaN where ``phi(n) <= 1``."""
        ns = np.asarray(ns, dtype=np.int64)
        if self.family == "double_exp_sum" and self.scale == 1:
            return _double_exp_loglog(self.params, ns)
        lp = self.log_phi_array(ns)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(lp > 0, np.log(np.where(lp > 0, lp, 1.0)), np.nan)

    # -- single-index evaluation -----------------------------------------

    def log_phi(self, n: int, prec: int = PRECISION_BITS) -> mpmath.mpf:
        if n < 1:
            raise ValueError("index must be >= 1")
        with mpmath.workprec(prec):
            v = _LOG_MP[self.family](self.params, int(n))
            if self.scale != 1:
                v += mpmath.log(_mp(self.scale))
            return +v

    def phi_exact(self, n: int):
        """``phi(n)`` as an int or Fraction when the family makes that possible, else None."""
        fn = _EXACT.get(self.family)
        v = fn(self.params, int(n)) if fn else None
        if v is None or self.scale == 1:
            return v
        return v * self.scale if _exact_number(self.scale) else None

    def round_phi(self, n: int, max_digits=10**6) -> int:
        """``floor(phi(n) + 1/2)``, exact for integer-valued families."""
        exact = self.phi_exact(n)
        if exact is not None:
            return math.floor(Fraction(exact) + Fraction(1, 2))
        digits = int(self.log_phi(n) / mpmath.log(10)) + 1
        if digits > max_digits:
            raise BudgetExceeded("max_digits", f"phi({n}) has ~{digits} decimal digits")
        bits = int(3.33 * (max(digits, 0) + 30))
        with mpmath.workprec(bits):
            return int(mpmath.floor(mpmath.exp(self.log_phi(n, bits)) + mpmath.mpf(0.5)))

    # -- metadata ---------------------------------------------------------

    def hints(self) -> AsymptoticHints | None:
        """Known limits for closed-form families (None for tables)."""
        fn = _HINTS.get(self.family)
        if fn is None:
            return None
        h = fn(self.params)
        if h.limsup_phi_over_n is not None and self.scale != 1:
            h = replace(h, limsup_phi_over_n=h.limsup_phi_over_n * float(self.scale))
        return h

    def scaled(self, c) -> GrowthSequence:
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return replace(self, scale=self.scale * c)

    def to_json(self):
        out = {"family": self.family, "params": _params_to_json(self.params)}
        if self.scale != 1:
            out["scale"] = self.scale if not isinstance(self.scale, Fraction) else str(self.scale)
        return out

    @classmethod
    def from_json(cls, data):
        seq = make_phi(data["family"], data.get("params", {}))
        scale = data.get("scale", 1)
        return seq.scaled(Fraction(scale) if isinstance(scale, str) else scale) if scale != 1 else seq


def _params_to_json(params):
    out = {}
    for k, v in params.items():
        if isinstance(v, Fraction):
            out[k] = str(v)
        elif k == "values":
            out[k] = [str(x) if isinstance(x, int) and abs(x) >= 2**53 else x for x in v]
        else:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# families


def _f(x):
    return float(x)


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _linear_log(p, ns):
    return math.log(_f(p["alpha"])) + np.log(ns)


def _n_log_n_log(p, ns):
    x = ns.astype(np.float64)
    return math.log(_f(p["alpha"])) + np.log(np.maximum(x * np.log(x), 1.0))


def _theorem2_log(p, ns):
    beta, N = _f(p["beta"]), p["N"]
    nk = _iroot(ns, N) ** N
    head = nk.astype(np.float64) ** beta
    return head + np.log1p((ns - nk) * np.exp(-head))


def _irregular_log(p, ns):
    alpha = _f(p["alpha"])
    top = int(ns.max())
    bounds = []
    l = 2
    while True:
        bounds.append(l ** l)
        if l ** l > top:
            break
        l += 1
    level = np.searchsorted(np.array(bounds, dtype=np.float64), ns, side="right") + 2
    offset = (level - 1.0) ** level
    return np.log(alpha * ns + offset)


def _double_exp_terms(p, n_max):
    b, c = _f(p["b"]), _f(p["c"])
    k = np.arange(1, n_max + 1, dtype=np.float64)
    with np.errstate(over="ignore"):
        return k * math.log(b) + math.log(math.log(c)), np.exp(k * math.log(b)) * math.log(c)


def _double_exp_log(p, ns):
    _, terms = _double_exp_terms(p, int(ns.max()))
    with np.errstate(invalid="ignore"):
        running = np.logaddexp.accumulate(terms)
    running = np.where(np.isnan(running), np.inf, running)
    return running[ns - 1]


def _double_exp_loglog(p, ns):
    b, c = _f(p["b"]), _f(p["c"])
    n_max = int(ns.max())
    log_terms, _ = _double_exp_terms(p, n_max)
    # log phi(n) = T_n (1 + rho_n), T_n = b^n log c, rho_n = log(1 + sum_{k<n} c^(b^k - b^n)) / T_n
    out = np.empty(n_max)
    acc = 0.0  # log of sum_{k<=n} c^(b^k - b^n), tracked relative to the top term
    for i in range(n_max):
        if i == 0 or log_terms[i - 1] > 700:
            acc = 0.0
        else:
            gap = (b - 1.0) * math.exp(log_terms[i - 1])  # b^n log c - b^(n-1) log c
            acc = math.log1p(math.exp(acc - gap)) if gap < 700 else 0.0
        rel = acc * math.exp(-log_terms[i]) if log_terms[i] < 700 else 0.0
        out[i] = log_terms[i] + math.log1p(rel)
    return out[ns - 1]


def _max_digit_log(p, ns):
    return np.log(_max_digit_cumulative(int(ns.max()))[ns])


def _table_log(p, ns):
    logs = _table_logs(p)
    if ns.max() > len(logs):
        raise ValueError(f"table has {len(logs)} entries; index {int(ns.max())} requested")
    return np.asarray(logs)[ns - 1]


def _table_logs(p):
    if "log_values" in p:
        return [float(v) for v in p["log_values"]]
    return [math.log(v) if isinstance(v, int) else math.log(float(v)) for v in p["values"]]


_LOG_ARRAY = {
    "linear": _linear_log,
    "n_log_n": _n_log_n_log,
    "theorem2": _theorem2_log,
    "irregular": _irregular_log,
    "double_exp_sum": _double_exp_log,
    "max_digit_integral": _max_digit_log,
    "table": _table_log,
}


def _theorem2_mp(p, n):
    N = p["N"]
    k = int(round(n ** (1.0 / N)))
    while k ** N > n:
        k -= 1
    while (k + 1) ** N <= n:
        k += 1
    nk = k ** N
    return mpmath.log(mpmath.exp(mpmath.mpf(nk) ** _mp(p["beta"])) + (n - nk))


def _double_exp_mp(p, n):
    b, c = _mp(p["b"]), _mp(p["c"])
    top = b ** n * mpmath.log(c)
    cutoff = -2 * mpmath.mp.prec
    total = mpmath.mpf(0)
    for k in range(n, 0, -1):
        gap = b ** k * mpmath.log(c) - top
        if gap < cutoff:
            break
        total += mpmath.exp(gap)
    return top + mpmath.log(total)


def _max_digit_mp(p, n):
    if n <= 3:
        return mpmath.mpf(0)
    cuts = [3] + [10 ** j for j in range(1, 20) if 3 < 10 ** j < n] + [n]
    return mpmath.log(1 + mpmath.quad(lambda x: x / mpmath.log(mpmath.log(x)), cuts))


def _table_mp(p, n):
    if "log_values" in p:
        return mpmath.mpf(p["log_values"][n - 1])
    v = p["values"][n - 1]
    return mpmath.log(mpmath.mpf(v) if isinstance(v, int) else _mp(v))


_LOG_MP = {
    "linear": lambda p, n: mpmath.log(_mp(p["alpha"])) + mpmath.log(n),
    "n_log_n": lambda p, n: mpmath.log(_mp(p["alpha"]) * max(n * mpmath.log(n), mpmath.mpf(1))),
    "theorem2": _theorem2_mp,
    "irregular": lambda p, n: mpmath.log(_mp(p["alpha"]) * n + (_irregular_level(n) - 1) ** _irregular_level(n)),
    "double_exp_sum": _double_exp_mp,
    "max_digit_integral": _max_digit_mp,
    "table": _table_mp,
}


def _double_exp_exact(p, n, max_bits=10**7):
    b, c = p["b"], p["c"]
    if not (_exact_number(b) and _exact_number(c) and isinstance(b, int) and isinstance(c, int)):
        return None
    if b ** n * c.bit_length() > max_bits:
        return None
    return sum(c ** (b ** k) for k in range(1, n + 1))


def _table_exact(p, n):
    if "values" not in p:
        return None
    v = p["values"][n - 1]
    return v if _exact_number(v) else None


_EXACT = {
    "linear": lambda p, n: p["alpha"] * n if _exact_number(p["alpha"]) else None,
    "irregular": lambda p, n: (p["alpha"] * n + (_irregular_level(n) - 1) ** _irregular_level(n)
                               if _exact_number(p["alpha"]) else None),
    "double_exp_sum": _double_exp_exact,
    "table": _table_exact,
}


def _theorem2_hints(p):
    beta, N = _f(p["beta"]), p["N"]
    if beta > 0:
        lim = math.inf
    else:
        lim = 1.0 if N >= 2 else 0.0
    return AsymptoticHints(lim, 0.0, None, beta, source="family:theorem2")


_HINTS = {
    "linear": lambda p: AsymptoticHints(_f(p["alpha"]), 0.0, None, 0.0, "family:linear"),
    "n_log_n": lambda p: AsymptoticHints(math.inf, 0.0, None, 0.0, "family:n_log_n"),
    "theorem2": _theorem2_hints,
    "irregular": lambda p: AsymptoticHints(math.inf, 0.0, None, 0.0, "family:irregular"),
    "double_exp_sum": lambda p: AsymptoticHints(math.inf, math.inf, math.log(_f(p["b"])), math.inf,
                                                "family:double_exp_sum"),
    "max_digit_integral": lambda p: AsymptoticHints(math.inf, 0.0, None, 0.0, "family:max_digit_integral"),
}


def _number(params, name, *, positive=False, above_one=False):
    if name not in params:
        raise ValueError(f"missing parameter {name!r}")
    v = params[name]
    if isinstance(v, str):
        v = Fraction(v)
    if isinstance(v, bool) or not isinstance(v, (int, float, Fraction)):
        raise ValueError(f"parameter {name}={v!r} is not a number")
    if positive and not v > 0:
        raise ValueError(f"parameter {name}={v} must be > 0")
    if above_one and not v > 1:
        raise ValueError(f"parameter {name}={v} must be > 1")
    return v


_ALLOWED = {
    "linear": {"alpha"},
    "n_log_n": {"alpha"},
    "theorem2": {"beta", "N"},
    "irregular": {"alpha"},
    "double_exp_sum": {"b", "c"},
    "max_digit_integral": set(),
    "table": {"values", "log_values"},
}


def make_phi(family: str, params: dict | None = None, **kw) -> GrowthSequence:
    """Build and validate a growth sequence.

    >>> make_phi("double_exp_sum", b=2, c=2).phi_exact(2)
    20
    """
    params = dict(params or {}, **kw)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    unknown = set(params) - _ALLOWED[family]
    if unknown:
        raise ValueError(f"unknown parameter(s) for {family}: {sorted(unknown)}")
    if family in ("linear", "n_log_n", "irregular"):
        params.setdefault("alpha", 1)
        params["alpha"] = _number(params, "alpha", positive=True)
    elif family == "theorem2":
        beta = _number(params, "beta")
        if not 0 <= beta < 1:
            raise ValueError(f"parameter beta={beta} must lie in [0, 1)")
        N = params.get("N")
        if isinstance(N, bool) or not isinstance(N, int) or N < 1:
            raise ValueError(f"parameter N={N!r} must be an integer >= 1")
        params["beta"] = beta
    elif family == "double_exp_sum":
        params["b"] = _number(params, "b", above_one=True)
        params["c"] = _number(params, "c", above_one=True)
    elif family == "table":
        if ("values" in params) == ("log_values" in params):
            raise ValueError("table needs exactly one of 'values' or 'log_values'")
        if "values" in params:
            vals = [int(v) if isinstance(v, str) and v.lstrip("-").isdigit()
                    else (Fraction(v) if isinstance(v, str) else v) for v in params["values"]]
            if any(not v > 0 for v in vals):
                raise ValueError("table values must be positive")
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValueError("table values must be non-decreasing")
            params["values"] = vals
            key = vals
        else:
            key = [float(v) for v in params["log_values"]]
            if any(b < a for a, b in zip(key, key[1:])):
                raise ValueError("table values must be non-decreasing")
            params["log_values"] = key
        if not key:
            raise ValueError("table must be non-empty")
    return GrowthSequence(family, params)


def t_count(n: int, N: int) -> int:
    """``#{k >= 1 : k^N <= n}``."""
    k = 0
    while (k + 1) ** N <= n:
        k += 1
    return k


# ---------------------------------------------------------------------------
# window exponents


@dataclass
class ExponentReport:
    window: tuple
    family: str
    sup_phi_over_n: mpmath.mpf
    log_sup_phi_over_n: float
    argsup_phi_over_n: int
    inf_log_phi_over_n: mpmath.mpf
    arginf_log_phi_over_n: int
    sup_loglog_phi_over_log_n: mpmath.mpf | None
    argsup_loglog: int | None
    trend: list = field(default_factory=list)

    def to_json(self):
        def num(x):
            if x is None:
                return None
            return mpmath.nstr(x, 20) if isinstance(x, mpmath.mpf) else x

        return {
            "window": list(self.window),
            "family": self.family,
            "sup_phi_over_n": num(self.sup_phi_over_n),
            "log_sup_phi_over_n": self.log_sup_phi_over_n,
            "argsup_phi_over_n": self.argsup_phi_over_n,
            "inf_log_phi_over_n": num(self.inf_log_phi_over_n),
            "arginf_log_phi_over_n": self.arginf_log_phi_over_n,
            "sup_loglog_phi_over_log_n": num(self.sup_loglog_phi_over_log_n),
            "argsup_loglog": self.argsup_loglog,
            "trend": self.trend,
        }


def growth_exponents(seq: GrowthSequence, n_lo: int, n_hi: int) -> ExponentReport:
    """Window extrema of ``phi(n)/n``, ``log phi(n)/n`` and ``log log phi(n)/log n``.

    Extremal indices are located on the vectorised path and the reported
    values recomputed at 128-bit precision. ``trend`` holds the same
    statistics per decade ``[10^d, 10^(d+1))`` for extrapolation.
    """
    if not 1 <= n_lo < n_hi:
        raise ValueError(f"window ({n_lo}, {n_hi}) must satisfy 1 <= n_lo < n_hi")
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    lp = seq.log_phi_array(ns)
    if seq.family == "table" and np.any(np.diff(lp) < 0):
        raise ValueError("table is not non-decreasing on the window")
    llp = seq.loglog_phi_array(ns)
    logn = np.log(ns)

    log_ratio = lp - logn
    per_n = lp / ns
    with np.errstate(invalid="ignore", divide="ignore"):
        expo = np.where((ns >= 2) & np.isfinite(llp), llp / np.where(ns >= 2, logn, 1.0), np.nan)

    i_sup = int(np.argmax(log_ratio))
    i_inf = int(np.argmin(per_n))
    has_expo = bool(np.any(np.isfinite(expo)))
    i_exp = int(np.nanargmax(expo)) if has_expo else None

    with mpmath.workprec(PRECISION_BITS):
        n_sup, n_inf = int(ns[i_sup]), int(ns[i_inf])
        sup_ratio = mpmath.exp(seq.log_phi(n_sup) - mpmath.log(n_sup))
        inf_per_n = seq.log_phi(n_inf) / n_inf
        if has_expo:
            n_exp = int(ns[i_exp])
            sup_expo = _mp_exponent(seq, n_exp, llp[i_exp])
        else:
            n_exp, sup_expo = None, None

    trend = []
    d = int(math.floor(math.log10(n_lo)))
    while 10 ** d <= n_hi:
        lo, hi = max(10 ** d, n_lo), min(10 ** (d + 1) - 1, n_hi)
        sl = slice(lo - n_lo, hi - n_lo + 1)
        if hi > lo:
            seg_expo = expo[sl]
            j_inf = int(np.argmin(per_n[sl]))
            trend.append({
                "decade": d,
                "n_lo": lo,
                "n_hi": hi,
                "log_sup_phi_over_n": float(np.max(log_ratio[sl])),
                "inf_log_phi_over_n": float(per_n[sl][j_inf]),
                "arginf_log_phi_over_n": lo + j_inf,
                "sup_loglog_over_log_n": (float(np.nanmax(seg_expo))
                                          if np.any(np.isfinite(seg_expo)) else None),
                "end_loglog_over_n": float(llp[sl][-1] / hi) if np.isfinite(llp[sl][-1]) else None,
            })
        d += 1

    return ExponentReport(
        window=(n_lo, n_hi),
        family=seq.family,
        sup_phi_over_n=sup_ratio,
        log_sup_phi_over_n=float(log_ratio[i_sup]),
        argsup_phi_over_n=n_sup,
        inf_log_phi_over_n=inf_per_n,
        arginf_log_phi_over_n=n_inf,
        sup_loglog_phi_over_log_n=sup_expo,
        argsup_loglog=n_exp,
        trend=trend,
    )


def _mp_exponent(seq, n, fallback_loglog):
    lp = seq.log_phi(n)
    if mpmath.isinf(lp) or lp <= 0:
        return mpmath.mpf(fallback_loglog) / mpmath.log(n)
    return mpmath.log(lp) / mpmath.log(n)


# ---------------------------------------------------------------------------
# classifier


STATUSES = ("ruled_out_sublinear", "ruled_out_superexponential", "passes_necessary")

RULES = {
    "ruled_out_sublinear": "lower growth: full dimension needs limsup phi(n)/n = inf "
                           "(bounded averages confine digits to a set of dimension < 1)",
    "ruled_out_superexponential": "upper growth: full dimension needs liminf log phi(n)/n = 0; "
                                  "otherwise the set sits inside {a_n >= B^n i.o.} of dimension s_B "
                                  "(1/(1+b) when B is infinite)",
    "passes_necessary": "both growth conditions hold; this is necessary, not sufficient",
}


def trend_hints(report: ExponentReport) -> AsymptoticHints:
    """Best-effort limits read off the per-decade trend. Not a certificate."""
    trend = [t for t in report.trend if t["n_hi"] > t["n_lo"]]
    if not trend:
        return AsymptoticHints(source="trend")
    last = trend[-1]

    if len(trend) >= 2:
        growth = last["log_sup_phi_over_n"] - trend[-2]["log_sup_phi_over_n"]
        limsup = math.inf if growth > DIVERGENCE_TOL else math.exp(last["log_sup_phi_over_n"])
    else:
        limsup = math.exp(last["log_sup_phi_over_n"])

    ys = [t["inf_log_phi_over_n"] for t in trend[-3:]]
    if any(math.isinf(v) for v in ys) or (
            len(ys) >= 2 and ys[-1] > 1.0 and all(b > 2.0 * a > 0 for a, b in zip(ys, ys[1:]))):
        liminf = math.inf
    elif len(trend) >= 2:
        # secant slope of log phi through the lower envelope; blind to constant factors
        (n1, y1), (n2, y2) = [(t["arginf_log_phi_over_n"], t["inf_log_phi_over_n"]) for t in trend[-2:]]
        liminf = (n2 * y2 - n1 * y1) / (n2 - n1) if n2 != n1 else y2
    else:
        liminf = ys[-1]
    if liminf < ZERO_TOL:
        liminf = 0.0

    loglog_rate = None
    if liminf == math.inf:
        ends = [(t["n_hi"], t["end_loglog_over_n"]) for t in trend[-2:] if t["end_loglog_over_n"] is not None]
        if len(ends) == 2:
            (n1, y1), (n2, y2) = ends
            # fit a + c/n through two points
            c = (y1 - y2) / (1.0 / n1 - 1.0 / n2)
            loglog_rate = y2 - c / n2
        elif ends:
            loglog_rate = ends[-1][1]

    expo = last["sup_loglog_over_log_n"]
    return AsymptoticHints(limsup, liminf, loglog_rate, expo, source="trend")


@dataclass
class ClassifierVerdict:
    status: str
    cited_rule: str
    dimension_upper_bound: float | None
    certified: bool
    hints_used: dict
    loglog_exponent: float | None = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "status": self.status,
            "cited_rule": self.cited_rule,
            "dimension_upper_bound": self.dimension_upper_bound,
            "certified": self.certified,
            "hints_used": self.hints_used,
            "loglog_exponent": self.loglog_exponent,
            "details": self.details,
        }


def _merge(report, extrapolated):
    base = trend_hints(report)
    merged, sources = {}, {}
    for name in AsymptoticHints.FIELDS:
        v = getattr(extrapolated, name) if extrapolated is not None else None
        if v is not None:
            merged[name], sources[name] = v, extrapolated.source
        else:
            merged[name], sources[name] = getattr(base, name), "trend"
    return merged, sources


def classify_necessary(report: ExponentReport, extrapolated: AsymptoticHints | None = None,
                       solver_cfg=None) -> ClassifierVerdict:
    """Apply the two necessary conditions for a full-dimensional level set.

    ``extrapolated`` carries asserted limits (from a family or the user); any
    missing field falls back to the window trend, and the verdict is marked
    ``certified`` only when every limit it used came from hints.
    """
    from .dimension import cv_gap, ww_dimension

    h, src = _merge(report, extrapolated)
    sup_ratio = h["limsup_phi_over_n"]
    log_B = h["liminf_log_phi_over_n"]
    for name in ("limsup_phi_over_n", "liminf_log_phi_over_n"):
        if h[name] is not None and h[name] < 0:
            raise ValueError(f"hint {name}={h[name]} must be >= 0")
    if sup_ratio is not None and sup_ratio < math.inf and log_B is not None and log_B > 0:
        raise ValueError("contradictory hints: limsup phi(n)/n is finite but "
                         "liminf log phi(n)/n is positive")
    expo = h["limsup_loglog_phi_over_log_n"]
    used = {k: ("inf" if v == math.inf else v) for k, v in h.items()}

    def certified(*names):
        return all(src[n] != "trend" for n in names)

    if sup_ratio is not None and sup_ratio < math.inf:
        return ClassifierVerdict(
            "ruled_out_sublinear", RULES["ruled_out_sublinear"], None,
            certified("limsup_phi_over_n"), used, expo,
            {"cv_gap_leading_term": cv_gap(sup_ratio)})

    if log_B is not None and log_B > 0:
        names = ["limsup_phi_over_n", "liminf_log_phi_over_n"]
        if log_B > 700:  # B too large for a float; the B = inf rule applies
            log_B = math.inf
        if math.isinf(log_B):
            rate = h["liminf_loglog_phi_over_n"]
            names.append("liminf_loglog_phi_over_n")
            bound = None if rate is None else ww_dimension("inf", math.exp(rate)).value
            details = {"B": "inf", "b": None if rate is None else math.exp(rate)}
        else:
            B = math.exp(log_B)
            bound = ww_dimension(B, solver_cfg=solver_cfg).value
            details = {"B": B}
        return ClassifierVerdict(
            "ruled_out_superexponential", RULES["ruled_out_superexponential"], bound,
            certified(*names), used, expo, details)

    return ClassifierVerdict(
        "passes_necessary", RULES["passes_necessary"], None,
        certified("limsup_phi_over_n", "liminf_log_phi_over_n"), used, expo,
        {"loglog_exponent_below_half": None if expo is None else expo < 0.5})
