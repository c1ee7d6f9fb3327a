"""Digit words for the explicit Cantor-type sets and the maps between them.

Pinned positions follow a closed formula (floored, and clamped at 1 so they
are valid partial quotients); the remaining positions are free digits in
``{1..M}`` filled by a policy.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import mpmath
import numpy as np

from .cf import Word, as_word, digit_stats
from .errors import BudgetExceeded, HypothesisNotMet
from .growth import GrowthSequence, t_count  # noqa: F401

KINDS = ("h_m", "e_m_alpha", "tracking", "perturbed", "e_bc")
POLICIES = ("all_ones", "random_uniform", "enumerate")

DEFAULT_MAX_DIGITS = 10**5

_REQUIRED = {
    "h_m": {"M", "beta", "N"},
    "e_m_alpha": {"M", "alpha"},
    "tracking": {"phi"},
    "perturbed": {"M"},
    "e_bc": {"b", "c"},
}
_OPTIONAL = {"tracking": {"cap"}}


@dataclass(frozen=True)
class ConstructionSpec:
    kind: str
    params: dict
    policy: str = "all_ones"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind={self.kind!r} not in {KINDS}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy={self.policy!r} not in {POLICIES}")
        missing = _REQUIRED[self.kind] - set(self.params)
        extra = set(self.params) - _REQUIRED[self.kind] - _OPTIONAL.get(self.kind, set())
        if missing or extra:
            raise ValueError(f"{self.kind} parameters: missing {sorted(missing)}, unknown {sorted(extra)}")
        p = self.params
        if "M" in p and (not isinstance(p["M"], int) or p["M"] < 1):
            raise ValueError(f"M={p['M']!r} must be an integer >= 1")
        if "N" in p and (not isinstance(p["N"], int) or p["N"] < 1):
            raise ValueError(f"N={p['N']!r} must be an integer >= 1")
        if "beta" in p and not 0 <= float(p["beta"]) < 1:
            raise ValueError(f"beta={p['beta']} must lie in [0, 1)")
        if "alpha" in p and not float(p["alpha"]) > 0:
            raise ValueError(f"alpha={p['alpha']} must be > 0")
        for name in ("b", "c"):
            if name in p and not float(p[name]) > 1:
                raise ValueError(f"{name}={p[name]} must be > 1")
        if self.policy == "random_uniform" and self.seed is None:
            raise ValueError("random_uniform needs an explicit seed")

    def to_json(self):
        return {"kind": self.kind, "params": self.params, "policy": self.policy, "seed": self.seed}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], dict(data.get("params", {})),
                   data.get("policy", "all_ones"), data.get("seed"))


@dataclass(frozen=True)
class PinnedWord:
    """A word with formula-forced positions ``pinned`` (1-based index -> digit)."""

    word: Word
    pinned: dict
    free: dict = field(default_factory=dict)  # 1-based index -> (lo, hi)

    def __len__(self):
        return len(self.word)

    def to_json(self):
        return {
            "word": [str(a) for a in self.word],
            "pinned": {str(i): str(a) for i, a in sorted(self.pinned.items())},
            "free": {str(i): list(r) for i, r in sorted(self.free.items())},
        }


@dataclass(frozen=True)
class TrackedWord:
    word: Word
    capped: bool = False


def _floor_clamped(x) -> int:
    return max(1, int(mpmath.floor(x)))


def _check_digits(index, log10_value, max_digits):
    if log10_value > max_digits:
        raise BudgetExceeded(
            "max_digits", f"pinned digit at index {index} has ~{int(log10_value) + 1} decimal digits "
                          f"(max_digits={max_digits})")


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _h_m_pins(p, n, max_digits):
    N = p["N"]
    pins = {}
    k = 2
    while k ** N <= n:
        log10_top = float(k ** N) ** float(p["beta"]) / math.log(10)
        _check_digits(k ** N, log10_top, max_digits)
        with mpmath.workdps(int(log10_top) + 30):
            beta = _mp(p["beta"])
            hi = mpmath.exp(mpmath.mpf(k ** N) ** beta)
            lo = mpmath.exp(mpmath.mpf((k - 1) ** N) ** beta)
            pins[k ** N] = _floor_clamped(hi - lo)
        k += 1
    return pins


def _e_m_alpha_pins(p, n, max_digits):
    pins = {}
    l = 2
    while l * l <= n:
        with mpmath.workdps(40):
            pins[l * l] = _floor_clamped(4 * _mp(p["alpha"]) * l * mpmath.log(l))
        l += 1
    return pins


def _e_bc_pins(p, n, max_digits):
    b, c = p["b"], p["c"]
    pins = {}
    for k in range(1, n + 1):
        log10_val = float(b) ** k * math.log10(float(c))
        _check_digits(k, log10_val, max_digits)
        if isinstance(b, int) and isinstance(c, int):
            pins[k] = c ** (b ** k)
        else:
            with mpmath.workdps(int(log10_val) + 30):
                pins[k] = _floor_clamped(mpmath.power(mpmath.mpf(c), mpmath.power(mpmath.mpf(b), k)))
    return pins


def pinned_digits(spec: ConstructionSpec, n: int, max_digits=DEFAULT_MAX_DIGITS) -> dict:
    """Formula digits of a construction at indices ``<= n``."""
    if spec.kind == "h_m":
        return _h_m_pins(spec.params, n, max_digits)
    if spec.kind == "e_m_alpha":
        return _e_m_alpha_pins(spec.params, n, max_digits)
    if spec.kind == "e_bc":
        return _e_bc_pins(spec.params, n, max_digits)
    if spec.kind == "tracking":
        seq = GrowthSequence.from_json(spec.params["phi"])
        tracked = track_phi(seq, n, spec.params.get("cap"))
        return dict(enumerate(tracked.word, 1))
    return {}


def _free_slots(spec, n, pins):
    M = spec.params.get("M", 1)
    return {i: (1, M) for i in range(1, n + 1) if i not in pins}


def _assemble(spec, n, pins, free, values):
    digits = [0] * n
    for i, a in pins.items():
        digits[i - 1] = a
    for i, a in zip(sorted(free), values):
        digits[i - 1] = a
    word = Word(digits)
    if spec.kind == "perturbed":
        word = perturb(word)
        pins = {i: word[i - 1] for i in perturbation_indices(n)}
        free = {i: r for i, r in free.items() if i not in pins}
    return PinnedWord(word, pins, free)


def generate(spec: ConstructionSpec, n: int, max_digits=DEFAULT_MAX_DIGITS) -> PinnedWord:
    """Length-``n`` word of the construction with free digits filled by the spec's policy."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.policy == "enumerate":
        raise ValueError("policy 'enumerate' yields many words; use generate_all")
    pins = pinned_digits(spec, n, max_digits)
    free = _free_slots(spec, n, pins)
    if spec.policy == "all_ones":
        values = [1] * len(free)
    else:
        rng = np.random.default_rng(spec.seed)
        values = [int(v) for v in rng.integers(1, spec.params.get("M", 1) + 1, size=len(free))]
    return _assemble(spec, n, pins, free, values)


def generate_all(spec: ConstructionSpec, n: int, max_digits=DEFAULT_MAX_DIGITS) -> Iterator[PinnedWord]:
    """Every word of the construction at length ``n`` (free digits enumerated lexicographically)."""
    pins = pinned_digits(spec, n, max_digits)
    free = _free_slots(spec, n, pins)
    ranges = [range(lo, hi + 1) for lo, hi in (free[i] for i in sorted(free))]
    for values in itertools.product(*ranges):
        yield _assemble(spec, n, pins, free, values)


def _rounded_targets(seq: GrowthSequence, n: int) -> list[int]:
    """``floor(phi(m) + 1/2)`` for m = 1..n, exact where floats could mislead."""
    ns = np.arange(1, n + 1)
    lp = seq.log_phi_array(ns)
    out = []
    for m, v in zip(ns.tolist(), lp.tolist()):
        if seq.phi_exact(m) is None and v < 27.0:  # phi < 2^39: float rounding is safe
            x = math.exp(v)
            frac = x - math.floor(x)
            if abs(frac - 0.5) > 1e-6:
                out.append(int(math.floor(x + 0.5)))
                continue
        out.append(seq.round_phi(m))
    return out


def track_phi(seq: GrowthSequence, n: int, cap: int | None = None) -> TrackedWord:
    """Greedy digits whose running sums follow ``phi``.

    ``a_m = max(1, round(phi(m)) - s_{m-1})``. With ``cap`` each digit is cut
    at ``cap`` and the word is flagged, since tracking is then not guaranteed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ns = np.arange(n // 2 + 1, n + 1)
    if np.all(seq.log_phi_array(ns) < np.log(ns)):
        raise HypothesisNotMet(
            "s_n>=n", f"phi(m) < m for every m in ({n // 2}, {n}]; digit sums cannot follow phi")
    digits = []
    total = 0
    capped = False
    for target in _rounded_targets(seq, n):
        a = max(1, target - total)
        if cap is not None and a > cap:
            a, capped = cap, True
        digits.append(a)
        total += a
    return TrackedWord(Word(digits), capped)


def perturbation_indices(n: int, first_level: int = 1) -> list[int]:
    """Indices ``l^l <= n`` for l = first_level, first_level + 1, ..."""
    out = []
    l = first_level
    while l ** l <= n:
        out.append(l ** l)
        l += 1
    return out


def perturb(w, first_level: int = 1) -> Word:
    """Add ``l^(l+1) - (l-1)^l`` to the digit at index ``l^l`` for every l >= first_level.

    With the default ``first_level=1`` (index 1 gets +1) the increments
    telescope: through index ``L^L`` the digit sum grows by exactly
    ``L^(L+1)``, the offset of the irregular growth family there.
    """
    w = as_word(w)
    if first_level < 1:
        raise ValueError("first_level must be >= 1")
    if len(w) < first_level ** first_level:
        raise ValueError(f"perturb needs a word of length >= {first_level ** first_level}")
    digits = list(w)
    for l in range(first_level, first_level + len(perturbation_indices(len(w), first_level))):
        digits[l ** l - 1] += l ** (l + 1) - (l - 1) ** l
    return Word(digits)


def delete_pinned(pw: PinnedWord) -> Word:
    """The word with every pinned position removed."""
    return Word(a for i, a in enumerate(pw.word, 1) if i not in pw.pinned)


def pinned_count(pw: PinnedWord) -> int:
    """Number of pinned positions; compare :func:`t_count`, which also counts slot 1."""
    return len(pw.pinned)


def tracking_residuals(word, seq: GrowthSequence, n_lo: int = 1):
    """``s_n / phi(n) - 1`` for n >= n_lo, computed in log space."""
    s = np.array([float(x) for x in digit_stats(word).s], dtype=np.float64)
    ns = np.arange(1, len(s) + 1)
    lp = seq.log_phi_array(ns)
    return (np.exp(np.log(s) - lp) - 1.0)[n_lo - 1:]
