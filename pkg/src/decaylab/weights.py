"""Weight-function algebra and decay-theorem constants.

Three weight regimes drive the decay machinery:

* Log:          f(s) = ln^beta(b+s)/(b+s), companions f1, f2, phi = ln^(beta+1)(b+s)
* Poly:         powers of (1+s), used with argument s = q(x)+t
* CompactPoly:  powers of (R+s), used with argument s = t (compact initial data)

The admissible log offset b is enormous for realistic parameters (ln b in the
thousands), so every Log-regime evaluation runs in log space: families store
ln b, ln(b+s) is formed with logaddexp, and values are exponentiated last.
Underflow to 0.0 is accepted; overflow raises WeightOverflowError.

Constant packs for the three decay regimes (log / polynomial / compact) carry
the damping exponent r, dimension d, slack delta0, target exponent gamma and
the derived coefficients k, k1, k2, p, with their defining algebraic
identities enforced at construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Regime", "WeightKind", "WeightFamily", "TheoremConstants", "BValue",
    "WeightOverflowError", "AdmissibilityError", "InequalityCheck",
    "WeightInequalityReport", "eval_q", "eval_weight", "compute_b",
    "compute_constants", "verify_weight_inequalities",
]

_LN_MAX = math.log(np.finfo(float).max)  # ~709.78


class Regime(enum.Enum):
    LOG = "log"
    POLY = "poly"
    COMPACT_POLY = "compact_poly"


class WeightKind(enum.Enum):
    """Which member of the weight family to evaluate."""
    F = "f"
    F_PRIME = "f_prime"
    F_SECOND = "f_second"
    F1 = "f1"
    F1_PRIME = "f1_prime"
    F2 = "f2"
    F2_PRIME = "f2_prime"
    PHI = "phi"


class WeightOverflowError(OverflowError):
    """A weight value exceeded the double range; carries the log value."""

    def __init__(self, msg, log_value=None):
        super().__init__(msg)
        self.log_value = log_value


class AdmissibilityError(ValueError):
    """A parameter violates the hypotheses of the selected decay regime."""


@dataclass(frozen=True)
class BValue:
    """Result of the ln b max-formula.

    ``b`` is None when exp(ln_b) is not representable; ``overflow`` flags it.
    """
    ln_b: float
    overflow: bool
    terms: tuple[float, ...]

    @property
    def b(self) -> float | None:
        return None if self.overflow else math.exp(self.ln_b)


def compute_b(r: float, gamma: float, delta0: float,
              variant: str = "lemma") -> BValue:
    """ln b as the max of the five admissibility terms.

    ``variant`` selects the coefficient of the final term: 'theorem1' uses 4,
    'lemma' uses 8.  The lemma value dominates, so it satisfies both
    statements and is the default everywhere downstream.
    """
    if not r > 1.0:
        raise AdmissibilityError(f"damping exponent r must exceed 1, got {r}")
    if not gamma > 0.0:
        raise AdmissibilityError(f"gamma must be positive, got {gamma}")
    if not 0.0 < delta0 < 1.0:
        raise AdmissibilityError(f"delta0 must lie in (0, 1), got {delta0}")
    if variant not in ("theorem1", "lemma"):
        raise ValueError(f"unknown variant {variant!r}")
    beta = gamma - 1.0
    coeff = 4.0 if variant == "theorem1" else 8.0
    terms = (
        (2.0 * (r + 1.0)) ** (r + 1.0),
        beta,
        (beta + math.sqrt(abs(beta * beta + 4.0 * beta))) / 2.0,
        (beta + 1.0 - r) / (r - 1.0),
        (coeff * (r + 1.0) * (beta + 1.0) / (1.0 - delta0)) ** (r + 1.0),
    )
    ln_b = max(terms)
    return BValue(ln_b=ln_b, overflow=ln_b > _LN_MAX, terms=terms)


@dataclass(frozen=True)
class WeightFamily:
    """One weight regime with its parameters bound.

    ``r`` is only needed for the f2 members (their exponents depend on the
    damping power); leave it None if f2 is never evaluated.  ``practical``
    marks a Log family whose b was chosen for desk-scale visibility rather
    than from the admissibility formula.
    """
    regime: Regime
    beta: float
    ln_b: float | None = None           # Log only
    R: float | None = None              # CompactPoly only
    r: float | None = None
    practical: bool = False

    def __post_init__(self):
        if not self.beta > -1.0:
            raise AdmissibilityError(f"beta must exceed -1, got {self.beta}")
        if self.regime is Regime.LOG:
            if self.ln_b is None:
                raise ValueError("Log family requires ln_b")
            if self.ln_b < 1.0:
                raise AdmissibilityError(
                    f"Log family needs b >= e, i.e. ln b >= 1; got ln b = {self.ln_b}")
        elif self.regime is Regime.POLY:
            if not -1.0 < self.beta <= 0.0:
                raise AdmissibilityError(
                    f"Poly regime requires -1 < beta <= 0, got {self.beta}")
        elif self.regime is Regime.COMPACT_POLY:
            if not -1.0 < self.beta <= 0.0:
                raise AdmissibilityError(
                    f"CompactPoly regime requires -1 < beta <= 0, got {self.beta}")
            if self.R is None or self.R < 1.0:
                raise AdmissibilityError(
                    f"CompactPoly regime requires R >= 1, got {self.R}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def log_honest(r: float, gamma: float, delta0: float,
                   variant: str = "lemma") -> "WeightFamily":
        """Log family with ln b from the admissibility max-formula."""
        bv = compute_b(r, gamma, delta0, variant)
        return WeightFamily(Regime.LOG, beta=gamma - 1.0, ln_b=bv.ln_b, r=r)

    @staticmethod
    def log_practical(gamma: float, b: float, r: float | None = None) -> "WeightFamily":
        """Log family with a hand-picked b >= e; outside the admissible range."""
        if b < math.e:
            raise AdmissibilityError(f"practical b must be >= e, got {b}")
        return WeightFamily(Regime.LOG, beta=gamma - 1.0, ln_b=math.log(b),
                            r=r, practical=True)

    @staticmethod
    def poly(gamma: float, r: float | None = None) -> "WeightFamily":
        return WeightFamily(Regime.POLY, beta=gamma - 1.0, r=r)

    @staticmethod
    def compact(gamma: float, R: float, r: float | None = None) -> "WeightFamily":
        return WeightFamily(Regime.COMPACT_POLY, beta=gamma - 1.0, R=R, r=r)

    # -- evaluation --------------------------------------------------------

    def ln_bs(self, s):
        """ln(b+s), stable for arbitrarily large ln b."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            ln_s = np.log(s)
        return np.logaddexp(self.ln_b, ln_s)

    def base_offset(self) -> float:
        """Additive offset of the regime's argument: b, 1, or R."""
        if self.regime is Regime.LOG:
            if self.ln_b > _LN_MAX:
                raise WeightOverflowError("b is not representable", self.ln_b)
            return math.exp(self.ln_b)
        if self.regime is Regime.POLY:
            return 1.0
        return self.R


def eval_q(x) -> np.ndarray | float:
    """q(x) = sqrt(1 + |x|^2), evaluated without overflow for huge |x|.

    A scalar is a 1D point; a tuple/list is one point in R^d; an ndarray is
    an array of 1D points (ndim 1) or of R^d points along the last axis.
    """
    if isinstance(x, (tuple, list)):
        return float(np.hypot(1.0, math.hypot(*[float(c) for c in x])))
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return float(np.hypot(1.0, x))
    if x.ndim >= 2:
        r = np.sqrt(np.sum(x * x, axis=-1))
    else:
        r = np.abs(x)
    return np.hypot(1.0, r)


def _require_r(family: WeightFamily, kind: WeightKind) -> float:
    if family.r is None:
        raise ValueError(f"{kind.value} requires the damping exponent r bound "
                         "into the weight family")
    return family.r


def _signed_exp(sign, log_mag):
    """sign * exp(log_mag); underflow to 0, overflow raises."""
    log_mag = np.asarray(log_mag, dtype=float)
    if np.any(log_mag > _LN_MAX):
        raise WeightOverflowError("weight value exceeds double range",
                                  float(np.max(log_mag)))
    with np.errstate(over="raise"):
        return sign * np.exp(log_mag)


def eval_weight(family: WeightFamily, which: WeightKind | str, s):
    """Evaluate a weight-family member at s >= 0 (scalar or array).

    All derivatives are exact closed forms.  Log-regime members are assembled
    in log space; magnitudes below the double range come back as 0.0.
    """
    if isinstance(which, str):
        which = WeightKind(which)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0):
        raise ValueError("weight argument s must be nonnegative")
    scalar = np.isscalar(s) or s_arr.ndim == 0

    if family.regime is Regime.LOG:
        out = _eval_log(family, which, s_arr)
    else:
        out = _eval_power(family, which, s_arr)
    return float(out) if scalar else out


def _eval_log(family: WeightFamily, which: WeightKind, s):
    beta = family.beta
    L = family.ln_bs(s)          # ln(b+s) >= 1
    lnL = np.log(L)
    if which is WeightKind.F:
        return _signed_exp(1.0, beta * lnL - L)
    if which is WeightKind.F_PRIME:
        # f' = L^inner * (beta - L) / (b+s)^2, inner = beta-1
        p = beta - L
        return _signed_exp(np.sign(p), (beta - 1.0) * lnL + _ln_abs(p) - 2.0 * L)
    if which is WeightKind.F_SECOND:
        # f'' = L^(beta-2) * (2L^2 - 3 beta L + beta(beta-1)) / (b+s)^3
        p = 2.0 * L * L - 3.0 * beta * L + beta * (beta - 1.0)
        return _signed_exp(np.sign(p), (beta - 2.0) * lnL + _ln_abs(p) - 3.0 * L)
    if which is WeightKind.F1:
        return _signed_exp(1.0, beta * lnL - 2.0 * L)
    if which is WeightKind.F1_PRIME:
        # f1' = L^(beta-1) * (beta - 2L) / (b+s)^3
        p = beta - 2.0 * L
        return _signed_exp(np.sign(p), (beta - 1.0) * lnL + _ln_abs(p) - 3.0 * L)
    if which is WeightKind.F2:
        r = _require_r(family, which)
        return _signed_exp(1.0, (beta - r + 1.0) * lnL - r * L)
    if which is WeightKind.F2_PRIME:
        r = _require_r(family, which)
        # f2' = L^(beta-r) * ((beta-r+1) - rL) / (b+s)^(r+1)
        p = (beta - r + 1.0) - r * L
        return _signed_exp(np.sign(p),
                           (beta - r) * lnL + _ln_abs(p) - (r + 1.0) * L)
    if which is WeightKind.PHI:
        return _signed_exp(1.0, (beta + 1.0) * lnL)
    raise ValueError(which)


def _eval_power(family: WeightFamily, which: WeightKind, s):
    """Pure power families: base (1+s) for Poly, (R+s) for CompactPoly."""
    beta = family.beta
    base = (1.0 if family.regime is Regime.POLY else family.R) + s
    if which is WeightKind.F:
        return base ** beta
    if which is WeightKind.F_PRIME:
        return beta * base ** (beta - 1.0)
    if which is WeightKind.F_SECOND:
        return beta * (beta - 1.0) * base ** (beta - 2.0)
    if which is WeightKind.F1:
        return base ** (beta - 1.0)
    if which is WeightKind.F1_PRIME:
        return (beta - 1.0) * base ** (beta - 2.0)
    if which is WeightKind.F2:
        r = _require_r(family, which)
        return base ** (beta - r + 1.0)
    if which is WeightKind.F2_PRIME:
        r = _require_r(family, which)
        return (beta - r + 1.0) * base ** (beta - r)
    if which is WeightKind.PHI:
        return base ** (beta + 1.0)
    raise ValueError(which)


def _ln_abs(p):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(p))


# ---------------------------------------------------------------------------
# theorem constant packs
# ---------------------------------------------------------------------------

def sobolev_p(r: float, d: int) -> float:
    return 2.0 * (r + 1.0) if d <= 3 else 2.0 * d / (d - 2.0)


def _poly_k(r: float, delta0: float, half: bool) -> float:
    """Positive root of the k-quadratic.

    ``half=True`` uses the (1/2 - delta0) slack (polynomial-weight regime),
    ``half=False`` the (1 - delta0) slack (compact-support regime):

        5 k^2 r (r+1) - k B + 8 (1+delta0) c r = 0,
        B = 5 r^2 (1+delta0) + 8 c (r+1) + 8 (8/3)^r (1+delta0),
        c = 1/2 - delta0  or  1 - delta0.
    """
    c = (0.5 - delta0) if half else (1.0 - delta0)
    B = (5.0 * (1.0 + delta0) * r * r
         + 8.0 * c * (r + 1.0)
         + 8.0 * (8.0 / 3.0) ** r * (1.0 + delta0))
    disc = B * B - 160.0 * (1.0 + delta0) * c * r * r * (r + 1.0)
    if disc < 0.0:
        raise AdmissibilityError(
            f"k-quadratic discriminant negative (r={r}, delta0={delta0})")
    return (B + math.sqrt(disc)) / (10.0 * r * (r + 1.0))


@dataclass(frozen=True)
class TheoremConstants:
    """Constant pack of one decay regime, identities checked at construction."""
    theorem: str                 # 'T1' | 'T2' | 'T3'
    r: float
    d: int
    delta0: float
    gamma: float
    k: float
    k1: float
    k2: float
    p: float
    ln_b: float | None = None    # T1 only
    b_overflow: bool = False
    gamma_bounds: dict = field(default_factory=dict)

    @property
    def beta(self) -> float:
        return self.gamma - 1.0

    def to_dict(self) -> dict:
        d = {
            "theorem": self.theorem, "r": self.r, "d": self.d,
            "delta0": self.delta0, "gamma": self.gamma, "beta": self.beta,
            "k": self.k, "k1": self.k1, "k2": self.k2, "p": self.p,
        }
        if self.theorem == "T1":
            d["ln_b"] = self.ln_b
            d["b_overflow"] = self.b_overflow
        if self.gamma_bounds:
            d["gamma_bounds"] = dict(self.gamma_bounds)
        return d


# k1 default: large enough for every lemma-side sign condition at eps0 >= 0.1
_K1_FLOOR = 8.0 * (2.0 / 0.1 + 1.0)


def compute_constants(theorem: str, r: float, d: int, delta0: float,
                      gamma: float, k1_seed: float = 0.0) -> TheoremConstants:
    """Build the constant pack for T1/T2/T3, rejecting inadmissible parameters.

    Rejections name the violated bound.  k2 follows the proof-side quadratic:
    denominator (5kr - 8(1/2-delta0)) for T2 and (5kr - 8(1-delta0)) for T3.
    """
    if d < 1:
        raise AdmissibilityError(f"dimension must be >= 1, got {d}")
    r_sup = 1.0 + 2.0 / d
    if theorem == "T1":
        if not 1.0 < r <= r_sup:
            raise AdmissibilityError(
                f"T1 requires 1 < r <= 1+2/d = {r_sup}, got r = {r}")
        if not 0.0 < delta0 < 1.0:
            raise AdmissibilityError(f"T1 requires 0 < delta0 < 1, got {delta0}")
        bounds = {}
        if r == r_sup:
            bounds["2/(r-1)"] = 2.0 / (r - 1.0)
        _check_gamma(gamma, bounds)
        bv = compute_b(r, gamma, delta0, "lemma")
        k = (1.0 - delta0) / (2.0 * gamma)
        # the log-regime X(t) carries unit coefficient on its |u|^{r+1} term
        k2 = 1.0
    elif theorem in ("T2", "T3"):
        if not 1.0 < r < r_sup:
            raise AdmissibilityError(
                f"{theorem} requires 1 < r < 1+2/d = {r_sup}, got r = {r}")
        half = theorem == "T2"
        d0_sup = 0.5 if half else 1.0
        if not 0.0 < delta0 < d0_sup:
            raise AdmissibilityError(
                f"{theorem} requires 0 < delta0 < {d0_sup}, got {delta0}")
        k = _poly_k(r, delta0, half)
        c = (0.5 - delta0) if half else (1.0 - delta0)
        denom = 5.0 * k * r - 8.0 * c
        if denom <= 0.0:
            raise AdmissibilityError(f"{theorem}: 5kr - 8c must be positive")
        k2 = 8.0 * k * (1.0 + delta0) / ((r + 1.0) * denom)
        p = sobolev_p(r, d)
        bounds = {
            f"({'1/2' if half else '1'}-delta0)/k": c / k,
            "(d+2-dr)/(r-1)": (d + 2.0 - d * r) / (r - 1.0),
            "(p-2r)/(r-1)": (p - 2.0 * r) / (r - 1.0),
        }
        _check_gamma(gamma, bounds)
        bv = None
    else:
        raise ValueError(f"unknown theorem {theorem!r}")

    k1 = max(k1_seed, _K1_FLOOR)
    consts = TheoremConstants(
        theorem=theorem, r=r, d=d, delta0=delta0, gamma=gamma,
        k=k, k1=k1, k2=k2, p=sobolev_p(r, d),
        ln_b=None if bv is None else bv.ln_b,
        b_overflow=False if bv is None else bv.overflow,
        gamma_bounds=bounds,
    )
    _check_identities(consts)
    return consts


def _check_gamma(gamma: float, bounds: dict):
    if not gamma > 0.0:
        raise AdmissibilityError(f"gamma must be positive, got {gamma}")
    violated = [f"gamma < {name} = {val}" for name, val in bounds.items()
                if not gamma < val]
    if violated:
        raise AdmissibilityError(
            f"gamma = {gamma} violates " + " and ".join(violated))


def _check_identities(c: TheoremConstants):
    if not (c.k > 0.0 and c.k1 > 0.0 and c.k2 > 0.0):
        raise AdmissibilityError("k, k1, k2 must all be positive")
    r, d0 = c.r, c.delta0
    target = d0 * r / (r + 1.0)
    lhs = c.k - r / (r + 1.0) - c.k2 * (8.0 / 3.0) ** r
    if c.theorem == "T2":
        if abs(lhs - target) > 1e-10 * max(1.0, abs(target)):
            raise AdmissibilityError(
                f"T2 identity k - r/(r+1) - k2 (8/3)^r = delta0 r/(r+1) "
                f"violated: {lhs} vs {target}")
    elif c.theorem == "T3":
        if lhs < target - 1e-12:
            raise AdmissibilityError(
                f"T3 inequality k - r/(r+1) - k2 (8/3)^r >= delta0 r/(r+1) "
                f"violated: {lhs} < {target}")


def k_quadratic_residual(k: float, r: float, delta0: float, half: bool) -> float:
    """Residual of the defining k-quadratic, normalized by its largest term."""
    c = (0.5 - delta0) if half else (1.0 - delta0)
    B = (5.0 * (1.0 + delta0) * r * r + 8.0 * c * (r + 1.0)
         + 8.0 * (8.0 / 3.0) ** r * (1.0 + delta0))
    terms = (5.0 * k * k * r * (r + 1.0), -k * B, 8.0 * (1.0 + delta0) * c * r)
    return sum(terms) / max(abs(t) for t in terms)


# ---------------------------------------------------------------------------
# lemma-proof inequality verification (Log regime)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    name: str
    passed: bool
    worst_margin: float
    worst_s: float


@dataclass(frozen=True)
class WeightInequalityReport:
    checks: tuple[InequalityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def min_margin(self) -> float:
        return min(c.worst_margin for c in self.checks)


def verify_weight_inequalities(family: WeightFamily, r: float,
                               samples) -> WeightInequalityReport:
    """Pointwise check of the five Log-regime proof inequalities.

    (i)   f'(s) <= 0
    (ii)  f''(s) <= -4 f1'(s)
    (iii) (f')^2 / f <= (1+|beta|) (-f1')
    (iv)  (f1)^2 / f <= -f1'
    (v)   -f2'(s) >= ln^(beta-r+1)(b+s) / (b+s)^(r+1)

    Every inequality shares a positive factor of the form L^a / (b+s)^m with
    L = ln(b+s); the comparison is made on the factored polynomial-in-L forms,
    which stay well scaled even when b itself is far beyond double range.
    Margins are the factored differences normalized by the dominant term;
    a pass is margin >= 0 at every sample.
    """
    if family.regime is not Regime.LOG:
        raise ValueError("weight inequalities are defined for the Log regime")
    s = np.asarray(samples, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("samples must be nonnegative")
    beta = family.beta
    L = family.ln_bs(s)

    # reduced forms: inequality <=> margin >= 0
    margins = {
        # f' <= 0  <=>  L - beta >= 0
        "f_prime_nonpositive": (L - beta) / L,
        # f'' <= -4 f1'  <=>  6L^2 - beta L - beta^2 + beta >= 0
        "f_second_vs_f1_prime":
            (6.0 * L * L - beta * L - beta * beta + beta) / (6.0 * L * L),
        # (f')^2/f <= (1+|beta|)(-f1')  <=>  (1+|b|)(2L-b)L - (L-b)^2 >= 0
        "f_prime_sq_vs_f1_prime":
            ((1.0 + abs(beta)) * (2.0 * L - beta) * L - (L - beta) ** 2)
            / ((1.0 + abs(beta)) * 2.0 * L * L),
        # f1^2/f <= -f1'  <=>  L - beta >= 0
        "f1_sq_vs_f1_prime": (L - beta) / L,
        # -f2' >= L^(beta-but)/(b+s)^(r+1)  <=>  (r-1)L - (beta+1-r) >= 0
        "f2_prime_lower": ((r - 1.0) * L - (beta + 1.0 - r)) / (r * L),
    }
    checks = []
    for name, m in margins.items():
        i = int(np.argmin(m))
        checks.append(InequalityCheck(
            name=name, passed=bool(np.all(m >= 0.0)),
            worst_margin=float(m[i]), worst_s=float(s[i])))
    return WeightInequalityReport(checks=tuple(checks))
