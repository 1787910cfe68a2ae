# File: bumpwall/analysis/bump.py
# ===========================
# BUMP CONDITIONS AND TESTING FUNCTIONALS
# ===========================

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import DYADIC, IntervalRef, StepFn, group_by_length, interval_arrays
from analysis.orlicz import YoungFn, bp_integral, log_average, luxemburg_norms, power_log, power_over_log
from analysis.sparse import CoefSeq, SparseFamily

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.5
DEFAULT_EPSILON = 0.5
# σ-form and product^p agree up to this factor before a warning
EQLOG_BAND = (1.0 / 32.0, 32.0)
LACEY = "lacey"
LI = "li"
ESTLI = "estli"


def dual_exponent(p: float) -> float:
    if p <= 1:
        raise ArgumentError(f"p must exceed 1 (got {p})")
    return p / (p - 1.0)


# ============ YOUNG FAMILIES ============

def alpha_p(p: float, delta: float = DEFAULT_DELTA) -> YoungFn:
    """t^p log^{p−1+δ}(e+t)"""
    return power_log(p, p - 1 + delta)


def beta_pm(p: float, m: int, delta: float = DEFAULT_DELTA) -> YoungFn:
    """t^{p′} log^{(m+1)p′−1+δ}(e+t)"""
    q = dual_exponent(p)
    return power_log(q, (m + 1) * q - 1 + delta)


def gamma_pm(p: float, m: int, delta: float = DEFAULT_DELTA) -> YoungFn:
    """t^{p′} log^{m(p′+δ)}(e+t)"""
    q = dual_exponent(p)
    return power_log(q, m * (q + delta))


def psi_pm(p: float, m: int, eps: float = DEFAULT_EPSILON) -> YoungFn:
    """t^{p′} log^{max((m+1)p′−1, mp′+1)+ε}(e+t)"""
    q = dual_exponent(p)
    return power_log(q, max((m + 1) * q - 1, m * q + 1) + eps)


def _log_pair(p: float, a: float, b: float) -> Tuple[YoungFn, YoungFn]:
    return power_log(p, a), power_log(dual_exponent(p), b)


PRESETS: Dict[str, Callable[[float, int, float, float], Tuple[YoungFn, YoungFn]]] = {
    "ap": lambda p, m, d, e: (power_log(p), power_log(dual_exponent(p))),
    "bump_conjecture": lambda p, m, d, e: (alpha_p(p, d), alpha_p(dual_exponent(p), d)),
    "stco_pair": lambda p, m, d, e: (alpha_p(p, d), beta_pm(p, m, d)),
    "recond": lambda p, m, d, e: (power_log(p), beta_pm(p, m, d)),
    "sepbump_thm": lambda p, m, d, e: (alpha_p(p, d), gamma_pm(p, m, d)),
    "k2": lambda p, m, d, e: (alpha_p(p, d), gamma_pm(p, m, d)),
    "corpc": lambda p, m, d, e: (power_log(p), psi_pm(p, m, e)),
    "necbump": lambda p, m, d, e: (power_log(p), power_log(dual_exponent(p), m * dual_exponent(p))),
    "cruz_moen": lambda p, m, d, e: _log_pair(p, 2 * p - 1 + e, 2 * dual_exponent(p) - 1 + d),
    "b1": lambda p, m, d, e: _log_pair(p, p - 0.5, 2 * dual_exponent(p) - 0.5),
    "b2": lambda p, m, d, e: _log_pair(p, 2 * p - 0.5, dual_exponent(p) - 0.5),
    "b3": lambda p, m, d, e: _log_pair(p, 2 * p - 1, 2 * dual_exponent(p) - 1),
}


@dataclass
class BumpSpec:
    """Young pair (A, B) of [λ, μ]_{A,B}; a preset pins both"""
    A: Optional[YoungFn] = None
    B: Optional[YoungFn] = None
    p: float = 2.0
    m: int = 0
    preset: Optional[str] = None
    delta: float = DEFAULT_DELTA
    eps: float = DEFAULT_EPSILON

    def __post_init__(self):
        dual_exponent(self.p)
        if self.m < 0:
            raise ArgumentError("m must be nonnegative")
        if self.preset is not None:
            if self.preset not in PRESETS:
                raise ArgumentError(f"unknown preset '{self.preset}'")
            self.A, self.B = PRESETS[self.preset](self.p, self.m, self.delta, self.eps)
        if self.A is None or self.B is None:
            raise ArgumentError("bump spec needs a preset or both Young functions")

    def to_dict(self) -> dict:
        return {"A": self.A.label, "B": self.B.label, "p": self.p, "m": self.m, "preset": self.preset}


# ============ BUMP CONSTANTS ============

@dataclass
class BumpReport:
    value: float
    argmax: IntervalRef
    mode: str
    profile: List[dict] = field(default_factory=list)
    products: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"value": self.value, "argmax": self.argmax.to_dict(), "mode": self.mode,
                "profile": self.profile}


def _report(products: np.ndarray, starts: np.ndarray, lengths: np.ndarray, mode: str, cell_width: float) -> BumpReport:
    best = int(np.argmax(products))
    profile = [{"len": length * cell_width, "value": float(products[idx].max())}
               for length, idx in group_by_length(starts, lengths)]
    return BumpReport(float(products[best]), IntervalRef(int(starts[best]), int(lengths[best])),
                      mode, profile, products)


def bump_constant(lam: StepFn, mu: StepFn, spec: BumpSpec, mode: str = DYADIC,
                  budget: Optional[int] = None, within: Optional[IntervalRef] = None) -> BumpReport:
    """sup_Q ‖λ‖_{A,Q}‖μ‖_{B,Q} over enumerated intervals"""
    if np.any(lam.values < 0) or np.any(mu.values < 0):
        raise PreconditionError("bump functions must be nonnegative")
    starts, lengths = interval_arrays(lam.grid, mode, budget, within)
    products = luxemburg_norms(lam, starts, lengths, spec.A) * luxemburg_norms(mu, starts, lengths, spec.B)
    report = _report(products, starts, lengths, mode, lam.grid.cell_width)
    logger.debug("bump %s over %d intervals: %.6g at %s", spec.preset or "custom",
                 starts.size, report.value, report.argmax)
    return report


def weight_pair(u: StepFn, v: StepFn, p: float) -> Tuple[StepFn, StepFn]:
    """(u^{1/p}, v^{−1/p})"""
    if np.any(v.values <= 0):
        raise PreconditionError("v must be positive")
    return u.power(1.0 / p), v.power(-1.0 / p)


def weight_pair_bump(u: StepFn, v: StepFn, spec: BumpSpec, mode: str = DYADIC,
                     budget: Optional[int] = None, within: Optional[IntervalRef] = None) -> BumpReport:
    """[u^{1/p}, v^{−1/p}]_{A,B}"""
    lam, mu = weight_pair(u, v, spec.p)
    return bump_constant(lam, mu, spec, mode, budget, within)


@dataclass
class NecessaryReport:
    bump: BumpReport
    sigma_form: float
    band: Tuple[float, float]
    within_band: bool

    @property
    def value(self) -> float:
        return self.bump.value

    def to_dict(self) -> dict:
        return {**self.bump.to_dict(), "sigma_form": self.sigma_form,
                "band": list(self.band), "within_band": self.within_band}


def necessary_constant(u: StepFn, v: StepFn, p: float, m: int, mode: str = DYADIC,
                       budget: Optional[int] = None) -> NecessaryReport:
    """sup_Q ‖u^{1/p}‖_{L^p,Q}‖v^{−1/p}‖_{L^{p′}(log L)^{mp′},Q} with its σ-form"""
    if np.any(u.values <= 0) or np.any(v.values <= 0):
        raise PreconditionError("u and v must be positive")
    q = dual_exponent(p)
    report = weight_pair_bump(u, v, BumpSpec(p=p, m=m, preset="necbump"), mode, budget)
    sigma = v.power(1.0 - q)
    starts, lengths = interval_arrays(u.grid, mode, budget)
    u_means = u.interval_means(starts, lengths)
    sigma_logs = np.array([log_average(sigma, IntervalRef(int(s), int(n)), m * q)
                           for s, n in zip(starts, lengths)])
    sigma_terms = u_means * sigma_logs ** (p - 1)
    ratios = report.products ** p / sigma_terms
    lo, hi = float(ratios.min()), float(ratios.max())
    ok = EQLOG_BAND[0] <= lo and hi <= EQLOG_BAND[1]
    if not ok:
        logger.warning("σ-form ratio range [%.3g, %.3g] leaves the band %s", lo, hi, EQLOG_BAND)
    return NecessaryReport(report, float(sigma_terms.max()), (lo, hi), ok)


# ============ TESTING FUNCTIONALS ============

def log_e(t):
    """log(e + t)"""
    return np.log(np.e + np.asarray(t, dtype=float))


def estli_lambdas(family: SparseFamily, sigma: StepFn, m: int, r: float = 2.0) -> np.ndarray:
    """λ_Q = (‖σ‖_{L(log L)^{mr′},Q}/σ_Q)^{1/r′}"""
    r_dual = dual_exponent(r)
    norms = luxemburg_norms(sigma, family.starts, family.lengths, power_log(1.0, m * r_dual))
    means = sigma.interval_means(family.starts, family.lengths)
    return np.maximum(norms / means, 1.0) ** (1.0 / r_dual)


def testing_functional(family: SparseFamily, u: StepFn, sigma: StepFn, p: float, variant: str = LACEY,
                       lambdas: Optional[CoefSeq] = None, A: Optional[YoungFn] = None,
                       phi: Callable = log_e, psi: Callable = log_e, mu: float = 1.0) -> float:
    """Lacey, Li or extended-Li testing supremum over Q ∈ S"""
    q = dual_exponent(p)
    A = A or power_over_log(p, mu)
    starts, lengths = family.starts, family.lengths
    u_part = u.interval_means(starts, lengths) ** (1.0 / p)
    sigma_means = sigma.interval_means(starts, lengths)
    if variant == LACEY:
        bar_norms = luxemburg_norms(sigma.power(1.0 / q), starts, lengths, A.complementary())
        terms = u_part * bar_norms * phi(bar_norms / sigma_means ** (1.0 / q))
        return float(np.max(terms, initial=0.0))
    if variant not in (LI, ESTLI):
        raise ArgumentError(f"unknown testing variant '{variant}'")
    norms = luxemburg_norms(sigma.power(1.0 / p), starts, lengths, A)
    safe = np.where(norms > 0, norms, 1.0)
    terms = np.where(norms > 0, u_part * sigma_means / safe * phi(sigma_means ** (1.0 / p) / safe), 0.0)
    if variant == ESTLI:
        if not bp_integral(A, p).is_bp:
            raise PreconditionError(f"{A.label} is not in B_p")
        lam = np.ones(len(family)) if lambdas is None else lambdas.aligned(family)
        if np.any(lam < 1):
            raise ArgumentError("estli needs λ_Q >= 1 on every cube")
        terms = terms * lam * psi(lam)
    return float(np.max(terms, initial=0.0))


# ============ THEOREM RIGHT SIDES ============

THEOREMS = ("extbctbm_A", "extbctbm", "sepbumex_A", "sepbumex", "corpc")


def theorem_terms(theorem: str, p: float, m: int, delta: float = DEFAULT_DELTA,
                  eps: float = DEFAULT_EPSILON) -> List[Tuple[str, YoungFn, YoungFn]]:
    """Named (A, B) pairs summed on the right side of a sufficiency theorem"""
    q = dual_exponent(p)
    tp, tq = power_log(p), power_log(q)
    if theorem in ("extbctbm_A", "extbctbm"):
        terms = [("alpha_beta", alpha_p(p, delta), beta_pm(p, m, delta))]
        if theorem == "extbctbm":
            terms.append(("beta_alpha", beta_pm(q, m, delta), alpha_p(q, delta)))
        return terms
    if theorem in ("sepbumex_A", "sepbumex"):
        terms = [("tp_beta", tp, beta_pm(p, m, delta)),
                 ("alpha_gamma", alpha_p(p, delta), gamma_pm(p, m, delta))]
        if theorem == "sepbumex":
            terms += [("beta_tq", beta_pm(q, m, delta), tq),
                      ("gamma_alpha", gamma_pm(q, m, delta), alpha_p(q, delta))]
        return terms
    if theorem == "corpc":
        return [("tp_psi", tp, psi_pm(p, m, eps)), ("psi_tq", psi_pm(q, m, eps), tq)]
    raise ArgumentError(f"unknown theorem '{theorem}'")


def theorem_rhs(theorem: str, u: StepFn, v: StepFn, p: float, m: int, mode: str = DYADIC,
                delta: float = DEFAULT_DELTA, eps: float = DEFAULT_EPSILON) -> Dict[str, float]:
    """Each bump term of the theorem's right side plus their sum under 'total'"""
    out: Dict[str, float] = {}
    for name, A, B in theorem_terms(theorem, p, m, delta, eps):
        out[name] = weight_pair_bump(u, v, BumpSpec(A, B, p, m), mode).value
    out["total"] = float(sum(out.values()))
    return out


def corpc_split(p: float, m: int) -> float:
    """α = mp/(mp + p − 1)"""
    return m * p / (m * p + p - 1)


def corpc_reduction_ratio(u: StepFn, v: StepFn, p: float, m: int, mode: str = DYADIC,
                          eps: float = DEFAULT_EPSILON) -> float:
    """[α_p, γ_{p,m}] over the two-term ψ right side, δ fitted to ε"""
    if m < 1:
        raise ArgumentError("the ψ reduction needs m >= 1")
    a = corpc_split(p, m)
    delta = eps * min(a / m, 1 - a)
    lhs = weight_pair_bump(u, v, BumpSpec(alpha_p(p, delta), gamma_pm(p, m, delta), p, m), mode).value
    rhs = theorem_rhs("corpc", u, v, p, m, mode, delta, eps)["total"]
    return lhs / rhs
