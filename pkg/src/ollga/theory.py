"""Exact per-iteration escape probability and every closed-form bound,
evaluated in log-space.

Quantities like (p/2)^k and 1 - (1-q)^lambda underflow naive floating
point at realistic parameters, so everything is accumulated as natural
logs and 1-(1-q)^lam goes through expm1/log1p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import JumpProblem
from .engine import GaParams

_NEG_INF = float("-inf")


class LambdaOverflowError(OverflowError):
    """Requested offspring population size exceeds the configured cap."""


@dataclass(frozen=True)
class LogProb:
    """A probability stored as its natural log; -inf encodes zero."""

    log_value: float

    def __post_init__(self):
        if self.log_value > 1e-12:
            raise ValueError(f"log probability must be <= 0, got {self.log_value}")

    @property
    def value(self) -> float:
        return math.exp(min(self.log_value, 0.0))

    @classmethod
    def zero(cls) -> "LogProb":
        return cls(_NEG_INF)

    @classmethod
    def from_value(cls, v: float) -> "LogProb":
        if v < 0:
            raise ValueError(f"probability must be >= 0, got {v}")
        return cls(math.log(v) if v > 0 else _NEG_INF)


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of [0..{n}]")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _logsumexp(values: list[float]) -> float:
    m = max(values, default=_NEG_INF)
    if m == _NEG_INF:
        return _NEG_INF
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def _log_binom_pmf(n: int, p: float, ell: int) -> float:
    if p == 0.0:
        return 0.0 if ell == 0 else _NEG_INF
    if p == 1.0:
        return 0.0 if ell == n else _NEG_INF
    return (
        log_binomial(n, ell) + ell * math.log(p) + (n - ell) * math.log1p(-p)
    )


def _iceil(x: float) -> int:
    # guard against 0.3 * 100 = 30.000000000000004 style fuzz
    r = round(x)
    return r if abs(x - r) < 1e-9 else math.ceil(x)


def _ifloor(x: float) -> int:
    r = round(x)
    return r if abs(x - r) < 1e-9 else math.floor(x)


def binomial_interval_prob(n: int, p: float, lo: int, hi: int) -> float:
    """Pr[Bin(n,p) in [lo..hi]], pmf summed in log-space."""
    lo = max(lo, 0)
    hi = min(hi, n)
    if lo > hi:
        return 0.0
    return math.exp(_logsumexp([_log_binom_pmf(n, p, j) for j in range(lo, hi + 1)]))


def q_ell_exact(n: int, p: float) -> float:
    """Pr[ell in [ceil(pn)..floor(2pn)]] for ell ~ Bin(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    return binomial_interval_prob(n, p, _iceil(p * n), _ifloor(2 * p * n))


def bernoulli_lower(x: float, lam: float) -> float:
    """Lower bound on 1 - (1-x)^lam: half of min(1, lam*x)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0,1], got {x}")
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    return 0.5 * min(1.0, lam * x)


def _log_p_at_least_one(log_q: float, lam: int) -> float:
    """log of 1 - (1-q)^lam, given log q."""
    if log_q == _NEG_INF:
        return _NEG_INF
    q = math.exp(log_q)
    if q >= 1.0:
        return 0.0
    if q == 0.0:
        # exp underflow: 1-(1-q)^lam ~ lam*q, exact to within lam*q
        return math.log(lam) + log_q
    return math.log(-math.expm1(lam * math.log1p(-q)))


def _require_theory_domain(problem: JumpProblem) -> None:
    if 4 * problem.k > problem.n:
        raise ValueError(
            f"theory domain requires k <= n/4, got k={problem.k}, n={problem.n}"
        )


def escape_probability_exact(problem: JumpProblem, params: GaParams) -> LogProb:
    """Exact probability P of sampling the optimum in one iteration from
    the plateau: sum over ell of p_ell * p_M(ell) * p_C(ell).

    Case structure: ell = k succeeds already in the mutation phase
    (p_C = 1); for ell in (k..2k) a good mutant lies in the fitness
    valley, so all lambda_M mutants must be good; for ell >= 2k one good
    mutant suffices.
    """
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    p, c = params.p, params.c
    lam_m, lam_c = params.lambda_m, params.lambda_c
    terms: list[float] = []
    log_c = math.log(c) if c > 0 else _NEG_INF
    log_1mc = math.log1p(-c) if c < 1 else _NEG_INF
    for ell in range(k, n + 1):
        log_pl = _log_binom_pmf(n, p, ell)
        if log_pl == _NEG_INF:
            continue
        log_qm = log_binomial(n - k, ell - k) - log_binomial(n, ell)
        if ell == k:
            log_pm = _log_p_at_least_one(log_qm, lam_m)
            log_pc = 0.0
        else:
            if ell < 2 * k:
                log_pm = lam_m * log_qm
            else:
                log_pm = _log_p_at_least_one(log_qm, lam_m)
            if c == 0.0:
                continue
            log_qc = k * log_c + (0.0 if ell == k else (ell - k) * log_1mc)
            log_pc = _log_p_at_least_one(log_qc, lam_c)
        if log_pm == _NEG_INF or log_pc == _NEG_INF:
            continue
        terms.append(log_pl + log_pm + log_pc)
    return LogProb(min(_logsumexp(terms), 0.0))


def escape_time_exact(
    problem: JumpProblem, params: GaParams
) -> tuple[float, float]:
    """Expected (iterations, evaluations) to escape the plateau: the
    escape time is geometric with parameter P by plateau symmetry."""
    log_p = escape_probability_exact(problem, params).log_value
    if log_p == _NEG_INF:
        return math.inf, math.inf
    try:
        iters = math.exp(-log_p)
    except OverflowError:
        return math.inf, math.inf
    return iters, (params.lambda_m + params.lambda_c) * iters


def upper_bound_escape(
    problem: JumpProblem, params: GaParams, q_mode: str = "conservative"
) -> tuple[float, float]:
    """Closed-form upper bound on the expected escape time.

    q_mode selects q_ell: the proven constant 0.1 ("conservative") or the
    exact binomial interval probability ("exact"); both preserve the
    bound's validity. Requires p >= 2k/n. The crossover exponent
    2pn - k is clamped at 0 from below.
    """
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    p, c = params.p, params.c
    if p * n < 2 * k - 1e-12:
        raise ValueError(f"bound requires p >= 2k/n, got p={p}, 2k/n={2 * k / n}")
    if q_mode == "conservative":
        q_l = 0.1
    elif q_mode == "exact":
        q_l = q_ell_exact(n, p)
    else:
        raise ValueError(f"unknown q_mode: {q_mode!r}")
    log_a = min(0.0, math.log(params.lambda_m) + k * math.log(p / 2))
    expo = max(0.0, 2 * p * n - k)
    if c == 0.0:
        log_b = _NEG_INF
    elif c == 1.0:
        log_b = _NEG_INF if expo > 0 else min(0.0, math.log(params.lambda_c))
    else:
        log_b = min(
            0.0,
            math.log(params.lambda_c) + k * math.log(c) + expo * math.log1p(-c),
        )
    if q_l == 0.0 or log_a == _NEG_INF or log_b == _NEG_INF:
        return math.inf, math.inf
    log_iters = math.log(4.0) - math.log(q_l) - log_a - log_b
    try:
        iters = math.exp(log_iters)
    except OverflowError:
        iters = math.inf
    return iters, (params.lambda_m + params.lambda_c) * iters


def optimal_params(
    problem: JumpProblem, mode: str = "escape", lambda_cap: int = 10**9
) -> GaParams:
    """Runtime-optimal parameters: p = c = sqrt(k/n) with
    lambda = (n/k)^{k/2} for escaping the plateau, or the sqrt(n)-smaller
    lambda = n^{(k-1)/2} k^{-k/2} minimizing the full-run bound."""
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    if mode == "escape":
        log_lam = 0.5 * k * math.log(n / k)
    elif mode == "full_run":
        log_lam = 0.5 * (k - 1) * math.log(n) - 0.5 * k * math.log(k)
    else:
        raise ValueError(f"unknown mode: {mode!r}")
    if log_lam > math.log(lambda_cap) + 1e-12:
        raise LambdaOverflowError(
            f"lambda = exp({log_lam:.3f}) ~ {math.exp(min(log_lam, 700)):.3e} "
            f"exceeds cap {lambda_cap}"
        )
    lam = max(1, math.floor(math.exp(log_lam) + 0.5))  # round half-up
    pc = math.sqrt(k / n)
    return GaParams(p=pc, c=pc, lambda_m=lam, lambda_c=lam)


def upper_bound_P(problem: JumpProblem, params: GaParams) -> LogProb:
    """Upper bound on the one-iteration escape probability:
    lambda_M (lambda_C + 1) (k/2n)^k, clamped at 1."""
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    log_b = (
        math.log(params.lambda_m)
        + math.log(params.lambda_c + 1)
        + k * math.log(k / (2 * n))
    )
    return LogProb(min(0.0, log_b))


def lower_bound_evals(problem: JumpProblem) -> float:
    """Parameter-free lower bound on expected evaluations from the
    plateau: 2 (2n/k)^{k/2} - 1."""
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    return 2.0 * (2 * n / k) ** (k / 2) - 1.0


def max_unimodal(n: int, k: int) -> tuple[float, float]:
    """Maximum of x^k (1-x)^{n-k} over [0, 1]: attained at x = k/n."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    x = k / n
    value = math.exp(k * math.log(x) + (n - k) * math.log1p(-x))
    return x, value


def standard_params_bound(problem: JumpProblem, lam: int) -> tuple[float, float]:
    """Escape-time bound under the standard setting p = lam/n, c = 1/lam,
    lambda_M = lambda_C = lam, for lam in [2k..n]."""
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    if not 2 * k <= lam <= n:
        raise ValueError(f"lam must be in [2k..n] = [{2 * k}..{n}], got {lam}")
    q_l = 0.1
    log_a = min(0.0, math.log(lam) + k * math.log(lam / (2 * n)))
    log_b = (1 - k) * math.log(lam) + (2 * lam - k) * math.log1p(-1 / lam)
    iters = math.exp(math.log(4.0) - math.log(q_l) - log_a - log_b)
    return iters, 2 * lam * iters


@dataclass(frozen=True)
class RangeCheckResult:
    """Finite-n rendering of the wide-parameter-range conditions."""

    alpha: float
    beta: float
    ok: bool  # the non-asymptotic conditions: alpha <= 1, beta <= 1, p >= 2k/n
    ratios: dict[str, float] = field(default_factory=dict)


def _pow_1mc(c: float, expo: float) -> float:
    if c < 1.0:
        return math.exp(expo * math.log1p(-c)) if c > 0 else 1.0
    if expo > 0:
        return 0.0
    return 1.0 if expo == 0 else math.inf


def parameter_range_check(problem: JumpProblem, params: GaParams) -> RangeCheckResult:
    """Compute alpha = lambda_M (p/2)^k and beta = lambda_C c^k (1-c)^{2pn-k}
    and report the range conditions. The asymptotic side-conditions are
    reported as ratios only; asymptotics have no truth value at one n."""
    _require_theory_domain(problem)
    n, k = problem.n, problem.k
    p, c = params.p, params.c
    alpha = params.lambda_m * (p / 2) ** k
    beta = params.lambda_c * c**k * _pow_1mc(c, 2 * p * n - k)
    ratios = {
        "alpha_vs_k_over_nc": alpha / (k / (n * c)) ** k if c > 0 else 0.0,
        "beta_vs_2k_over_pn": beta / (2 * k / (p * n)) ** k if p > 0 else 0.0,
        "p_vs_k_over_n": p / (k / n),
        "c_vs_k_over_n": c / (k / n),
        "pc_vs_k_over_n": p * c / (k / n),
    }
    ok = alpha <= 1.0 and beta <= 1.0 and p * n >= 2 * k - 1e-12
    return RangeCheckResult(alpha=alpha, beta=beta, ok=ok, ratios=ratios)


@dataclass
class BoundReport:
    """Exact P plus every closed-form bound for one (problem, params)."""

    exact_p: LogProb
    exact_iters: float
    exact_evals: float
    q_ell: float
    upper_bound_p: LogProb
    lower_bound_evals: float
    thm_runtime_bound_iters: Optional[float]
    thm_runtime_bound_evals: Optional[float]
    in_validity_domain: dict[str, bool] = field(default_factory=dict)


def make_bound_report(problem: JumpProblem, params: GaParams) -> BoundReport:
    """Assemble exact P and all bounds; the runtime-theorem bound is null
    (flagged) when its hypothesis p >= 2k/n fails."""
    _require_theory_domain(problem)
    exact = escape_probability_exact(problem, params)
    iters, evals = escape_time_exact(problem, params)
    runtime_ok = params.p * problem.n >= 2 * problem.k - 1e-12
    if runtime_ok:
        b_iters, b_evals = upper_bound_escape(problem, params, q_mode="conservative")
    else:
        b_iters = b_evals = None
    return BoundReport(
        exact_p=exact,
        exact_iters=iters,
        exact_evals=evals,
        q_ell=q_ell_exact(problem.n, params.p),
        upper_bound_p=upper_bound_P(problem, params),
        lower_bound_evals=lower_bound_evals(problem),
        thm_runtime_bound_iters=b_iters,
        thm_runtime_bound_evals=b_evals,
        in_validity_domain={
            "k_le_n_over_4": True,
            "runtime_bound": runtime_ok,
        },
    )
