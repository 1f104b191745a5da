"""
Statistical referee for N sets of n sequential CHSH games, and the bounds around it.

All logarithms are natural.
"""

import logging
import math
from typing import Dict, Optional, Sequence

from scipy.optimize import bisect

from chshlab.chsh.game import COS2
from chshlab.config import config
from chshlab.errors import ValidationError
from chshlab.schemas import GameRecord, RefereeVerdict, SelfTestParams

logger = logging.getLogger("chshlab.sequential.referee")

# exact integers are only formed below this many decimal digits
_MAX_DIGITS = 4000


def referee_threshold(N: int, n: int) -> float:
    """cos²(π/8)·Nn − √(Nn·ln(Nn)) / (2√2)."""
    total = N * n
    if total < 2:
        raise ValidationError(f"need at least two games, got N·n = {total}")
    return COS2 * total - math.sqrt(total * math.log(total)) / (2 * math.sqrt(2))


def referee_verdict(records: Sequence[GameRecord], N: int, n: int, seed: int = 0) -> RefereeVerdict:
    if len(records) != N * n:
        raise ValidationError(f"expected {N * n} game records, got {len(records)}")
    won = sum(r.win for r in records)
    threshold = referee_threshold(N, n)
    accepted = bool(won >= threshold)
    verdict = RefereeVerdict(games_won=won, games=len(records), threshold=threshold, accepted=accepted, seed=seed)
    if verdict.accepted:
        logger.info(f"✅ referee accepted: {won}/{len(records)} ≥ {threshold:.1f}")
    else:
        logger.info(f"❌ referee rejected: {won}/{len(records)} < {threshold:.1f}")
    return verdict


def hoeffding_pass_bound(n: int, delta: float) -> float:
    """Lower bound 1 − e^{−2δ²n} on Pr[W ≥ (cos²(π/8) − δ)n] for honest provers."""
    if not 0 <= delta < 1:
        raise ValidationError(f"δ must lie in [0, 1), got {delta}")
    return 1 - math.exp(-2 * delta ** 2 * n)


def structure_violation_bound(n: int, eta: float, eps: float, delta: float) -> float:
    """
    exp(−2n(ηε/8 − δ)²): chance that provers whose games are unstructured on an η fraction
    win at least (cos²(π/8) − δ)n games. Only meaningful when δ ≤ ηε/8.
    """
    gap = eta * eps / 8 - delta
    if gap <= 0:
        return 1.0
    return math.exp(-2 * n * gap ** 2)


def azuma_bound(N: int, n: int, eps: float, eta: float, delta: float) -> float:
    """exp(−t²/(2Nn)) with t = ε²ηN/8 − δNn, the martingale version over all Nn games."""
    t = eps ** 2 * eta * N / 8 - delta * N * n
    if t <= 0:
        return 1.0
    return math.exp(-t ** 2 / (2 * N * n))


def protocol_completeness(n: int, alpha: float) -> float:
    """Honest acceptance is at least 1 − n^{−α/4}."""
    return 1 - n ** (-alpha / 4)


def protocol_soundness_floor(n: int, alpha: float, eps: float) -> float:
    """If the referee accepts w.p. ≥ 1 − ε, a random set is close to ideal w.p. ≥ 1 − ε − n^{−α/8}."""
    return 1 - eps - n ** (-alpha / 8)


def _rhs(eps: float, k: float, kappa: float) -> float:
    return 256 * k ** 2 * (4 * kappa ** 2 + 3) * kappa ** (4 * kappa) / eps ** (4 * kappa)


def self_test_params(eps: float, k: float, kappa_star: Optional[float] = None, n: int = 1) -> SelfTestParams:
    """
    Solve n*/ln n* = 256k²(4κ²+3)κ^{4κ}/ε^{4κ} on (e, ∞) and report N = max(n, n*)^{4κ²+2}.

    N is an exact integer, with max(n, n*) rounded up, when the exponent is integral and the
    number has a manageable size; log_N (natural, unrounded) is always given.
    """
    kappa = config.kappa_star if kappa_star is None else kappa_star
    if eps <= 0 or k <= 0 or kappa < 1:
        raise ValidationError(f"need ε > 0, k > 0, κ ≥ 1; got ε={eps}, k={k}, κ={kappa}")
    rhs = _rhs(eps, k, kappa)
    if rhs <= math.e:
        logger.warning(f"⚠️ n/ln n never drops to {rhs:.3g} above e, no self-test size")
        return SelfTestParams(rhs=rhs, degenerate=True)

    upper = math.e * 2
    while upper / math.log(upper) < rhs:
        upper *= 2
    n_star = bisect(lambda m: m / math.log(m) - rhs, math.e, upper, xtol=1e-12, maxiter=500)

    exponent = 4 * kappa ** 2 + 2
    base = max(float(n), n_star)
    log_n = exponent * math.log(base)
    exact = None
    if float(exponent).is_integer() and log_n / math.log(10) < _MAX_DIGITS:
        exact = math.ceil(base) ** int(exponent)
    return SelfTestParams(rhs=rhs, n_star=n_star, log_N=log_n, N=exact)


def self_test_bounds(n: int, k: float, kappa_star: Optional[float] = None) -> Dict[str, float]:
    """Completeness 1 − n^{−2k²(4κ²+3)} and soundness n^{−k²(4κ²+3)/2} of the self-test."""
    kappa = config.kappa_star if kappa_star is None else kappa_star
    power = k ** 2 * (4 * kappa ** 2 + 3)
    return {"completeness": 1 - n ** (-2 * power), "soundness": n ** (-power / 2)}
