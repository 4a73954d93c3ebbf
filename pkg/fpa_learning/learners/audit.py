from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from fpa_learning.consts import PROBABILITY_TOLERANCE
from fpa_learning.exceptions import DomainError
from fpa_learning.types import MixedStrategy


@dataclass(frozen=True)
class AuditEntry:
    """The average rewards alpha_{t-1} a learner saw and the strategy it played at round t"""

    t: int
    alpha: Sequence
    strategy: MixedStrategy


@dataclass(frozen=True)
class Violation:
    t: int
    b: int
    b_prime: int
    gap: float
    prob: float

    def to_dict(self):
        return {"t": self.t, "b": self.b, "b_prime": self.b_prime, "gap": float(self.gap), "prob": self.prob}


def check_round(t, alpha, strategy: MixedStrategy, gamma_t, cap) -> List[Violation]:
    """
    Bids played with probability above gamma_t although some other bid leads them by more
    than V * gamma_t in average reward. The witness b' is the lowest leading bid.
    """

    if len(alpha) != strategy.size:
        raise DomainError(f"Round {t}: {len(alpha)} average rewards for a strategy over {strategy.size} bids.")

    alpha = np.asarray(alpha, dtype=float)
    probs = strategy.probs
    witness = int(np.argmax(alpha))
    gaps = alpha[witness] - alpha

    flagged = np.flatnonzero((gaps > cap * gamma_t) & (probs > gamma_t + PROBABILITY_TOLERANCE))
    return [Violation(t, int(b), witness, float(gaps[b]), float(probs[b])) for b in flagged]


def mean_based_audit(entries: Sequence[AuditEntry], gamma, cap) -> List[Violation]:
    """
    Check a trace of (alpha_{t-1}, strategy_t) pairs against the gamma-mean-based property.

    `gamma` is a schedule called with t or a sequence aligned with `entries`. An empty result
    means the trace is gamma-mean-based.
    """

    if not callable(gamma):
        gamma = list(gamma)
        if len(gamma) != len(entries):
            raise DomainError(f"The audit got {len(entries)} rounds but a gamma table of length {len(gamma)}.")
    elif hasattr(gamma, "__len__") and len(gamma) != len(entries):
        raise DomainError(f"The audit got {len(entries)} rounds but a gamma table of length {len(gamma)}.")

    violations = []
    for position, entry in enumerate(entries):
        gamma_t = gamma(entry.t) if callable(gamma) else gamma[position]
        violations.extend(check_round(entry.t, entry.alpha, entry.strategy, gamma_t, cap))
    return violations
