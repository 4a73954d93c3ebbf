import math
from dataclasses import dataclass
from typing import Sequence

from fpa_learning.exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class EpsilonSchedule:
    """
    The exploration/learning rate eps_t = min(1, scale * t^(-exponent)) for t >= 1.

    The default is eps_t = sqrt(1/t). A non-negative exponent keeps the sequence in (0, 1] and
    non-increasing.
    """

    exponent: float = 0.5
    scale: float = 1.0

    def __post_init__(self):
        if self.exponent < 0:
            raise ConfigurationError(f"The epsilon exponent must be non-negative, got {self.exponent}.")
        if not self.scale > 0:
            raise ConfigurationError(f"The epsilon scale must be positive, got {self.scale}.")

    def __call__(self, t) -> float:
        if t < 1:
            raise DomainError(f"Rounds are numbered from 1, got {t}.")
        return min(1.0, self.scale * t ** (-self.exponent))

    def to_dict(self):
        return {"exponent": self.exponent, "scale": self.scale}

    @classmethod
    def from_dict(cls, data):
        return cls(float(data.get("exponent", 0.5)), float(data.get("scale", 1.0)))


class GammaSchedule:
    """
    A tolerance sequence t -> gamma_t in [0, 1], non-increasing, used to audit the mean-based
    property. Subclasses implement `__call__`.
    """

    name = None

    def __call__(self, t) -> float:
        raise NotImplementedError

    def check(self, t_max):
        previous = 1.0
        for t in range(1, t_max + 1):
            gamma = self(t)
            if not 0.0 <= gamma <= 1.0:
                raise DomainError(f"gamma_{t} = {gamma} lies outside [0, 1].")
            if gamma > previous:
                raise DomainError(f"gamma increases at round {t}: {previous} -> {gamma}.")
            previous = gamma
        return self

    def __repr__(self):
        return f"{self.__class__.__name__}()"


class ZeroGamma(GammaSchedule):
    name = "zero"

    def __call__(self, t) -> float:
        return 0.0


class EpsilonGamma(GammaSchedule):
    """gamma_t = min(1, factor * eps_t)"""

    name = "eps"

    def __init__(self, schedule: EpsilonSchedule, factor=1.0):
        if factor < 0:
            raise ConfigurationError(f"The gamma factor must be non-negative, got {factor}.")
        self.schedule = schedule
        self.factor = factor

    def __call__(self, t) -> float:
        return min(1.0, self.factor * self.schedule(t))

    def __repr__(self):
        return f"EpsilonGamma({self.schedule!r}, factor={self.factor})"


class CounterexampleGamma(GammaSchedule):
    """gamma_t = 1 up to T0, then T_k^(-1/4) on (T_k, T_{k+1}] with T_k = 32^k * T0"""

    name = "counterexample"

    def __init__(self, t0):
        self.t0 = t0

    def __call__(self, t) -> float:
        if t <= self.t0:
            return 1.0

        boundary = self.t0
        while t > 32 * boundary:
            boundary *= 32
        return boundary ** -0.25

    def __repr__(self):
        return f"CounterexampleGamma(t0={self.t0})"


class TabulatedGamma(GammaSchedule):
    """An explicit table; gamma_t is the (t - 1)-th entry"""

    name = "table"

    def __init__(self, values: Sequence[float]):
        self.values = tuple(float(value) for value in values)

    def __call__(self, t) -> float:
        if not 1 <= t <= len(self.values):
            raise DomainError(f"Round {t} lies outside the gamma table of length {len(self.values)}.")
        return self.values[t - 1]

    def __len__(self):
        return len(self.values)


def integer_ceil_root(value, power, root):
    """ceil(value^(power/root)) computed on integers"""

    target = value ** power
    guess = max(int(round(target ** (1.0 / root))), 0)
    while guess ** root < target:
        guess += 1
    while guess > 0 and (guess - 1) ** root >= target:
        guess -= 1
    return guess


def epoch_lengths_satisfy_theory(t0) -> bool:
    return t0 > 640 and math.exp(-(t0 ** (1 / 3)) / 900) <= 1 / 16
