"""Analytic feasibility classes for power-law initial conditions.

The setting is two fully connected agents on ``Theta = {1, 2, 3, ...}``
with prior ``f*(theta) = theta**(-p*)`` (optionally only on odd ``theta``,
with ``f* = 1`` on even ``theta``) and beliefs ``f_i proportional to
theta**(-p_i)``. Between any two nodes there are ``2**(t-1)`` paths of
length ``t >= 1``, so round ``t`` is well defined iff

    sum_theta f* (g_1 g_2) ** (2**(t-1))

is finite and nonzero, which reduces to ``sum theta**(-q) < inf`` iff
``q > 1`` on each parity class.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exceptions import SpecOutsideCatalog

P_NOT_F1 = "P \\ F_1"
IP_NOT_F1 = "IP \\ F_1"
F_AND_P_NOT_U = "(F ∩ P) \\ U"
F_AND_IP = "F ∩ IP"
U = "U"


def fk_region(k, proper):
    tag = "P" if proper else "IP"
    return f"(F_{k} ∩ {tag}) \\ (F_{k + 1} ∩ {tag})"


@dataclass(frozen=True)
class PowerLawSpec:
    prior_exponent: Fraction
    f1_exponent: Fraction
    f2_exponent: Fraction
    prior_flat_on_even: bool = False

    def __post_init__(self):
        for name in ("prior_exponent", "f1_exponent", "f2_exponent"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))


@dataclass(frozen=True)
class FeasibilityClass:
    region: str
    proper: bool
    feasible: bool
    feasible_through: Optional[int]  # largest k with the condition k-feasible; None if feasible
    first_failing_round: Optional[int]
    underlying: bool

    @property
    def k(self):
        return self.feasible_through


def _odd_exponent(spec, t):
    # exponent q of theta**(-q) in f* (g1 g2)**(2**(t-1)) where f* = theta**(-p*)
    n = 2 ** (t - 1)
    return n * (spec.f1_exponent + spec.f2_exponent) - (2 * n - 1) * spec.prior_exponent


def _even_exponent(spec, t):
    # same integrand where f* = 1
    return 2 ** (t - 1) * (spec.f1_exponent + spec.f2_exponent)


def _first_failure(spec):
    """First round whose normalizing sum diverges, or ``None`` if none does."""
    p_star = spec.prior_exponent
    drift = spec.f1_exponent + spec.f2_exponent - 2 * p_star
    t = 1
    while True:
        if _odd_exponent(spec, t) <= 1:
            return t
        if spec.prior_flat_on_even and _even_exponent(spec, t) <= 1:
            return t
        # odd exponent is 2**(t-1) * drift + p*; nondecreasing once drift >= 0
        if drift >= 0:
            return None
        t += 1


def classify_power_law(spec: PowerLawSpec) -> FeasibilityClass:
    """Place a power-law initial condition in the containment diagram."""
    p_star = spec.prior_exponent
    if spec.f1_exponent <= 1 or spec.f2_exponent <= 1:
        raise SpecOutsideCatalog("beliefs theta**(-p) need p > 1 to be normalizable")
    if p_star < 0:
        raise SpecOutsideCatalog("prior exponent must be nonnegative")
    if spec.prior_flat_on_even and p_star == 0:
        spec = PowerLawSpec(0, spec.f1_exponent, spec.f2_exponent, False)

    proper = p_star > 1 and not spec.prior_flat_on_even
    fail = _first_failure(spec)
    if fail is not None:
        k = fail - 1
        if k == 0:
            region = P_NOT_F1 if proper else IP_NOT_F1
        else:
            region = fk_region(k, proper)
        return FeasibilityClass(region, proper, False, k, fail, False)

    if not proper:
        return FeasibilityClass(F_AND_IP, False, True, None, None, False)
    # products g1**n1 g2**n2 integrate for all n1, n2 iff neither belief decays
    # slower than the prior; a two-outcome signal then realizes each belief
    underlying = spec.f1_exponent >= p_star and spec.f2_exponent >= p_star
    region = U if underlying else F_AND_P_NOT_U
    return FeasibilityClass(region, True, True, None, None, underlying)


def catalog_rows(k: int = 2):
    """The six catalog rows (with the given ``k`` for the two F_k rows)."""
    e = 2 ** (k + 1)
    return [
        (P_NOT_F1, PowerLawSpec(3, 2, 2)),
        (IP_NOT_F1, PowerLawSpec(3, 2, 2, prior_flat_on_even=True)),
        (fk_region(k, True), PowerLawSpec(e + 1, e, e)),
        (fk_region(k, False), PowerLawSpec(e + 1, e, e, prior_flat_on_even=True)),
        (F_AND_P_NOT_U, PowerLawSpec(3, 2, 4)),
        (F_AND_IP, PowerLawSpec(0, 2, 2)),
    ]
