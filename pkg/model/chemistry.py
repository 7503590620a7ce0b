"""
Equilibrium chemistry of the H2SO4 / NaOH mixture

The reaction invariants (alpha = total sulfate, beta = total sodium) fix the
hydrogen-ion concentration through the electroneutrality condition. Expanding the
charge balance with the dissociation equilibria gives a monic quartic in [H+]
whose unique positive root is found by bisection on log10([H+]).
"""
import logging
import math
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from utility.errors import NoRoot
from utility.settings import get_settings

logger = logging.getLogger(__name__)

LOG_H_LO = -16.0
LOG_H_HI = 2.0
ROOT_REL_TOL = 1e-12
# log10 width that corresponds to ROOT_REL_TOL relative error in h
_LOG_TOL = ROOT_REL_TOL / math.log(10.0)


class EquilibriumConstants(BaseModel):
    """Dissociation constants of sulfuric acid and the ionic product of water"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    k1: float = Field(default=1.0e3, gt=0)
    k2: float = Field(default=1.2e-2, gt=0)
    kw: float = Field(default=1.0e-14, gt=0)


class IonInvariants(BaseModel):
    """Reaction-invariant pair of the tank contents, mol/L"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(ge=0)
    beta: float = Field(ge=0)


class QuarticCoeffs(BaseModel):
    """Coefficients of h^4 + a1 h^3 + a2 h^2 + a3 h + a4"""
    model_config = ConfigDict(frozen=True)

    a1: float
    a2: float
    a3: float
    a4: float

    def evaluate(self, h: float) -> float:
        return (((h + self.a1) * h + self.a2) * h + self.a3) * h + self.a4


class Speciation(BaseModel):
    """Species concentrations at a given [H+], mol/L"""
    model_config = ConfigDict(frozen=True)

    h2so4: float = Field(ge=0)
    hso4: float = Field(ge=0)
    so4: float = Field(ge=0)
    na: float = Field(ge=0)
    h: float = Field(ge=0)
    oh: float = Field(ge=0)


def default_constants() -> EquilibriumConstants:
    """Constants at 25 degC, with any PHSIM_K1/K2/KW overrides applied"""
    settings = get_settings()
    overrides = {
        name: value
        for name, value in (("k1", settings.k1), ("k2", settings.k2), ("kw", settings.kw))
        if value is not None
    }
    return EquilibriumConstants(**overrides)


def quartic_coeffs(inv: IonInvariants, k: EquilibriumConstants) -> QuarticCoeffs:
    alpha, beta = inv.alpha, inv.beta
    return QuarticCoeffs(
        a1=k.k1 + beta,
        a2=beta * k.k1 + k.k1 * k.k2 - k.kw - k.k1 * alpha,
        a3=beta * k.k1 * k.k2 - k.k1 * k.kw - 2.0 * k.k1 * k.k2 * alpha,
        a4=-k.k1 * k.k2 * k.kw,
    )


def _bisect_log(sign_of, lo: float = LOG_H_LO, hi: float = LOG_H_HI) -> float:
    """Root of an increasing function of h, searched in log10(h)"""
    f_lo = sign_of(10.0 ** lo)
    f_hi = sign_of(10.0 ** hi)
    if not (f_lo < 0.0 < f_hi):
        raise NoRoot(f"no sign change for h in [1e{lo:g}, 1e{hi:g}] (f_lo={f_lo:g}, f_hi={f_hi:g})")
    while hi - lo > _LOG_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = sign_of(10.0 ** mid)
        if f_mid == 0.0:
            return 10.0 ** mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    return 10.0 ** (0.5 * (lo + hi))


def hydrogen_ion(inv: IonInvariants, k: EquilibriumConstants) -> float:
    """Positive real root of the pH neutralization quartic, mol/L"""
    coeffs = quartic_coeffs(inv, k)
    return _bisect_log(coeffs.evaluate)


def ph_of(inv: IonInvariants, k: EquilibriumConstants) -> float:
    return -math.log10(hydrogen_ion(inv, k))


def speciation(inv: IonInvariants, k: EquilibriumConstants, h: float) -> Speciation:
    if h <= 0:
        raise ValueError(f"[H+] must be positive, got {h}")
    hso4 = inv.alpha * k.k1 * h / (h * h + k.k1 * h + k.k1 * k.k2)
    return Speciation(
        h2so4=hso4 * h / k.k1,
        hso4=hso4,
        so4=hso4 * k.k2 / h,
        na=inv.beta,
        h=h,
        oh=k.kw / h,
    )


def charge_balance_residual(inv: IonInvariants, k: EquilibriumConstants, h: float) -> float:
    """Positive minus negative charge, mol/L; strictly increasing in h"""
    s = speciation(inv, k, h)
    return (s.na + s.h) - (s.oh + s.hso4 + 2.0 * s.so4)


def charge_balance_root(inv: IonInvariants, k: EquilibriumConstants) -> float:
    """[H+] from bisection on the charge balance itself"""
    return _bisect_log(lambda h: charge_balance_residual(inv, k, h))


def sign_changes(inv: IonInvariants, k: EquilibriumConstants, n: int = 10_000) -> int:
    """Number of sign changes of the quartic on a log grid over [1e-16, 1e2]"""
    coeffs = quartic_coeffs(inv, k)
    step = (LOG_H_HI - LOG_H_LO) / (n - 1)
    changes = 0
    prev = coeffs.evaluate(10.0 ** LOG_H_LO)
    for i in range(1, n):
        cur = coeffs.evaluate(10.0 ** (LOG_H_LO + i * step))
        if (prev < 0.0) != (cur < 0.0):
            changes += 1
        prev = cur
    return changes


def titration_curve(
    alpha_fixed: float, beta_range: Sequence[float], k: EquilibriumConstants
) -> List[Tuple[float, float]]:
    """pH along a base sweep at fixed acid invariant"""
    if len(beta_range) == 0:
        raise ValueError("beta_range must not be empty")
    if any(b < 0 for b in beta_range):
        raise ValueError("beta_range must be non-negative")
    if any(b1 < b0 for b0, b1 in zip(beta_range, beta_range[1:])):
        raise ValueError("beta_range must be ascending")
    curve = [(float(b), ph_of(IonInvariants(alpha=alpha_fixed, beta=b), k)) for b in beta_range]
    logger.debug("titration alpha=%g: %d points, pH %.3f..%.3f", alpha_fixed, len(curve), curve[0][1], curve[-1][1])
    return curve


def _acid_charge_per_sulfate(h: float, k: EquilibriumConstants) -> float:
    """Negative charge carried per mole of sulfate at a given [H+]"""
    return k.k1 * (h + 2.0 * k.k2) / (h * h + k.k1 * h + k.k1 * k.k2)


def base_fraction_for_ph(ph: float, c1: float, c2: float, k: EquilibriumConstants) -> float:
    """
    Base fraction r of a constant total flow whose steady mixture has this pH

    At steady state alpha = c1 (1 - r) and beta = c2 r; at fixed [H+] the charge
    balance is linear in both, so r has a closed form. Clamped to [0, 1] when the
    pH is outside what the feeds can reach.
    """
    h = 10.0 ** (-ph)
    phi = _acid_charge_per_sulfate(h, k)
    denom = c2 + c1 * phi
    if denom <= 0.0:
        return 0.0
    r = (c1 * phi - h + k.kw / h) / denom
    return min(max(r, 0.0), 1.0)


def reachable_ph(c1: float, c2: float, k: EquilibriumConstants) -> Tuple[float, float]:
    """pH of the pure acid feed and of the pure base feed"""
    return (
        ph_of(IonInvariants(alpha=c1, beta=0.0), k),
        ph_of(IonInvariants(alpha=0.0, beta=c2), k),
    )
