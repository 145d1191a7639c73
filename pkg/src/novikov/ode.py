"""The scalar differential-equation chain and its transforms.

A problem is a coefficient triple (psi, eta, z2).  The chain starts from
the first-order linear system

    d_q rho + psi*sigma            = 0
    d_q sigma + 4*z2*psi*rho + eta*sigma = 0

and, writing p = eta - (d_q psi)/psi, passes through

    second order:  d_q^2 rho + p*d_q rho - 4*z2*psi^2*rho = 0
    Riccati:       d_q alpha + alpha^2 + p*alpha - 4*z2*psi^2 = 0
                   for alpha = rho^{-1} d_q rho
    projective:    d_q lam - psi*lam^2 + eta*lam + 4*z2*psi = 0
                   for lam = rho^{-1} sigma = -psi^{-1} alpha
    Schwarzian:    S_q theta + d_q p + p^2/2 + 8*z2*psi^2 = 0
                   for theta a quotient of two solutions,

with S_q theta = d_q(d_q^2 theta / d_q theta) - (d_q^2 theta / d_q theta)^2 / 2.

Each ``*_residual`` function returns the left-hand side; a solution makes it
vanish up to the propagated truncation.  ``solve_second_order`` builds
series solutions order by order on an arithmetic-progression exponent
lattice.  The mirror-side helpers at the bottom live in an auxiliary
variable ``h`` (same series type).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistentSeed, InsufficientPrecision, LatticeMismatch, ResonantExponent
from .series import INF, NovikovSeries, Trunc


@dataclass(frozen=True)
class ODEProblem:
    """Coefficient triple; psi must have a nonzero leading term whenever a
    transform divides by it."""

    psi: NovikovSeries
    eta: NovikovSeries
    z2: NovikovSeries

    def p_coefficient(self, order: Trunc | None = None) -> NovikovSeries:
        """eta - (d_q psi)/psi, the first-order coefficient of the second
        order form."""
        return self.eta - self.psi.d_q() * self.psi.invert(order)

    def r_coefficient(self) -> NovikovSeries:
        """-4*z2*psi^2, the zeroth-order coefficient."""
        return -4 * self.z2 * self.psi * self.psi

    def to_json(self) -> dict:
        return {"psi": self.psi.to_json(), "eta": self.eta.to_json(),
                "z2": self.z2.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ODEProblem":
        return cls(psi=NovikovSeries.from_json(data["psi"]),
                   eta=NovikovSeries.from_json(data["eta"]),
                   z2=NovikovSeries.from_json(data["z2"]))


@dataclass(frozen=True)
class LatticeSeed:
    """Solution ansatz data: exponents run over base_exponent + step*Z>=0,
    and the two lowest coefficients are prescribed."""

    step: Fraction
    base_exponent: Fraction
    coeffs: tuple[Fraction, Fraction]

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("lattice step must be positive")
        if len(self.coeffs) != 2:
            raise ValueError("a second-order equation takes two leading coefficients")

    @classmethod
    def from_json(cls, data: dict) -> "LatticeSeed":
        return cls(step=Fraction(data["step"]),
                   base_exponent=Fraction(data["base"]),
                   coeffs=tuple(Fraction(c) for c in data["coeffs"]))


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def system_residual(rho: NovikovSeries, sigma: NovikovSeries,
                    prob: ODEProblem) -> tuple[NovikovSeries, NovikovSeries]:
    first = rho.d_q() + prob.psi * sigma
    second = sigma.d_q() + 4 * prob.z2 * prob.psi * rho + prob.eta * sigma
    return first, second


def sigma_from_rho(rho: NovikovSeries, prob: ODEProblem,
                   order: Trunc | None = None) -> NovikovSeries:
    d = rho.d_q()
    if d.is_zero():
        if prob.psi.is_zero():
            raise ZeroDivisionError("psi has no invertible leading term")
        return NovikovSeries.zero(d.truncation - prob.psi.valuation())
    return -(prob.psi.invert(order) * d)


def second_order_coeffs(prob: ODEProblem,
                        order: Trunc | None = None) -> tuple[NovikovSeries, NovikovSeries]:
    return prob.p_coefficient(order), prob.r_coefficient()


def second_order_residual(rho: NovikovSeries, prob: ODEProblem,
                          order: Trunc | None = None) -> NovikovSeries:
    p, r = second_order_coeffs(prob, order)
    return rho.d_q().d_q() + p * rho.d_q() + r * rho


def riccati_residual(alpha: NovikovSeries, prob: ODEProblem,
                     order: Trunc | None = None) -> NovikovSeries:
    p = prob.p_coefficient(order)
    return alpha.d_q() + alpha * alpha + p * alpha - 4 * prob.z2 * prob.psi * prob.psi


def projective_residual(lam: NovikovSeries, prob: ODEProblem) -> NovikovSeries:
    return (lam.d_q() - prob.psi * lam * lam + prob.eta * lam
            + 4 * prob.z2 * prob.psi)


def schwarzian(theta: NovikovSeries, order: Trunc | None = None) -> NovikovSeries:
    """S_q theta; requires d_q theta invertible."""
    d1 = theta.d_q()
    ratio = d1.d_q() * d1.invert(order)
    return ratio.d_q() - Fraction(1, 2) * ratio * ratio


def schwarz_residual(theta: NovikovSeries, prob: ODEProblem,
                     order: Trunc | None = None) -> NovikovSeries:
    p = prob.p_coefficient(order)
    return (schwarzian(theta, order) + p.d_q() + Fraction(1, 2) * p * p
            + 8 * prob.z2 * prob.psi * prob.psi)


# ---------------------------------------------------------------------------
# order-by-order solver
# ---------------------------------------------------------------------------


def _lattice_coeffs(series: NovikovSeries, shift: int, step: Fraction,
                    bound, what: str) -> dict[int, Fraction]:
    """Read off coefficients of q^(j*step + shift) for integer j >= 0.

    *shift* is -1 for the first-order coefficient and -2 for the zeroth;
    terms below *bound* that sit off the lattice (or below the shift) would
    make the residual at an unreachable exponent nonzero, hence
    LatticeMismatch.
    """
    out: dict[int, Fraction] = {}
    for e, c in series.terms:
        if e >= bound:
            continue
        j = (e - shift) / step
        if j < 0 or j.denominator != 1:
            raise LatticeMismatch(
                f"{what} has a term at q^{e}, not on the lattice "
                f"{shift} + ({step})*Z>=0")
        out[int(j)] = c
    return out


def indicial_polynomial(prob: ODEProblem, order: Trunc | None = None):
    """Returns d |-> d*(d-1) + P*d + R with P the q^-1 coefficient of p and
    R the q^-2 coefficient of r."""
    p, r = second_order_coeffs(prob, order)
    P = p.coefficient(-1)
    R = r.coefficient(-2)
    return lambda d: d * (d - 1) + P * d + R


def solve_second_order(prob: ODEProblem, seed: LatticeSeed,
                       order) -> NovikovSeries:
    """Determine rho = sum c_k q^(e0 + k*step) with the seeded c_0, c_1 and
    second_order_residual(rho) = 0 below *order*.

    The coefficient c_k of a yet-undetermined exponent enters the residual
    multiplied by the indicial factor I(e0 + k*step); a vanishing factor
    there means the recursion does not determine the solution and raises
    ResonantExponent.  The two seeded orders are instead checked for
    consistency (their equations involve no new unknown).
    """
    order = Fraction(order)
    e0, step = seed.base_exponent, seed.step
    if e0 >= order:
        raise ValueError("requested order lies at or below the base exponent")
    vpsi = prob.psi.valuation()
    inv_order = order - e0 + 2 + 2 * abs(vpsi if vpsi != INF else 0)
    p, r = second_order_coeffs(prob, order=inv_order)
    ind = indicial_polynomial(prob, order=inv_order)
    kmax = int((order - e0) / step)
    if e0 + kmax * step >= order:
        kmax -= 1
    # the recursion reads P_j = p[j*step - 1], R_j = r[j*step - 2] for
    # j <= kmax; any off-lattice term that could reach residual exponents
    # below order - 2 is a LatticeMismatch
    if p.truncation <= kmax * step - 1 or r.truncation <= kmax * step - 2:
        raise InsufficientPrecision(
            f"coefficients known below q^{min(p.truncation, r.truncation + 1)} "
            f"cannot drive the recursion to q^{order}")
    P = _lattice_coeffs(p, -1, step, min(order - e0 - 1, p.truncation), "p")
    R = _lattice_coeffs(r, -2, step, min(order - e0 - 2, r.truncation), "r")
    coeffs: dict[int, Fraction] = {}
    for k in range(kmax + 1):
        d = e0 + k * step
        known = Fraction(0)
        for j in range(k):
            cj = coeffs.get(j)
            if not cj:
                continue
            known += cj * ((e0 + j * step) * P.get(k - j, Fraction(0))
                           + R.get(k - j, Fraction(0)))
        factor = ind(d)
        if k < 2:
            ck = seed.coeffs[k]
            if factor * ck + known != 0:
                raise InconsistentSeed(
                    f"seeded coefficient c_{k} violates the order-q^{d - 2} "
                    f"equation: {factor}*{ck} + {known} != 0")
            coeffs[k] = ck
        else:
            if factor == 0:
                raise ResonantExponent(
                    f"indicial factor vanishes at exponent {d}; the lattice "
                    f"recursion does not determine c_{k}")
            coeffs[k] = -known / factor
    return NovikovSeries(((e0 + k * step, c) for k, c in coeffs.items()),
                         truncation=order)


# ---------------------------------------------------------------------------
# mirror-side identities (auxiliary variable h)
# ---------------------------------------------------------------------------


def log_derivative(f: NovikovSeries, order: Trunc | None = None) -> NovikovSeries:
    """(d_h f) / f."""
    return f.d_q() * f.invert(order)


def mirror_a(p0, f: NovikovSeries, order: Trunc | None = None) -> NovikovSeries:
    """a = p0/(p0*h - 1) - l  with  l = (d_h f)/f.

    p0 is a rational sample value; p0*h - 1 has leading coefficient -1, so
    the quotient always expands.
    """
    p0 = Fraction(p0)
    if order is None and f.truncation != INF:
        order = f.truncation
    l = log_derivative(f, order)
    if p0 == 0:
        return -l
    denom = NovikovSeries(((1, p0), (0, -1)))
    return p0 * denom.invert(order) - l


def mirror_a_residual(a: NovikovSeries, l: NovikovSeries) -> NovikovSeries:
    """d_h a + a^2 + 2*l*a + (d_h l + l^2)."""
    return a.d_q() + a * a + 2 * l * a + (l.d_q() + l * l)


def mirror_ode_residual(eta_cand: NovikovSeries, l: NovikovSeries) -> NovikovSeries:
    """d_h^2 eta + 2*l*d_h eta + (d_h l + l^2)*eta."""
    return (eta_cand.d_q().d_q() + 2 * l * eta_cand.d_q()
            + (l.d_q() + l * l) * eta_cand)
