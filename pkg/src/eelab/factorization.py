"""Factorization of entropy productions through the two Jin-Kohn productions.

For fields with integrable productions, the production of the generated
entropy factorizes as

    div Phi_f(m) = (f(th+pi/2) + f(th-pi/2) - 2<f,1>)/2 * e^{i2th}.divS(m),

equivalently the kinetic measure disintegrates into the symmetric two-atom
plus uniform family.  At desk scale the package verifies (a) the exact
finite-scale decomposition identities, (b) matched decay on rigid fields,
and (c) the negative control on jump fields, which together exhaust what is
checkable numerically; no nontrivial exact solution with positive integrable
production is known to test against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .circle import CircleFunction
from .entropy import (
    generated_entropy,
    harmonic_entropy,
    harmonic_extension,
    multiplier,
    radial_extension,
)
from .grids import (
    AngleField,
    BoolArray,
    Mollifier,
    ScalarField,
    combine_masks,
    lp_norm,
    mollify,
)
from .kinetic import KineticMeasure, factorized_measure, theta_of_vec
from .production import div_entropy, div_sigma_closed

FloatArray = NDArray[np.float64]


def factor_coefficient(f: CircleFunction, theta) -> FloatArray:
    """The factorization coefficient (f(th+pi/2) + f(th-pi/2))/2 - <f,1>."""
    theta = np.asarray(theta, dtype=float)
    return (
        0.5 * (f.real_values(theta + np.pi / 2) + f.real_values(theta - np.pi / 2))
        - float(np.real(f.mean))
    )


def rotated_productions(
    theta: FloatArray, div1: ScalarField, div2: ScalarField
) -> tuple[FloatArray, FloatArray]:
    """e^{i2th}.divS and ie^{i2th}.divS from the two production components."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return c * div1.values + s * div2.values, -s * div1.values + c * div2.values


@dataclass(frozen=True)
class FactorizationReport:
    eps_ladder: tuple[float, ...]
    lhs_norms: tuple[float, ...]
    rhs_norms: tuple[float, ...]
    residual_norms: tuple[float, ...]
    p: float
    label: str = ""

    def to_json(self) -> dict:
        return {
            "eps": list(self.eps_ladder),
            "lhs": list(self.lhs_norms),
            "rhs": list(self.rhs_norms),
            "residual": list(self.residual_norms),
            "p": self.p,
            "label": self.label,
        }


def verify_factorization(
    ladder: list[tuple[AngleField, float]],
    f: CircleFunction,
    p: float,
    region_of,
) -> FactorizationReport:
    """Ladder comparison of div Phi_f(m_eps) with its factorized form.

    The ladder pairs a field sampling with its mollification scale; scale
    limits are meaningful when the ratio scale/spacing stays fixed while the
    grid refines.  ``region_of`` maps a grid to the subdomain mask.  Cells of
    the subdomain falling in the extension dead zone (|m_eps| < 1/2) are
    rejected; for rigid test fields both sides decay together.
    """
    phi = radial_extension(generated_entropy(f))
    lhs_norms, rhs_norms, res_norms, eps_list = [], [], [], []
    for m, eps in sorted(ladder, key=lambda t: -t[1]):
        region = region_of(m.grid)
        v = mollify(m, Mollifier(eps))
        theta_eps, live = theta_of_vec(v)
        inside = combine_masks(v.mask, region)
        if np.any(inside & ~live):
            raise ValueError("subdomain contains extension dead-zone cells (|m_eps| < 1/2)")
        lhs = div_entropy(v, phi)
        s1, s2 = div_sigma_closed(v)
        rot, _ = rotated_productions(theta_eps.values, s1, s2)
        rhs = factor_coefficient(f, theta_eps.values) * rot
        where = combine_masks(lhs.effective_mask(), s1.effective_mask(), region)
        eps_list.append(eps)
        lhs_norms.append(lp_norm(lhs.values, m.grid, p, where))
        rhs_norms.append(lp_norm(rhs, m.grid, p, where))
        res_norms.append(lp_norm(lhs.values - rhs, m.grid, p, where))
    return FactorizationReport(
        eps_ladder=tuple(eps_list),
        lhs_norms=tuple(lhs_norms),
        rhs_norms=tuple(rhs_norms),
        residual_norms=tuple(res_norms),
        p=p,
        label="factorization",
    )


@dataclass(frozen=True)
class HarmonicDecompositionReport:
    eps: float
    lhs_norm: float
    first_term_norm: float
    second_term_norm: float
    residual_norm: float
    p: float


def verify_harmonic_decomposition(
    psi: CircleFunction,
    m: AngleField,
    eps: float,
    p: float,
    region: BoolArray,
) -> HarmonicDecompositionReport:
    """Fields of the harmonic-entropy production decomposition at one scale.

    Computes div Phi^{E psi}(m_eps), the first-multiplier term against
    e^{i2th}.divS, and the second-multiplier term against ie^{i2th}.divS
    (the term that drops out in the limit for solutions), and the residual
    of the full two-term identity.
    """
    v = mollify(m, Mollifier(eps))
    theta_eps, live = theta_of_vec(v)
    inside = combine_masks(v.mask, region)
    if np.any(inside & ~live):
        raise ValueError("subdomain contains extension dead-zone cells (|m_eps| < 1/2)")
    lhs = div_entropy(v, harmonic_entropy(harmonic_extension(psi)))
    s1, s2 = div_sigma_closed(v)
    rot, rot_perp = rotated_productions(theta_eps.values, s1, s2)
    a1 = multiplier(1, psi)
    a2 = multiplier(2, psi)
    t1 = a1.real_values(theta_eps.values) * rot
    t2 = a2.real_values(theta_eps.values) * rot_perp
    where = combine_masks(lhs.effective_mask(), s1.effective_mask(), region)
    return HarmonicDecompositionReport(
        eps=eps,
        lhs_norm=lp_norm(lhs.values, m.grid, p, where),
        first_term_norm=lp_norm(t1, m.grid, p, where),
        second_term_norm=lp_norm(t2, m.grid, p, where),
        residual_norm=lp_norm(lhs.values - t1 - t2, m.grid, p, where),
        p=p,
    )


@dataclass(frozen=True)
class VanishingProductionReport:
    labels: tuple[str, ...]
    eps_ladder: tuple[float, ...]
    masses: tuple[tuple[float, ...], ...]   # per label, per eps: L^1 production mass
    nu_masses: tuple[float, ...]            # per eps: L^1 mass of the measure density
    rates: tuple[float, ...]
    vanishes: bool
    flagged_negative_control: bool

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "eps": list(self.eps_ladder),
            "masses": [list(row) for row in self.masses],
            "nu": list(self.nu_masses),
            "rates": list(self.rates),
            "vanishes": self.vanishes,
            "negative_control": self.flagged_negative_control,
        }


def vanishing_production_check(
    ladder: list[tuple[AngleField, float]],
    fs: list[tuple[str, CircleFunction]],
    region_of,
    rate_threshold: float = 0.9,
) -> VanishingProductionReport:
    """Ladder decay of all generated-entropy productions and of the measure mass.

    The ladder pairs field samplings with mollification scales (fixed
    scale/spacing ratio across levels).  For fields whose Jin-Kohn
    productions vanish in the limit, every production and the factorized
    measure total variation must decay with empirical rate >= the threshold;
    fields with persistent production mass are flagged as the expected
    negative control.
    """
    ladder = sorted(ladder, key=lambda t: -t[1])
    eps_sorted = [eps for _, eps in ladder]
    nu_masses = []
    rows: list[list[float]] = [[] for _ in fs]
    for m, eps in ladder:
        region = region_of(m.grid)
        v = mollify(m, Mollifier(eps))
        theta_eps, _ = theta_of_vec(v)
        s1, s2 = div_sigma_closed(v)
        sigma = factorized_measure(theta_eps, (s1, s2))
        where = combine_masks(s1.effective_mask(), region)
        nu_masses.append(lp_norm(sigma.nu().values, m.grid, 1, where))
        for i, (_, f) in enumerate(fs):
            ext = radial_extension(generated_entropy(f))
            d = div_entropy(v, ext)
            where_d = combine_masks(d.effective_mask(), region)
            rows[i].append(lp_norm(np.abs(d.values), m.grid, 1, where_d))
    le = np.log(eps_sorted)
    rates = []
    for row in rows + [nu_masses]:
        vals = np.asarray(row)
        if np.max(vals) <= 1e-12:  # already vanished up to rounding
            rates.append(float("inf"))
        elif np.all(vals > 0):
            rates.append(float(np.polyfit(le, np.log(vals), 1)[0]))
        else:
            rates.append(float("inf"))
    vanishes = all(r >= rate_threshold for r in rates)
    flagged = not vanishes
    return VanishingProductionReport(
        labels=tuple(lbl for lbl, _ in fs),
        eps_ladder=tuple(eps_sorted),
        masses=tuple(tuple(row) for row in rows),
        nu_masses=tuple(nu_masses),
        rates=tuple(rates),
        vanishes=vanishes,
        flagged_negative_control=flagged,
    )


def pairing_consistency_gap(
    sigma: KineticMeasure, f: CircleFunction, zeta: ScalarField
) -> float:
    """|pair(sigma, f, zeta) - int coeff(f, th) g zeta dx|, zero by construction.

    The same coefficient drives the pointwise factorization and the measure
    disintegration; this gap certifies the equivalence of the two forms.
    """
    from .kinetic import pair_measure

    lhs = pair_measure(sigma, f, zeta)
    coeff = factor_coefficient(f, sigma.theta)
    where = combine_masks(sigma.mask, zeta.mask)
    vals = coeff * sigma.g * zeta.values
    if where is None:
        rhs = float(np.sum(vals) * sigma.grid.cell_area())
    else:
        rhs = float(np.sum(vals[where]) * sigma.grid.cell_area())
    return abs(lhs - rhs)
