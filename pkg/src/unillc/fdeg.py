"""Parahoric volumes, formal degrees of depth-zero supercuspidals, and their ratios.

Volumes use the closed form |G_f(k)| q^{-(a + dim G_f + dim fixed)/2} with an
additive character of order 0, written in u = q^{1/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import HalfLaurent, RationalFunction
from .catalog import facet_transfer, lookup, DEFAULT_ISOGENY
from .finquot import order_poly, reductive_quotient
from .omega import facet_stabilizers

SANITY_QS = (2, 3, 5)


class FacetError(ValueError):
    pass


@dataclass(frozen=True)
class VolumeExpr:
    value: RationalFunction

    def is_positive(self, qs=SANITY_QS):
        return all(_value_at_q(self.value, q) > 0 for q in qs)


def _value_at_q(x, q):
    """Exact when every exponent is even, otherwise a float at u = sqrt(q) (sign checks only)."""
    try:
        return x.eval(q=q)
    except ValueError:
        r = math.sqrt(q)
        num = sum(float(c) * r ** e for e, c in x.num.terms.items())
        den = sum(float(c) * r ** e for e, c in x.den.terms.items())
        return num / den


@dataclass(frozen=True)
class FdegInput:
    entry: object
    facet: object
    dim_sigma: int = 1
    companion: bool = False

    def __post_init__(self):
        if self.dim_sigma < 1:
            raise ValueError("dim sigma must be positive")
        if not self.facet.is_maximal:
            raise FacetError(f"facet {self.facet.ident} is not maximal")


def _u(k):
    return RationalFunction(HalfLaurent.monomial(k))


def side_invariants(e, companion=False, conductor=None):
    """(a, dim of the inertia-fixed dual group) for one side of an entry.

    The companion is split over the maximal unramified extension, so a = 0,
    and its dual is the inertia-fixed dual of G.
    """
    a = 0 if companion else e.dual.conductor
    if conductor is not None:
        a = conductor
    return a, e.dual.dim_fixed


def volume_from_parts(points, dim, a, dim_fixed):
    return VolumeExpr(RationalFunction(points) * _u(-(a + dim + dim_fixed)))


def parahoric_volume(e, f, companion=False, conductor=None):
    """vol(P_f); on the companion side f is a facet of the companion diagram."""
    t = reductive_quotient(e, f, companion)
    op = order_poly(t)
    a, df = side_invariants(e, companion, conductor)
    return volume_from_parts(op.poly, op.dimension, a, df)


def volume_ratio_check(e, f, conductor=None):
    """vol(P_{f'}) = u^a vol(P_f) with f' the transferred facet."""
    a = e.dual.conductor
    vg = parahoric_volume(e, f, conductor=conductor).value
    vc = parahoric_volume(e, facet_transfer(e, f), companion=True).value
    return vc == _u(a) * vg


def omega_stabilizer_order(e, f, companion=False):
    side = e.companion if companion else e.group
    return len(facet_stabilizers(side.omega, f)[0])


def formal_degree(inp, omega_order=None):
    """dim(sigma) q^{(a + dim G_f + dim fixed)/2} / (|Omega_{G,f}| |G_f(k)|)."""
    e, f = inp.entry, inp.facet
    t = reductive_quotient(e, f, inp.companion)
    op = order_poly(t)
    a, df = side_invariants(e, inp.companion)
    om = omega_order if omega_order is not None else omega_stabilizer_order(e, f, inp.companion)
    return (RationalFunction(inp.dim_sigma) * _u(a + op.dimension + df)
            / RationalFunction(op.poly * HalfLaurent.const(om)))


def fdeg_transfer_check(e, f, dim_sigma=1):
    """fdeg of the companion input equals u^{-a} times fdeg of the original."""
    fg = formal_degree(FdegInput(e, f, dim_sigma))
    fc = formal_degree(FdegInput(e, facet_transfer(e, f), dim_sigma, companion=True))
    return fc == _u(-e.dual.conductor) * fg


def normalizer_volume(e, f, companion=False):
    """vol(N_G(P_f)) = |Omega_{G,f}| vol(P_f)."""
    v = parahoric_volume(e, f, companion).value
    return RationalFunction(omega_stabilizer_order(e, f, companion)) * v


def cuspidal_family_count(e, f, companion=False):
    """Number of twists sigma^N (x) chi with chi in Irr(Omega_{G,f})."""
    if not f.is_maximal:
        raise FacetError(f"facet {f.ident} is not maximal")
    return omega_stabilizer_order(e, f, companion)


# -- groups with a central torus ---------------------------------------------


@dataclass(frozen=True)
class CenterRatios:
    fixture: str
    facet: str
    vol_ratio: RationalFunction
    fdeg_ratio: RationalFunction
    vol_formula: RationalFunction
    fdeg_formula: RationalFunction | None
    omega_f: int
    omega_ad_f: int

    @property
    def ok(self):
        return (self.vol_ratio == self.vol_formula
                and (self.fdeg_formula is None or self.fdeg_ratio == self.fdeg_formula))

    def to_json(self):
        return {
            "fixture": self.fixture, "facet": self.facet,
            "vol_ratio": str(self.vol_ratio), "vol_formula": str(self.vol_formula),
            "fdeg_ratio": str(self.fdeg_ratio),
            "fdeg_formula": None if self.fdeg_formula is None else str(self.fdeg_formula),
            "omega_f": self.omega_f, "omega_ad_f": self.omega_ad_f, "ok": self.ok,
        }


def center_volume(fixture):
    t = fixture.torus_data()
    return volume_from_parts(t["points"], t["dim"], t["conductor"], t["fixed_dim"]).value


def whole_group_volume(fixture, f, catalog=None):
    """vol(P_f) for G_ss x Z assembled from the product reductive quotient."""
    e = fixture.entry(catalog)
    t = fixture.torus_data()
    op = order_poly(reductive_quotient(e, f))
    a = e.dual.conductor + t["conductor"]
    df = e.dual.dim_fixed + t["fixed_dim"]
    return volume_from_parts(op.poly * t["points"], op.dimension + t["dim"], a, df).value


def whole_group_fdeg(fixture, f, omega_f, catalog=None):
    e = fixture.entry(catalog)
    t = fixture.torus_data()
    op = order_poly(reductive_quotient(e, f))
    a = e.dual.conductor + t["conductor"]
    df = e.dual.dim_fixed + t["fixed_dim"]
    dim = op.dimension + t["dim"]
    return _u(a + dim + df) / RationalFunction(op.poly * t["points"] * HalfLaurent.const(omega_f))


def center_ratios(fixture, f, catalog=None):
    """Volume and formal-degree ratios of G against G_ad, computed two ways.

    The direct route builds G = G_ss x Z and its Omega on the enlarged lattice;
    the formula route is vol_Z for volumes and
    |Omega_{G_ad,f}| / (|Omega_{G,f}| vol_Z) for formal degrees.
    """
    ad = fixture.adjoint_entry(catalog)
    whole = fixture.whole_side(catalog)
    om_f = len(facet_stabilizers(whole.omega, f)[0])
    om_ad_f = len(facet_stabilizers(ad.group.omega, f)[0])
    vol_ad = parahoric_volume(ad, f).value
    vz = center_volume(fixture)
    vol_ratio = whole_group_volume(fixture, f, catalog) / vol_ad
    vol_formula = vz
    if f.is_maximal:
        fd_ad = formal_degree(FdegInput(ad, f), omega_order=om_ad_f)
        fdeg_ratio = whole_group_fdeg(fixture, f, om_f, catalog) / fd_ad
        fdeg_formula = RationalFunction(om_ad_f) / (RationalFunction(om_f) * vz)
    else:
        fdeg_ratio, fdeg_formula = RationalFunction(1), None
    return CenterRatios(fixture.name, f.ident, vol_ratio, fdeg_ratio, vol_formula, fdeg_formula,
                        om_f, om_ad_f)


def hii_rhs(dim_rho, centralizer_order, gamma_abs):
    """dim(rho) |centralizer|^{-1} |gamma(0)| with the constant c_M = 1."""
    c = centralizer_order if isinstance(centralizer_order, HalfLaurent) else \
        HalfLaurent.const(centralizer_order)
    if c.is_zero():
        raise ZeroDivisionError("centralizer order is zero")
    g = gamma_abs if isinstance(gamma_abs, RationalFunction) else RationalFunction(gamma_abs)
    return RationalFunction(dim_rho) * g / RationalFunction(c)


def adjoint_default(e, catalog=None):
    return lookup(e.family, e.n, DEFAULT_ISOGENY.get(e.family, "ad"), catalog=catalog)
