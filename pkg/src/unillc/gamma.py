"""Weil-Deligne modules of unramified parameters and the absolute adjoint gamma factor.

A summand (zeta_order, k, n) is a Frobenius line with scalar zeta * u^k
tensored with the n-dimensional representation of SL_2. Only the kernel of
the nilpotent contributes to L, with Frobenius eigenvalue zeta u^{k-(n-1)}.
The ramified part contributes 1 to L and u^a to |epsilon|.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .arith import ONE, HalfLaurent, RationalFunction
from .rootdata import exponents, group_dimension, parse_type

SUPPORTED_ZETA = (1, 2)


class SingularParameter(ZeroDivisionError):
    pass


@dataclass(frozen=True, order=True)
class Summand:
    zeta_order: int
    k: int
    n: int

    def __post_init__(self):
        if self.zeta_order not in SUPPORTED_ZETA:
            raise ValueError(f"root of unity of order {self.zeta_order} is not supported")
        if self.n < 1:
            raise ValueError("SL_2 dimension must be positive")

    @property
    def dimension(self):
        return self.n

    def ker_eigenvalue(self):
        """zeta u^{k-(n-1)} as a signed Laurent monomial."""
        sign = 1 if self.zeta_order == 1 else -1
        return HalfLaurent.monomial(self.k - (self.n - 1), sign)


@dataclass(frozen=True)
class WDModule:
    summands: tuple = ()
    ram_dim: int = 0
    conductor: int = 0

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(sorted(Summand(*s) if not isinstance(
            s, Summand) else s for s in self.summands)))
        if self.ram_dim < 0:
            raise ValueError("ramified dimension must be nonnegative")
        if self.conductor != self.ram_dim:
            raise ValueError("tame ramified part: conductor must equal its dimension")

    @property
    def dimension(self):
        return sum(s.n for s in self.summands) + self.ram_dim

    def __add__(self, other):
        return WDModule(self.summands + other.summands, self.ram_dim + other.ram_dim,
                        self.conductor + other.conductor)

    def unramified(self):
        return WDModule(self.summands)

    def to_text(self):
        lines = [f"{s.zeta_order} {s.k} {s.n}" for s in self.summands]
        lines.append(f"ram {self.ram_dim} {self.conductor}")
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {"summands": [[s.zeta_order, s.k, s.n] for s in self.summands],
                "ram": [self.ram_dim, self.conductor]}


def parse_module(text):
    summands, ram = [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "ram":
            if ram is not None or len(tok) != 3:
                raise ValueError(f"bad ram line {line!r}")
            ram = (int(tok[1]), int(tok[2]))
        elif len(tok) == 3:
            summands.append(Summand(*map(int, tok)))
        else:
            raise ValueError(f"bad summand line {line!r}")
    if ram is None:
        raise ValueError("missing 'ram dim a' line")
    return WDModule(tuple(summands), *ram)


def module_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    return WDModule(tuple(Summand(*s) for s in obj["summands"]), *obj["ram"])


def _euler_factor(s, sh):
    """1 - beta q^{-sh} for a summand; sh is a half-integer."""
    two_s = 2 * sh
    if two_s != int(two_s):
        raise ValueError("s must be a half-integer")
    return ONE - s.ker_eigenvalue().shift(-int(two_s))


def l_factor(m, s):
    """prod 1/(1 - zeta u^{k-(n-1)} q^{-s}); raises SingularParameter at a pole."""
    den = ONE
    for x in m.summands:
        den = den * _euler_factor(x, s)
    if den.is_zero():
        raise SingularParameter(f"L-factor has a pole at s = {s}")
    return RationalFunction(ONE, den)


def epsilon_abs(m):
    return HalfLaurent.monomial(m.conductor)


def gamma_abs_at_zero(m):
    """u^a L(1) / L(0), cancelling identical zero and pole factors first."""
    nums = [_euler_factor(x, 0) for x in m.summands]
    dens = [_euler_factor(x, 1) for x in m.summands]
    for d in list(dens):
        if d in nums:
            nums.remove(d)
            dens.remove(d)
    # a zero numerator and a zero denominator are identical, so both cancelled above
    if any(d.is_zero() for d in dens):
        raise SingularParameter("gamma factor has a pole at s = 0")
    num, den = epsilon_abs(m), ONE
    for x in nums:
        num = num * x
    for d in dens:
        den = den * d
    return RationalFunction(num, den)


def ramified_split_check(m):
    """|gamma(0, full)| = u^a |gamma(0, inertia-fixed part)|."""
    return gamma_abs_at_zero(m) == RationalFunction(HalfLaurent.monomial(m.conductor)) * \
        gamma_abs_at_zero(m.unramified())


def principal_parameter_module(type_label):
    """Adjoint module of the principal parameter: summands (1, 0, 2e+1) over exponents e."""
    typ, rank = parse_type(type_label) if isinstance(type_label, str) else type_label
    exps = exponents(typ, rank)
    m = WDModule(tuple(Summand(1, 0, 2 * e + 1) for e in exps))
    if m.dimension != group_dimension(typ, rank):
        raise AssertionError("sum of 2e+1 over exponents differs from the dimension")
    return m


def full_principal_module(e):
    """Principal module of the fixed dual group plus the ramified part of the entry."""
    fixed = principal_parameter_module(e.dual.fixed_type)
    ram = e.dual.dim_dual - e.dual.dim_fixed
    return WDModule(fixed.summands, ram, e.dual.conductor)


def companion_gamma_check(e):
    """|gamma(0, G)| = u^a |gamma(0, G')| for the principal parameter."""
    full = full_principal_module(e)
    comp = principal_parameter_module(e.dual.fixed_type)
    return gamma_abs_at_zero(full) == RationalFunction(
        HalfLaurent.monomial(e.dual.conductor)) * gamma_abs_at_zero(comp)
