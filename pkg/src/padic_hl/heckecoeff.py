"""Littlewood-Richardson-type coefficients and Hecke structure coefficients.

Three coefficient families are expanded here:

* ``std``: P_mu(x; t) P_nu(x; t) = sum c^lambda P_lambda(x; t)
* ``alt``: P_mu(x_1, x_1 t, ..., x_n, x_n t; t) P_nu(x; t^2) = sum c^{alt,lambda} P_lambda(x; t^2)
* ``her``: P_mu(x_1^2, ..., x_n^2; t^2) P_nu(x; -t) = sum c^{her,lambda} P_lambda(x; -t)

The structure coefficients g(q) of the alternating and Hermitian Hecke modules,
coset counts N_mu and orbit volumes are closed expressions in these tables.
Functions that return "a rational function in q" use the module-wide symbol
``T`` in the role of q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exactnum import IntegralityFailure, IntPoly, RationalFunction, T, as_rf, substitute, to_int_poly
from .hlpoly import LaurentSymPoly, expand_in_hl, hl_p, skew_poly
from .sigcore import Signature

__all__ = [
    "CoeffTable",
    "HeckeCoeff",
    "HeckeIntegralityError",
    "lr_table",
    "lr_coeff",
    "alt_pair_poly",
    "her_double_poly",
    "hecke_g",
    "rho_pairing",
    "v_factor",
    "coset_count",
    "orbit_volume",
    "transition_prob",
]


@dataclass(frozen=True)
class CoeffTable:
    case: str
    mu: Signature
    nu: Signature
    entries: dict

    def get(self, lam) -> RationalFunction:
        return self.entries.get(Signature(lam), as_rf(0))

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "mu": self.mu.to_json(),
            "nu": self.nu.to_json(),
            "entries": [[lam.to_json(), c.to_json()] for lam, c in sorted(self.entries.items(), reverse=True)],
        }


def _param(case: str):
    return {"std": T, "alt": T**2, "her": -T}[case]


@lru_cache(maxsize=1024)
def alt_pair_poly(mu: tuple) -> LaurentSymPoly:
    """P_mu(x_1, x_1 t, ..., x_n, x_n t; t) for len(mu) = 2n, via paired branching variables."""
    k = len(mu)
    if k % 2:
        raise ValueError("alternating coefficients need len(mu) even")
    var_map = [(j // 2, 1 if j % 2 == 0 else T) for j in range(k)]
    return skew_poly("P", mu, (), k, T, var_map=var_map, nvars=k // 2)


@lru_cache(maxsize=1024)
def her_double_poly(mu: tuple) -> LaurentSymPoly:
    """P_mu(x_1^2, ..., x_n^2; t^2) by doubling every exponent of P_mu(x; t^2)."""
    return hl_p(tuple(mu), T**2).map_exponents(lambda e: (2 * a for a in e))


@lru_cache(maxsize=1024)
def _lr_entries(case: str, mu: tuple, nu: tuple) -> tuple:
    if case == "std":
        if len(mu) != len(nu):
            raise ValueError("std coefficients need len(mu) = len(nu)")
        prod = hl_p(mu, T) * hl_p(nu, T)
    elif case == "alt":
        if len(mu) != 2 * len(nu):
            raise ValueError("alt coefficients need len(mu) = 2 len(nu)")
        prod = alt_pair_poly(mu) * hl_p(nu, T**2)
    elif case == "her":
        if len(mu) != len(nu):
            raise ValueError("her coefficients need len(mu) = len(nu)")
        prod = her_double_poly(mu) * hl_p(nu, -T)
    else:
        raise ValueError(f"unknown case {case!r}")
    if not nu:
        return ()
    table = expand_in_hl(prod, _param(case))
    return tuple(sorted((Signature(lam), as_rf(c)) for lam, c in table.items()))


def lr_table(case: str, mu: Sequence[int], nu: Sequence[int]) -> CoeffTable:
    mu, nu = Signature(mu), Signature(nu)
    return CoeffTable(case, mu, nu, dict(_lr_entries(case, tuple(mu), tuple(nu))))


def lr_coeff(case: str, mu, nu, lam) -> RationalFunction:
    return lr_table(case, mu, nu).get(lam)


def rho_pairing(lam: Sequence[int], n: int | None = None) -> int:
    """2 <lambda, rho_n> = (n-1)|lambda| - 2 n(lambda), an integer."""
    lam = Signature(lam)
    n = len(lam) if n is None else n
    return (n - 1) * lam.size - 2 * lam.weighted


def v_factor(lam: Sequence[int], x):
    """V_lambda(x) = prod over part values of prod_{j<=m} (1 - x^j)/(1 - x)."""
    out = 1
    for m in Signature(lam).mults().values():
        for j in range(2, m + 1):
            out = out * sum((x**i for i in range(j)), 0 * x)
    return out


def _qpow(q, e: int):
    return q**e if e >= 0 else 1 / (q ** (-e))


def _qval(q):
    return Fraction(q) if isinstance(q, int) else q


@dataclass(frozen=True)
class HeckeCoeff:
    case: str
    poly: IntPoly
    sign_exponent: int = 0

    def evaluate(self, q) -> int:
        return self.poly(q)

    def format(self) -> str:
        return self.poly.format("q")

    def to_json(self) -> dict:
        return {"case": self.case, "g": self.format(), "sign_exponent": self.sign_exponent}


class HeckeIntegralityError(ArithmeticError):
    def __init__(self, case, mu, nu, lam, failure: IntegralityFailure):
        super().__init__(f"g^{case} for mu={mu}, nu={nu}, lambda={lam} is not in Z[q]: {failure}")
        self.failure = failure


def hecke_g(case: str, mu, nu, lam) -> HeckeCoeff:
    """Structure coefficient g(q) as an integer polynomial in q."""
    mu, nu, lam = Signature(mu), Signature(nu), Signature(lam)
    c = lr_coeff(case, mu, nu, lam)
    if c.is_zero():
        return HeckeCoeff(case, IntPoly.const(0))
    if case == "alt":
        e = 2 * lam.weighted - 2 * nu.weighted - mu.weighted + mu.size
        sign = 0
    elif case == "her":
        e = lam.weighted - nu.weighted - 2 * mu.weighted
        sign = lam.weighted - nu.weighted
    else:
        raise ValueError(f"unknown case {case!r}")
    g = substitute(c, "1/t") * _qpow(T, e)
    if sign % 2:
        g = -g
    res = to_int_poly(g)
    if isinstance(res, IntegralityFailure):
        raise HeckeIntegralityError(case, mu, nu, lam, res)
    return HeckeCoeff(case, res, sign)


def coset_count(case: str, mu: Sequence[int], q=T):
    """N_mu, the number of left cosets in the double coset of pi_mu."""
    mu = Signature(mu)
    if mu and mu[-1] < 0:
        raise ValueError("coset_count needs nonnegative parts (shift first)")
    q = _qval(q)
    n = len(mu)
    if case == "alt":
        return _qpow(q, rho_pairing(mu)) * v_factor((0,) * n, 1 / q) / v_factor(mu, 1 / q)
    if case == "her":
        return _qpow(q, 2 * rho_pairing(mu)) * v_factor((0,) * n, 1 / q**2) / v_factor(mu, 1 / q**2)
    raise ValueError(f"unknown case {case!r}")


def orbit_volume(case: str, lam: Sequence[int], q=T):
    """Haar volume of the congruence orbit of the canonical matrix with singular numbers lambda."""
    lam = Signature(lam)
    q = _qval(q)
    n = len(lam)
    if case == "alt":
        return _qpow(q, 2 * rho_pairing(lam)) * v_factor((0,) * n, 1 / q**2) / v_factor(lam, 1 / q**2)
    if case == "her":
        return _qpow(q, rho_pairing(lam)) * v_factor((0,) * n, -1 / q) / v_factor(lam, -1 / q)
    raise ValueError(f"unknown case {case!r}")


def transition_prob(case: str, mu, nu, lam, q=T):
    """P(SN(B^* pi_nu B) = lambda) through g(q) V(lambda) / (N_mu V(nu))."""
    g = hecke_g(case, mu, nu, lam)
    q = _qval(q)
    if g.poly.is_zero():
        return 0 * q
    gq = g.poly.compose(q) if isinstance(q, RationalFunction) else g.poly(q)
    return gq * orbit_volume(case, lam, q) / (coset_count(case, mu, q) * orbit_volume(case, nu, q))
