"""Arithmetic in Z/p^K and in its unramified quadratic extension (Z/p^K)[s]/(s^2 - d).

Elements are immutable values.  Valuations are reported with an ``exact``
flag: an element that is 0 mod p^K has valuation at least K, which is all the
truncated ring can tell.

Random sampling uses SplitMix64 streams keyed by (seed, stream id), so any
sample can be regenerated on its own and the batch kernels in
``padic_hl.kernels`` reproduce the scalar draws exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "RingCfg",
    "BaseElem",
    "ExtElem",
    "Valuation",
    "NonUnitError",
    "SplitMix64",
    "stream_seed",
    "smallest_nonresidue",
    "ring_arith",
    "valuation",
    "involution_ops",
    "sample",
    "MAX_MODULUS",
]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
STREAM_SALT = 0xD1B54A32D192ED03

# products of two residues, times the non-residue, summed over a row must fit in int64
MAX_MODULUS = 1 << 26


class NonUnitError(ZeroDivisionError):
    """Inversion of an element with positive valuation."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def smallest_nonresidue(p: int) -> int:
    for d in range(2, p):
        if pow(d, (p - 1) // 2, p) == p - 1:
            return d
    raise ValueError(f"no quadratic non-residue mod {p}")


@dataclass(frozen=True)
class RingCfg:
    p: int
    K: int
    d: int | None = None

    def __post_init__(self):
        if not _is_prime(self.p) or self.p == 2:
            raise ValueError("p must be an odd prime")
        if self.K < 1:
            raise ValueError("precision K must be >= 1")
        if self.p**self.K > MAX_MODULUS:
            raise ValueError(f"p^K must not exceed {MAX_MODULUS}")
        if self.d is None:
            object.__setattr__(self, "d", smallest_nonresidue(self.p))
        elif pow(self.d % self.p, (self.p - 1) // 2, self.p) != self.p - 1:
            raise ValueError(f"{self.d} is not a quadratic non-residue mod {self.p}")

    @property
    def modulus(self) -> int:
        return self.p**self.K

    @property
    def q(self) -> int:
        return self.p


@dataclass(frozen=True)
class Valuation:
    v: int
    exact: bool


def _val_int(x: int, cfg: RingCfg) -> int:
    x %= cfg.modulus
    if x == 0:
        return cfg.K
    v = 0
    while x % cfg.p == 0:
        x //= cfg.p
        v += 1
    return v


@dataclass(frozen=True)
class BaseElem:
    x: int
    cfg: RingCfg

    def __post_init__(self):
        object.__setattr__(self, "x", self.x % self.cfg.modulus)

    def _other(self, y):
        if isinstance(y, int):
            return BaseElem(y, self.cfg)
        if isinstance(y, BaseElem):
            return y
        return NotImplemented

    def __add__(self, y):
        if isinstance(y, ExtElem):
            return ExtElem(self.x, 0, self.cfg) + y
        y = self._other(y)
        return BaseElem(self.x + y.x, self.cfg)

    __radd__ = __add__

    def __neg__(self):
        return BaseElem(-self.x, self.cfg)

    def __sub__(self, y):
        return self + (-y)

    def __rsub__(self, y):
        return (-self) + y

    def __mul__(self, y):
        if isinstance(y, ExtElem):
            return ExtElem(self.x, 0, self.cfg) * y
        y = self._other(y)
        return BaseElem(self.x * y.x, self.cfg)

    __rmul__ = __mul__

    def inv(self) -> "BaseElem":
        if self.x % self.cfg.p == 0:
            raise NonUnitError(f"{self.x} is not a unit mod {self.cfg.p}")
        return BaseElem(pow(self.x, -1, self.cfg.modulus), self.cfg)

    def valuation(self) -> Valuation:
        v = _val_int(self.x, self.cfg)
        return Valuation(v, self.x != 0)

    def __repr__(self):
        return f"{self.x} (mod {self.cfg.p}^{self.cfg.K})"


@dataclass(frozen=True)
class ExtElem:
    a: int
    b: int
    cfg: RingCfg

    def __post_init__(self):
        M = self.cfg.modulus
        object.__setattr__(self, "a", self.a % M)
        object.__setattr__(self, "b", self.b % M)

    def _other(self, y):
        if isinstance(y, int):
            return ExtElem(y, 0, self.cfg)
        if isinstance(y, BaseElem):
            return ExtElem(y.x, 0, self.cfg)
        if isinstance(y, ExtElem):
            return y
        return NotImplemented

    def __add__(self, y):
        y = self._other(y)
        return ExtElem(self.a + y.a, self.b + y.b, self.cfg)

    __radd__ = __add__

    def __neg__(self):
        return ExtElem(-self.a, -self.b, self.cfg)

    def __sub__(self, y):
        return self + (-self._other(y))

    def __rsub__(self, y):
        return (-self) + y

    def __mul__(self, y):
        y = self._other(y)
        d = self.cfg.d
        return ExtElem(self.a * y.a + d * self.b * y.b, self.a * y.b + self.b * y.a, self.cfg)

    __rmul__ = __mul__

    def conj(self) -> "ExtElem":
        return ExtElem(self.a, -self.b, self.cfg)

    def trace(self) -> BaseElem:
        return BaseElem(2 * self.a, self.cfg)

    def norm(self) -> BaseElem:
        return BaseElem(self.a * self.a - self.cfg.d * self.b * self.b, self.cfg)

    def inv(self) -> "ExtElem":
        n = self.norm()
        if n.x % self.cfg.p == 0:
            raise NonUnitError(f"{self} is not a unit")
        ninv = pow(n.x, -1, self.cfg.modulus)
        c = self.conj()
        return ExtElem(c.a * ninv, c.b * ninv, self.cfg)

    def valuation(self) -> Valuation:
        # s is a unit and the extension is unramified, so v(a + b s) = min(v(a), v(b))
        v = min(_val_int(self.a, self.cfg), _val_int(self.b, self.cfg))
        return Valuation(v, (self.a, self.b) != (0, 0))

    def __repr__(self):
        return f"{self.a}+{self.b}s (mod {self.cfg.p}^{self.cfg.K}, s^2={self.cfg.d})"


def ring_arith(op: str, x, y=None):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    raise ValueError(f"unknown op {op!r}")


def valuation(x) -> Valuation:
    return x.valuation()


@dataclass(frozen=True)
class InvolutionOps:
    conj: ExtElem
    trace: BaseElem
    norm: BaseElem


def involution_ops(x: ExtElem) -> InvolutionOps:
    return InvolutionOps(x.conj(), x.trace(), x.norm())


# ---------------------------------------------------------------------------
# random streams


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_seed(seed: int, stream: int) -> int:
    """Initial SplitMix64 state for stream ``stream`` of a run seeded with ``seed``."""
    base = _mix64((seed * GOLDEN + STREAM_SALT) & MASK64)
    return _mix64(base ^ _mix64((stream + STREAM_SALT) & MASK64))


class SplitMix64:
    """Counter-based 64-bit generator; one instance per (seed, stream)."""

    __slots__ = ("state",)

    def __init__(self, seed: int, stream: int = 0):
        self.state = stream_seed(seed, stream)

    def next64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix64(self.state)

    def below(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection, exact for every m."""
        limit = ((1 << 64) // m) * m
        while True:
            x = self.next64()
            if x < limit:
                return x % m


def sample(kind: str, cfg: RingCfg, rng: SplitMix64):
    M = cfg.modulus
    if kind == "base":
        return BaseElem(rng.below(M), cfg)
    if kind == "ext":
        a = rng.below(M)
        b = rng.below(M)
        return ExtElem(a, b, cfg)
    if kind == "base_unit_conditioned":
        while True:
            x = rng.below(M)
            if x % cfg.p:
                return BaseElem(x, cfg)
    raise ValueError(f"unknown sample kind {kind!r}")
