"""Parameter boxes of the strong- and weak-type estimates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from ..errors import ParameterError

STRONG = "strong"
WEAK = "weak"

# p must equal d/n for the weak estimate; p is usually typed as a decimal
P_MATCH_TOL = 1e-12


def strong_delta(d, alpha, gamma, p, q):
    return (q / p) * (d - (alpha - gamma) * p)


def weak_delta(n, alpha, gamma, q):
    return q * (n - alpha + gamma)


def weak_delta_consistent(n, d, alpha, gamma, q) -> bool:
    """q(n - alpha + gamma) == (q/p)(d - (alpha - gamma)p) at p = d/n, in exact rationals."""
    n, d, alpha, gamma, q = (Fraction(x) for x in (n, d, alpha, gamma, q))
    p = d / n
    return q * (n - alpha + gamma) == (q / p) * (d - (alpha - gamma) * p)


@dataclass(frozen=True)
class TheoremParams:
    n: int
    L: int
    d: float
    alpha: float
    gamma: float
    p: float
    q: float
    kind: str = STRONG

    @property
    def delta(self) -> float:
        if self.kind == WEAK:
            return weak_delta(self.n, self.alpha, self.gamma, self.q)
        return strong_delta(self.d, self.alpha, self.gamma, self.p, self.q)

    @property
    def weight_order(self) -> float:
        """Order gamma*q of the maximal operator applied to the weight."""
        return self.gamma * self.q

    @property
    def weight_exponent(self) -> float:
        return self.p / self.q

    @classmethod
    def strong(cls, n, L, d, alpha, gamma, p, q) -> TheoremParams:
        tp = cls(int(n), int(L), float(d), float(alpha), float(gamma), float(p), float(q), STRONG)
        tp.validate()
        return tp

    @classmethod
    def weak(cls, n, L, d, alpha, gamma, q, p=None) -> TheoremParams:
        p = float(d) / int(n) if p is None else float(p)
        tp = cls(int(n), int(L), float(d), float(alpha), float(gamma), p, float(q), WEAK)
        tp.validate()
        return tp

    def validate(self) -> None:
        n, d, a, g, p, q = self.n, self.d, self.alpha, self.gamma, self.p, self.q
        _require(n >= 1, "requires n >= 1")
        _require(0 < d <= n, "requires 0 < d <= n")
        _require(0 <= a < n, "requires 0 <= alpha < n")
        _require(0 <= g <= a, "requires 0 <= gamma <= alpha")
        _require(p > 0 and math.isfinite(q), "requires 0 < p and finite q")
        if self.kind == STRONG:
            _require(d / n < p, "requires d/n < p")
            _require(p <= q, "requires p <= q")
            _require(g * q < n, "requires q < n/gamma")
            _require(a * p < d, "requires p < d/alpha")
        elif self.kind == WEAK:
            _require(abs(p - d / n) <= P_MATCH_TOL * max(1.0, d / n), "requires p = d/n")
            _require(d / n <= q, "requires d/n <= q")
            _require(a * q <= n, "requires q <= n/alpha")
            _require(weak_delta_consistent(n, d, a, g, q),
                     "requires q(n-alpha+gamma) = (q/p)(d-(alpha-gamma)p) at p = d/n")
        else:
            raise ParameterError(f"unknown estimate kind {self.kind!r}")
        delta = self.delta
        _require(delta > 0, "requires delta > 0")
        # the content module accepts dimensions in (0, n] only
        _require(delta <= n, "requires delta <= n on the truncated grid")

    def record(self) -> dict:
        out = asdict(self)
        out.pop("kind")
        out["delta"] = self.delta
        return out


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ParameterError(message)
