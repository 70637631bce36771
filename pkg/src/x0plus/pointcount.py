"""Point counts of X0(N) and its Atkin-Lehner quotients over F_p and F_{p^2}.

Counts come from traces of T_p and T_p^2 on the invariant cuspidal
subspace: with S the fixed subspace for the chosen involutions, g_W =
dim(S)/2, t1 = tr(T_p | S) and t2 = tr(T_p^2 | S),

    #C(F_p)     = p   + 1 - t1/2,
    #C(F_{p^2}) = p^2 + 1 - t2/2 + 2 p g_W.

No explicit curve models are ever computed.
"""

import math
from dataclasses import dataclass, field

from . import arith, modsym
from .exactla import restrict


class BadReduction(ValueError):
    """p divides N: the trace method needs good reduction."""


class NonIntegerCount(ArithmeticError):
    """The trace combination failed to produce a nonnegative integer; this
    can only arise from an operator bug and is fatal."""


@dataclass(frozen=True)
class CountRequest:
    level: arith.Level
    keys: frozenset  # Atkin-Lehner divisors; empty = X0(N) itself
    p: int
    r: int = 1

    def __post_init__(self):
        if self.level.N % self.p == 0:
            raise BadReduction(f"p={self.p} divides N={self.level.N}")
        if self.r not in (1, 2):
            raise ValueError("r must be 1 or 2")


def make_request(N, keys, p, r):
    return CountRequest(arith.as_level(N), frozenset(int(k) for k in keys), p, r)


def count_points(req, space=None):
    """Number of points of X0(N)/<w_Q : Q in keys> over F_{p^r}."""
    if space is None:
        space = modsym.build_space(req.level)
    if req.keys:
        basis = space.fixed_cuspidal_subspace(req.keys)
        g_w2 = basis.cols
        ts = restrict(space.hecke_matrix(req.p), basis)
    else:
        ts = space.hecke_matrix(req.p)
        g_w2 = space.cuspidal_dimension
    if g_w2 % 2 != 0:
        raise NonIntegerCount("odd invariant subspace dimension")
    g_w = g_w2 // 2
    p = req.p
    if req.r == 1:
        t1 = ts.trace()
        val = p + 1 - t1 / 2
    else:
        t2 = ts.square().trace()
        val = p * p + 1 - t2 / 2 + 2 * p * g_w
    if val.denominator != 1 or val < 0:
        raise NonIntegerCount(f"count {val} is not a nonnegative integer")
    return int(val)


def hasse_weil_window(g, q):
    """Exact integer envelope [q+1 - 2g*sqrt(q), q+1 + 2g*sqrt(q)], lower
    bound clamped at 0."""
    s = math.isqrt(4 * g * g * q)  # floor(2g sqrt q)
    lo = q + 1 - s  # = ceil(q + 1 - 2g sqrt q)
    hi = q + 1 + s
    return (max(lo, 0), hi)
