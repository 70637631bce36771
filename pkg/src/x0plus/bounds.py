"""Inequality toolkit for gonality bounds.

Each operation returns plain values; the classifier wraps results in
:class:`Evidence` records that carry enough parameters to replay the
deduction.
"""

from dataclasses import dataclass

from . import arith

FIELD_Q = "Q"
FIELD_C = "C"

# Evidence kinds
OGG_COUNT = "OggCount"
EXPLICIT_COUNT = "ExplicitCount"
KIM_SARNAK = "KimSarnak"
CASTELNUOVO_SEVERI = "CastelnuovoSeveri"
QUOTIENT_MAP = "QuotientMap"
POONEN_GENUS = "PoonenGenus"
TOWER_RULE = "TowerRule"
CERTIFICATE = "Certificate"

EVIDENCE_KINDS = frozenset(
    {
        OGG_COUNT,
        EXPLICIT_COUNT,
        KIM_SARNAK,
        CASTELNUOVO_SEVERI,
        QUOTIENT_MAP,
        POONEN_GENUS,
        TOWER_RULE,
        CERTIFICATE,
    }
)


@dataclass
class GonalityInterval:
    """[lower, upper] bounds on the gonality over one base field."""

    field_tag: str
    lower: int = 1
    upper: int | None = None  # None = unknown

    def merge_lower(self, value):
        if value > self.lower:
            self.lower = value
            return True
        return False

    def merge_upper(self, value):
        if self.upper is None or value < self.upper:
            self.upper = value
            return True
        return False

    @property
    def pinned(self):
        return self.upper is not None and self.lower == self.upper

    def contains(self, value):
        return self.lower <= value and (self.upper is None or value <= self.upper)

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class Evidence:
    """A tagged, replayable justification for a one-sided gonality bound."""

    kind: str
    params: tuple  # sorted (name, value) pairs
    field_tag: str
    side: str  # "lower" | "upper"
    bound: int
    citation: str = ""

    def __post_init__(self):
        if self.kind not in EVIDENCE_KINDS:
            raise ValueError(f"unknown evidence kind {self.kind}")
        if self.side not in ("lower", "upper"):
            raise ValueError("side must be lower or upper")

    @classmethod
    def make(cls, kind, params, field_tag, side, bound, citation=""):
        items = tuple(sorted((str(k), v) for k, v in dict(params).items()))
        return cls(kind, items, field_tag, side, int(bound), citation)

    def as_dict(self):
        return {
            "kind": self.kind,
            "params": {k: v for k, v in self.params},
            "conclusion": {
                "field": self.field_tag,
                "side": self.side,
                "bound": self.bound,
            },
            "citation": self.citation,
        }


# -- Ogg elimination ---------------------------------------------------------


def ogg_eliminates(level, d_max, p_bound):
    """Smallest prime p <= p_bound, p coprime to N, violating
    L_p(N) <= 2*d_max*(p^2+1); None when every such prime satisfies it.

    A violation shows X0(N) has no rational map of degree 2*d_max to the
    line, hence the degree-2 quotient has Q-gonality > d_max.
    """
    level = arith.as_level(level)
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    p = 2
    while p <= p_bound:
        if level.N % p != 0:
            if arith.ogg_L(level, p) > 2 * d_max * (p * p + 1):
                return p
        p = _next_prime(p)
    return None


def _next_prime(p):
    q = p + 1
    while any(q % r == 0 for r in range(2, int(q**0.5) + 1)):
        q += 1
    return q


def gonality_lb_from_count(count, q):
    """Largest lower bound from #C(F_q) = count: gonality > d whenever
    count > d(q+1), i.e. gonality >= ceil(count/(q+1))."""
    if count < 0 or q < 2:
        raise ValueError("count >= 0 and q >= 2 required")
    return -(-count // (q + 1))


def kim_sarnak_lb(index):
    """Smallest gonality d of a congruence curve of index ``index``
    consistent with the linear index bound: ceil(119*index/12000)."""
    if index < 1:
        raise ValueError("index must be positive")
    return -(-119 * index // 12000)


def cs_holds(gX, m, gY, n, gZ):
    """Castelnuovo-Severi inequality g(X) <= m g(Y) + n g(Z) + (m-1)(n-1)."""
    if m < 1 or n < 1 or min(gX, gY, gZ) < 0:
        raise ValueError("degrees >= 1 and genera >= 0 required")
    return gX <= m * gY + n * gZ + (m - 1) * (n - 1)


def cs_forces_degree4_factorization(g_plus, g_quotient):
    """True when a degree-4 map from the curve of genus ``g_plus`` would be
    forced to factor through its degree-2 quotient of genus ``g_quotient``
    (the inequality fails for the pair of maps): g_plus > 2*g_quotient + 3."""
    if min(g_plus, g_quotient) < 0:
        raise ValueError("genera >= 0 required")
    return not cs_holds(g_plus, 4, 0, 2, g_quotient)


def poonen_upper_bounds(g, has_rational_point):
    """(ubQ, ubC) from the genus: gon <= 2g-2; gon <= g with a rational
    point; gon_C <= floor((g+3)/2).  Only meaningful for g >= 2."""
    if g < 2:
        raise ValueError("genus >= 2 required; smaller genera are handled directly")
    ub_q = 2 * g - 2
    if has_rational_point:
        ub_q = min(ub_q, g)
    ub_c = min(ub_q, (g + 3) // 2)
    return ub_q, ub_c


def tower_rule(g, gonq_not_4, has_rational_point=True):
    """Contrapositive of the tower-theorem corollary: for a curve with a
    rational point, genus >= 10 and Q-gonality != 4 rule out C-gonality 4.

    Returns True when the deduction applies (gon_C != 4), None otherwise.
    """
    if has_rational_point and g >= 10 and gonq_not_4:
        return True
    return None
