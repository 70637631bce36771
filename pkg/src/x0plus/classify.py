"""Per-level gonality classification for X0+(N).

``analyze_level`` assembles everything the library can compute for one
level (genus, quotient genera, point counts, inequality bounds), merges
in embedded literature facts and, optionally, externally computed
certificates, and produces a :class:`LevelReport` with gonality
intervals over Q and C.  ``verify_against_paper`` compares a range of
reports against the published classification embedded in the data file.

Two kinds of trusted input are distinguished.  Literature facts
(hyperellipticity and trigonality classifications of the quotient
curves) are always applied.  Certificates record machine computations
published alongside the classification (F_p-gonality searches, Betti
numbers, explicit gonal maps); they can be switched off, and every
report lists the ones it used.
"""

import json
from dataclasses import dataclass, field as dataclass_field
from importlib import resources

from . import arith, bounds, modsym, pointcount
from .bounds import Evidence, GonalityInterval, FIELD_C, FIELD_Q

FACTS_FORMAT_VERSION = 1

VERDICT_MATCH = "matches-paper"
VERDICT_INCOMPLETE = "consistent-but-incomplete"
VERDICT_ANOMALY = "paper-inconsistent/unresolved"

DEFAULT_PRIME_BUDGET = (2, 3, 5, 7, 11, 13)
OGG_PRIME_BOUND = 17
OGG_MAX_DEGREE = 6


class FactsError(RuntimeError):
    """The embedded fact file is missing or malformed; startup must abort."""


@dataclass(frozen=True)
class Certificate:
    """A trusted external computation; never recomputed, always disclosed."""

    level: int
    claim: str
    params: tuple  # sorted (name, value) pairs
    source: str

    VALID_CLAIMS = frozenset(
        {
            "FpGonalityAtLeast",
            "Beta22Zero",
            "CliffordIndexTwo",
            "ExplicitDegree4Map",
            "ExplicitDegree3Map",
        }
    )

    def __post_init__(self):
        if self.claim not in self.VALID_CLAIMS:
            raise FactsError(f"unknown certificate claim {self.claim}")

    @classmethod
    def make(cls, level, claim, params, source):
        items = tuple(sorted((str(k), v) for k, v in dict(params).items()))
        return cls(int(level), claim, items, source)

    def as_dict(self):
        return {
            "level": self.level,
            "claim": self.claim,
            "params": {k: v for k, v in self.params},
            "source": self.source,
        }


class Facts:
    """Immutable view over the embedded data file."""

    def __init__(self, raw):
        try:
            if raw["format_version"] != FACTS_FORMAT_VERSION:
                raise FactsError(
                    f"unsupported fact format version {raw['format_version']}"
                )
            thm = raw["theorems"]
            self.q3 = frozenset(thm["gonality_q3"])
            self.q4_c3 = frozenset(thm["gonality_q4_c3"])
            self.q4_c4 = frozenset(thm["gonality_q4_c4"])
            self.qge5_c4 = frozenset(thm["gonality_qge5_c4"])
            self.theorem_citation = thm["citation"]
            self.hyperelliptic = frozenset(raw["hyperelliptic_plus"]["levels"])
            self.hyperelliptic_citation = raw["hyperelliptic_plus"]["citation"]
            self.trigonal = frozenset(
                raw["trigonal_classification"]["q_trigonal_genus_ne4"]
            )
            self.trigonal_citation = raw["trigonal_classification"]["citation"]
            self.quotient_hyperelliptic = frozenset(
                (n, d) for n, d in raw["quotient_hyperelliptic"]["pairs"]
            )
            self.quotient_not_hyperelliptic = frozenset(
                (n, d) for n, d in raw["quotient_not_hyperelliptic"]["pairs"]
            )
            self.quotient_facts_citation = raw["quotient_not_hyperelliptic"]["citation"]
            self.anomalies = frozenset(
                raw["anomalies"]["unclassified_with_degree4_map"]
            )
            self._certificates = self._build_certificates(raw["certificates"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FactsError(f"malformed embedded fact file: {exc}") from exc
        for n, d in self.quotient_hyperelliptic | self.quotient_not_hyperelliptic:
            if n % d != 0 or arith.gcd(d, n // d) != 1:
                raise FactsError(f"quotient fact ({n}, {d}): d is not an exact divisor")

    @staticmethod
    def _build_certificates(raw):
        certs = {}

        def add(cert):
            certs.setdefault(cert.level, []).append(cert)

        fp = raw["fp_gonality"]
        for n, p, d in fp["rows"]:
            add(Certificate.make(n, "FpGonalityAtLeast", {"p": p, "bound": d}, fp["citation"]))
        qfp = raw["quotient_fp_gonality"]
        for n, p, d, b in qfp["rows"]:
            add(
                Certificate.make(
                    n,
                    "FpGonalityAtLeast",
                    {"p": p, "bound": b, "via_quotient_divisor": d},
                    qfp["citation"],
                )
            )
        beta = raw["beta22_zero"]
        for n in beta["levels"]:
            add(Certificate.make(n, "Beta22Zero", {}, beta["citation"]))
        cliff = raw["clifford_index_two"]
        for n in cliff["levels"]:
            add(Certificate.make(n, "CliffordIndexTwo", {}, cliff["citation"]))
        for key in (
            "degree4_map_genus6",
            "degree4_map_rational_divisors",
            "degree4_map_quadratic_points",
        ):
            grp = raw[key]
            for n in grp["levels"]:
                add(Certificate.make(n, "ExplicitDegree4Map", {}, grp["citation"]))
        d3 = raw["degree3_map_genus4"]
        for n in d3["levels"]:
            add(Certificate.make(n, "ExplicitDegree3Map", {}, d3["citation"]))
        return certs

    def certificates_for(self, N):
        return tuple(self._certificates.get(N, ()))

    def allowed_pairs_predicate(self, N):
        """Predicate on (gonQ, gonC) pairs admitted by the published
        classification for level N; the four theorem lists are read as
        exclusive iff statements."""
        if N in self.q3:
            return lambda q, c: q == 3 and c == 3
        if N in self.q4_c3:
            return lambda q, c: q == 4 and c == 3
        if N in self.q4_c4:
            return lambda q, c: q == 4 and c == 4
        if N in self.qge5_c4:
            return lambda q, c: q >= 5 and c == 4
        return lambda q, c: not (
            q == 3 or q == 4 and c in (3, 4) or q >= 5 and c == 4
        )


_FACTS = None


def embedded_facts():
    """Load and validate the shipped fact tables (cached per process)."""
    global _FACTS
    if _FACTS is None:
        try:
            text = (
                resources.files("x0plus").joinpath("data/facts.json").read_text()
            )
            raw = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise FactsError(f"cannot load embedded fact file: {exc}") from exc
        _FACTS = Facts(raw)
    return _FACTS


@dataclass
class LevelReport:
    level: arith.Level
    genus_plus: int
    gonq: GonalityInterval
    gonc: GonalityInterval
    counts: list = dataclass_field(default_factory=list)
    evidence: list = dataclass_field(default_factory=list)
    certificates_used: list = dataclass_field(default_factory=list)
    verdict: str = VERDICT_INCOMPLETE

    def add(self, ev):
        """Merge one Evidence record, propagating between fields in the
        only valid directions: C-lower bounds also bound gon_Q from below
        (gon_C <= gon_Q), Q-upper bounds also bound gon_C from above."""
        if ev.side == "lower":
            self.gonq.merge_lower(ev.bound)
            if ev.field_tag == FIELD_C:
                self.gonc.merge_lower(ev.bound)
        else:
            self.gonc.merge_upper(ev.bound)
            if ev.field_tag == FIELD_Q:
                self.gonq.merge_upper(ev.bound)
        self.evidence.append(ev)

    def as_dict(self):
        return {
            "N": self.level.N,
            "genus_plus": self.genus_plus,
            "gonQ": self.gonq.as_dict(),
            "gonC": self.gonc.as_dict(),
            "counts": [
                {"p": p, "r": r, "count": c} for p, r, c in self.counts
            ],
            "evidence": [ev.as_dict() for ev in self.evidence],
            "certificates_used": [c.as_dict() for c in self.certificates_used],
            "verdict": self.verdict,
        }


def _pin(report, kind, params, value, citation=""):
    report.add(Evidence.make(kind, params, FIELD_C, "lower", value, citation))
    report.add(Evidence.make(kind, params, FIELD_Q, "upper", value, citation))


def analyze_level(N, use_certificates=True, prime_budget=None, space=None):
    """Full evidence assembly for one level; see the module docstring."""
    level = arith.as_level(N)
    if level.N < 2:
        raise ValueError("analyze_level requires N >= 2")
    facts = embedded_facts()
    if prime_budget is None:
        prime_budget = DEFAULT_PRIME_BUDGET
    if space is None:
        space = modsym.build_space(level)
    g = modsym.genus_plus(space)
    report = LevelReport(
        level, g, GonalityInterval(FIELD_Q), GonalityInterval(FIELD_C)
    )

    if g == 0:
        _pin(report, bounds.POONEN_GENUS, {"N": level.N, "genus": 0}, 1)
        report.verdict = _verdict(report, facts)
        return report
    if g <= 2:
        # genus 1 with a rational cusp and genus 2 both carry a canonical
        # degree 2 map, and genus >= 1 rules out degree 1
        _pin(report, bounds.POONEN_GENUS, {"N": level.N, "genus": g}, 2)
        report.verdict = _verdict(report, facts)
        return report

    if level.N in facts.hyperelliptic:
        _pin(
            report,
            bounds.CERTIFICATE,
            {"N": level.N, "fact": "hyperelliptic"},
            2,
            facts.hyperelliptic_citation,
        )
        report.verdict = _verdict(report, facts)
        return report

    # genus >= 3, not hyperelliptic
    report.add(
        Evidence.make(
            bounds.CERTIFICATE,
            {"N": level.N, "fact": "not-hyperelliptic", "genus": g},
            FIELD_C,
            "lower",
            3,
            facts.hyperelliptic_citation,
        )
    )
    ub_q, ub_c = bounds.poonen_upper_bounds(g, True)
    report.add(
        Evidence.make(
            bounds.POONEN_GENUS,
            {"N": level.N, "genus": g, "rational_point": True},
            FIELD_Q,
            "upper",
            ub_q,
        )
    )
    report.add(
        Evidence.make(
            bounds.POONEN_GENUS,
            {"N": level.N, "genus": g},
            FIELD_C,
            "upper",
            ub_c,
        )
    )

    # degree 2 maps to the quotients X0(N)/<w_d, w_N>
    quotient_genera = {}
    for d in arith.exact_divisors(level):
        if d in (1, level.N):
            continue
        gq = modsym.quotient_genus(space, {d, level.N})
        quotient_genera[d] = gq
        hyper = gq == 2 or (level.N, d) in facts.quotient_hyperelliptic
        if gq == 0 or gq == 1 or hyper:
            # P1 image: degree 2; elliptic or hyperelliptic image: the
            # composition with the image's degree <= 2 map has degree <= 4.
            # Genus 1 quotients carry the rational image of the infinity
            # cusp, so their degree 2 map is defined over Q.
            upper = 2 if gq == 0 else 4
            report.add(
                Evidence.make(
                    bounds.QUOTIENT_MAP,
                    {"N": level.N, "d": d, "quotient_genus": gq},
                    FIELD_Q,
                    "upper",
                    upper,
                    facts.quotient_facts_citation if gq >= 3 else "",
                )
            )

    if level.N in facts.trigonal:
        # classified trigonal curve: degree 3 map defined over Q
        report.add(
            Evidence.make(
                bounds.CERTIFICATE,
                {"N": level.N, "fact": "trigonal", "genus": g},
                FIELD_Q,
                "upper",
                3,
                facts.trigonal_citation,
            )
        )
    elif g >= 5:
        report.add(
            Evidence.make(
                bounds.CERTIFICATE,
                {"N": level.N, "fact": "not-trigonal-over-C", "genus": g},
                FIELD_C,
                "lower",
                4,
                facts.trigonal_citation,
            )
        )

    # cheap computed lower bounds
    for d_max in range(OGG_MAX_DEGREE, 0, -1):
        p = bounds.ogg_eliminates(level, d_max, OGG_PRIME_BOUND)
        if p is not None:
            report.add(
                Evidence.make(
                    bounds.OGG_COUNT,
                    {"N": level.N, "p": p, "excluded_degree": d_max},
                    FIELD_Q,
                    "lower",
                    d_max + 1,
                )
            )
            break

    psi = arith.psi(level)
    ks_full = bounds.kim_sarnak_lb(psi)
    report.add(
        Evidence.make(
            bounds.KIM_SARNAK,
            {"N": level.N, "index": psi},
            FIELD_C,
            "lower",
            -(-ks_full // 2),
        )
    )

    for d, gq in sorted(quotient_genera.items()):
        if (
            (level.N, d) in facts.quotient_not_hyperelliptic
            and gq >= 2
            and bounds.cs_forces_degree4_factorization(g, gq)
        ):
            report.add(
                Evidence.make(
                    bounds.CASTELNUOVO_SEVERI,
                    {"N": level.N, "d": d, "g_plus": g, "g_quotient": gq},
                    FIELD_C,
                    "lower",
                    5,
                    facts.quotient_facts_citation,
                )
            )

    if use_certificates:
        for cert in facts.certificates_for(level.N):
            _apply_certificate(report, cert, g)

    # point counts over F_{p^2}, only while the Q-interval is unresolved
    for p in prime_budget:
        if report.gonq.pinned or report.gonq.lower >= 5:
            break
        if level.N % p == 0:
            continue
        req = pointcount.make_request(level.N, {level.N}, p, 2)
        count = pointcount.count_points(req, space)
        report.counts.append((p, 2, count))
        lb = bounds.gonality_lb_from_count(count, p * p)
        if lb > report.gonq.lower:
            report.add(
                Evidence.make(
                    bounds.EXPLICIT_COUNT,
                    {"N": level.N, "p": p, "r": 2, "count": count},
                    FIELD_Q,
                    "lower",
                    lb,
                )
            )

    gonq_not_4 = report.gonq.lower >= 5 or (
        report.gonq.upper is not None and report.gonq.upper <= 3
    )
    if bounds.tower_rule(g, gonq_not_4) and report.gonc.lower == 4:
        report.add(
            Evidence.make(
                bounds.TOWER_RULE,
                {"N": level.N, "genus": g},
                FIELD_C,
                "lower",
                5,
            )
        )

    report.verdict = _verdict(report, facts)
    return report


def _apply_certificate(report, cert, g):
    params = dict(cert.params)
    params["N"] = cert.level
    if cert.claim == "FpGonalityAtLeast":
        # gon_{F_p} <= gon_Q, so the bound carries over to Q only
        report.add(
            Evidence.make(
                bounds.CERTIFICATE,
                params,
                FIELD_Q,
                "lower",
                params["bound"],
                cert.source,
            )
        )
    elif cert.claim == "Beta22Zero":
        # valid only for non-hyperelliptic, non-trigonal curves of genus >= 5
        if g >= 5 and report.gonc.lower >= 4:
            report.add(
                Evidence.make(
                    bounds.CERTIFICATE, params, FIELD_C, "lower", 5, cert.source
                )
            )
        else:
            return
    elif cert.claim == "CliffordIndexTwo":
        report.add(
            Evidence.make(bounds.CERTIFICATE, params, FIELD_C, "upper", 4, cert.source)
        )
    elif cert.claim == "ExplicitDegree4Map":
        report.add(
            Evidence.make(bounds.CERTIFICATE, params, FIELD_Q, "upper", 4, cert.source)
        )
    elif cert.claim == "ExplicitDegree3Map":
        report.add(
            Evidence.make(bounds.CERTIFICATE, params, FIELD_Q, "upper", 3, cert.source)
        )
    report.certificates_used.append(cert)


def _feasible_pairs(report):
    q_hi = report.gonq.upper
    c_hi = report.gonc.upper
    if q_hi is None:
        q_hi = max(report.gonq.lower, 2 * report.genus_plus)
    if c_hi is None:
        c_hi = q_hi
    pairs = []
    for q in range(report.gonq.lower, q_hi + 1):
        for c in range(report.gonc.lower, min(c_hi, q) + 1):
            pairs.append((q, c))
    return pairs


def _verdict(report, facts):
    N = report.level.N
    if N in facts.anomalies:
        return VERDICT_ANOMALY
    allowed = facts.allowed_pairs_predicate(N)
    pairs = _feasible_pairs(report)
    flags = [allowed(q, c) for q, c in pairs]
    if pairs and all(flags):
        return VERDICT_MATCH
    if any(flags):
        return VERDICT_INCOMPLETE
    return VERDICT_ANOMALY


@dataclass
class DiffReport:
    """Outcome of comparing a level range against the published lists."""

    nmin: int
    nmax: int
    exact_match: list = dataclass_field(default_factory=list)
    consistent: list = dataclass_field(default_factory=list)
    contradiction: list = dataclass_field(default_factory=list)
    anomalies: list = dataclass_field(default_factory=list)
    reports: dict = dataclass_field(default_factory=dict)

    @property
    def clean(self):
        """True when every level checks out modulo the recorded anomalies."""
        return not self.contradiction

    def as_dict(self):
        return {
            "range": [self.nmin, self.nmax],
            "exact_match": self.exact_match,
            "consistent": self.consistent,
            "contradiction": self.contradiction,
            "anomalies": self.anomalies,
        }


def verify_against_paper(
    nmin, nmax, use_certificates=True, prime_budget=None, progress=None, jobs=1
):
    """Analyze every level in [nmin, nmax] and bucket the outcomes.

    Levels whose interval admits only classification-compatible gonality
    pairs land in ``exact_match``; levels whose interval admits both
    compatible and incompatible pairs land in ``consistent``; levels
    admitting no compatible pair land in ``contradiction``, except for
    the anomalies recorded in the embedded data, which are reported
    separately.
    """
    if not (2 <= nmin <= nmax <= 5000):
        raise ValueError("range must lie within [2, 5000]")
    facts = embedded_facts()
    diff = DiffReport(nmin, nmax)
    levels = range(nmin, nmax + 1)
    if jobs > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = pool.map(
                _analyze_for_sweep,
                [(n, use_certificates, prime_budget) for n in levels],
                chunksize=8,
            )
            reports = list(reports)
    else:
        reports = []
        for n in levels:
            reports.append(_analyze_for_sweep((n, use_certificates, prime_budget)))
            if progress is not None:
                progress(n)
    for rep in reports:
        n = rep.level.N
        diff.reports[n] = rep
        if n in facts.anomalies:
            diff.anomalies.append(n)
        elif rep.verdict == VERDICT_MATCH:
            diff.exact_match.append(n)
        elif rep.verdict == VERDICT_INCOMPLETE:
            diff.consistent.append(n)
        else:
            diff.contradiction.append(n)
    return diff


def _analyze_for_sweep(args):
    n, use_certificates, prime_budget = args
    return analyze_level(
        n, use_certificates=use_certificates, prime_budget=prime_budget
    )


def replay_evidence(ev, space=None):
    """Recompute an Evidence record's conclusion from its parameters.

    Returns the recomputed bound; certificates are trusted inputs and
    replay to their stored bound by definition.
    """
    params = dict(ev.params)
    kind = ev.kind
    if kind == bounds.OGG_COUNT:
        n, p, d = params["N"], params["p"], params["excluded_degree"]
        if arith.ogg_L(n, p) <= 2 * d * (p * p + 1):
            raise ValueError("stored elimination no longer holds")
        return d + 1
    if kind == bounds.EXPLICIT_COUNT:
        n, p, r = params["N"], params["p"], params["r"]
        req = pointcount.make_request(n, {n}, p, r)
        count = pointcount.count_points(req, space)
        if count != params["count"]:
            raise ValueError("stored count does not replay")
        return bounds.gonality_lb_from_count(count, p**r)
    if kind == bounds.KIM_SARNAK:
        return -(-bounds.kim_sarnak_lb(params["index"]) // 2)
    if kind == bounds.CASTELNUOVO_SEVERI:
        n, d = params["N"], params["d"]
        gq = modsym.quotient_genus(space if space is not None else n, {d, n})
        if gq != params["g_quotient"]:
            raise ValueError("stored quotient genus does not replay")
        if not bounds.cs_forces_degree4_factorization(params["g_plus"], gq):
            raise ValueError("stored forcing inequality no longer holds")
        return 5
    if kind == bounds.QUOTIENT_MAP:
        n, d = params["N"], params["d"]
        gq = modsym.quotient_genus(space if space is not None else n, {d, n})
        if gq != params["quotient_genus"]:
            raise ValueError("stored quotient genus does not replay")
        return 2 if gq == 0 else 4
    if kind == bounds.POONEN_GENUS:
        g = params["genus"]
        if g <= 2:
            return ev.bound
        ub_q, ub_c = bounds.poonen_upper_bounds(g, True)
        return ub_q if ev.field_tag == FIELD_Q else ub_c
    if kind == bounds.TOWER_RULE:
        if params["genus"] < 10:
            raise ValueError("tower rule needs genus >= 10")
        return 5
    if kind == bounds.CERTIFICATE:
        return ev.bound
    raise ValueError(f"unknown evidence kind {kind}")
