"""Weight-2 modular symbols for Gamma_0(N).

The space is presented on Manin symbols indexed by P^1(Z/N), modulo the
two-term and three-term relations x + xS = 0 and x + xT + xT^2 = 0.  The
cuspidal subspace is the kernel of the boundary map to the free space on
cusp classes.  Hecke operators T_p (p coprime to N) act through the p+1
standard degree-p coset representatives, Atkin-Lehner involutions w_Q
through a normalizing matrix of determinant Q; in both cases images of
paths are converted back to Manin symbols with Manin's continued-fraction
trick.

Canonical form on P^1(Z/N): (u, v) is reduced so that u = gcd(u, N) and v
is the smallest representative reachable by unit scaling (the classical
normal form).  The generator order is the sorted order of these pairs.
Cache files depend on this rule; bump CACHE_FORMAT_VERSION if it changes.
"""

import heapq
from dataclasses import dataclass
from math import gcd

from . import arith
from .exactla import ExactMatrix, NonInvariantSubspace
from .rationals import QQ, ZERO, ONE

CACHE_FORMAT_VERSION = 1


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def p1_normalize(N, u, v):
    """Canonical representative of (u : v) in P^1(Z/N).

    Returns None when gcd(u, v, N) > 1 (not a projective point).
    """
    if N == 1:
        return (0, 0)
    u %= N
    v %= N
    if u == 0:
        return (0, 1) if gcd(v, N) == 1 else None
    g, s, _ = _xgcd(u, N)
    s %= N
    if gcd(g, v) != 1:
        return None
    # make s a unit mod N (it is one mod N/g); then (u, v) ~ (g, s*v)
    if g != 1:
        d = N // g
        while gcd(s, N) != 1:
            s = (s + d) % N
    u = g
    v = (s * v) % N
    if g != 1:
        # minimize v over remaining unit scalings t = 1 mod N/g
        Ng = N // g
        vNg = (v * Ng) % N
        min_v = v
        t = 1
        w = v
        for _ in range(2, g + 1):
            w = (w + vNg) % N
            t = (t + Ng) % N
            if w < min_v and gcd(t, N) == 1:
                min_v = w
        v = min_v
    return (u, v)


def p1_list(level):
    """Ordered list of canonical P^1(Z/N) representatives, length psi(N).

    Built locally at each prime power and glued by CRT, then normalized.
    """
    level = arith.as_level(level)
    N = level.N
    if N == 1:
        return [(0, 0)]
    local = []  # per prime power: list of (u, v) mod q
    moduli = []
    for p, e in level.factorization:
        q = p**e
        reps = [(1, a) for a in range(q)] + [(p * t % q, 1) for t in range(q // p)]
        local.append(reps)
        moduli.append(q)
    # CRT glue
    cur = [(u, v, 1) for u, v in local[0]]
    mod = moduli[0]
    for reps, q in zip(local[1:], moduli[1:]):
        # x ≡ a (mod mod), x ≡ b (mod q)
        _, inv, _ = _xgcd(mod, q)
        nxt = []
        for u0, v0, _ in cur:
            for u1, v1 in reps:
                u = (u0 + (u1 - u0) * inv % q * mod) % (mod * q)
                v = (v0 + (v1 - v0) * inv % q * mod) % (mod * q)
                nxt.append((u, v, 1))
        cur = nxt
        mod *= q
    pts = set()
    for u, v, _ in cur:
        nrm = p1_normalize(N, u, v)
        if nrm is None:
            raise ArithmeticError("CRT glue produced a non-projective pair")
        pts.add(nrm)
    expected = arith.psi(level)
    if len(pts) != expected:
        raise ArithmeticError(
            f"P1(Z/{N}) enumeration found {len(pts)} classes, expected {expected}"
        )
    return sorted(pts)


def lift_to_sl2z(u, v, N):
    """An SL_2(Z) matrix whose bottom row is congruent mod N to a
    representative of the class (u : v)."""
    if N == 1 or (u % N == 0):
        return (1, 0, 0, 1)
    c = u % N
    d = v % N
    k = 0
    while gcd(c, d + k * N) != 1:
        k += 1
        if k > 2 * N + 2:
            raise ArithmeticError("no coprime lift found")
    d += k * N
    _, a, negb = _xgcd(d, c)
    # a*d + negb*c = 1  ->  det [a, -negb; c, d] = a*d + negb*c = 1
    return (a, -negb, c, d)


# -- cusps -------------------------------------------------------------------


def normalize_cusp(a, c):
    """Reduce a/c to lowest terms with c >= 0 (infinity is (1, 0))."""
    if c == 0:
        return (1, 0)
    g = gcd(abs(a), abs(c))
    a //= g
    c //= g
    if c < 0:
        a, c = -a, -c
    return (a, c)


def _inverse_mod(a, m):
    if m == 0:
        return a  # a = +-1; its own inverse
    if m == 1:
        return 0
    g, s, _ = _xgcd(a % m, m)
    if g != 1:
        raise ValueError("not invertible")
    return s % m


def cusp_equivalent(cusp1, cusp2, level):
    """Gamma_0(N)-equivalence of two cusps, given as (numerator, denominator)
    pairs in lowest terms with infinity = (1, 0)."""
    level = arith.as_level(level)
    N = level.N
    a1, c1 = normalize_cusp(*cusp1)
    a2, c2 = normalize_cusp(*cusp2)
    s1 = _inverse_mod(a1, c1)
    s2 = _inverse_mod(a2, c2)
    m = gcd(c1 * c2, N)
    return (s1 * c2 - s2 * c1) % m == 0


def cusp_representatives(level):
    """One representative per Gamma_0(N)-class of cusps, nu_inf(N) of them."""
    level = arith.as_level(level)
    N = level.N
    reps = []
    for d in arith.divisors(level):
        m = gcd(d, N // d)
        for x in range(m):
            if gcd(x, m) != 1 and not (m == 1 and x == 0):
                continue
            a = x if m > 1 else 1
            # adjust a by multiples of m until coprime to d
            k = 0
            while gcd(a + k * m, d) != 1:
                k += 1
            reps.append(normalize_cusp(a + k * m, d))
    expected = arith.nu_inf(level)
    if len(reps) != expected:
        raise ArithmeticError(
            f"cusp enumeration found {len(reps)} classes, expected {expected}"
        )
    return reps


# -- relation elimination ----------------------------------------------------


def _eliminate_relations(relations, variables):
    """Sparse Gaussian elimination over Q.

    relations: list of {var: integer coefficient}.  Returns (free_vars,
    expr) where expr maps every variable to {free_var: QQ}.  Deterministic:
    rows are processed shortest-first, pivots chosen by (occurrence count,
    variable index).
    """
    rows = {}
    occ = {v: set() for v in variables}
    for rid, rel in enumerate(relations):
        row = {v: QQ(c) for v, c in rel.items() if c}
        if not row:
            continue
        rows[rid] = row
        for v in row:
            occ[v].add(rid)
    version = {rid: 0 for rid in rows}
    heap = [(len(row), rid, 0) for rid, row in rows.items()]
    heapq.heapify(heap)
    elim_order = []
    eliminated = set()
    while heap:
        ln, rid, ver = heapq.heappop(heap)
        if rid not in rows or version[rid] != ver:
            continue
        row = rows.pop(rid)
        if not row:
            continue
        pivot = min(row, key=lambda w: (len(occ[w]), w))
        c = row.pop(pivot)
        for w in row:
            occ[w].discard(rid)
        occ[pivot].discard(rid)
        expr = {w: -cw / c for w, cw in row.items()}
        elim_order.append((pivot, expr))
        eliminated.add(pivot)
        for rid2 in list(occ[pivot]):
            row2 = rows[rid2]
            f = row2.pop(pivot)
            occ[pivot].discard(rid2)
            for w, e in expr.items():
                nv = row2.get(w, ZERO) + f * e
                if nv:
                    if w not in row2:
                        occ[w].add(rid2)
                    row2[w] = nv
                else:
                    if w in row2:
                        del row2[w]
                        occ[w].discard(rid2)
            version[rid2] += 1
            heapq.heappush(heap, (len(row2), rid2, version[rid2]))
    free = [v for v in variables if v not in eliminated]
    expr_final = {v: {v: ONE} for v in free}
    for var, expr in reversed(elim_order):
        acc = {}
        for w, c in expr.items():
            for fv, fc in expr_final[w].items():
                nv = acc.get(fv, ZERO) + c * fc
                if nv:
                    acc[fv] = nv
                elif fv in acc:
                    del acc[fv]
        expr_final[var] = acc
    return free, expr_final


# -- the space ---------------------------------------------------------------


@dataclass(frozen=True)
class AtkinLehnerKey:
    """Q with Q | N, gcd(Q, N/Q) = 1 and Q > 1."""

    Q: int

    @staticmethod
    def validate(Q, level):
        level = arith.as_level(level)
        N = level.N
        if Q <= 1 or N % Q != 0 or gcd(Q, N // Q) != 1:
            raise ValueError(f"Q={Q} is not an exact divisor > 1 of N={N}")
        return AtkinLehnerKey(Q)


def al_product(q1, q2, N):
    """w_{q1} w_{q2} = w_{q1 q2 / gcd(q1, q2)^2} in the Atkin-Lehner group."""
    g = gcd(q1, q2)
    return q1 * q2 // (g * g)


def al_group_closure(keys, level):
    """Exact divisors generated by the given keys, including 1."""
    level = arith.as_level(level)
    group = {1}
    frontier = [AtkinLehnerKey.validate(int(q), level).Q for q in keys]
    for q in frontier:
        new = {al_product(q, h, level.N) for h in group}
        group |= new
    # close under products until stable (elementary abelian, so one more pass
    # over all pairs suffices; loop for clarity)
    changed = True
    while changed:
        changed = False
        for a in list(group):
            for b in list(group):
                c = al_product(a, b, level.N)
                if c not in group:
                    group.add(c)
                    changed = True
    return sorted(group)


class ModularSymbolSpace:
    """Relation-quotient presentation of weight-2 modular symbols for
    Gamma_0(N), with its cuspidal subspace and operator cache."""

    def __init__(self, level):
        self.level = arith.as_level(level)
        self._operators = {}
        self._traces = {}
        self._build()

    # full quotient dimension
    @property
    def dimension(self):
        return len(self.free_indices)

    @property
    def cuspidal_dimension(self):
        return len(self._cusp_free_cols)

    @property
    def genus(self):
        return self.cuspidal_dimension // 2

    def _build(self):
        N = self.level.N
        self.p1 = p1_list(self.level)
        index_of = {uv: i for i, uv in enumerate(self.p1)}
        n = len(self.p1)

        if N == 1:
            self.free_indices = []
            self._qvec = [{}]
            self.cusp_classes = [(1, 0)]
            self._cusp_free_cols = []
            self._cusp_basis_sparse = []
            self._boundary = ExactMatrix.zero(1, 0)
            self._boundary_pivots = []
            self._lifts = []
            return

        sigma = [index_of[p1_normalize(N, v, -u)] for u, v in self.p1]
        tau = [index_of[p1_normalize(N, v, -u - v)] for u, v in self.p1]

        # two-term relations: x + xS = 0
        two = [None] * n
        for i in range(n):
            if two[i] is not None:
                continue
            j = sigma[i]
            if j == i:
                two[i] = (0, i)
            else:
                two[i] = (1, i)
                two[j] = (-1, i)
        variables = sorted({r for s, r in two if s})

        # three-term relations: x + xT + xT^2 = 0, one per tau-orbit
        relations = []
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            orbit = [i, tau[i], tau[tau[i]]]
            for j in set(orbit):
                seen[j] = True
            rel = {}
            for j in orbit:
                s, r = two[j]
                if s:
                    rel[r] = rel.get(r, 0) + s
            if any(rel.values()):
                relations.append(rel)

        free, expr = _eliminate_relations(relations, variables)
        self.free_indices = free  # p1 indices of the free generators
        coord = {v: k for k, v in enumerate(free)}
        qvec = []
        for i in range(n):
            s, r = two[i]
            if s == 0:
                qvec.append({})
            else:
                e = expr[r]
                qvec.append({coord[fv]: s * c for fv, c in e.items()})
        self._qvec = qvec

        D = len(free)
        expected_dim = 2 * arith.genus_x0(self.level) + arith.nu_inf(self.level) - 1
        if D != expected_dim:
            raise ArithmeticError(
                f"quotient dimension {D} != expected {expected_dim} at N={N}"
            )

        # boundary map to cusp classes
        self.cusp_classes = cusp_representatives(self.level)
        boundary_rows = [[ZERO] * D for _ in self.cusp_classes]
        self._lifts = [lift_to_sl2z(*self.p1[i], N) for i in free]
        for j, (a, b, c, d) in enumerate(self._lifts):
            boundary_rows[self._cusp_class_index((a, c))][j] += ONE
            boundary_rows[self._cusp_class_index((b, d))][j] -= ONE
        self._boundary = ExactMatrix.from_rows(boundary_rows, cols=D)

        R, pivots = self._boundary.rref()
        pivset = set(pivots)
        free_cols = [c for c in range(D) if c not in pivset]
        if len(free_cols) != 2 * arith.genus_x0(self.level):
            raise ArithmeticError(
                f"cuspidal dimension {len(free_cols)} != 2g at N={N}"
            )
        self._cusp_free_cols = free_cols
        self._boundary_pivots = pivots
        # sparse kernel vectors: v_t has 1 at free_cols[t], corrections at pivots
        basis = [dict() for _ in free_cols]
        for t, fc in enumerate(free_cols):
            basis[t][fc] = ONE
            for i, pc in enumerate(pivots):
                val = R[i, fc]
                if val:
                    basis[t][pc] = -val
        self._cusp_basis_sparse = basis

    def _cusp_class_index(self, cusp):
        cusp = normalize_cusp(*cusp)
        key = getattr(self, "_cusp_cache", None)
        if key is None:
            self._cusp_cache = key = {}
        if cusp in key:
            return key[cusp]
        for k, rep in enumerate(self.cusp_classes):
            if cusp_equivalent(cusp, rep, self.level):
                key[cusp] = k
                return k
        raise ArithmeticError(f"cusp {cusp} matches no class at N={self.level.N}")

    # -- matrices of the presentation ---------------------------------------

    @property
    def quotient_basis(self):
        """psi(N) x dim matrix expressing every Manin generator in the free
        quotient basis."""
        D = self.dimension
        rows = []
        for vec in self._qvec:
            row = [ZERO] * D
            for j, c in vec.items():
                row[j] = c
            rows.append(row)
        return ExactMatrix.from_rows(rows, cols=D)

    @property
    def cuspidal_basis(self):
        """dim x 2g matrix whose columns span the cuspidal subspace."""
        D = self.dimension
        k = len(self._cusp_basis_sparse)
        cols = self._cusp_basis_sparse
        flat = [ZERO] * (D * k)
        for t, vec in enumerate(cols):
            for r, c in vec.items():
                flat[r * k + t] = c
        return ExactMatrix(D, k, flat)

    def boundary_map(self):
        return self._boundary

    # -- path conversion -----------------------------------------------------

    def _add_path(self, p, q, out, sign):
        """Accumulate sign * {oo, p/q} into the sparse vector ``out``."""
        if q == 0:
            return
        if q < 0:
            p, q = -p, -q
        g = gcd(abs(p), q)
        if g:
            p //= g
            q //= g
        N = self.level.N
        index_of = self._p1_index
        # convergents of p/q, floor-division continued fraction
        conv = [(1, 0)]
        a, b = p, q
        pk1, qk1 = 1, 0
        pk2, qk2 = 0, 1
        while b:
            quo = a // b
            a, b = b, a - quo * b
            pk, qk = quo * pk1 + pk2, quo * qk1 + qk2
            conv.append((pk, qk))
            pk2, qk2 = pk1, qk1
            pk1, qk1 = pk, qk
        for j in range(1, len(conv)):
            eps = 1 if j % 2 == 0 else -1
            c = conv[j][1] % N
            d = (eps * conv[j - 1][1]) % N
            idx = index_of[p1_normalize(N, c, d)]
            for coordinate, val in self._qvec[idx].items():
                nv = out.get(coordinate, ZERO) + sign * val
                if nv:
                    out[coordinate] = nv
                elif coordinate in out:
                    del out[coordinate]

    @property
    def _p1_index(self):
        idx = getattr(self, "_p1_index_cache", None)
        if idx is None:
            self._p1_index_cache = idx = {uv: i for i, uv in enumerate(self.p1)}
        return idx

    def symbol_vector(self, a, b, c, d):
        """Quotient-space vector of the path {b/d, a/c} attached to the
        integer matrix [[a, b], [c, d]] of positive determinant."""
        out = {}
        self._add_path(a, c, out, 1)
        self._add_path(b, d, out, -1)
        return out

    # -- operators -----------------------------------------------------------

    def _operator_columns_full(self, mats):
        """Columns (one per free generator) of the operator acting on the
        quotient: the generator's SL_2 lift is hit by each matrix on the
        left and the image paths are converted back."""
        cols = []
        for a, b, c, d in self._lifts:
            out = {}
            for (x, y, z, w) in mats:
                ia, ib = x * a + y * c, x * b + y * d
                ic, idd = z * a + w * c, z * b + w * d
                self._add_path(ia, ic, out, 1)
                self._add_path(ib, idd, out, -1)
            cols.append(out)
        return cols

    def _restrict_columns(self, cols, check=True):
        """Restrict an operator given by quotient columns to the cuspidal
        subspace; returns a 2g x 2g ExactMatrix in cuspidal coordinates."""
        free_cols = self._cusp_free_cols
        k = len(free_cols)
        basis = self._cusp_basis_sparse
        images = []
        for v in basis:
            w = {}
            for j, cj in v.items():
                col = cols[j]
                for r, val in col.items():
                    nv = w.get(r, ZERO) + cj * val
                    if nv:
                        w[r] = nv
                    elif r in w:
                        del w[r]
            images.append(w)
        if check:
            pivots = self._boundary_pivots
            for w in images:
                acc = {p: ZERO for p in pivots}
                for t, fc in enumerate(free_cols):
                    coef = w.get(fc, ZERO)
                    if coef:
                        for r, val in basis[t].items():
                            if r in acc:
                                acc[r] += coef * val
                for p in pivots:
                    if acc[p] != w.get(p, ZERO):
                        raise NonInvariantSubspace(
                            f"operator leaves cuspidal subspace at N={self.level.N}"
                        )
        flat = [ZERO] * (k * k)
        for i, w in enumerate(images):
            for t, fc in enumerate(free_cols):
                val = w.get(fc, ZERO)
                if val:
                    flat[t * k + i] = val
        return ExactMatrix(k, k, flat)

    def hecke_matrix(self, p):
        """T_p on the cuspidal subspace, p prime not dividing N."""
        N = self.level.N
        if N % p == 0:
            raise ValueError(f"p={p} divides N={N}: bad reduction is rejected")
        key = ("T", p)
        if key not in self._operators:
            if self.cuspidal_dimension == 0:
                self._operators[key] = ExactMatrix.zero(0, 0)
            else:
                mats = [(1, k, 0, p) for k in range(p)] + [(p, 0, 0, 1)]
                cols = self._operator_columns_full(mats)
                self._operators[key] = self._restrict_columns(cols)
        return self._operators[key]

    def _al_matrix_entries(self, Q):
        """A determinant-Q matrix [[Q*u, v], [N, Q]] normalizing Gamma_0(N)."""
        N = self.level.N
        g, u, v = _xgcd(Q, N // Q)
        if g != 1:
            raise ValueError(f"Q={Q} is not an exact divisor of N={N}")
        # u*Q + v*(N/Q) = 1  ->  det [[Q*u, -v], [N, Q]] = Q^2*u + v*N = Q
        return (Q * u, -v, N, Q)

    def atkin_lehner_matrix(self, key):
        """w_Q on the cuspidal subspace; an involution commuting with every
        T_p."""
        if isinstance(key, AtkinLehnerKey):
            Q = key.Q
        else:
            Q = int(key)
        AtkinLehnerKey.validate(Q, self.level)
        opkey = ("W", Q)
        if opkey not in self._operators:
            if self.cuspidal_dimension == 0:
                self._operators[opkey] = ExactMatrix.zero(0, 0)
            else:
                mats = [self._al_matrix_entries(Q)]
                cols = self._operator_columns_full(mats)
                self._operators[opkey] = self._restrict_columns(cols)
        return self._operators[opkey]

    def atkin_lehner_trace(self, Q):
        """Trace of w_Q on the cuspidal subspace (an integer)."""
        if Q == 1:
            return self.cuspidal_dimension
        key = ("trW", Q)
        if key not in self._traces:
            t = self.atkin_lehner_matrix(Q).trace()
            if t.denominator != 1:
                raise ArithmeticError("non-integral Atkin-Lehner trace")
            self._traces[key] = int(t)
        return self._traces[key]

    def fixed_cuspidal_subspace(self, keys):
        """Basis (in cuspidal coordinates) of the simultaneous +1 eigenspace
        of the Atkin-Lehner group generated by ``keys``."""
        if not keys:
            raise ValueError("keys must be nonempty")
        group = al_group_closure(keys, self.level)
        k = self.cuspidal_dimension
        if k == 0:
            return ExactMatrix.zero(0, 0)
        blocks = None
        ident = ExactMatrix.identity(k)
        for Q in group:
            if Q == 1:
                continue
            block = self.atkin_lehner_matrix(Q).add(ident.scale(-1))
            blocks = block if blocks is None else blocks.stack(block)
        if blocks is None:
            return ident
        return blocks.kernel_basis()

    def fixed_cuspidal_dimension(self, keys):
        """dim of the same +1 eigenspace, via the averaged projector trace."""
        group = al_group_closure(keys, self.level)
        total = sum(self.atkin_lehner_trace(Q) for Q in group)
        if total % len(group) != 0:
            raise ArithmeticError("projector trace not integral")
        return total // len(group)


def build_space(level):
    return ModularSymbolSpace(arith.as_level(level))


def quotient_genus(space_or_level, keys):
    """Genus of X_0(N) / <w_Q : Q in keys>."""
    space = (
        space_or_level
        if isinstance(space_or_level, ModularSymbolSpace)
        else build_space(space_or_level)
    )
    dim = space.fixed_cuspidal_dimension(keys)
    if dim % 2 != 0:
        raise ArithmeticError("odd fixed-subspace dimension")
    return dim // 2


def genus_plus(space_or_level):
    """Genus of X_0^+(N) = X_0(N)/w_N."""
    space = (
        space_or_level
        if isinstance(space_or_level, ModularSymbolSpace)
        else build_space(space_or_level)
    )
    N = space.level.N
    if N == 1 or space.genus == 0:
        return 0
    return quotient_genus(space, [N])
