"""Division algorithm, Gleason-element schedules, and verified surjections.

A schedule pins, for each step m of a well-order of an exponent set J,
a lattice monomial W_m, a coefficient monomial e_m, a scaling monomial
eps_m, a Frobenius height b_m, and elimination coefficients d_{m,i},
so that the combination

    (eps_m * G - sum_{i<m} d_{m,i} * W_i**(p**b_i)) ** (1/p**b_m)

is (omega(m), s)-adapted, where G is the stored finite element.  In
characteristic p the p-th root distributes over sums, so the adapted
elements have explicit finite preimages in the perfectoid Tate algebra
and the whole division/reconstruction pipeline runs exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DenominatorCapError,
    DepthError,
    FloorTooCoarseError,
    InputValidationError,
    InvariantViolationError,
    OracleError,
    WindowError,
)
from .series import (
    AdaptedCertificate,
    SeriesElement,
    add,
    divide,
    gauss_norm,
    group_by_x,
    is_adapted,
    lift_base,
    monomial,
    mul,
    neg,
    one,
    pth_root,
    res_ge,
    series_frac_pow,
    series_zero,
    sub,
)
from .tatealg import (
    HomSpec,
    TateElement,
    make_tate,
    t_add,
    t_scale,
    tate_monomial,
    tate_zero,
)
from .valuegroup import (
    RadiusProfile,
    Weight,
    ceil_weight,
    denom_log,
    floor_weight,
    is_p_exponent,
    pi_value,
    s_value,
    t_power,
    value_le,
    value_lt,
    value_max,
    value_mul,
    value_pow,
    weight_of,
    zp_in_open_interval,
)

_B_SAFETY = 100_000


# ---------------------------------------------------------------------------
# Representation rules and the well-order.
# ---------------------------------------------------------------------------


class AxisNonneg:
    """J = Z[1/p]_{>=0} on one variable."""

    ell = 1

    def rep(self, q):
        return (q[0],) if q[0] >= 0 else None


class AxisNonpos:
    """J = Z[1/p]_{<=0} on one variable, generated by -1."""

    ell = 1

    def rep(self, q):
        return (-q[0],) if q[0] <= 0 else None


class IndependentRep:
    """J = nonnegative Z[1/p]-span of linearly independent exponents."""

    def __init__(self, exponents, p):
        self.exponents = [tuple(Fraction(x) for x in v) for v in exponents]
        self.p = p
        self.ell = len(self.exponents)
        self.n = len(self.exponents[0]) if self.exponents else 0
        if self._rank() != self.ell:
            raise InputValidationError(
                "monomial exponents are dependent; supply an explicit rule"
            )

    def _rank(self):
        rows = [list(v) for v in self.exponents]
        rank = 0
        cols = list(range(self.n))
        for col in cols:
            pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
            if pivot is None:
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            pr = rows[rank]
            for r in range(len(rows)):
                if r != rank and rows[r][col] != 0:
                    f = rows[r][col] / pr[col]
                    rows[r] = [a - f * b for a, b in zip(rows[r], pr)]
            rank += 1
        return rank

    def rep(self, q):
        # Solve sum h_k * v_k = q exactly; unique by independence.
        aug = [[self.exponents[k][j] for k in range(self.ell)] + [Fraction(q[j])]
               for j in range(self.n)]
        # Gaussian elimination on an n x (ell+1) system.
        pivots = []
        r = 0
        for c in range(self.ell):
            pivot = next((i for i in range(r, self.n) if aug[i][c] != 0), None)
            if pivot is None:
                continue
            aug[r], aug[pivot] = aug[pivot], aug[r]
            pr = aug[r]
            for i in range(self.n):
                if i != r and aug[i][c] != 0:
                    f = aug[i][c] / pr[c]
                    aug[i] = [a - f * b for a, b in zip(aug[i], pr)]
            pivots.append((r, c))
            r += 1
        h = [Fraction(0)] * self.ell
        for row, col in pivots:
            h[col] = aug[row][self.ell] / aug[row][col]
        for i in range(self.n):
            if all(aug[i][c] == 0 for c in range(self.ell)) and aug[i][self.ell] != 0:
                return None  # inconsistent: q outside the span
        for hk in h:
            if hk < 0 or not is_p_exponent(hk, self.p):
                return None
        return tuple(h)


class MinZeroRep:
    """Standard basis plus (-1,..,-1); the min-entry-zero canonical form.

    h_{n+1} = max(0, -min q_i) and h_i = q_i + h_{n+1}; the min-zero
    normalization restores uniqueness despite the single relation
    e_1 + ... + e_n + (-1,..,-1) = 0.  Covers all of Z[1/p]^n.
    """

    def __init__(self, n):
        self.n = n
        self.ell = n + 1

    def rep(self, q):
        h0 = max(Fraction(0), -min(q)) if q else Fraction(0)
        return tuple(Fraction(x) + h0 for x in q) + (h0,)


class WellOrder:
    """Order type omega on J: rank by (D, k, R, lex) with D = max(k, R).

    k is the max denominator exponent, R the bounding-box radius of the
    scaled integer vector; the diagonal D makes every shell finite.  The
    cost of index(q) is Theta(index(q)).
    """

    def __init__(self, n: int, p: int, rule):
        self.n = n
        self.p = p
        self.rule = rule
        self._order = []
        self._index = {}
        self._next_shell = 0

    def _shell_members(self, D):
        out = []
        for k in range(D + 1):
            radii = [D] if k < D else range(D + 1)
            scale = self.p**k
            for R in radii:
                for v in itertools.product(range(-R, R + 1), repeat=self.n):
                    if self.n and max(abs(x) for x in v) != R:
                        continue
                    if not self.n and R > 0:
                        continue
                    if k > 0 and all(x % self.p == 0 for x in v):
                        continue
                    q = tuple(Fraction(x, scale) for x in v)
                    if self.rule.rep(q) is not None:
                        out.append(q)
        return out

    def _grow(self):
        members = self._shell_members(self._next_shell)
        for q in members:
            self._order.append(q)
            self._index[q] = len(self._order)
        self._next_shell += 1

    def _rank_key(self, q):
        ks = [denom_log(x, self.p) for x in q]
        k = max(ks, default=0)
        v = [int(x * self.p**k) for x in q]
        R = max((abs(x) for x in v), default=0)
        return max(k, R)

    def omega(self, m: int):
        """The m-th exponent, 1-based."""
        if m < 1:
            raise InputValidationError("well-order positions are 1-based")
        while len(self._order) < m:
            self._grow()
        return self._order[m - 1]

    def index(self, q) -> int:
        q = tuple(Fraction(x) for x in q)
        if self.rule.rep(q) is None:
            raise InputValidationError(f"{q} is not in the exponent set J")
        D = self._rank_key(q)
        while self._next_shell <= D:
            self._grow()
        return self._index[q]


# ---------------------------------------------------------------------------
# Schedules.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GleasonSchedule:
    """Finite-depth Gleason data with per-step condition witnesses.

    mode 'alpha' stores coefficients beta_m = e_m**(p**b_m) (the generic
    construction); mode 'direct' stores beta_m = e_m (bounded one-variable
    preimages).  d[m][i] = eps_m * beta_i for i < m; the head coefficient
    eps_m * beta_m is recoverable but not stored, since its norm may
    exceed 1.
    """

    profile: RadiusProfile
    mode: str
    depth: int
    V: tuple
    omegas: tuple
    h_reps: tuple
    W: tuple
    e: tuple
    eps: tuple
    b: tuple
    d: tuple
    conditions: tuple

    def beta(self, m: int) -> SeriesElement:
        """Coefficient of W_m**(p**b_m) in the stored element (1-based m)."""
        em = self.e[m - 1]
        if self.mode == "direct":
            return em
        return series_frac_pow(em, self.profile.p ** self.b[m - 1])

    def term(self, m: int) -> SeriesElement:
        wpow = series_frac_pow(self.W[m - 1], self.profile.p ** self.b[m - 1])
        return mul(lift_base(self.beta(m), self.profile), wpow)

    def element(self) -> SeriesElement:
        """The stored finite Gleason element (exact)."""
        acc = series_zero(self.profile)
        for m in range(1, self.depth + 1):
            acc = add(acc, self.term(m))
        return acc

    def adapted_expression(self, m: int, G: SeriesElement = None) -> SeriesElement:
        """(eps_m G - sum_{i<m} d_{m,i} W_i**(p**b_i)) ** (1/p**b_m), exact."""
        if not 1 <= m <= self.depth:
            raise DepthError(f"schedule has depth {self.depth}, asked for step {m}")
        if G is None:
            G = self.element()
        p = self.profile.p
        expr = mul(lift_base(self.eps[m - 1], self.profile), G)
        for i in range(1, m):
            wpow = series_frac_pow(self.W[i - 1], p ** self.b[i - 1])
            expr = sub(expr, mul(lift_base(self.d[m - 1][i - 1], self.profile), wpow))
        for _ in range(self.b[m - 1]):
            expr = pth_root(expr)
        return expr


def _base_t_monomial(base: RadiusProfile, exponent) -> SeriesElement:
    return monomial(base, 1, exponent)


def _weight_value(v) -> Weight:
    return weight_of(v)


def _series_weight(f: SeriesElement) -> Weight:
    n = gauss_norm(f)
    if n is None:
        raise InputValidationError("element below floor has no weight")
    return weight_of(n)


def _pick_e_alpha(profile, wW: Weight):
    """Exponent for e_m putting |alpha_m| in the band (s, s**(...)) with
    weight in (sigma_s - 1, sigma_s - 1/2)."""
    sigma = Weight(profile.sigma_s)
    lo = sigma.add_rational(Fraction(-1)).sub(wW)
    hi = sigma.add_rational(Fraction(-1, 2)).sub(wW)
    return zp_in_open_interval(lo, hi, profile.p)


def _pick_e_direct(profile, wV: Weight, wW: Weight, m: int):
    """Paper window s < |e_m| < |V| - epsilon, folding condition (1) in
    when W_m is the empty monomial."""
    lo = wV
    if wW.sign() == 0:
        lo_cands = [wV, Weight(Fraction(m))]
        lo = lo_cands[0] if lo_cands[0].sub(lo_cands[1]).sign() > 0 else lo_cands[1]
    hi = Weight(profile.sigma_s)
    if hi.sub(lo).sign() <= 0:
        raise WindowError(
            f"direct-mode window empty at step {m}: cannot satisfy "
            f"s < |e_m| < |V| with the convergence requirement"
        )
    return zp_in_open_interval(lo, hi, profile.p)


def build_schedule(profile, V, well, depth, mode="alpha") -> GleasonSchedule:
    """Generic schedule builder over monomials V with a well-ordered J.

    Chooses e_m in a deterministic window, eps_m = t**delta_m with the
    smallest exponent making every |d_{m,i}| <= 1, and the minimal b_m
    satisfying the convergence, head-window, tail, and distinct-exponent
    conditions.  All choices are exact, so builds are reproducible.
    """
    if not profile.is_free or profile.n < 1:
        raise InputValidationError("schedules require a free profile with n >= 1")
    base = profile.base()
    p = profile.p
    sigma = Weight(profile.sigma_s)
    for v in V:
        if len(v.terms) != 1 or not v.floor.zero:
            raise InputValidationError("V entries must be exact monomials")
        if _series_weight(v).sign() <= 0:
            raise WindowError("every |V_k| must be < 1")
    wV0 = _series_weight(V[0]) if V else Weight(Fraction(0))

    omegas, h_reps, Ws, es, epss, bs, ds, conds = [], [], [], [], [], [], [], []
    beta_exps = []      # rational t-exponents of the coefficients beta_i
    exps_taken = []     # x-exponents omega(i) * p**b_i

    for m in range(1, depth + 1):
        q = well.omega(m)
        h = well.rule.rep(q)
        if h is None:
            raise InvariantViolationError("well-order emitted a non-member")
        W = one(profile)
        for hk, vk in zip(h, V):
            W = mul(W, series_frac_pow(vk, hk))
        wW = _series_weight(W) if W.terms else Weight(Fraction(0))
        if mode == "alpha":
            gamma = _pick_e_alpha(profile, wW)
        else:
            if sigma.sub(wW).sign() <= 0:
                raise WindowError(
                    f"step {m}: |W_m| <= s, head window unreachable "
                    f"(|omega(m)| beyond the adaptedness reach for this V)"
                )
            if wW.sign() == 0 and m > 1:
                raise WindowError(
                    f"step {m}: constant monomial after step 1 deadlocks the tails"
                )
            gamma = _pick_e_direct(profile, wV0, wW, m)
        e_m = _base_t_monomial(base, gamma)

        # eps_m = t**delta_m, smallest exponent with |eps_m * beta_i| <= 1.
        delta = Fraction(0)
        for bw in beta_exps:
            if -bw > delta:
                delta = -bw
        if not is_p_exponent(delta, p):
            raise InvariantViolationError("delta_m left Z[1/p]")
        eps_m = _base_t_monomial(base, delta)

        # Minimal b_m for (1) convergence, (3) head window, (4) tails,
        # (5) distinct exponents; strict growth is implied in alpha mode
        # by (4) and enforced explicitly in direct mode.
        b_floor = bs[-1] + 1 if (mode == "direct" and bs) else 0
        b_m = None
        for b_try in range(b_floor, _B_SAFETY):
            pb = Fraction(p**b_try)
            beta_exp = gamma * pb if mode == "alpha" else gamma
            w_term = Weight(beta_exp).add(wW.scaled(pb))
            cond1 = w_term.sub(Weight(Fraction(m))).sign() > 0
            w_head = Weight((delta + beta_exp) / pb).add(wW)
            cond3 = w_head.sign() > 0 and sigma.sub(w_head).sign() > 0
            cond4 = all(
                w_term.scaled(Fraction(1, p**bi)).sub(sigma.add_rational(1)).sign() > 0
                for bi in bs
            )
            new_exp = tuple(x * pb for x in q)
            cond5 = new_exp not in exps_taken
            if cond1 and cond3 and cond4 and cond5:
                b_m = b_try
                break
        if b_m is None:
            raise DenominatorCapError("no admissible b_m below the safety bound")

        pb = Fraction(p**b_m)
        beta_exp = gamma * pb if mode == "alpha" else gamma
        d_row = []
        for i in range(m - 1):
            d_exp = delta + beta_exps[i]
            if d_exp < 0:
                raise InvariantViolationError("|d_{m,i}| > 1; eps_m too large")
            d_row.append(_base_t_monomial(base, d_exp))

        omegas.append(q)
        h_reps.append(h)
        Ws.append(W)
        es.append(e_m)
        epss.append(eps_m)
        bs.append(b_m)
        ds.append(tuple(d_row))
        beta_exps.append(beta_exp)
        exps_taken.append(tuple(x * pb for x in q))
        conds.append(
            {
                "convergence": True,
                "eps_bound": True,
                "head_window": True,
                "tail_window": True,
                "distinct_exponents": True,
                "b": b_m,
                "delta": str(delta),
                "gamma": str(gamma),
            }
        )

    return GleasonSchedule(
        profile, mode, depth, tuple(V), tuple(omegas), tuple(h_reps),
        tuple(Ws), tuple(es), tuple(epss), tuple(bs), tuple(ds), tuple(conds),
    )


def verify_schedule(schedule: GleasonSchedule, G: SeriesElement = None):
    """Check every prefix expression against is_adapted; returns the
    certificates.  Raises InvariantViolationError on any failure."""
    if G is None:
        G = schedule.element()
    certs = []
    for m in range(1, schedule.depth + 1):
        expr = schedule.adapted_expression(m, G)
        cert = is_adapted(expr, schedule.omegas[m - 1])
        if not cert.passed:
            raise InvariantViolationError(
                f"schedule step {m} is not adapted: checks={cert.checks}"
            )
        certs.append(cert)
    return tuple(certs)


# ---------------------------------------------------------------------------
# Named constructions.
# ---------------------------------------------------------------------------


def build_gplus(profile: RadiusProfile, depth: int):
    """Gleason element for J = Z[1/p]_{>=0} with monomials x**omega(m)."""
    if profile.n != 1 or not profile.is_free:
        raise InputValidationError("build_gplus needs one free radius")
    x = monomial(profile, 1, 0, (1,))
    well = WellOrder(1, profile.p, AxisNonneg())
    schedule = build_schedule(profile, (x,), well, depth, mode="alpha")
    return schedule, schedule.element()


def build_gmultivar(profile: RadiusProfile, V, depth: int, rule=None):
    """Gleason element for the lattice spanned by the monomials V."""
    for v in V:
        if len(v.terms) != 1 or not v.floor.zero:
            raise InputValidationError("V entries must be exact monomials")
        nv = gauss_norm(v)
        if nv is None or not value_lt(nv, t_power(profile, 0)):
            raise WindowError("every V_k must satisfy |V_k| < 1")
    if rule is None:
        exps = []
        for v in V:
            ((_, xs), _), = v.terms.items()
            exps.append(xs)
        rule = IndependentRep(exps, profile.p)
    well = WellOrder(profile.n, profile.p, rule)
    schedule = build_schedule(profile, tuple(V), well, depth, mode="alpha")
    return schedule, schedule.element()


def build_gminus(profile: RadiusProfile, c: SeriesElement, depth: int):
    """Gleason element for J = Z[1/p]_{<=0} with a bounded one-variable
    preimage sum(e_m * T**(|omega(m)| p**b_m)) under T -> c x**-1.

    The head window caps the reachable |omega(m)| at sigma_s / w(c x**-1);
    beyond it the build raises WindowError (the published construction
    does not extend past that reach with norm-bounded coefficients).
    """
    if profile.n != 1 or not profile.is_free:
        raise InputValidationError("build_gminus needs one free radius")
    if c.profile != profile.base() or len(c.terms) != 1:
        raise InputValidationError("c must be a base-field monomial")
    cx_inv = mul(lift_base(c, profile), monomial(profile, 1, 0, (-1,)))
    w = _series_weight(cx_inv)
    if w.sign() <= 0 or Weight(profile.sigma_s).sub(w).sign() <= 0:
        raise WindowError("bad c: need s < |c x**-1| < 1")
    well = WellOrder(1, profile.p, AxisNonpos())
    schedule = build_schedule(profile, (cx_inv,), well, depth, mode="direct")
    g_minus = schedule.element()
    base = profile.base()
    terms = {}
    for m in range(1, depth + 1):
        hm = schedule.h_reps[m - 1][0]
        exp = (hm * profile.p ** schedule.b[m - 1],)
        terms[exp] = schedule.e[m - 1]
    preimage = make_tate(1, base, terms)
    return schedule, g_minus, preimage


# ---------------------------------------------------------------------------
# The standard surjection and its adapted-element oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleAnswer:
    preimage: TateElement
    image: SeriesElement
    certificate: AdaptedCertificate


@dataclass(frozen=True)
class SurjectionSpec:
    """Images (x_1..x_n, c*x_1**-1...x_n**-1, G) plus the schedule-backed
    adapted-element oracle with min-zero canonical representations."""

    n: int
    profile: RadiusProfile
    c: SeriesElement
    hom: HomSpec
    schedule: GleasonSchedule
    G: SeriesElement

    @property
    def num_vars(self) -> int:
        return self.n + 2

    @property
    def base(self) -> RadiusProfile:
        return self.profile.base()

    def _rule(self):
        return MinZeroRep(self.n)

    def monomial_answer(self, q, h):
        """Exact single-monomial adapted element c**h0 * x**q, when its
        norm clears s."""
        exps = tuple(h) + (Fraction(0),)
        pre = tate_monomial(self.num_vars, one(self.base), exps)
        img = one(self.profile)
        for hk, vk in zip(h, self.hom.images[: self.n + 1]):
            img = mul(img, series_frac_pow(vk, hk))
        cert = is_adapted(img, q)
        if not cert.passed:
            return None
        return OracleAnswer(pre, img, cert)

    def schedule_answer(self, q):
        if q not in self.schedule.omegas:
            well = WellOrder(self.n, self.profile.p, self._rule())
            raise DepthError(
                f"adapted oracle for {q} needs schedule depth {well.index(q)}, "
                f"built {self.schedule.depth}"
            )
        m = self.schedule.omegas.index(q) + 1
        sched = self.schedule
        p = self.profile.p
        image = sched.adapted_expression(m, self.G)
        cert = is_adapted(image, q)
        if not cert.passed:
            raise InvariantViolationError(f"schedule step {m} lost adaptedness")
        pb = p ** sched.b[m - 1]
        eps_exp = next(iter(sched.eps[m - 1].terms))[0]
        terms = {}
        head_exp = (Fraction(0),) * (self.n + 1) + (Fraction(1, pb),)
        terms[head_exp] = monomial(self.base, 1, eps_exp / pb)
        for i in range(1, m):
            h_i = sched.h_reps[i - 1]
            pbi = p ** sched.b[i - 1]
            exps = tuple(hk * pbi / pb for hk in h_i) + (Fraction(0),)
            d_exp = next(iter(sched.d[m - 1][i - 1].terms))[0]
            coeff = neg(monomial(self.base, 1, d_exp / pb))
            prev = terms.get(exps)
            terms[exps] = add(prev, coeff) if prev is not None else coeff
        pre = make_tate(self.num_vars, self.base, terms)
        return OracleAnswer(pre, image, cert)

    def __call__(self, q) -> OracleAnswer:
        q = tuple(Fraction(x) for x in q)
        if len(q) != self.n:
            raise InputValidationError(f"exponent arity {len(q)}, expected {self.n}")
        h = self._rule().rep(q)
        ans = self.monomial_answer(q, h)
        if ans is not None:
            return ans
        return self.schedule_answer(q)


def standard_surjection(profile: RadiusProfile, depth: int,
                        c_exponent=None) -> SurjectionSpec:
    """The (n+2)-variable surjection: T_i -> x_i, T_{n+1} -> c*prod(x_i**-1),
    T_{n+2} -> G for the min-zero lattice Gleason element G.

    c defaults to the smallest t-power with s < |c * prod(x_i**-1)| < 1;
    a caller-supplied c_exponent is validated against the same window.
    """
    if not profile.is_free or profile.n < 1:
        raise InputValidationError("standard surjection needs a free profile, n >= 1")
    n = profile.n
    base = profile.base()
    sum_alpha = Weight(Fraction(0))
    for r in profile.radii:
        sum_alpha = sum_alpha.add_sqrt(r.d, Fraction(1))
    if c_exponent is not None:
        w_c = Fraction(c_exponent)
    else:
        w_c = Fraction(floor_weight(sum_alpha) + 1)
        if Weight(w_c).sub(sum_alpha).sign() <= 0 or \
                sum_alpha.add_rational(profile.sigma_s).sub(Weight(w_c)).sign() <= 0:
            w_c = zp_in_open_interval(
                sum_alpha, sum_alpha.add_rational(profile.sigma_s), profile.p
            )
    if Weight(w_c).sub(sum_alpha).sign() <= 0 or \
            sum_alpha.add_rational(profile.sigma_s).sub(Weight(w_c)).sign() <= 0:
        raise WindowError("c exponent violates s < |c * prod(x_i**-1)| < 1")
    c = monomial(base, 1, w_c)
    minus_ones = (Fraction(-1),) * n
    v_last = monomial(profile, 1, w_c, minus_ones)
    V = tuple(monomial(profile, 1, 0, tuple(Fraction(int(i == j)) for j in range(n)))
              for i in range(n)) + (v_last,)
    rule = MinZeroRep(n)
    well = WellOrder(n, profile.p, rule)
    schedule = build_schedule(profile, V, well, depth, mode="alpha")
    G = schedule.element()
    images = tuple(V[:n]) + (v_last, G)
    return SurjectionSpec(n, profile, c, HomSpec(images), schedule, G)


# ---------------------------------------------------------------------------
# Division algorithm and preimage reconstruction.
# ---------------------------------------------------------------------------


def divide_step(oracle, beta: SeriesElement, m: int):
    """One division pass: clear every term of beta with norm >= |pi|**(m+1) s.

    Returns (f, residual) with residual = beta - phi(f),
    |residual| <= |pi|**(m+1) s and |f| <= |pi|**m.  When beta carries a
    floor coarser than the cut, the cut clamps at the floor: stored
    terms are still cleared and the residual bound degrades to the
    floor, which is all a truncated input can certify.
    """
    profile = beta.profile
    base = profile.base()
    s = s_value(profile)
    upper = value_mul(value_pow(pi_value(profile), m), s)
    cut = value_mul(value_pow(pi_value(profile), m + 1), s)
    nb = gauss_norm(beta)
    if nb is not None and value_lt(upper, nb):
        raise InputValidationError(
            f"beta norm exceeds the step-{m} window |pi|**{m} * s"
        )
    cut = value_max(cut, beta.floor)
    restriction = res_ge(beta, cut)
    groups = group_by_x(restriction)
    f = tate_zero(oracle.num_vars, base)
    phi_f = series_zero(profile)
    bound_m = t_power(base, m)
    for q, b_series in sorted(groups.items()):
        try:
            ans = oracle(q)
        except DepthError as exc:
            raise OracleError(f"oracle failed for required exponent {q}: {exc}")
        c_series = ans.certificate.b_q
        target = t_power(base, Fraction(m + 1) + profile.sigma_s)
        d = divide(b_series, c_series, target_floor=target)
        nd = gauss_norm(d)
        if nd is not None and not value_lt(nd, bound_m):
            raise InvariantViolationError("division coefficient |d| >= |pi|**m")
        f = t_add(f, t_scale(ans.preimage, d))
        phi_f = add(phi_f, mul(lift_base(d, profile), ans.image))
    residual = sub(beta, phi_f)
    nres = gauss_norm(residual)
    if nres is not None and not value_le(nres, cut):
        raise InvariantViolationError("residual did not drop below |pi|**(m+1) s")
    return f, residual


@dataclass(frozen=True)
class PreimageResult:
    preimage: TateElement
    residuals: tuple  # gauss norms (Value or None) after each step


def rescale_into_window(beta: SeriesElement):
    """Multiply by an integer power of pi so that |beta| <= s; returns
    (rescaled, k) with rescaled = t**k * beta."""
    nb = gauss_norm(beta)
    if nb is None:
        return beta, 0
    gap = Weight(beta.profile.sigma_s).sub(weight_of(nb))
    k = max(0, ceil_weight(gap))
    if k == 0:
        return beta, 0
    return mul(monomial(beta.profile, 1, k), beta), k


def reconstruct_preimage(oracle, beta: SeriesElement, depth: int) -> PreimageResult:
    """Iterate the division algorithm to depth M.

    For exact beta the residual after step m has norm <= |pi|**(m+1) * s,
    monotonically nonincreasing; for a floored beta the bound clamps at
    the floor once the cuts pass it (every stored term still clears).
    Nothing at all can clear when the floor already swallows the first
    cut and beta has no stored terms; that is reported as exhaustion.
    """
    profile = beta.profile
    s = s_value(profile)
    nb = gauss_norm(beta)
    if nb is not None and value_lt(s, nb):
        raise InputValidationError("reconstruct_preimage requires |beta| <= s")
    if nb is None and not beta.floor.zero and value_lt(s, beta.floor):
        raise FloorTooCoarseError(
            "floor exhaustion: beta is unknown already at |pi| * s"
        )
    f = tate_zero(oracle.num_vars, profile.base())
    res = beta
    residuals = []
    for m in range(depth):
        g, res = divide_step(oracle, res, m)
        f = t_add(f, g)
        residuals.append(gauss_norm(res))
    return PreimageResult(f, tuple(residuals))
