import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import float_weight
from ultrametrica.errors import (
    DepthError,
    InputValidationError,
    WindowError,
)
from ultrametrica.gleason import (
    AxisNonneg,
    IndependentRep,
    MinZeroRep,
    WellOrder,
    build_gminus,
    build_gmultivar,
    build_gplus,
    divide_step,
    reconstruct_preimage,
    rescale_into_window,
    standard_surjection,
    verify_schedule,
)
from ultrametrica.series import (
    argnorm,
    gauss_norm,
    lift_base,
    make_series,
    monomial,
    mul,
    series_frac_pow,
    sub,
)
from ultrametrica.tatealg import HomSpec, evaluate, t_gauss_norm
from ultrametrica.valuegroup import (
    FreeRadius,
    make_profile,
    pi_value,
    s_value,
    t_power,
    value,
    value_le,
    value_lt,
    value_mul,
    value_pow,
)


@pytest.fixture(scope="module")
def prof():
    return make_profile(2, [FreeRadius(2)], max_denom_log=32)


def make_norm(profile, key):
    return value(profile, key[0], key[1])


@pytest.fixture(scope="module")
def spec21(prof):
    """Standard surjection deep enough to schedule q = 4 (index 21)."""
    return standard_surjection(prof, 21)


@pytest.fixture(scope="module")
def spec25():
    """Deeper build: q = 4 sits mid-schedule, so its adapted tail is
    nonempty."""
    prof = make_profile(2, [FreeRadius(2)], max_denom_log=40)
    return standard_surjection(prof, 25)


class TestWellOrder:
    def test_omega_index_mutually_inverse(self):
        w = WellOrder(1, 2, MinZeroRep(1))
        for m in range(1, 60):
            assert w.index(w.omega(m)) == m

    def test_nonneg_axis_prefix(self):
        w = WellOrder(1, 2, AxisNonneg())
        got = [w.omega(m)[0] for m in range(1, 6)]
        assert got == [0, 1, Fraction(1, 2), 2, Fraction(1, 4)]

    def test_nonmember_raises(self):
        w = WellOrder(1, 2, AxisNonneg())
        with pytest.raises(InputValidationError):
            w.index((Fraction(-1),))

    def test_every_member_has_finite_index(self):
        w = WellOrder(2, 2, MinZeroRep(2))
        for q in [(0, 0), (3, 3), (Fraction(-1, 2), 2), (Fraction(5, 4), 0)]:
            q = tuple(Fraction(x) for x in q)
            assert w.omega(w.index(q)) == q


class TestRepresentationRules:
    def test_min_zero_covers_lattice(self):
        rule = MinZeroRep(2)
        rng = random.Random(8)
        for _ in range(200):
            q = tuple(Fraction(rng.randint(-12, 12), 1 << rng.randint(0, 3))
                      for _ in range(2))
            h = rule.rep(q)
            assert h is not None and len(h) == 3
            assert min(h) == 0
            # independent reconstruction: q = (h_1 - h_0, h_2 - h_0)
            h0 = max(Fraction(0), -min(q))
            assert h == (q[0] + h0, q[1] + h0, h0)

    def test_min_zero_one_variable(self):
        rule = MinZeroRep(1)
        rng = random.Random(80)
        for _ in range(100):
            q = Fraction(rng.randint(-20, 20), 1 << rng.randint(0, 4))
            h = rule.rep((q,))
            assert h[0] - h[1] == q and min(h) == 0

    def test_independent_rep_solving(self):
        rule = IndependentRep([(1, 0), (1, 1)], 2)
        assert rule.rep((Fraction(3, 2), Fraction(1, 2))) == \
            (Fraction(1), Fraction(1, 2))
        assert rule.rep((0, 1)) is None  # would need a negative coefficient

    def test_dependent_exponents_rejected(self):
        with pytest.raises(InputValidationError):
            IndependentRep([(1,), (-1,)], 2)


class TestBuildGplus:
    def test_depth_one_minimal_b(self, prof):
        sched, G = build_gplus(prof, 1)
        # independent checker: smallest b with 2**b * w(alpha_1) > 1 and
        # the head window already holds at b = 0 because delta_1 = 0
        w_alpha = float_weight(gauss_norm(sched.term(1))) / 2 ** sched.b[0]
        assert sched.b[0] == 0
        assert w_alpha > 1
        assert len(G.terms) == 1

    def test_depth_five_all_adapted(self, prof):
        sched, G = build_gplus(prof, 5)
        certs = verify_schedule(sched, G)
        assert len(certs) == 5 and all(c.passed for c in certs)

    def test_exponent_distinctness(self, prof):
        sched, _ = build_gplus(prof, 10)
        exps = [q[0] * 2 ** b for q, b in zip(sched.omegas, sched.b)]
        assert len(set(exps)) == len(exps)

    def test_b_monotone(self, prof):
        sched, _ = build_gplus(prof, 10)
        assert all(b2 > b1 for b1, b2 in zip(sched.b, sched.b[1:]))

    def test_d_coefficients_bounded(self, prof):
        sched, _ = build_gplus(prof, 8)
        for row in sched.d:
            for dmi in row:
                nd = gauss_norm(dmi)
                assert value_le(nd, t_power(prof.base(), 0))

    def test_epsilon_property(self, prof):
        # s <= |eps_m ** (1/p**b_m)| for every m
        sched, _ = build_gplus(prof, 8)
        for m in range(1, 9):
            delta = next(iter(sched.eps[m - 1].terms))[0]
            assert delta / 2 ** sched.b[m - 1] <= prof.sigma_s

    def test_argnorm_property(self, prof):
        # eps_m G - sum_{i<m} d_{m,i} W_i**(p**b_i) peaks at W_m**(p**b_m)
        sched, G = build_gplus(prof, 6)
        p = prof.p
        for m in range(1, 7):
            expr = mul(lift_base(sched.eps[m - 1], prof), G)
            for i in range(1, m):
                wpow = series_frac_pow(sched.W[i - 1], p ** sched.b[i - 1])
                expr = sub(expr, mul(lift_base(sched.d[m - 1][i - 1], prof), wpow))
            t_exp, xs = argnorm(expr)
            assert xs == (sched.omegas[m - 1][0] * p ** sched.b[m - 1],)

    def test_structure_decomposition(self, prof):
        # G = sum beta_i W_i**(p**b_i) rebuilt from raw schedule fields
        sched, G = build_gplus(prof, 6)
        rebuilt = {}
        for m in range(1, 7):
            gamma = next(iter(sched.e[m - 1].terms))[0]
            pb = 2 ** sched.b[m - 1]
            key = (gamma * pb, (sched.omegas[m - 1][0] * pb,))
            rebuilt[key] = 1
        assert G.terms == rebuilt

    def test_norm_below_pi(self, prof):
        _, G = build_gplus(prof, 6)
        assert value_lt(gauss_norm(G), pi_value(prof))

    def test_p3_build(self):
        prof3 = make_profile(3, [FreeRadius(2)], max_denom_log=24)
        sched, G = build_gplus(prof3, 6)
        assert all(c.passed for c in verify_schedule(sched, G))


class TestBuildGmultivar:
    def test_single_x_reduces_to_gplus(self, prof):
        x = monomial(prof, 1, 0, (1,))
        sched_m, G_m = build_gmultivar(prof, (x,), 5)
        sched_p, G_p = build_gplus(prof, 5)
        assert G_m == G_p
        assert sched_m.b == sched_p.b

    def test_minus_lattice_coverage(self, prof):
        # V = (x, c x**-1) with the min-zero rule covers Z[1/p]
        c = monomial(prof.base(), 1, 2)
        V = (monomial(prof, 1, 0, (1,)), monomial(prof, 1, 2, (-1,)))
        sched, G = build_gmultivar(prof, V, 6, rule=MinZeroRep(1))
        assert all(c_.passed for c_ in verify_schedule(sched, G))
        rng = random.Random(6)
        for _ in range(50):
            q = (Fraction(rng.randint(-16, 16), 1 << rng.randint(0, 3)),)
            h = MinZeroRep(1).rep(q)
            assert h[0] - h[1] == q[0]

    def test_two_variable_lattice(self):
        prof2 = make_profile(2, [FreeRadius(2), FreeRadius(3)], max_denom_log=32)
        cxy = monomial(prof2, 1, 4, (-1, -1))
        V = (
            monomial(prof2, 1, 0, (1, 0)),
            monomial(prof2, 1, 0, (0, 1)),
            cxy,
        )
        sched, G = build_gmultivar(prof2, V, 5, rule=MinZeroRep(2))
        assert all(c.passed for c in verify_schedule(sched, G))

    def test_norm_window_validated(self, prof):
        too_big = monomial(prof, 1, -2, (1,))  # weight -2 + sqrt2 < 0: norm > 1
        with pytest.raises(WindowError):
            build_gmultivar(prof, (too_big,), 3)


class TestBuildGminus:
    @pytest.fixture
    def cm(self, prof):
        return monomial(prof.base(), 1, 2)  # |c x**-1| = |t|**(2 - sqrt2)

    def test_depth_one_exact_substitution(self, prof, cm):
        sched, G, pre = build_gminus(prof, cm, 1)
        hom = HomSpec((mul(lift_base(cm, prof), monomial(prof, 1, 0, (-1,))),))
        got = evaluate(pre, hom, t_power(prof, 40))
        assert got == G
        assert len(G.terms) == 1

    def test_depth_six_roundtrip(self, prof, cm):
        sched, G, pre = build_gminus(prof, cm, 6)
        hom = HomSpec((mul(lift_base(cm, prof), monomial(prof, 1, 0, (-1,))),))
        # the deepest stored term is tiny; evaluate below all of them
        deepest = 2 * max(int(float_weight(make_norm(prof, k))) for k in G.terms) + 2
        got = evaluate(pre, hom, t_power(prof, deepest))
        assert got.terms == G.terms

    def test_norm_bounded(self, prof, cm):
        _, G, pre = build_gminus(prof, cm, 6)
        assert value_le(gauss_norm(G), t_power(prof, 0))
        assert value_le(t_gauss_norm(pre), t_power(prof.base(), 0))

    def test_adapted_within_reach(self, prof, cm):
        sched, G, _ = build_gminus(prof, cm, 6)
        certs = verify_schedule(sched, G)
        assert all(c.passed for c in certs)

    def test_bad_c_rejected(self, prof):
        with pytest.raises(WindowError):
            build_gminus(prof, monomial(prof.base(), 1, 20), 2)  # |c x**-1| < s


class TestStandardSurjection:
    def test_three_images_for_n1(self, spec21, prof):
        assert spec21.hom.m == 3
        x, cx, G = spec21.hom.images
        assert x == monomial(prof, 1, 0, (1,))
        assert cx == monomial(prof, 1, 2, (-1,))
        assert G == spec21.G

    def test_oracle_q1_monomial(self, spec21):
        ans = spec21((Fraction(1),))
        assert ans.certificate.passed
        assert len(ans.preimage.terms) == 1

    def test_oracle_negative_half_uses_pth_root(self, spec21):
        ans = spec21((Fraction(-1, 2),))
        assert ans.certificate.passed
        (exps,) = ans.preimage.terms
        # min-zero rep of -1/2 is (0, 1/2): T_2**(1/2), a p-th root
        assert exps == (Fraction(0), Fraction(1, 2), Fraction(0))

    def test_oracle_images_match_evaluate(self, spec21, prof):
        floor = t_power(prof, 60)
        for q in [(Fraction(1),), (Fraction(-1, 2),), (Fraction(4),)]:
            ans = spec21(q)
            ev = evaluate(ans.preimage, spec21.hom, floor)
            assert ev.terms == ans.image.terms

    def test_depth_error_beyond_schedule(self, prof):
        shallow = standard_surjection(prof, 4)
        with pytest.raises(DepthError):
            shallow((Fraction(4),))

    def test_preimages_power_bounded(self, spec21):
        for q in [(Fraction(0),), (Fraction(2),), (Fraction(-2),), (Fraction(4),)]:
            ans = spec21(q)
            assert value_le(t_gauss_norm(ans.preimage), t_power(spec21.base, 0))


class TestDivideStep:
    def test_single_monomial_zero_residual(self, spec21, prof):
        beta = make_series(prof, {(Fraction(6), (Fraction(1),)): 1})
        # weight 6 + 1.41 = 7.41 sits in the m = 2 window [7, 8)
        f, residual = divide_step(spec21, beta, 2)
        assert residual.terms == {}
        assert len(f.terms) == 1

    def test_two_term_beta(self, spec21, prof):
        beta = make_series(prof, {
            (Fraction(6), (Fraction(1),)): 1,
            (Fraction(7), (Fraction(0),)): 1,
        })
        f, residual = divide_step(spec21, beta, 2)
        cut = value_mul(value_pow(pi_value(prof), 3), s_value(prof))
        nr = gauss_norm(residual)
        assert nr is None or value_le(nr, cut)
        nf = t_gauss_norm(f)
        assert value_le(nf, t_power(prof.base(), 2))

    def test_below_cut_untouched(self, spec21, prof):
        beta = make_series(prof, {(Fraction(30), (Fraction(1),)): 1})
        f, residual = divide_step(spec21, beta, 2)
        assert f.terms == {}
        assert residual == beta

    def test_window_violation_raises(self, spec21, prof):
        beta = make_series(prof, {(Fraction(0), (Fraction(1),)): 1})  # norm > s
        with pytest.raises(InputValidationError):
            divide_step(spec21, beta, 2)


class TestReconstruct:
    def test_zero_input(self, spec21, prof):
        from ultrametrica.series import series_zero

        res = reconstruct_preimage(spec21, series_zero(prof), 4)
        assert res.preimage.terms == {}
        assert all(r is None for r in res.residuals)

    def test_roundtrip_of_stored_element(self, spec21, prof):
        # beta = phi(g) for a simple g: residuals vanish once its terms clear
        base = prof.base()
        from ultrametrica.tatealg import make_tate

        g = make_tate(3, base, {
            (Fraction(1), Fraction(0), Fraction(0)): monomial(base, 1, 6),
            (Fraction(0), Fraction(2), Fraction(0)): monomial(base, 1, 7),
        })
        beta = evaluate(g, spec21.hom, t_power(prof, 40))
        beta, _ = rescale_into_window(beta)
        res = reconstruct_preimage(spec21, beta, 6)
        assert res.residuals[-1] is None
        ev = evaluate(res.preimage, spec21.hom, t_power(prof, 40))
        assert ev.terms == beta.terms

    def test_random_betas_depth8(self, spec21, prof):
        rng = random.Random(99)
        pool = [spec21.schedule.omegas[i] for i in range(21)]
        s = s_value(prof)
        pi = pi_value(prof)
        for _ in range(20):
            terms = {}
            for _ in range(rng.randint(1, 6)):
                q = rng.choice(pool)
                t = Fraction(rng.randint(0, 24), 1 << rng.randint(0, 2))
                terms[(t, q)] = 1
            beta = make_series(prof, terms)
            if not beta.terms:
                continue
            beta, _ = rescale_into_window(beta)
            res = reconstruct_preimage(spec21, beta, 8)
            prev = None
            for m, rn in enumerate(res.residuals):
                bound = value_mul(value_pow(pi, m + 1), s)
                if rn is not None:
                    assert value_le(rn, bound)
                    if prev is not None:
                        assert value_le(rn, prev)
                    prev = rn
            ev = evaluate(res.preimage, spec21.hom, t_power(prof, 40))
            diff = sub(ev, beta)
            nd = gauss_norm(diff)
            final = value_mul(value_pow(pi, 8), s)
            assert nd is None or value_le(nd, final)

    def test_norm_above_s_rejected(self, spec21, prof):
        beta = make_series(prof, {(Fraction(0), (Fraction(1),)): 1})
        with pytest.raises(InputValidationError):
            reconstruct_preimage(spec21, beta, 4)

    def test_unknown_beta_is_floor_exhaustion(self, spec21, prof):
        from ultrametrica.errors import FloorTooCoarseError
        from ultrametrica.series import series_zero, with_floor

        # no stored terms and a floor coarser than s: nothing can clear
        beta = with_floor(series_zero(prof), t_power(prof, 2))
        with pytest.raises(FloorTooCoarseError):
            reconstruct_preimage(spec21, beta, 4)

    def test_floored_beta_clears_all_known_terms(self, spec21, prof):
        # a floor between the cuts: stored terms clear, bound clamps there
        floor = t_power(prof, 8)
        beta = make_series(prof, {
            (Fraction(6), (Fraction(0),)): 1,
            (Fraction(4), (Fraction(1),)): 1,
        }, floor)
        res = reconstruct_preimage(spec21, beta, 6)
        assert res.residuals[-1] is None


class TestMidScheduleTails:
    """Oracle answers from the middle of a schedule carry nonempty
    adapted tails; division must spawn them into the residual below
    the cut."""


    def test_tail_present_and_adapted(self, spec25):
        ans = spec25((Fraction(4),))
        assert len(ans.image.terms) > 1  # head plus scheduled tail terms
        assert ans.certificate.passed

    def test_preimage_matches_image(self, spec25):
        ans = spec25((Fraction(4),))
        ev = evaluate(ans.preimage, spec25.hom, t_power(spec25.profile, 200))
        assert ev.terms == ans.image.terms

    def test_spawned_tail_stays_below_cut(self, spec25):
        prof = spec25.profile
        beta = make_series(prof, {(Fraction(5), (Fraction(4),)): 1})
        f, residual = divide_step(spec25, beta, 5)
        nr = gauss_norm(residual)
        assert nr is not None  # the tail really was spawned
        cut = value_mul(value_pow(pi_value(prof), 6), s_value(prof))
        assert value_le(nr, cut)


class TestP3Surjection:
    def test_end_to_end(self):
        prof3 = make_profile(3, [FreeRadius(2)], max_denom_log=48)
        spec3 = standard_surjection(prof3, 10)
        beta = make_series(prof3, {
            (Fraction(6), (Fraction(1),)): 2,
            (Fraction(7), (Fraction(-1, 3),)): 1,
            (Fraction(8), (Fraction(0),)): 2,
        })
        beta, _ = rescale_into_window(beta)
        res = reconstruct_preimage(spec3, beta, 5)
        ev = evaluate(res.preimage, spec3.hom, t_power(prof3, 30))
        assert sub(ev, beta).terms == {}


class TestWellOrderP3:
    def test_nonneg_axis_enumeration(self):
        w = WellOrder(1, 3, AxisNonneg())
        got = [w.omega(m)[0] for m in range(1, 9)]
        assert got == [0, 1, Fraction(1, 3), 2, Fraction(2, 3),
                       Fraction(1, 9), Fraction(2, 9), 3]

    def test_index_inverse(self):
        w = WellOrder(1, 3, AxisNonneg())
        for m in range(1, 40):
            assert w.index(w.omega(m)) == m


@settings(max_examples=25, deadline=None)
@given(terms_spec=st.lists(
    st.tuples(st.integers(0, 20), st.integers(1, 10), st.sampled_from([1, 2, 4])),
    min_size=1, max_size=4,
))
def test_reconstruction_property(spec21, terms_spec):
    """phi(reconstruct(beta)) recovers beta below |pi|**M s for any target
    drawn from the schedule's exponent segment."""
    spec = spec21
    profile = spec.profile
    terms = {}
    for t_num, pos, den in terms_spec:
        q = spec.schedule.omegas[pos - 1]
        terms[(Fraction(t_num, den), q)] = 1
    beta = make_series(profile, terms)
    if not beta.terms:
        return
    beta, _ = rescale_into_window(beta)
    result = reconstruct_preimage(spec, beta, 6)
    ev = evaluate(result.preimage, spec.hom, t_power(profile, 40))
    diff = sub(ev, beta)
    nd = gauss_norm(diff)
    bound = value_mul(value_pow(pi_value(profile), 6), s_value(profile))
    assert nd is None or value_le(nd, bound)
