import math

import numpy as np
import pytest

from orlicz_radius.bounds import (
    CATALOGUE,
    OPERATOR_CASES,
    PAIR_CASES,
    VECTOR_CASES,
    BoundCase,
    CaseError,
    Quantities,
    Tolerance,
    catalogue_rows,
    check_vector_lemma,
    default_grid,
    evaluate_batch,
    evaluate_bound,
    expand_grid,
    link_ratios,
    log_mix,
    make_case,
    nilpotent_constant,
)
from orlicz_radius.bounds.evaluate import norm_cap, normalization
from orlicz_radius.ensembles import EnsembleSpec, generate_batch
from orlicz_radius.linalg import adjoint, operator_norm, psd_fun
from orlicz_radius.numrad import numerical_radius
from orlicz_radius.orlicz import exp_minus_one, from_table, parse_phi, power

from helpers import J2, ginibre, jordan

# -- an independent dense oracle ---------------------------------------------------
# Every matrix function goes through the eigen-decomposition of T*T (not the
# cached SVD used by the package) and every radius through the default
# 1024-point engine.


def w(X):
    return numerical_radius(X).value


def absp(X, p, phi=lambda t: t):
    """phi(|X|^p) via the spectrum of X*X."""
    return psd_fun(adjoint(X) @ X, lambda lam: phi(np.power(lam, p / 2)))


def nrm(X):
    return operator_norm(X)


def _f(phi):
    return phi if phi is not None else (lambda t: t)


def oracle(case, T, S=None):
    """Chain values computed directly from the formulas."""
    cid = case.id
    Ts = adjoint(T)
    phi = case.phi
    f = _f(phi)
    wT, nT = w(T), nrm(T)
    two = lambda g=f: nrm(absp(T, 2, g) + absp(Ts, 2, g))  # noqa: E731
    if cid == "base_norm":
        return [nT / 2, wT, nT]
    if cid == "base_kittaneh":
        return [wT, nrm(absp(T, 1) + absp(Ts, 1)) / 2]
    if cid == "base_elhaddad":
        r = case.r
        return [wT ** (2 * r), nrm(absp(T, 2 * r) + absp(Ts, 2 * r)) / 2]
    if cid == "base_abuomar":
        return [wT**2, two() / 4 + w(T @ T) / 2]
    if cid == "base_bhunia":
        return [wT**2, two() / 4 + w(absp(T, 1) @ absp(Ts, 1)) / 2]
    if cid == "dragomir_product":
        r = case.r
        return [w(adjoint(S) @ T) ** r, nrm(absp(T, 2 * r) + absp(S, 2 * r)) / 2]
    if cid == "power_norm":
        root = math.sqrt(nrm(T @ T))
        if phi.kind == "exp_minus_one":
            return [wT, math.log((math.exp(nT) + math.exp(root)) / 2), nT]
        return [f(wT), (f(nT) + f(root)) / 2, f(nT)]
    if cid in ("th2_gh", "cor_22"):
        v, s = (case.v, case.s) if cid == "th2_gh" else (0.5, 0.5)
        g = f if cid == "th2_gh" else (lambda t: t)
        c = 1 + v
        mid = (
            v / (4 * c) * nrm(absp(T, 4 * s, g) + absp(Ts, 4 * (1 - s), g))
            + v / (2 * c) * g(w(absp(Ts, 2 * (1 - s)) @ absp(T, 2 * s)))
            + 1 / (2 * c) * g(wT) * nrm(absp(T, 2 * s, g) + absp(Ts, 2 * (1 - s), g))
        )
        if cid == "th2_gh":
            return [f(wT**2), mid]
        return [wT**2, mid, two() / 6 + wT * nrm(absp(T, 1) + absp(Ts, 1)) / 3]
    first, second = (T, Ts) if case.variant in (None, "A") else (Ts, T)
    if cid == "th3_alpha":
        a = case.alpha
        return [f(wT**2), a / 2 * f(w(T @ T)) + nrm(a / 4 * absp(first, 2, f) + (1 - 3 * a / 4) * absp(second, 2, f))]
    if cid == "th4_gh_alpha":
        a, s = case.alpha, case.s
        M = a / 2 * (absp(first, 4 * s, f) + absp(second, 4 * (1 - s), f)) + (1 - a) * absp(second, 2, f)
        return [f(wT**2), nrm(M)]
    if cid == "cor_halfsum_sq":
        return [f(wT**2), two() / 2]
    if cid == "th5":
        return [
            f(wT**2),
            f(w(absp(T, 1) + 1j * absp(Ts, 1)) ** 2 / 2) / 2 + f(w(absp(T, 1) @ absp(Ts, 1))) / 4 + two() / 8,
        ]
    if cid == "cor_halfsum":
        return [f(wT), nrm(absp(T, 1, f) + absp(Ts, 1, f)) / 2]
    if cid in ("th6", "th8"):
        m = min(f(w(absp(T, 1) @ absp(Ts, 1))), f(w(T @ T)))
        tail = two() / 4 if cid == "th6" else f(nrm(absp(T, 2) + absp(Ts, 2)) / 2) / 2
        return [f(wT**2), m / 2 + tail]
    if cid in ("cor_1_1", "cor_1_2"):
        h = nrm(adjoint(T) @ T + T @ adjoint(T)) / 2
        inner = w(T @ T) if cid == "cor_1_1" else w(absp(T, 1) @ absp(Ts, 1))
        return [wT**2, math.log((math.exp(inner) + math.exp(h)) / 2), h]
    if cid == "cor_prop1":
        h4 = nrm(absp(T, 4) + absp(Ts, 4)) / 2
        return [wT**4, math.log((math.exp(w(T @ T) ** 2) + math.exp(h4)) / 2), h4]
    if cid == "th7_power":
        n = case.n
        lead = 2.0 ** (1 - n) * f(w(np.linalg.matrix_power(T, n)))
        mid = lead + sum(2.0**-k * f(nrm(np.linalg.matrix_power(T, k)) * nT ** (n - k)) for k in range(1, n))
        return [f(wT**n), mid, lead + (1 - 2.0 ** (1 - n)) * f(nT**n)]
    if cid in ("cor_nil", "cor_N222"):
        n = case.n if cid == "cor_nil" else 2
        a = 2.0 ** (1 - n)
        inner = math.log(a * math.exp(w(np.linalg.matrix_power(T, n))) + (1 - a) * math.exp(nT**n))
        return [wT, inner ** (1 / n), nT]
    if cid == "cor_nilpotent":
        n = case.n
        return [wT, (math.log(2.0 ** (1 - n) + (1 - 2.0 ** (1 - n)) * math.e)) ** (1 / n) * nT, nT]
    # two-operator cases
    a = w(adjoint(T) @ S)
    if cid in ("th1_product", "th1_power", "th1_power_t", "cor_N1", "cor_11"):
        v = 0.5 if cid == "cor_N1" else case.v
        g = {"th1_product": f}.get(cid, (lambda t: t ** case.r) if cid.startswith("th1_power") else (lambda t: t))
        c = 1 + v
        mid = (
            g(a) * nrm(absp(T, 2, g) + absp(S, 2, g)) / (2 * c)
            + v / (2 * c) * g(w(absp(S, 2) @ absp(T, 2)))
            + v / (4 * c) * nrm(absp(T, 4, g) + absp(S, 4, g))
        )
        if cid == "th1_product":
            return [f(a * a), mid]
        if cid == "th1_power":
            r = case.r
            return [a ** (2 * r), mid, nrm(absp(T, 4 * r) + absp(S, 4 * r)) / 2]
        if cid == "th1_power_t":
            return [a ** (2 * case.r), mid]
        km = nrm(absp(T, 2) + absp(S, 2)) * a / (2 * c) + v / (2 * c) * nrm(absp(T, 4) + absp(S, 4))
        return [a * a, mid, km]
    raise AssertionError(cid)


def _oracle_cases():
    cases = []
    for cid in OPERATOR_CASES:
        info = CATALOGUE[cid]
        grid = default_grid(cid)
        # a handful of parameter points per case keeps the oracle affordable
        picks = expand_grid(cid, grid)
        step = max(1, len(picks) // 6)
        cases.extend(picks[::step])
        assert info.kind == "operator"
    return cases


ORACLE_CASES = _oracle_cases()


@pytest.fixture(scope="module")
def sample_pair():
    rng = np.random.default_rng(7)
    T = ginibre(rng, 4)
    S = ginibre(rng, 4)
    # moderate norms keep every exponential evaluation unnormalised
    return T / nrm(T) * 1.3, S / nrm(S) * 0.9


@pytest.mark.parametrize("case", ORACLE_CASES, ids=lambda c: c.key)
def test_chain_matches_dense_oracle(case, sample_pair):
    T, S = sample_pair
    S = S if case.info.pair else None
    ev = evaluate_bound(case, T, S)
    assert ev.inputs["scale"] == 1.0
    expected = oracle(case, T, S)
    assert len(ev.chain) == len(expected)
    for got, want in zip(ev.chain, expected):
        assert got == pytest.approx(want, rel=1e-8, abs=1e-9)
    if ev.status != "inapplicable":
        assert ev.status == "pass"


# -- worked examples ---------------------------------------------------------------


def test_power_norm_jordan():
    ev = evaluate_bound(make_case("power_norm"), J2)
    assert ev.chain == pytest.approx([0.5, math.log((math.e + 1) / 2), 1.0], abs=1e-9)
    assert ev.chain[1] == pytest.approx(0.6201, abs=1e-4)
    assert ev.passed == [True, True]


def test_cor_N222_jordan():
    ev = evaluate_bound(make_case("cor_N222"), J2)
    assert ev.chain == pytest.approx([0.5, math.sqrt(math.log(0.5 + 0.5 * math.e)), 1.0], abs=1e-9)
    assert ev.chain[1] == pytest.approx(0.78747, abs=1e-5)
    assert ev.status == "pass"


def test_cor_1_1_hermitian_equality():
    ev = evaluate_bound(make_case("cor_1_1"), np.diag([1.0, -1.0]))
    assert ev.chain == pytest.approx([1.0, 1.0, 1.0], abs=1e-12)
    assert ev.status == "pass"


def test_th7_power_nilpotent_terms():
    rng = np.random.default_rng(3)
    T = np.triu(ginibre(rng, 3), 1)  # T^3 = 0
    ev = evaluate_bound(make_case("th7_power", phi="power:p=1", n=3), T)
    nT = nrm(T)
    brute = 0.5 * nrm(T) * nT**2 + 0.25 * nrm(T @ T) * nT
    assert ev.chain[1] == pytest.approx(brute, rel=1e-12)
    assert ev.chain[0] <= ev.chain[1] <= ev.chain[2]


def test_th7_power_jordan_values():
    ev = evaluate_bound(make_case("th7_power", phi="power:p=1", n=3), np.diag(np.ones(1), 1).astype(complex))
    assert ev.chain == pytest.approx([0.125, 0.5, 0.75], abs=1e-9)


# -- specialisation consistency ----------------------------------------------------


@pytest.fixture(scope="module")
def ginibre_batch():
    spec = EnsembleSpec("ginibre", 4, count=40, seed=123)
    T = generate_batch(spec)
    S = generate_batch(spec.paired())
    return Quantities(T, S)


def _values(case, q):
    return evaluate_batch(case, q).values


def test_th1_specialises_to_cor_N1(ginibre_batch):
    th1 = _values(make_case("th1_product", phi="power:p=1", v=0.5), ginibre_batch)
    n1 = _values(make_case("cor_N1"), ginibre_batch)
    assert np.allclose(th1, n1[:, :2], rtol=0, atol=1e-12)


def test_th2_specialises_to_cor_22(ginibre_batch):
    th2 = _values(make_case("th2_gh", phi="power:p=1", v=0.5, s=0.5), ginibre_batch)
    c22 = _values(make_case("cor_22"), ginibre_batch)
    assert np.allclose(th2, c22[:, :2], rtol=0, atol=1e-12)


def test_th8_expm1_matches_corollaries(ginibre_batch):
    # with phi = e^t - 1 the bound reads e^{w^2} - 1 <= min{...}; taking logs
    # gives the smaller of the two corollary middle terms
    q = Quantities(ginibre_batch.matrices() / 3)
    th8 = evaluate_batch(make_case("th8", phi="expm1"), q).values
    c11 = _values(make_case("cor_1_1"), q)
    c12 = _values(make_case("cor_1_2"), q)
    assert np.allclose(np.log1p(th8[:, 1]), np.minimum(c11[:, 1], c12[:, 1]), rtol=1e-12, atol=1e-12)
    assert np.allclose(np.log1p(th8[:, 0]), c11[:, 0], rtol=1e-12)


def test_th7_expm1_matches_cor_N222(ginibre_batch):
    q = Quantities(ginibre_batch.matrices() / 3)
    th7 = _values(make_case("th7_power", phi="expm1", n=2), q)
    n222 = _values(make_case("cor_N222"), q)
    # log(1 + th7 norm form) is the square of the middle term of cor_N222
    assert np.allclose(np.sqrt(np.log1p(th7[:, 2])), n222[:, 1], rtol=1e-12)


def test_th7_expm1_jordan_closed_form():
    for n in range(2, 6):
        ev = evaluate_bound(make_case("th7_power", phi="expm1", n=n), jordan(n))
        # J_n^n = 0 and ||J_n|| = 1, so the norm form is (1 - 2^{1-n})(e - 1)
        # and log(1 + norm form)^{1/n} is the nilpotent constant
        assert math.log1p(ev.chain[2]) ** (1 / n) == pytest.approx(nilpotent_constant(n), abs=1e-12)
        assert math.log1p(ev.chain[0]) ** (1 / n) == pytest.approx(math.cos(math.pi / (n + 1)), abs=1e-9)


def test_cor_nilpotent_constant():
    assert nilpotent_constant(2) == pytest.approx(math.sqrt(math.log((1 + math.e) / 2)), abs=1e-15)
    assert nilpotent_constant(2) == pytest.approx(0.78747, abs=1e-5)
    for n in range(2, 7):
        ev = evaluate_bound(make_case("cor_nilpotent", n=n), jordan(n))
        assert ev.status == "pass"
        assert ev.chain[0] / ev.chain[2] <= nilpotent_constant(n)


def test_cor_nilpotent_inapplicable_off_hypothesis():
    assert evaluate_bound(make_case("cor_nilpotent", n=2), jordan(3)).status == "inapplicable"
    assert evaluate_bound(make_case("cor_nilpotent", n=3), jordan(3)).status == "pass"


# -- refinement ordering -----------------------------------------------------------


@pytest.mark.parametrize("family", ["ginibre", "normal", "rank1"])
def test_th6_improves_on_base_bhunia(family):
    # w(T^2) <= w(|T||T*|) in general, so the |T||T*| branch is selected only
    # at ties; those occur for normal and rank-one draws
    q = Quantities(generate_batch(EnsembleSpec(family, 4, count=60, seed=5)))
    th6 = evaluate_batch(make_case("th6", phi="power:p=1"), q)
    bb = _values(make_case("base_bhunia"), q)
    sel = th6.diagnostics["min_abs_branch"] == 1.0
    assert family == "ginibre" or np.any(sel)
    assert np.all(th6.values[sel, 1] <= bb[sel, 1] + 1e-9)
    assert np.all(q.w(2) <= q.w_abs_product() * (1 + 1e-12) + 1e-12)


def test_cor_N1_refines_tail(ginibre_batch):
    vals = _values(make_case("cor_N1"), ginibre_batch)
    assert np.all(vals[:, 1] <= vals[:, 2] + 1e-12)


def test_th4_printed_variant_recorded(sample_pair):
    ev = evaluate_bound(make_case("th4_gh_alpha", phi="power:p=2", alpha=0.5, s=0.5), sample_pair[0])
    assert "rhs_printed" in ev.diagnostics
    assert ev.diagnostics["printed_slack"] == pytest.approx(ev.diagnostics["rhs_printed"] - ev.chain[0])


def test_cor_N1_printed_lhs_recorded(sample_pair):
    T, S = sample_pair
    ev = evaluate_bound(make_case("cor_N1"), T, S)
    assert ev.diagnostics["lhs_printed"] == pytest.approx(w(adjoint(S) @ T) ** 2, rel=1e-9)
    # w(S*T) = w((T*S)*) = w(T*S)
    assert abs(ev.diagnostics["printed_delta"]) < 1e-8


# -- Hermitian collapse ------------------------------------------------------------


@pytest.mark.parametrize("cid", ["power_norm", "cor_1_1", "cor_N222"])
def test_hermitian_chains_collapse(cid):
    T = generate_batch(EnsembleSpec("hermitian", 5, count=30, seed=4))
    vals = evaluate_batch(make_case(cid), Quantities(T)).values
    assert np.all(np.ptp(vals, axis=1) <= 1e-8 * np.maximum(1, np.abs(vals[:, -1])))


# -- normalisation, statuses, tolerances -------------------------------------------


def test_exponential_cases_are_normalised():
    T = 10 * generate_batch(EnsembleSpec("ginibre", 4, count=1, seed=1))[0]
    case = make_case("th3_alpha", phi="expsq", alpha=0.5)
    ev = evaluate_bound(case, T)
    assert ev.inputs["scale"] == pytest.approx(norm_cap(case.phi) / nrm(T))
    assert ev.status == "pass"
    assert ev.quantities["norm(T)"] == pytest.approx(norm_cap(case.phi))
    raw = evaluate_bound(case, T, normalize=False)
    assert raw.status == "untestable"


def test_normalisation_rules():
    norms = np.array([0.0, 1.0, 100.0])
    assert np.array_equal(normalization(make_case("th6", phi="power:p=2"), norms), np.ones(3))
    assert np.array_equal(normalization(make_case("power_norm", phi="expm1"), norms), np.ones(3))
    c = normalization(make_case("th6", phi="expm1"), norms)
    assert c[0] == 1 and c[1] == 1 and c[2] * 100 == pytest.approx(norm_cap(exp_minus_one()))


def test_corruption_fails():
    ev = evaluate_bound(make_case("base_norm"), np.eye(2), corrupt=0.1)
    assert ev.status == "fail" and ev.passed == [True, False]
    assert not ev.ok


def test_tolerance_rule_and_grazes():
    case = make_case("base_norm")
    ev = evaluate_bound(case, np.diag([2.0, -1.0]))
    # w = ||T|| exactly up to rounding: a pass, possibly a graze
    assert ev.status == "pass"
    assert Tolerance(1e-7, 1e-7).allowance(5.0) == pytest.approx(1e-7 + 5e-7)
    tight = evaluate_bound(case, np.eye(2), corrupt=1 - 1e-9)
    assert tight.status == "pass" and tight.grazes == [False, True]
    strict = evaluate_bound(case, np.eye(2), corrupt=1 - 1e-9, tol_abs=0, tol_rel=0)
    assert strict.status == "fail"


def test_link_ratios():
    r = link_ratios(np.array([[0.0, 0.0, 1.0, 0.0]]))
    assert r[0, 0] == 1.0 and r[0, 1] == 0.0 and r[0, 2] == np.inf


def test_log_mix():
    assert log_mix(0.25, 3.0, 3.0) == 3.0
    assert log_mix(0.5, 1.0, 2.0) == pytest.approx(math.log((math.e + math.e**2) / 2))
    assert np.isfinite(log_mix(0.5, 1000.0, 1.0))
    assert log_mix(0.5, 1000.0, 1.0) == pytest.approx(1000 - math.log(2))


def test_submult_gating_with_tabulated_phi():
    ts = np.linspace(0, 2, 201)
    phi = from_table(ts, ts**2, "square")
    with pytest.raises(CaseError):
        make_case("th1_product", phi=phi, v=0.5)
    from orlicz_radius.orlicz import check_submultiplicative

    checked = phi.with_submult(check_submultiplicative(phi, [1.0, 1.1, 1.2]).as_status())
    assert checked.submult.state == "checked"
    case = make_case("th2_gh", phi=checked, v=0.5, s=0.5)
    small = evaluate_bound(case, 0.5 * np.eye(2))
    large = evaluate_bound(case, 1.2 * J2)
    assert small.status == "pass"
    assert large.status == "inapplicable"


def test_pair_argument_checks():
    with pytest.raises(ValueError):
        evaluate_bound(make_case("cor_N1"), J2)
    with pytest.raises(ValueError):
        evaluate_bound(make_case("base_norm"), J2, J2)
    with pytest.raises(ValueError):
        evaluate_bound(make_case("cor_N1"), J2, np.eye(3))


def test_scaled_pair_quantities_refused():
    q = Quantities(J2, J2).scaled(0.5)
    with pytest.raises(ValueError):
        q.w_adj_product()


# -- case keys and validation --------------------------------------------------------


def test_case_key_round_trip():
    for cid in CATALOGUE:
        for case in expand_grid(cid, default_grid(cid))[:5]:
            assert BoundCase.parse(case.key) == case
            assert BoundCase.parse(case.key).key == case.key


def test_case_key_format():
    case = make_case("th3_alpha", phi="expm1", alpha=0.25, variant="B")
    assert case.key == "th3_alpha[alpha=0.25;phi=expm1;variant=B]"
    assert BoundCase.parse("cor_N222").key == "cor_N222"


@pytest.mark.parametrize(
    "cid, params",
    [
        ("nope", {}),
        ("th3_alpha", {"alpha": 1.5}),
        ("th2_gh", {"s": -0.1}),
        ("cor_11", {"v": 1.0}),
        ("cor_11", {"v": 0.0}),
        ("base_elhaddad", {"r": 0.5}),
        ("cor_nil", {"n": 2.5}),
        ("cor_nil", {"n": 1}),
        ("th3_alpha", {"variant": "C"}),
        ("th1_product", {"phi": "expm1"}),
        ("base_norm", {"alpha": 0.5}),
    ],
)
def test_invalid_cases(cid, params):
    with pytest.raises(ValueError):
        make_case(cid, **params)


def test_malformed_keys():
    for key in ["th3_alpha[alpha=0.5", "th3_alpha[beta=1]", "th3_alpha[alpha]"]:
        with pytest.raises(CaseError):
            BoundCase.parse(key)


def test_catalogue_listing():
    rows = catalogue_rows()
    assert len(rows) == len(CATALOGUE) == len(VECTOR_CASES) + len(OPERATOR_CASES)
    assert set(PAIR_CASES) < set(OPERATOR_CASES)
    assert {r["id"] for r in rows} == set(CATALOGUE)
    assert all(r["anchor"] and r["chain"] for r in rows)


def test_default_grids():
    alphas = {c.alpha for c in expand_grid("th3_alpha", default_grid("th3_alpha"))}
    assert alphas == {0, 0.25, 0.5, 0.75, 1}
    ns = {c.n for c in expand_grid("th7_power", default_grid("th7_power"))}
    assert ns == {2, 3, 4, 5}
    rs = {c.r for c in expand_grid("base_elhaddad", default_grid("base_elhaddad"))}
    assert rs == {1, 1.5, 2}
    for case in expand_grid("th1_product", default_grid("th1_product")):
        assert case.phi.submult.admissible


# -- vector lemmas -------------------------------------------------------------------


def test_buzano_examples():
    assert check_vector_lemma("buzano_vec", x=[1, 0], y=[1, 0], e=[1, 0]).chain == pytest.approx([1, 1])
    s = 1 / math.sqrt(2)
    ev = check_vector_lemma("buzano_vec", x=[1, 0], y=[0, 1], e=[s, s])
    assert ev.chain == pytest.approx([0.5, 0.5], abs=1e-15)
    assert ev.status == "pass"


def test_mccarthy_example():
    s = 1 / math.sqrt(2)
    ev = check_vector_lemma("mccarthy_vec", A=np.diag([1.0, 4.0]), e=[s, s], r=2)
    assert ev.chain == pytest.approx([6.25, 8.5])


def test_orlicz_buzano_expsq_random():
    rng = np.random.default_rng(11)
    for _ in range(50):
        x, y, e = (rng.standard_normal(6) + 1j * rng.standard_normal(6) for _ in range(3))
        e /= np.linalg.norm(e)
        ev = check_vector_lemma("orlicz_buzano_vec", phi=parse_phi("expsq"), x=x, y=y, e=e)
        assert ev.status == "pass"
        assert len(ev.chain) == 3


def test_orlicz_buzano_phi_space():
    rng = np.random.default_rng(12)
    x, y, e = (rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(3))
    e /= np.linalg.norm(e)
    phi = power(2)
    ev = check_vector_lemma("orlicz_buzano_vec", phi=phi, x=x, y=y, e=e)
    a = abs(np.vdot(e, x) * np.vdot(y, e))
    b = np.linalg.norm(x) * np.linalg.norm(y)
    c = abs(np.vdot(y, x))
    assert ev.chain == pytest.approx([a**2, (b**2 + c**2) / 2])


def test_mixed_schwarz_oracle():
    rng = np.random.default_rng(13)
    T = ginibre(rng, 4)
    x, y = ginibre(rng, 4)[:2]
    for s in (0.0, 0.25, 0.5, 1.0):
        ev = check_vector_lemma("mixed_schwarz_vec", T=T, x=x, y=y, s=s)
        lhs = abs(np.vdot(y, T @ x))
        rhs = np.linalg.norm(absp(T, s) @ x) * np.linalg.norm(absp(adjoint(T), 1 - s) @ y)
        assert ev.chain == pytest.approx([lhs, rhs], rel=1e-10)
        assert ev.status == "pass"


def test_gen_cauchy_and_ext_buzano():
    rng = np.random.default_rng(14)
    x, y, e = ginibre(rng, 5)[:3]
    e = e / np.linalg.norm(e)
    ev = check_vector_lemma("gen_cauchy_vec", x=x, y=y, v=0.5)
    assert ev.status == "pass" and len(ev.chain) == 3
    xs = ginibre(rng, 5)[:4]
    ev = check_vector_lemma("ext_buzano_vec", xs=xs, e=e, n=4)
    assert ev.chain[0] == pytest.approx(abs(np.prod(xs @ e.conj())))
    assert ev.status == "pass"
    with pytest.raises(ValueError):
        check_vector_lemma("ext_buzano_vec", xs=xs, e=e, n=5)


def test_op_jensen():
    rng = np.random.default_rng(15)
    G = ginibre(rng, 4)
    A = adjoint(G) @ G
    e = ginibre(rng, 4)[0]
    e /= np.linalg.norm(e)
    ev = check_vector_lemma("op_jensen_vec", A=A, e=e, phi=parse_phi("powerlog:p=1"))
    lhs = parse_phi("powerlog:p=1")(np.vdot(e, A @ e).real)
    rhs = np.vdot(e, psd_fun(A, lambda t: t * np.log1p(t)) @ e).real
    assert ev.chain == pytest.approx([lhs, rhs], rel=1e-10)


def test_vector_input_validation():
    with pytest.raises(ValueError):
        check_vector_lemma("buzano_vec", x=[1, 0], y=[1, 0], e=[2, 0])
    with pytest.raises(ValueError):
        check_vector_lemma("buzano_vec", x=[1, 0], y=[1, 0])
    with pytest.raises(ValueError):
        check_vector_lemma("mccarthy_vec", A=[[1, 2], [0, 1]], e=[1, 0], r=2)
    with pytest.raises(ValueError):
        check_vector_lemma("mccarthy_vec", A=np.diag([1.0, -1.0]), e=[1, 0], r=2)
