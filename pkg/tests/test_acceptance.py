"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here, verbatim from the build contract.  The monodromy
criteria run in extended precision.
"""

import json
import math
import random
import time
from fractions import Fraction

import pytest

from ellassoc.gt import (AssociatorCandidate, EllipsitomicCandidate, GroupLike,
                         GRTElement, GTElement, chart_preset,
                         check_cd_identities, check_elliptic,
                         check_ellipsitomic, check_ellipsitomic_bis,
                         check_hexagons, check_pentagon, f2_preset, grt_act,
                         grt_mul, gt_act, gt_mul, grt_ell_check, GRTEllElement,
                         trivial_associator, trivial_ellipsitomic)
from ellassoc.modular import (A_s_gamma_closed, A_s_gamma_taylor, TorsionPoint,
                              check_modularity, eisenstein_E_qseries,
                              eisenstein_G)
from ellassoc.monodromy import kz_associator, kzb_pair
from ellassoc.presentations import GammaSpec, preset_quotient
from ellassoc.series import NCSeries

from test_gt import rand_grouplike
from test_presentations import random_ideal_element

MU = 2j * math.pi


def report(name, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name} {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def kz4x():
    return kz_associator(4, precision="extended")


@pytest.fixture(scope="module")
def kz3x():
    return kz_associator(3, precision="extended")


def test_criterion_1_presentations():
    t0 = time.time()
    rng = random.Random(2024)
    presets = ["t:3", "t:4", "t1:2", "t1:3", "t1G:2:2:1", "t1G:2:2:2",
               "t1G:3:2:1"]
    for label in presets:
        q = preset_quotient(label, 4)
        for r in q.presentation.relations:
            assert not any(q.reduce_lie(r)), (label, "relation")
        for _ in range(200):
            elem = random_ideal_element(q, rng)
            for d in sorted({q.alphabet.deg(w) for w in elem.coeffs}):
                comp = elem.degree_component(d)
                assert not any(q.reduce_lie(comp)), (label, "ideal elem")
    assert preset_quotient("bar-t1:2", 4).dims() == [2, 1, 2, 3]
    assert preset_quotient("t:3", 4).dims() == [3, 1, 2, 3]
    for label in presets:
        if label.startswith("t1"):
            assert preset_quotient(label, 4).dims() == \
                preset_quotient(label, 4, alt=True).dims(), (label, "lem:pres1")
    dt = time.time() - t0
    report("criterion 1 (presentation suite, exact)", dt < 60,
           f"runtime {dt:.1f}s < 60s")


def test_criterion_2_gt_grt_suite():
    t0 = time.time()
    rng = random.Random(4095)
    f2 = f2_preset(4)
    unit_gt = GTElement(Fraction(1), GroupLike.identity(f2))
    unit_grt = GRTElement(GroupLike.identity(f2))
    for _ in range(20):
        a = GTElement(Fraction(rng.randint(1, 3)), rand_grouplike(f2, rng))
        b = GTElement(Fraction(rng.randint(1, 3)), rand_grouplike(f2, rng))
        c = GTElement(Fraction(rng.randint(1, 3)), rand_grouplike(f2, rng))
        assert gt_mul(unit_gt, a).f.series == a.f.series
        assert gt_mul(a, unit_gt).f.series == a.f.series
        lhs, rhs = gt_mul(gt_mul(a, b), c), gt_mul(a, gt_mul(b, c))
        assert lhs.lam == rhs.lam and lhs.f.series == rhs.f.series
        ga = GRTElement(rand_grouplike(f2, rng))
        gb = GRTElement(rand_grouplike(f2, rng))
        gc = GRTElement(rand_grouplike(f2, rng))
        assert grt_mul(ga, unit_grt).g.series == ga.g.series
        assert grt_mul(grt_mul(ga, gb), gc).g.series == \
            grt_mul(ga, grt_mul(gb, gc)).g.series
    for _ in range(10):
        e_gt = GTElement(Fraction(rng.randint(1, 2)), rand_grouplike(f2, rng))
        e_grt = GRTElement(rand_grouplike(f2, rng))
        lam = Fraction(rng.randint(1, 2))
        cand = AssociatorCandidate(Fraction(rng.randint(1, 3)),
                                   rand_grouplike(f2, rng))
        one_way = grt_act(gt_act(e_gt, cand), lam, e_grt)
        other = gt_act(e_gt, grt_act(cand, lam, e_grt))
        assert one_way.mu == other.mu
        assert one_way.phi.series == other.phi.series
    # residual-0 trivial candidates for every checker
    triv = trivial_associator(4)
    assert check_pentagon(triv).max_residual == 0
    assert check_hexagons(triv).max_residual == 0
    for gamma in (GammaSpec(1, 1), GammaSpec(2, 1)):
        te = trivial_ellipsitomic(gamma, 3)
        assert check_ellipsitomic(te).max_residual == 0
        assert check_ellipsitomic_bis(te).max_residual == 0
        assert check_cd_identities(gamma, 3).max_residual == 0
    chart = chart_preset(GammaSpec(1, 1), 3)
    cx = NCSeries.generator(chart.alphabet, 3, "x")
    cy = NCSeries.generator(chart.alphabet, 3, "y")
    triv_ell = GRTEllElement(GRTElement(GroupLike.identity(f2_preset(3))),
                             cx, cy.scale(-1))
    assert grt_ell_check(triv_ell, chart).max_residual == 0
    dt = time.time() - t0
    report("criterion 2 (GT/GRT algebra suite, exact)", dt < 120,
           f"runtime {dt:.1f}s < 120s")


def test_criterion_3_kz_reproduction(kz4x):
    t0 = time.time()
    cand = AssociatorCandidate(MU, kz4x.phi)
    pent = check_pentagon(cand)
    hexes = check_hexagons(cand)
    hex_res = max(r.max_residual for r in hexes.relations
                  if r.name.startswith("hexagon"))
    dual = [r for r in hexes.relations if r.name == "duality"][0].max_residual
    zeta2 = sum(1.0 / n ** 2 for n in range(1, 300000)) + 1 / 300000.0
    c2 = kz4x.phi.series.coeffs.get((0, 1))
    # independent oracle at 10x resolution: tighter schedule and step control
    oracle = kz_associator(2, eps_schedule=(1e-3, 1e-4, 1e-5),
                           precision="extended", rtol=1e-14)
    c2_oracle = oracle.phi.series.coeffs.get((0, 1))
    ok = (pent.max_residual <= 1e-8 and hex_res <= 1e-8 and dual <= 1e-9
          and abs(abs(c2) - zeta2) <= 1e-9 and abs(c2 - c2_oracle) <= 1e-9)
    dt = time.time() - t0
    report("criterion 3 (KZ associator, cutoff 4)", ok and dt < 600,
           f"pentagon {pent.max_residual:.2e}, hexagons {hex_res:.2e}, "
           f"duality {dual:.2e}, |c2|-zeta(2) {abs(abs(c2)-zeta2):.2e}, "
           f"runtime {dt:.0f}s < 600s")


def test_criterion_4_elliptic(kz3x):
    t0 = time.time()
    hol = kzb_pair(GammaSpec(1, 1), 1j, 3, precision="extended")
    rep = check_elliptic(MU, kz3x.phi, hol.A, hol.B)
    ok = rep.max_residual <= 1e-6 and rep.klass_ok
    dt = time.time() - t0
    report("criterion 4 (elliptic KZB pair, trivial Gamma)", ok and dt < 1200,
           f"residual {rep.max_residual:.2e} <= 1e-6, runtime {dt:.0f}s < 1200s")


@pytest.mark.parametrize("tau", [1j, 0.5 + 1j], ids=["tau=i", "tau=1/2+i"])
def test_criterion_5_ellipsitomic(kz3x, tau):
    t0 = time.time()
    gamma = GammaSpec(2, 1)
    hol = kzb_pair(gamma, tau, 3, precision="extended")
    cand = EllipsitomicCandidate(AssociatorCandidate(MU, kz3x.phi),
                                 hol.A, hol.B, gamma)
    rep = check_ellipsitomic(cand)
    repb = check_ellipsitomic_bis(cand)
    ok = (rep.max_residual <= 1e-6 and repb.max_residual <= 1e-6
          and rep.klass_ok and repb.klass_ok)
    dt = time.time() - t0
    report(f"criterion 5 (ellipsitomic KZB pair, tau={tau})", ok and dt < 2700,
           f"main {rep.max_residual:.2e}, bis {repb.max_residual:.2e}, "
           f"klass exact {rep.klass_ok and repb.klass_ok}, "
           f"runtime {dt:.0f}s < 2700s")


def test_criterion_6_dual_route():
    t0 = time.time()
    spec = GammaSpec(2, 2)
    worst = 0.0
    for tau in (1j, 2j, 0.5 + 1j):
        for gamma in [(0, 1), (1, 0), (1, 1)]:
            tp = TorsionPoint(gamma, spec)
            taylor = A_s_gamma_taylor(tp, tau, 6)
            closed = A_s_gamma_closed(tp, tau, 6)
            for s in range(7):
                rel = abs(taylor[s] - closed[s]) / (1 + abs(closed[s]))
                worst = max(worst, rel)
    dt = time.time() - t0
    report("criterion 6 (Eisenstein-Hurwitz dual route)",
           worst <= 1e-9 and dt < 60,
           f"worst rel diff {worst:.2e} <= 1e-9, runtime {dt:.1f}s < 60s")


def test_criterion_7_modularity():
    t0 = time.time()
    spec = GammaSpec(2, 2)
    tau = 1j
    worst = 0.0
    for gamma in [(0, 1), (1, 0), (1, 1)]:
        tp = TorsionPoint(gamma, spec)
        for s in (3, 4, 5, 6):
            worst = max(worst,
                        check_modularity(s, tp, ((1, spec.N), (0, 1)), tau),
                        check_modularity(s, tp, ((1, 0), (spec.M, 1)), tau))
    odd_ok = all(abs(eisenstein_G(2 * k + 1, tau)) <= 1e-12 for k in (1, 2, 3))
    const_ok = all(eisenstein_E_qseries(2 * n, 8).constant_term() == 1
                   for n in (1, 2, 3, 4))
    dt = time.time() - t0
    report("criterion 7 (modularity + classical Eisenstein)",
           worst <= 1e-7 and odd_ok and const_ok and dt < 60,
           f"worst covariance {worst:.2e} <= 1e-7, odd-k zero {odd_ok}, "
           f"E constant exact {const_ok}, runtime {dt:.1f}s < 60s")


def test_criterion_8_bis_equivalence(kz3x):
    t0 = time.time()
    rng = random.Random(50)
    gamma = GammaSpec(2, 1)
    chart = chart_preset(gamma, 3)
    tol = 1e-9
    for _ in range(50):
        A = rand_grouplike(chart, rng)
        B = rand_grouplike(chart, rng)
        cand = EllipsitomicCandidate(
            AssociatorCandidate(MU, kz3x.phi),
            GroupLike(chart, A.log.to_complex()),
            GroupLike(chart, B.log.to_complex()), gamma)
        v1 = check_ellipsitomic(cand).passes(tol)
        v2 = check_ellipsitomic_bis(cand).passes(tol)
        assert v1 == v2
    hol = kzb_pair(gamma, 1j, 3, precision="extended")
    kzb_cand = EllipsitomicCandidate(AssociatorCandidate(MU, kz3x.phi),
                                     hol.A, hol.B, gamma)
    both = (check_ellipsitomic(kzb_cand).passes(1e-6)
            and check_ellipsitomic_bis(kzb_cand).passes(1e-6))
    dt = time.time() - t0
    report("criterion 8 (relation-system equivalence)", both and dt < 600,
           f"50 verdicts agree, KZB pair passes both: {both}, "
           f"runtime {dt:.0f}s < 600s")
