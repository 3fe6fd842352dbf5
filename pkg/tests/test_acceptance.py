"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines live.
Every tolerance is pinned here, not configurable.
"""

import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from hamloop.ballquad import ball_moment, quad_ball, quad_spacetime
from hamloop.cli import main as cli_main
from hamloop.flow import integrate_batch, matrix_agreement
from hamloop.hamiltonian import displayed_vector_field, loop_hamiltonian, path_field
from hamloop.invariants import (
    BlowupModel,
    BlowupWeight,
    calabi_blowup,
    calabi_r4,
    hofer_lower_bound,
    rank_certificate,
    weinstein_numeric,
    weinstein_symbolic,
)
from hamloop.periodlat import lemma_help_check, replay_certificate
from hamloop.unitary import generator
from hamloop.flow import J_OMEGA

from conftest import random_path_spec, winding_loop


@contextmanager
def criterion(number, name, runtime_limit):
    start = time.time()
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number:02d} [{name}]: FAIL ({time.time() - start:.1f}s)")
        raise
    elapsed = time.time() - start
    print(f"ACCEPTANCE {number:02d} [{name}]: PASS ({elapsed:.1f}s)")
    assert elapsed < runtime_limit, f"runtime {elapsed:.1f}s over {runtime_limit}s limit"


def test_criterion_1_field_transcription():
    with criterion(1, "vector-field transcription", 5.0):
        rng = np.random.default_rng(101)
        h = 1e-5
        for _ in range(100):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0, 1))
            x = rng.uniform(-1, 1, size=4)
            n = np.linalg.norm(x)
            if n > 0:
                x *= rng.uniform(0, 2.0) / n
            disp = displayed_vector_field(spec, t, x)
            assert np.max(np.abs(disp - generator(spec, t) @ x)) <= 1e-9
            fld = path_field(spec)
            xv = fld.vector(t, x)
            for _ in range(2):
                v = rng.standard_normal(4)
                v /= np.linalg.norm(v)
                dh = (fld.eval(t, x + h * v) - fld.eval(t, x - h * v)) / (2 * h)
                assert abs(dh - xv @ J_OMEGA @ v) <= 1e-8


def test_criterion_2_path_ball_integral():
    with criterion(2, "path ball-integral closed form", 60.0):
        rng = np.random.default_rng(202)
        for _ in range(10):
            spec = random_path_spec(rng)
            fld = path_field(spec)
            a0 = float(spec.alpha.eval_exact(0))
            a1 = float(spec.alpha.eval_exact(1))
            for r in (0.5, 1.0, 1.7):
                got = quad_spacetime(fld, ("ball", r), resolution=12, time_panels=128)
                want = (math.pi**3 * r**6 / 6) * (1 + a0 - a1)
                if want == 0.0:
                    assert abs(got) <= 1e-6 * (math.pi**3 * r**6 / 6)
                else:
                    assert abs(got - want) <= 1e-6 * abs(want)


def test_criterion_3_loop_winding_integral():
    with criterion(3, "loop winding integral", 60.0):
        for w in (1, -1, 2):
            loop = winding_loop(w)
            fld = loop_hamiltonian(loop)
            r0 = loop.bump.r0
            got = quad_spacetime(fld, ("ball", r0), resolution=16, time_panels=128)
            want = (math.pi**3 * r0**6 / 6) * w
            assert abs(got - want) <= 1e-6 * abs(want)


def test_criterion_4_flow_matrix_agreement(w1_loop):
    with criterion(4, "flow vs matrix action", 120.0):
        r = 0.9 * w1_loop.bump.r0
        for t in (0.5, 1.0, 2.0):
            dev = matrix_agreement(
                w1_loop, r, t, 200, steps=max(1, round(2000 * t)), seed=404
            )
            assert dev <= 1e-6
        fld = loop_hamiltonian(w1_loop)
        origin = integrate_batch(fld, 0.0, 2.0, np.zeros((1, 4)), steps=4000)[0]
        assert np.max(np.abs(origin)) <= 1e-10


def test_criterion_5_single_blowup_certificate(w1_loop):
    with criterion(5, "single blow-up order certificate", 1.0):
        model = BlowupModel.cp2(
            Fraction(10),
            [BlowupWeight(r=1.0, formal=True, center=(0, 0, 0, 0), R_outer=1.5)],
        )
        val, bundle = weinstein_symbolic(model, 1, 1)
        cert = bundle["infinite_order"]
        assert cert.verdict == "INFINITE-ORDER"
        ok, _ = replay_certificate(cert)
        assert ok
        got = weinstein_numeric(w1_loop, model, 1, resolution=16)
        want = (math.pi**3 / 6) / (50 - math.pi**2 / 2)
        assert abs(got - want) <= 1e-6


def test_criterion_6_rank_certificates(tmp_path):
    with criterion(6, "rank certificates", 5.0):
        centers = [(1.0, 0, 0, 0), (-1.0, 0, 0, 0), (0, 1.0, 0, 0), (0, -1.0, 0, 0),
                   (0, 0, 1.0, 0)]
        radii = (0.30, 0.32, 0.34, 0.36, 0.38)
        from hamloop.hamiltonian import BumpProfile

        for k in range(1, 6):
            weights = [
                BlowupWeight(r=radii[i], formal=True, center=centers[i], R_outer=0.44)
                for i in range(k)
            ]
            model = BlowupModel.cp2(Fraction(10), weights)
            loops = [
                winding_loop(1, bump=BumpProfile(w.r, w.R_outer, 1.0))
                for w in model.weights
            ]
            report = rank_certificate(model, loops)
            kinds = [c["meta"]["kind"] for c in report["certificates"]]
            assert kinds.count("infinite-order") == k
            assert kinds.count("pair-distinct") == k * (k - 1) // 2
            assert report["all_certified"]
            bundle = tmp_path / f"rank{k}.json"
            bundle.write_text(json.dumps({"certificates": report["certificates"]}))
            assert cli_main(["explain", str(bundle)]) == 0


def test_criterion_7_coefficient_identity_checker():
    with criterion(7, "coefficient-identity checker", 1.0):
        for k in range(1, 6):
            for j in range(1, k + 1):
                for s in range(1, k + 1):
                    cert = lemma_help_check(k, j, s)
                    assert cert.verdict == "UNSAT", (k, j, s)
                    assert replay_certificate(cert)[0]
        control = lemma_help_check(3, 1, 2, drop_lone_cubic=True)
        assert control.verdict == "SAT"
        assert replay_certificate(control)[0]


def test_criterion_8_calabi_blowup(w1_loop):
    with criterion(8, "blow-up Calabi value", 30.0):
        res = calabi_blowup(w1_loop, 1.0, resolution=16)
        want = -(math.pi**3) / 12
        assert abs(res.stated_closed_form - want) <= 1e-9
        assert abs(res.stated_quadrature - want) <= 1e-6 * abs(want)
        assert abs(hofer_lower_bound(w1_loop, 1.0) - math.pi**3 / 12) <= 1e-12


def test_criterion_9_total_integral_diagnostic(w0_loop, w1_loop):
    with criterion(9, "total-integral diagnostic", 60.0):
        sym = calabi_r4(w0_loop, resolution=16)
        assert abs(sym.measured) <= 1e-8
        res = calabi_r4(w1_loop, resolution=16)
        assert abs(res.measured - res.oracle) <= 1e-6 * abs(res.oracle)
        report = res.to_json()
        assert "measured" in report and report["stated_reference"] == 0.0


def test_criterion_10_numerics_hygiene(w1_loop):
    with criterion(10, "numerics hygiene", 120.0):
        # RK4 observed order >= 3.5 on step-halving
        from hamloop.funcalg import TrigPoly
        from hamloop.unitary import PathSpec

        spec = PathSpec(
            theta=TrigPoly.from_normalized(0, 0, []),
            alpha=TrigPoly.from_normalized(0, -1, []),
        )
        fld = path_field(spec)
        x0 = np.array([0.8, 0.1, -0.4, 0.3])
        ref = integrate_batch(fld, 0, 1, x0, steps=2000)[0]
        e1 = np.max(np.abs(integrate_batch(fld, 0, 1, x0, steps=100)[0] - ref))
        e2 = np.max(np.abs(integrate_batch(fld, 0, 1, x0, steps=200)[0] - ref))
        assert e1 / e2 >= 2**3.5

        # quadrature order >= 2 under resolution doubling
        f = lambda x: np.exp(x[:, 0] + 0.5 * x[:, 3]) * np.cos(2 * x[:, 1])
        ref_q = quad_ball(f, 1.0, resolution=32)
        eq1 = abs(quad_ball(f, 1.0, resolution=4) - ref_q)
        eq2 = abs(quad_ball(f, 1.0, resolution=8) - ref_q)
        assert eq1 / max(eq2, 1e-300) >= 3.9

        # moment oracle vs Monte Carlo, 20 cases, 1e7 samples, 3 sigma
        rng = np.random.default_rng(5150)
        cases = []
        while len(cases) < 20:
            e = tuple(int(2 * rng.integers(0, 3)) for _ in range(4))
            if sum(e) <= 8:
                cases.append(e)
        n_total, chunk = 10_000_000, 2_000_000
        r = 1.2
        vol = math.pi**2 * r**4 / 2
        for e in cases:
            exact = ball_moment(e, r).value
            acc = acc2 = 0.0
            for _ in range(n_total // chunk):
                v = rng.standard_normal((chunk, 4))
                v /= np.linalg.norm(v, axis=1, keepdims=True)
                pts = r * v * (rng.random((chunk, 1)) ** 0.25)
                vals = (
                    pts[:, 0] ** e[0]
                    * pts[:, 1] ** e[1]
                    * pts[:, 2] ** e[2]
                    * pts[:, 3] ** e[3]
                )
                acc += float(vals.sum())
                acc2 += float((vals * vals).sum())
            mean = acc / n_total
            var = max(acc2 / n_total - mean * mean, 0.0)
            est = vol * mean
            se = vol * math.sqrt(var / n_total)
            assert abs(est - exact) <= 3 * se + 1e-12, e
