"""Exit criteria. Each test carries ``acceptance(number, title)``; conftest prints
one PASS/FAIL line per criterion at the end of the run."""

import csv
import io
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from hybridrate import model
from hybridrate.cli import main
from hybridrate.params import Protocol
from hybridrate.qfc import QfcMeasurement, fit_qfc, qfc_efficiency_model
from hybridrate.scenarios import contour_grid, find_crossover, preset
from hybridrate.simulator import SimConfig, agrees_with_analytic, analytic_rate, run_batch, run_simulation

IR = preset("ir780").params
CB = preset("cband").params
T = model.cycle_period(IR)


def acceptance(number, title):
    return pytest.mark.acceptance(number, title)


def cli_rows(capsys, *argv):
    assert main(list(argv)) == 0
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


# 1 --------------------------------------------------------------------------

@acceptance(1, "asymptotic ratio at 500 km within 1%")
@pytest.mark.parametrize("name,target", [("ir780", 771.6), ("cband", 277.8)])
def test_asymptotic_ratio_500km(capsys, name, target):
    t0 = time.perf_counter()
    rows = cli_rows(capsys, "ratio", "--preset", name, "--protocols", "ndspm_storage",
                    "--l-min", "500", "--l-max", "500", "--steps", "1")
    elapsed = time.perf_counter() - t0
    ratio = float(rows[0]["ratio"])
    print(f"{name}: ratio(500 km) = {ratio:.2f}, target {target} +/- 1%")
    assert elapsed < 1.0
    assert ratio == pytest.approx(target, rel=0.01)


# 2 --------------------------------------------------------------------------

CROSSOVERS = [
    (("ir780", "ndspm"), ("cband", "baseline"), (0.5, 5.0), 1.8),
    (("ir780", "ndspm_storage"), ("cband", "baseline"), (1.0, 10.0), 5.0),
    (("cband", "ndspm"), ("ir780", "ndspm_storage"), (1.0, 10.0), 3.8),
]


@acceptance(2, "crossover lengths within 0.5 km")
@pytest.mark.parametrize("a,b,bracket,target", CROSSOVERS)
def test_crossovers(a, b, bracket, target):
    t0 = time.perf_counter()
    L = find_crossover(a[0], a[1], b[0], b[1], *bracket)
    elapsed = time.perf_counter() - t0
    print(f"{a} vs {b}: {L:.4f} km (target {target})")
    assert elapsed < 1.0
    assert abs(L - target) <= 0.5


# 3 --------------------------------------------------------------------------

@acceptance(3, "C-band storage gain above 100 at 10 km, E_s = P_nd = 0.6")
def test_contour_claim():
    t0 = time.perf_counter()
    g = contour_grid("cband", 10.0, [0.6], [0.6])
    elapsed = time.perf_counter() - t0
    print(f"cband ratio at 10 km, E_s = P_nd = 0.6: {g[0, 0]:.3f}")
    assert elapsed < 1.0
    assert g[0, 0] > 100


# 4 --------------------------------------------------------------------------

SEEDS = range(20)


@acceptance(4, "simulator agrees with analytic rate (>= 95% of 20 seeds, 3 sigma)")
@pytest.mark.slow
@pytest.mark.parametrize("L", [0.0, 1.0, 5.0, 20.0])
@pytest.mark.parametrize("name", ["ir780", "cband"])
@pytest.mark.parametrize("protocol", list(Protocol), ids=[p.value for p in Protocol])
def test_simulator_analytic_equivalence(protocol, name, L):
    params = preset(name).params
    configs = [SimConfig(params, L, protocol, 10**7, seed) for seed in SEEDS]
    expected = analytic_rate(configs[0])
    results = run_batch(configs, workers=os.cpu_count() or 1)
    ok = sum(agrees_with_analytic(r, expected) for r in results)
    print(f"{protocol.value} {name} {L} km: {ok}/20 within 3 sigma of {expected:.6g} Hz")
    assert ok >= 19


# 5 --------------------------------------------------------------------------

@acceptance(5, "finite storage: simulation matches beta x R*, beta(1000T) ~ 0.965")
@pytest.mark.parametrize("ratio", [10, 100, 1000])
def test_beta_simulation(ratio):
    params = IR.replace(tau=ratio * T)
    config = SimConfig(params, 0.0, Protocol.NDSPM_STORAGE, 10**7, seed=500 + ratio)
    t0 = time.perf_counter()
    r = run_simulation(config)
    elapsed = time.perf_counter() - t0
    expected = model.beta(params) * model.rate_storage(0.0, params)
    print(f"tau = {ratio}T: simulated {r.rate_estimate:.2f} Hz, beta R* = {expected:.2f} Hz")
    assert elapsed < 20.0
    assert agrees_with_analytic(r, expected)


@acceptance(5, "finite storage: simulation matches beta x R*, beta(1000T) ~ 0.965")
def test_beta_value():
    b = model.beta(IR.replace(tau=1000 * T))
    assert model.p_flag(IR) == pytest.approx(0.027)
    assert b == pytest.approx(0.965, abs=5e-4)
    assert 1 - b < 0.10


# 6 --------------------------------------------------------------------------

@acceptance(6, "derivation oracles")
def test_derivation_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ps = np.concatenate([[0.01, 0.027, 0.5, 1.0], rng.uniform(0.01, 1.0, 12)])
    L = 2.0
    for p in ps:
        params = IR.replace(p_p=1, p_q=1, p_nd=float(p))
        tn2 = 2 * model.travel_time(L, params)
        gap = model.t_star(L, params) - tn2
        assert gap / T == pytest.approx(oracles.expected_max_two_geometric(p), rel=1e-10)
        assert T / p <= gap * (1 + 1e-15) and gap <= 2 * T / p * (1 + 1e-15)

        n = int(math.ceil(math.log(1e-15) / math.log1p(-p))) + 2 if p < 1 else 2
        after = math.fsum(model.delay_distribution(p, m, "after") for m in range(n))
        before = math.fsum(model.delay_distribution(p, m, "before") for m in range(1, n))
        assert after + before == pytest.approx(1.0, abs=1e-12)

        for ratio in (10, 1000):
            finite = params.replace(tau=ratio * T)
            assert model.beta(finite) == pytest.approx(oracles.beta_sum(p, T, ratio * T), rel=1e-10)
        assert model.beta(params) == 1.0
    assert time.perf_counter() - t0 < 1.0


# 7 --------------------------------------------------------------------------

ETA, PM = 0.4, 500.0


def qfc_data(noise=0.0, rng=None):
    P = np.linspace(0, 2 * PM, 20)
    y = qfc_efficiency_model(P, ETA, PM)
    if noise:
        y = np.clip(y + rng.normal(0, noise, P.size), 0, 1)
    return [QfcMeasurement(float(a), float(b)) for a, b in zip(P, y)]


@acceptance(7, "QFC fit recovery")
@pytest.mark.parametrize("guess", [None, (0.2, 250.0), (0.8, 1000.0), (0.1, 2000.0)])
def test_qfc_noiseless(guess):
    fit = fit_qfc(qfc_data(), guess)
    assert fit.eta == pytest.approx(ETA, rel=1e-6)
    assert fit.p_m == pytest.approx(PM, rel=1e-6)


@acceptance(7, "QFC fit recovery")
def test_qfc_noisy():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    hits = sum(abs(fit_qfc(qfc_data(0.01, rng)).eta - ETA) <= 0.02 for _ in range(50))
    print(f"{hits}/50 noisy fits within 0.02 of eta")
    assert time.perf_counter() - t0 < 10.0
    assert hits >= 48


# 8 --------------------------------------------------------------------------

@acceptance(8, "simulate output byte-identical on repeat")
@pytest.mark.parametrize("argv", [
    ["--protocol", "baseline", "--length", "0"],
    ["--protocol", "ndspm", "--length", "1", "--preset", "cband"],
    ["--protocol", "ndspm_storage", "--length", "5", "--tau-cycles", "100", "--format", "json"],
])
def test_simulate_deterministic(argv):
    cmd = [sys.executable, "-m", "hybridrate", "simulate", "--cycles", "1000000", "--seed", "31", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a and a == b
