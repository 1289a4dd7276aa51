"""End-to-end acceptance checks.

Each test prints one summary line (ACCEPTANCE k: PASS/FAIL - detail)
before asserting, so a plain ``pytest -s`` run shows the whole scorecard.
Criterion 3 is expected to fail on the stationary-envelope intensity
figure; see README for the analysis.
"""

import math
import time

import numpy as np
from scipy.special import erf

from qlgc import (
    C_LIGHT,
    EPSILON_0,
    GWP,
    HBAR,
    SWP,
    FixedAmplitude,
    FixedDuration,
    build_ladder_system,
    decompose_mod_phase,
    density_state,
    eliminate_phases,
    factor_product,
    ground_state,
    gram_schmidt_extend,
    hf4_preset,
    inversion_scheme,
    kinematical_bound,
    min_detuning,
    observable_max_scheme,
    phase_sensitivity_probe,
    population_transfer_scheme,
    propagate_ode,
    propagate_piecewise,
    rb4_preset,
    reconstruct,
    schedule_from_factorization,
    superposition_phase_solution,
    superposition_scheme,
    transition_dipole_observable,
    validate_schedule,
)

from conftest import random_unitary

# schedules accumulated by criteria 3-7 and cross-checked by criterion 8
SCHEDULES = []


def _verdict(k, checks, detail):
    ok = all(flag for flag, _ in checks)
    line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    failures = "; ".join(msg for flag, msg in checks if not flag)
    if failures:
        line += f" [{failures}]"
    print(line)
    assert ok, failures


def _intensity_kw_cm2(field):
    return EPSILON_0 * C_LIGHT * field**2 / 1e7


def test_criterion_1_round_trip():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    checks = []
    for n in range(2, 9):
        k_max = n * (n - 1) // 2
        for i in range(200):
            u = random_unitary(rng, n)
            fact = decompose_mod_phase(u)
            err = np.linalg.norm(reconstruct(fact) - u)
            worst = max(worst, err)
            if len(fact.factors) > k_max:
                checks.append((False, f"{len(fact.factors)} factors at N={n}"))
            if i % 4 == 0:
                exact = eliminate_phases(fact)
                worst = max(worst, np.linalg.norm(reconstruct(exact) - u))
                if len(exact.factors) > k_max + 2 * (n - 1):
                    checks.append((False, f"exact factor bound at N={n}"))
                if any(abs(t) > 1e-10 for t in exact.residual.thetas):
                    checks.append((False, f"nonzero exact residual at N={n}"))
    elapsed = time.perf_counter() - t0
    checks.append((worst < 1e-9, f"max reconstruction error {worst:.3e}"))
    checks.append((elapsed < 10.0, f"took {elapsed:.1f} s"))
    _verdict(1, checks, f"1400 round trips N=2..8, max error {worst:.3e}, "
                        f"{elapsed:.2f} s")


def test_criterion_2_equal_superposition_table():
    target = gram_schmidt_extend(np.full(4, 0.5).astype(complex))
    fact = decompose_mod_phase(target)
    want_m = [1, 2, 3, 2, 1]
    want_c = [math.pi / 3, math.atan(math.sqrt(2)), math.pi / 4,
              math.pi / 2, math.pi / 2]
    got_m = [f.transition for f in fact.factors]
    got_c = [abs(f.angle) for f in fact.factors]
    col = factor_product(fact)[:, 0]
    checks = [
        (len(fact.factors) == 5, f"expected 5 factors, got {len(fact.factors)}"),
        (got_m == want_m, f"transitions {got_m}"),
        (np.allclose(got_c, want_c, atol=1e-10), f"angles {got_c}"),
        (np.allclose(col, 0.5, atol=1e-12), "product column is not (1/2,...)"),
    ]
    _verdict(2, checks, "5 factors on transitions 1,2,3,2,1 with the "
                        "closed-form angles")


def test_criterion_3_transfer_fields_and_intensities():
    rb = rb4_preset()
    fact = population_transfer_scheme(4).factorization
    sched_swp = schedule_from_factorization(
        fact, rb, FixedDuration(SWP, 200e-12, 20e-12))
    sched_gwp = schedule_from_factorization(fact, rb, FixedDuration(GWP, 200e-12))
    SCHEDULES.append(("rb transfer swp", sched_swp))
    SCHEDULES.append(("rb transfer gwp", sched_gwp))

    checks = []
    for sched in (sched_swp, sched_gwp):
        _, u = propagate_piecewise(sched, ground_state(4), samples_per_pulse=4)
        p4 = abs(u[3, 0]) ** 2
        checks.append((abs(p4 - 1.0) < 1e-9, f"analytic transfer P4 = {p4}"))
        _, u = propagate_ode(sched, ground_state(4), rel_tol=1e-9,
                             samples_per_pulse=4)
        p4 = abs(u[3, 0]) ** 2
        checks.append((abs(p4 - 1.0) < 1e-6, f"ode transfer P4 = {p4}"))

    # the weakest transition needs the strongest drive
    e_swp = max(2 * p.half_amplitude for p in sched_swp.pulses)
    e_gwp = max(2 * p.half_amplitude for p in sched_gwp.pulses) / erf(2.0)
    checks.append((abs(e_swp - 3.8e5) / 3.8e5 < 0.02,
                   f"swp peak field {e_swp:.4g} vs 3.8e5"))
    checks.append((abs(e_gwp - 7.8e5) / 7.8e5 < 0.02,
                   f"gwp peak field {e_gwp:.4g} vs 7.8e5"))

    i_swp = _intensity_kw_cm2(e_swp)
    i_gwp = _intensity_kw_cm2(e_gwp)
    checks.append((abs(i_swp - 40.0) / 40.0 < 0.05,
                   f"swp intensity {i_swp:.2f} kW/cm2 vs 40 "
                   f"({100 * abs(i_swp - 40) / 40:.1f}% off)"))
    checks.append((abs(i_gwp - 160.0) / 160.0 < 0.05,
                   f"gwp intensity {i_gwp:.2f} kW/cm2 vs 160"))
    _verdict(3, checks,
             f"fields {e_swp / 1e3:.1f}/{e_gwp / 1e3:.1f} kV/m, "
             f"intensities {i_swp:.2f}/{i_gwp:.2f} kW/cm2")


def test_criterion_4_fixed_amplitude_durations():
    hf = hf4_preset()
    rb = rb4_preset()
    inv = inversion_scheme(4).factorization
    tr = population_transfer_scheme(4).factorization
    checks = []

    sched = schedule_from_factorization(inv, hf, FixedAmplitude(SWP, 5e6, 20e-12))
    SCHEDULES.append(("hf inversion swp", sched))
    got = [p.duration * 1e12 for p in sched.pulses]
    want = [224.5, 164.6, 138.1, 224.5, 164.6, 224.5]
    checks.append((np.allclose(got, want, atol=0.2),
                   f"hf swp durations {np.round(got, 3)}"))
    total = sched.total_duration
    checks.append((abs(total - 1.14e-9) / 1.14e-9 < 0.01,
                   f"hf swp total {total * 1e9:.4f} ns vs 1.14"))

    sched = schedule_from_factorization(inv, hf, FixedAmplitude(GWP, 5e6))
    SCHEDULES.append(("hf inversion gwp", sched))
    got = [p.duration * 1e12 for p in sched.pulses]
    want = [461.3, 326.2, 266.3, 461.3, 326.2, 461.3]
    checks.append((np.allclose(got, want, atol=0.2),
                   f"hf gwp durations {np.round(got, 3)}"))
    total = sched.total_duration
    checks.append((abs(total - 2.3e-9) / 2.3e-9 < 0.01,
                   f"hf gwp total {total * 1e9:.4f} ns vs 2.3"))

    sched = schedule_from_factorization(tr, rb, FixedAmplitude(SWP, 1e5, 20e-12))
    SCHEDULES.append(("rb transfer swp ceiling", sched))
    got = [p.duration * 1e12 for p in sched.pulses]
    checks.append((np.allclose(got, [124.2, 132.7, 697.1], atol=0.3),
                   f"rb swp durations {np.round(got, 3)}"))

    sched = schedule_from_factorization(tr, rb, FixedAmplitude(GWP, 1e5))
    SCHEDULES.append(("rb transfer gwp ceiling", sched))
    got = [p.duration * 1e12 for p in sched.pulses]
    checks.append((np.allclose(got, [235.1, 254.7, 1528.2], atol=0.3),
                   f"rb gwp durations {np.round(got, 3)}"))
    _verdict(4, checks, "pi-pulse durations at the 5e6 and 1e5 V/m ceilings "
                        "match the reference tables")


def test_criterion_5_population_inversion():
    w = np.array([0.4, 0.3, 0.2, 0.1])
    res = inversion_scheme(4, w)
    sched = schedule_from_factorization(
        res.factorization, hf4_preset(), FixedDuration(SWP, 200e-12, 20e-12))
    SCHEDULES.append(("hf inversion 200ps", sched))
    _, u = propagate_piecewise(sched, density_state(np.diag(w).astype(complex)),
                               samples_per_pulse=4)
    rho = u @ np.diag(w.astype(complex)) @ u.conj().T
    got = np.real(np.diag(rho))
    checks = [(np.allclose(got, w[::-1], atol=1e-9),
               f"inverted diagonal {np.round(got, 6)}")]
    rho2 = u @ rho @ u.conj().T
    checks.append((np.allclose(np.real(np.diag(rho2)), w, atol=1e-9),
                   "double application does not restore the ensemble"))
    rng = np.random.default_rng(55)
    from qlgc import DiagonalPhases, Factorization, RotationFactor
    for _ in range(20):
        factors = tuple(
            RotationFactor(f.transition, f.angle,
                           float(rng.uniform(-math.pi, math.pi)))
            for f in res.factorization.factors)
        fact = Factorization(n=4, mode="mod-phase", factors=factors,
                             residual=DiagonalPhases((0.0,) * 4))
        v = factor_product(fact)
        diag = np.real(np.diag(v @ np.diag(w.astype(complex)) @ v.conj().T))
        if not np.allclose(diag, w[::-1], atol=1e-9):
            checks.append((False, f"phase draw broke inversion: {diag}"))
            break
    _verdict(5, checks, "diag(0.4,0.3,0.2,0.1) inverted, restored on repeat, "
                        "and phase-insensitive over 20 draws")


def test_criterion_6_equal_superposition_dynamics():
    res = superposition_scheme((0.5,) * 4, (0.0,) * 4)
    sched = schedule_from_factorization(
        res.factorization, rb4_preset(), FixedDuration(SWP, 200e-12, 20e-12))
    SCHEDULES.append(("rb superposition", sched))
    series, _ = propagate_piecewise(sched, ground_state(4), samples_per_pulse=4)
    coh_a = series.coherences[-1]
    series, _ = propagate_ode(sched, ground_state(4), rel_tol=1e-9,
                              samples_per_pulse=4)
    coh_o = series.coherences[-1]
    phis = superposition_phase_solution((0.0,) * 4, math.pi / 2)
    want_phis = (math.pi / 2, -math.pi / 2, math.pi / 2, math.pi / 2,
                 -math.pi / 2)
    checks = [
        (np.allclose(coh_a, 0.25, atol=1e-9),
         f"analytic coherences {np.round(coh_a, 6)}"),
        (np.allclose(coh_o, 0.25, atol=1e-3),
         f"ode coherences {np.round(coh_o, 6)}"),
        (np.allclose(phis, want_phis, atol=1e-12),
         f"phase solution {np.round(phis, 6)}"),
    ]
    _verdict(6, checks, "all six |rho_mn| = 0.25 (analytic 1e-9, ode 1e-3); "
                        "phase solution matches the reference gauge")


def test_criterion_7_observable_maximization():
    p0 = 4.89e-29
    a = transition_dipole_observable(p0 * np.sqrt([1.0, 2.0, 3.0]))
    w = (0.4, 0.3, 0.2, 0.1)
    res = observable_max_scheme(a, w)
    bound, _ = kinematical_bound(a, w)
    ideal = build_ladder_system(rb4_preset().energies,
                                p0 * np.sqrt([1.0, 2.0, 3.0]), name="ideal4")
    sched = schedule_from_factorization(
        res.factorization, ideal, FixedDuration(SWP, 200e-12, 20e-12))
    SCHEDULES.append(("ideal maximize", sched))
    _, u = propagate_piecewise(
        sched, density_state(np.diag(w).astype(complex)), samples_per_pulse=4)
    rho = u @ np.diag(np.asarray(w, dtype=complex)) @ u.conj().T
    achieved = float(np.real(np.trace(a @ rho)))
    coh = np.real([rho[0, 1], rho[0, 3], rho[1, 2], rho[2, 3]])
    flipped = phase_sensitivity_probe(res, 0, math.pi / 2)
    checks = [
        (abs(achieved - 0.774520 * p0) / (0.774520 * p0) < 1e-6,
         f"achieved {achieved / p0:.7f} p0 vs 0.774520"),
        (abs(achieved - bound) / bound < 1e-6, "achieved != kinematical bound"),
        (np.allclose(coh, [0.0658, -0.0016, 0.0904, 0.1118], atol=5e-4),
         f"coherences {np.round(coh, 5)}"),
        (abs(flipped - 0.615276 * p0) / (0.615276 * p0) < 1e-6,
         f"flipped probe {flipped / p0:.7f} p0 vs 0.615276"),
        (flipped < bound, "flipped probe should stay below the bound"),
    ]
    _verdict(7, checks, f"bound {bound / p0:.6f} p0 attained; pi phase flip "
                        f"drops the average to {flipped / p0:.6f} p0")


def test_criterion_8_engines_agree():
    checks = [(len(SCHEDULES) >= 8, "no schedules collected")]
    worst = ("", 0.0)
    for label, sched in SCHEDULES:
        state0 = ground_state(sched.system.level_count)
        _, u_pw = propagate_piecewise(sched, state0, samples_per_pulse=4)
        _, u_ode = propagate_ode(sched, state0, rel_tol=1e-9,
                                 samples_per_pulse=4)
        dev = float(np.linalg.norm(u_ode - u_pw))
        if dev > worst[1]:
            worst = (label, dev)
        checks.append((dev < 1e-6, f"{label}: |U_ode - U_analytic| = {dev:.3e}"))
    _verdict(8, checks, f"{len(SCHEDULES)} schedules cross-checked, worst "
                        f"deviation {worst[1]:.3e} ({worst[0]})")


def test_criterion_9_validation_reports():
    rb, hf = rb4_preset(), hf4_preset()
    fact = population_transfer_scheme(4).factorization
    checks = []
    ratios = {}
    for name, system in (("rb4", rb), ("hf4", hf)):
        for shape in (SWP, GWP):
            tau0 = 20e-12 if shape == SWP else 0.0
            sched = schedule_from_factorization(
                fact, system, FixedDuration(shape, 200e-12, tau0))
            report = validate_schedule(sched)
            checks.append((report.passed, f"{name} {shape} 200 ps should pass"))
            ratios[name, shape] = max(p.rabi_ratio for p in report.pulses)
    want = {("rb4", SWP): 4.363e-5, ("rb4", GWP): 8.862e-5,
            ("hf4", SWP): 5.340e-4, ("hf4", GWP): 1.085e-3}
    for key, expect in want.items():
        checks.append((abs(ratios[key] - expect) / expect < 1e-2,
                       f"{key} ratio {ratios[key]:.3e} vs {expect:.3e}"))
    for key in (("rb4", SWP), ("rb4", GWP), ("hf4", SWP)):
        checks.append((ratios[key] <= 1e-3,
                       f"{key} ratio {ratios[key]:.3e} above 1e-3"))
    # the hf gwp combination sits just above the 1e-3 guideline but still
    # far inside the 0.1 hard limit
    note = f"hf4 gwp ratio {ratios['hf4', GWP]:.3e} (guideline 1e-3)"

    short = schedule_from_factorization(
        fact, hf, FixedDuration(SWP, 0.1e-12, 0.01e-12))
    report = validate_schedule(short)
    margin = report.pulses[0].dispersion_margin
    checks.append((not report.pulses[0].dispersion_pass,
                   "0.1 ps pulse should fail the dispersion check"))
    checks.append((abs(margin - 3.27) / 3.27 < 1e-2,
                   f"0.1 ps dispersion margin {margin:.3f} vs 3.27"))
    checks.append((abs(min_detuning(hf) - 3.27e13) / 3.27e13 < 1e-3,
                   f"hf min detuning {min_detuning(hf):.4g}"))
    checks.append((min_detuning(rb) == 4e14,
                   f"rb min detuning {min_detuning(rb):.4g}"))
    _verdict(9, checks, "200 ps schedules pass on both systems; "
                        f"worst Rabi/detuning 1.08e-3; {note}; "
                        "sub-ps pulses rejected by the dispersion margin")
