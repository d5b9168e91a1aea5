"""Acceptance suite: one test per criterion, each recording its metric."""

import itertools

import numpy as np
import pytest
from scipy.linalg import expm

from qudit_decoherence import geometry as geo
from qudit_decoherence.cli import ExperimentConfig, fp_sweep, main
from qudit_decoherence.divisibility import divisibility_report
from qudit_decoherence.dynamics import (KrausChannel, evolve_propagator,
                                        pauli_pi_from_gamma)
from qudit_decoherence.generators import (assemble_generator,
                                          find_mub_weyl_rate_map,
                                          gm_special_eigenvalues, make_spec,
                                          qc_pq_split, rate_labels,
                                          weyl_eigenvalues)
from qudit_decoherence.noise_bases import (gell_mann, mub_projectors,
                                           pauli_strings, weyl)
from qudit_decoherence.operator_core import (eig_superop, match_eigenvalues,
                                             random_density_matrix,
                                             random_hermitian, vec)
from qudit_decoherence.rates import RateSchedule

REPORTS = []  # every divisibility report generated here, for CP => P


def test_criterion_01_dipole_eigenfunctions(record):
    alg, fd, npts = 0.0, 0.0, 100
    for n in (2, 3):
        fam = gell_mann(n)
        w = np.ones(len(fam))
        pts = geo.sample_interior(n, npts, seed=n)
        for T in fam.ops[1:]:
            f = geo.KahlerFunction(T)
            fv = f(pts)
            scale = 4 * n * np.max(np.abs(fv))
            alg = max(alg, np.max(np.abs(geo.laplacian_apply(fam, w, f, pts) + 4 * n * fv)))
            fd = max(fd, np.max(np.abs(geo.laplacian_apply(fam, w, f, pts, "fd")
                                       + 4 * n * fv)) / scale)
    ok = record(1, f"Delta f = -4n f on dipoles, fd rel err over {npts} pts (algebraic {alg:.1e})",
                fd, 1e-4, ok=alg <= 1e-10 and fd <= 1e-4)
    assert ok


def _constrained_gm(n, rng):
    fam = gell_mann(n)
    gamma = rng.uniform(0.1, 2)
    r = dict.fromkeys(fam.labels, 0.0)
    for a, b in itertools.combinations(range(n), 2):
        s = rng.uniform(0, gamma)
        r[("S", a, b)], r[("A", a, b)] = s, gamma - s
    for k in range(1, n):
        r[("D", k, k)] = rng.uniform(0, 2)
    return make_spec(fam, [r[lab] for lab in fam.labels])


def test_criterion_02_gell_mann_closed_form(record):
    rng = np.random.default_rng(2)
    worst = 0.0
    for n in (2, 3, 4):
        for _ in range(50):
            spec = _constrained_gm(n, rng)
            vals, _ = eig_superop(assemble_generator(spec, 0.0))
            formula = list(gm_special_eigenvalues(spec, 0.0).values())
            worst = max(worst, match_eigenvalues(formula, vals))
    assert record(2, "Gell-Mann closed-form spectrum vs eig, 50 draws x n=2,3,4", worst, 1e-8)


def test_criterion_03_weyl_spectrum(record):
    rng = np.random.default_rng(3)
    worst, imag = 0.0, 0.0
    for n in (2, 3, 5):
        fam = weyl(n)
        for _ in range(10):
            spec = make_spec(fam, rng.uniform(0, 1, n * n))
            vals, _ = eig_superop(assemble_generator(spec, 0.0))
            worst = max(worst, match_eigenvalues(list(weyl_eigenvalues(spec, 0.0).values()), vals))
            r = dict(zip(fam.labels, rng.uniform(0, 1, n * n)))
            sym = [r[(a, b)] + r[((-a) % n, (-b) % n)] for a, b in fam.labels]
            vals, _ = eig_superop(assemble_generator(make_spec(fam, sym), 0.0))
            imag = max(imag, float(np.max(np.abs(vals.imag))))
    ok = record(3, f"Weyl formula vs eig, n=2,3,5 (symmetric-rate max |Im| {imag:.1e})",
                worst, 1e-8, ok=worst <= 1e-8 and imag <= 1e-10)
    assert ok


def _random_schedule(labels, rng, skip=None):
    presets = []
    for lab in labels:
        a, c = rng.uniform(0.2, 1.5), rng.uniform(0, 1)
        kind = rng.choice(["const", "tanh", "exp-decay"])
        presets.append("0" if lab == skip else
                       f"const({c})" if kind == "const" else f"{kind}({a},{c})")
    return RateSchedule.from_presets(labels, presets)


def test_criterion_04_fokker_planck_equivalence(record):
    rng = np.random.default_rng(4)
    worst = 0.0
    cases = [gell_mann(2), gell_mann(3), weyl(2), weyl(3), mub_projectors(2),
             mub_projectors(3)]
    for fam in cases:
        spec = make_spec(fam, _random_schedule(rate_labels(fam, None if fam.kind != "mub"
                                                           else "mub-dephasing"), rng,
                                               fam.identity_label))
        cfg = ExperimentConfig(family=fam.kind, dim=fam.dim, t_max=2.0, times=10, points=50,
                               seed=int(rng.integers(1 << 30)))
        rows = fp_sweep(spec, cfg)
        assert len(rows) == 500
        worst = max(worst, max(r[-1] for r in rows))
    assert record(4, "|dp/dt - l[p]| (fd path), 50 pts x 10 times, n=2,3", worst, 1e-4)


def test_criterion_05_pq_vanishing(record):
    rng = np.random.default_rng(5)
    worst = 0.0
    n = 3
    r = dict(zip(weyl(n).labels, rng.uniform(0, 1, n * n)))
    sym_weyl = [r[(a, b)] + r[((-a) % n, (-b) % n)] for a, b in weyl(n).labels]
    specs = [make_spec(gell_mann(3), rng.uniform(0, 1, 9)),
             make_spec(pauli_strings(2), rng.uniform(0, 1, 16)),
             make_spec(mub_projectors(3), rng.uniform(0, 1, 4)),
             make_spec(weyl(n), sym_weyl)]
    pts = geo.sample_interior(3, 50, 5)
    for spec in specs:
        _, pq_super = qc_pq_split(spec, 0.0)
        worst = max(worst, float(np.max(np.abs(pq_super))))
        p = geo.QuantumDistribution(random_density_matrix(spec.dim, rng))
        here = pts if spec.dim == 3 else geo.sample_interior(spec.dim, 50, 5)
        _, _, pq = geo.fp_generator_apply(spec, p, here, 0.0)
        worst = max(worst, float(np.max(np.abs(pq))))
    assert record(5, "PQ term, Hermitian families and symmetric Weyl", worst, 1e-12)


def test_criterion_06_kraus_vs_gksl(record):
    rng = np.random.default_rng(6)
    grid = np.linspace(0, 2, 21)
    worst = 0.0
    for N in (1, 2):
        fam = pauli_strings(N)
        for kind in ("const", "tanh"):
            presets = ["0"] + [f"const({c})" if kind == "const" else f"tanh({a},{c})"
                               for a, c in rng.uniform(0.2, 1, size=(len(fam) - 1, 2))]
            rates = RateSchedule.from_presets(fam.labels, presets)
            lams = evolve_propagator(make_spec(fam, rates), grid)
            pw = pauli_pi_from_gamma(rates, grid)
            for i in range(len(grid)):
                worst = max(worst, float(np.max(np.abs(KrausChannel(fam, pw.weights[i]).superop()
                                                       - lams[i]))))
    assert record(6, "Kraus weights vs integrated propagator, N=1,2, t in [0,2]", worst, 1e-7)


def test_criterion_07_normalization_and_volume(record):
    rng = np.random.default_rng(7)
    worst_sig = 0.0
    for n in (2, 3):
        for i in range(20):
            p = geo.QuantumDistribution(random_density_matrix(n, rng))
            est, sigma = geo.mc_integrate(p, n, 100_000, seed=100 * n + i)
            worst_sig = max(worst_sig, abs(est - 1) / sigma)
        A = random_hermitian(n, rng)
        est, sigma = geo.mc_integrate(geo.KahlerFunction(A), n, 100_000, seed=n)
        worst_sig = max(worst_sig, abs(est - geo.volume(n) * np.trace(A).real / n) / sigma)
        assert geo.volume(n) == pytest.approx(np.pi ** (n - 1) / np.prod(range(1, n)))
    assert record(7, "MC normalization and tr(A)/n identity, worst deviation in sigma",
                  worst_sig, 3.0)


def test_criterion_08_divisibility(record):
    grid = np.linspace(0, 3, 31)
    ok = True
    rng = np.random.default_rng(8)
    for fam in (gell_mann(2), weyl(3), mub_projectors(3)):
        labels = rate_labels(fam, "mub-dephasing" if fam.kind == "mub" else None)
        spec = make_spec(fam, rng.uniform(0, 1, len(labels)))
        rep = divisibility_report(spec, grid)
        REPORTS.append(rep)
        ok &= bool(rep.cp_ok.all() and rep.rate_sign_ok.all())
    qubit = gell_mann(2).labels
    for presets in (["0", "1", "1", "neg-tanh(1)"], ["0", "1", "1", "neg-tanh(1, 2)"],
                    ["0", "0.5", "tanh(1)", "exp-decay(1)"]):
        rep = divisibility_report(make_spec(gell_mann(2), RateSchedule.from_presets(qubit, presets)),
                                  grid)
        REPORTS.append(rep)
    eternal = REPORTS[3]
    ok &= bool(not eternal.cp_ok.all() and eternal.p_ok.all())
    violations = sum(int(np.sum(r.cp_ok & ~r.p_ok)) for r in REPORTS)
    ok &= violations == 0
    assert record(8, "divisibility: const CP, eternal-NM CP fails / P holds; CP=>P violations",
                  violations, 0, ok=ok)


def test_criterion_09_mub_weyl_equivalence(record, capsys):
    n = 3
    rmap = find_mub_weyl_rate_map(n)
    worst = 0.0
    for gamma in (0.3, 1.0, 2.5):
        g = gamma * np.ones(n + 1)
        L_mub = assemble_generator(make_spec(mub_projectors(n), g), 0.0)
        L_weyl = assemble_generator(make_spec(weyl(n), rmap.weyl_rates(g)), 0.0)
        worst = max(worst, float(np.max(np.abs(L_mub - L_weyl))))
    assert main(["spectrum", "--family", "mub", "--dim", "3", "--rates", "1"]) == 0
    emitted = [line for line in capsys.readouterr().out.splitlines()
               if line.startswith("mub-weyl-map")]
    ok = record(9, f"n=3 MUB vs mapped Weyl superoperator ({len(emitted)} map rows emitted)",
                worst, 1e-10, ok=worst <= 1e-10 and len(emitted) == (n + 1) * n * n)
    assert ok


def test_criterion_10_integrator_order(record):
    spec = make_spec(weyl(3), np.linspace(0.1, 0.9, 9))
    L = assemble_generator(spec, 0.0)
    T = 2.0
    exact = expm(T * L)
    errs = [float(np.max(np.abs(evolve_propagator(spec, [0, T], s)[-1] - exact)))
            for s in (4, 8, 16)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    order = float(orders.min())
    assert record(10, f"RK4 empirical order (errors {', '.join(f'{e:.1e}' for e in errs)})",
                  order, 3.5, at_least=True)
