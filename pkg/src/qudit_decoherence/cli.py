"""Command-line front end.

    qudit bases        --family weyl --dim 3
    qudit evolve       --family gell-mann --dim 2 --rates "0.1,0.2,0.3" --t-max 2
    qudit spectrum     --family gell-mann --dim 3 --rates "const(1)"
    qudit divisibility --family gell-mann --dim 2 --rates "1,1,neg-tanh(1)"
    qudit geometry verify --dim 3 --checks lemma,brackets
    qudit fp-compare   --family weyl --dim 3 --rates "exp-decay(0.5)"

Every option can also come from ``--config file.json`` (kebab-case keys);
flags given on the command line win.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, fields

import numpy as np

from . import dynamics, geometry
from .divisibility import divisibility_report
from .generators import (DEFAULT_FORM, MUB_DEPHASING, GeneratorSpec,
                         PreconditionError, apply_generator_direct,
                         assemble_generator, find_mub_weyl_rate_map,
                         gm_special_eigenvalues, labeled_eigenvalue,
                         make_spec, mub_eigenvalues, pauli_eigenvalues,
                         predicted_rate_map,
                         rate_labels, weyl_eigenvalues)
from .noise_bases import (FAMILY_KINDS, GELL_MANN, MUB, PAULI_STRING, WEYL,
                          UnsupportedDimension, family, gell_mann, is_prime,
                          mub_differences, mub_projectors, pauli_strings,
                          weyl)
from .operator_core import (eig_superop, match_eigenvalues,
                            random_density_matrix, random_hermitian)
from .rates import PresetError, RateSchedule, schedule_from_text

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_UNSUPPORTED = 4

GEOMETRY_CHECKS = ("volume", "normalization", "lemma", "brackets", "fp-equiv",
                   "kraus-residual", "box-ops")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    family: str = GELL_MANN
    dim: int = 2
    rates: str = "const(1)"
    form: str = None
    t_max: float = 1.0
    steps: int = 100
    substeps: int = dynamics.DEFAULT_SUBSTEPS
    initial: str = "random(0)"
    seed: int = 0
    out: str = None
    checks: str = ",".join(GEOMETRY_CHECKS)
    samples: int = 100_000
    points: int = 100
    pairs: int = 10
    t: float = 0.0
    times: int = 10

    def validate(self):
        if self.family not in FAMILY_KINDS:
            raise ConfigError(f"family: unknown {self.family!r}, expected one of {FAMILY_KINDS}")
        for name in ("dim", "steps", "substeps", "samples", "points", "pairs", "times"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name}: must be a positive integer")
        if self.dim < 2:
            raise ConfigError("dim: must be >= 2")
        if not self.t_max > 0:
            raise ConfigError("t-max: must be positive")
        if self.family == PAULI_STRING and self.dim & (self.dim - 1):
            raise UnsupportedDimension(f"pauli-string needs dim = 2^N, got {self.dim}")
        if self.family == MUB and not is_prime(self.dim):
            raise UnsupportedDimension(f"mub needs a prime dim, got {self.dim}")

    def spec(self):
        fam = family(self.family, self.dim)
        form = self.form or DEFAULT_FORM[fam.kind]
        labels = rate_labels(fam, form)
        skip = None if form == MUB_DEPHASING else fam.identity_label
        rates = schedule_from_text(labels, str(self.rates), skip=skip)
        return GeneratorSpec(fam, rates, form)

    def grid(self):
        return np.linspace(0.0, self.t_max, self.steps + 1)


def load_config(path):
    """Read a JSON config; line/field diagnostics go into the ConfigError."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    known = {f.name: f for f in fields(ExperimentConfig)}
    out = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"{path}: unknown field {key!r}")
        out[name] = value
    return out


def build_config(args):
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = ExperimentConfig(**values)
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if v is not None and f.type in ("int", int):
            setattr(cfg, f.name, int(v))
        if v is not None and f.type in ("float", float):
            setattr(cfg, f.name, float(v))
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def label_str(label):
    return "_".join(str(x) for x in (label if isinstance(label, tuple) else (label,)))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def initial_state(text, n):
    text = text.strip()
    if text == "maximally-mixed":
        return np.eye(n, dtype=complex) / n
    if text == "pure-0":
        rho = np.zeros((n, n), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    if text.startswith("random(") and text.endswith(")"):
        try:
            seed = int(text[7:-1])
        except ValueError:
            raise ConfigError(f"initial: bad seed in {text!r}") from None
        return random_density_matrix(n, np.random.default_rng(seed))
    if os.path.exists(text):
        if text.endswith(".npy"):
            rho = np.load(text)
        else:
            with open(text) as fh:
                raw = json.load(fh)
            rho = np.array(raw["re"], dtype=float) + 1j * np.array(raw.get("im", 0.0))
        if rho.shape != (n, n):
            raise ConfigError(f"initial: {text} holds shape {rho.shape}, expected ({n}, {n})")
        return rho
    raise ConfigError(f"initial: unknown preset or missing file {text!r}")


def cmd_bases(cfg):
    fam = family(cfg.family, cfg.dim)
    rows = []
    for i, (lab, A) in enumerate(zip(fam.labels, fam.ops)):
        for r in range(fam.dim):
            for c in range(fam.dim):
                rows.append((i, label_str(lab), r, c, A[r, c].real, A[r, c].imag))
    write_csv(cfg.out, ["index", "label", "row", "col", "re", "im"], rows)


def cmd_evolve(cfg):
    spec = cfg.spec()
    n = cfg.dim
    rho0 = initial_state(cfg.initial, n)
    traj = dynamics.evolve_state(spec, rho0, cfg.grid(), cfg.substeps)
    header = ["t"]
    for i in range(n):
        for j in range(n):
            header += [f"re_{i}{j}", f"im_{i}{j}"]
    rows = []
    for t, rho in zip(traj.times, traj.states):
        row = [t]
        for z in rho.reshape(-1):
            row += [z.real, z.imag]
        rows.append(row)
    write_csv(cfg.out, header, rows)
    for t, problems in traj.violations[:5]:
        print(f"warning: state at t = {t:.6g}: {'; '.join(problems)}", file=sys.stderr)


def spectrum_rows(spec, t):
    """``(kind, label, formula, numeric)`` rows; numeric is read off L."""
    fam = spec.family
    L = assemble_generator(spec, t)
    rows = []
    if spec.form == MUB_DEPHASING:
        formula = mub_eigenvalues(spec, t)
        labels, ops = mub_differences(fam)
        for lab, Q in zip(labels, ops):
            rows.append(("eigenvalue", lab, formula[lab], labeled_eigenvalue(L, Q)[0]))
        rmap = find_mub_weyl_rate_map(fam.dim)
        predicted = predicted_rate_map(fam.dim)
        for a in range(fam.dim + 1):
            for lab, p, c in zip(rmap.weyl_labels, predicted[a], rmap.matrix[a]):
                rows.append(("mub-weyl-map", f"{a}->{label_str(lab)}", p, c))
        return rows
    if fam.kind == GELL_MANN:
        formula = gm_special_eigenvalues(spec, t)
    elif fam.kind == WEYL:
        formula = weyl_eigenvalues(spec, t)
    elif fam.kind == PAULI_STRING:
        formula = pauli_eigenvalues(spec, t)
    else:
        raise PreconditionError(f"no closed form for {fam.kind}")
    for lab, A in zip(fam.labels, fam.ops):
        rows.append(("eigenvalue", lab, formula[lab], labeled_eigenvalue(L, A)[0]))
    return rows


def cmd_spectrum(cfg):
    spec = cfg.spec()
    rows = spectrum_rows(spec, cfg.t)
    out = []
    for kind, lab, f, num in rows:
        f, num = complex(f), complex(num)
        out.append((kind, label_str(lab), f.real, f.imag, num.real, num.imag, abs(f - num)))
    write_csv(cfg.out, ["kind", "label", "formula_re", "formula_im", "numeric_re",
                        "numeric_im", "abs_err"], out)
    if spec.form != MUB_DEPHASING:
        vals, _ = eig_superop(assemble_generator(spec, cfg.t))
        formula = [complex(r[2]) for r in rows]
        print(f"max pairing distance to full spectrum: {match_eigenvalues(formula, vals):.3e}",
              file=sys.stderr)


def cmd_divisibility(cfg):
    spec = cfg.spec()
    rep = divisibility_report(spec, cfg.grid(), cfg.pairs, seed=cfg.seed, substeps=cfg.substeps)
    write_csv(cfg.out, ["s", "t", "min_choi_eig", "max_tn_deriv", "cp_ok", "p_ok"], rep.rows())
    if not rep.cp_implies_p:
        print("warning: a CP-divisible pair failed the P test", file=sys.stderr)


# --- geometry verify --------------------------------------------------------

def _volume_check(n, cfg):
    """Two rows: the volume integrated in the angle chart, then the
    ``tr(A)/n`` average identity under the Liouville sampler."""
    rng = np.random.default_rng(cfg.seed)
    m = cfg.samples
    theta = rng.uniform(0, np.pi / 2, size=(m, n - 1))
    h = 1e-6
    mus = lambda th: np.array([geometry.ProjectivePoint.from_angles(x, np.zeros(n - 1)).mu
                               for x in th])
    if m > 20000:
        theta = theta[:20000]
        m = 20000
    J = np.empty((m, n - 1, n - 1))
    for k in range(n - 1):
        e = np.zeros(n - 1)
        e[k] = h
        J[:, :, k] = (mus(theta + e) - mus(theta - e)) / (2 * h)
    dens = np.abs(np.linalg.det(J)) / 2 ** (n - 1)
    box = (np.pi / 2) ** (n - 1) * (2 * np.pi) ** (n - 1)
    est = box * dens.mean()
    sigma = box * dens.std(ddof=1) / math.sqrt(m)
    err = abs(est - geometry.volume(n))
    rows = [("volume", n, m, err, sigma, err <= 3 * sigma + 1e-12)]
    # average-identity cross-check with the Liouville sampler
    A = random_hermitian(n, rng)
    est, sigma = geometry.mc_integrate(geometry.KahlerFunction(A), n, cfg.samples, cfg.seed)
    err = abs(est / geometry.volume(n) - np.trace(A).real / n)
    sigma /= geometry.volume(n)
    rows.append(("volume", n, cfg.samples, err, sigma, err <= 3 * sigma))
    return rows


def _normalization_check(n, cfg, n_states=20):
    rng = np.random.default_rng(cfg.seed)
    errs, sigmas, ok = [], [], True
    for i in range(n_states):
        p = geometry.QuantumDistribution(random_density_matrix(n, rng))
        est, sigma = geometry.mc_integrate(p, n, cfg.samples, cfg.seed + i + 1)
        errs.append(abs(est - 1))
        sigmas.append(sigma)
        ok &= abs(est - 1) <= 3 * sigma
    return [("normalization", n, cfg.samples, max(errs), max(sigmas), ok)]


def _dipole_eigen_check(n, cfg):
    """Two rows: the algebraic path, then the finite-difference path."""
    fam = gell_mann(n)
    pts = geometry.sample_interior(n, cfg.points, cfg.seed)
    rows = []
    for method, tol in (("algebraic", 1e-10), ("fd", 1e-4)):
        worst = 0.0
        for T in fam.ops[1:]:
            f = geometry.KahlerFunction(T)
            val = geometry.laplacian_apply(fam, np.ones(len(fam)), f, pts, method)
            worst = max(worst, float(np.max(np.abs(val + 4 * n * f(pts)))) / (4 * n))
        rows.append(("lemma", n, len(pts), worst, 0.0, worst <= tol))
    return rows


def _brackets_check(n, cfg):
    rng = np.random.default_rng(cfg.seed)
    pts = geometry.sample_interior(n, cfg.points, cfg.seed)
    worst = 0.0
    for _ in range(5):
        f = geometry.KahlerFunction(random_hermitian(n, rng))
        g = geometry.KahlerFunction(random_hermitian(n, rng))
        worst = max(worst,
                    float(np.max(np.abs(geometry.poisson_bracket(f, g)(pts)
                                        - geometry.poisson_bracket_fd(f, g, pts)))),
                    float(np.max(np.abs(geometry.metric_part(f, g, pts)
                                        - geometry.metric_part_fd(f, g, pts)))))
    return [("brackets", n, len(pts), worst, 0.0, worst <= 1e-5)]


def _geometry_spec(n, cfg):
    kind = cfg.family
    if kind == PAULI_STRING and n & (n - 1):
        kind = GELL_MANN
    if kind == MUB and not is_prime(n):
        kind = GELL_MANN
    try:
        c = ExperimentConfig(**{**cfg.__dict__, "family": kind, "dim": n})
        return c.spec()
    except PresetError:
        fam = family(kind, n)
        form = DEFAULT_FORM[kind]
        rng = np.random.default_rng(cfg.seed)
        return make_spec(fam, rng.uniform(0, 1, len(rate_labels(fam, form))), form)


def fp_sweep(spec, cfg, dt=1e-3):
    """Rows ``(t, point, dpdt, total, qc, pq, err)`` over times and points."""
    n = spec.dim
    rng = np.random.default_rng(cfg.seed)
    rho0 = random_density_matrix(n, rng)
    pts = geometry.sample_interior(n, cfg.points, cfg.seed)
    ts = np.linspace(0.0, cfg.t_max, cfg.times + 1)[1:]
    grid = np.sort(np.concatenate([[0.0], ts - dt, ts, ts + dt]))
    traj = dynamics.evolve_state(spec, rho0, grid, max(cfg.substeps, 1000))
    rows = []
    for t in ts:
        i = int(np.argmin(np.abs(grid - t)))
        dpdt = (geometry.QuantumDistribution(traj.states[i + 1])(pts)
                - geometry.QuantumDistribution(traj.states[i - 1])(pts)) / (grid[i + 1] - grid[i - 1])
        tot, qc, pq = np.broadcast_arrays(
            *geometry.fp_generator_apply(spec, traj.states[i], pts, t, "fd"), dpdt)[:3]
        for k in range(len(pts)):
            rows.append((t, k, dpdt[k], tot[k], qc[k], pq[k], abs(dpdt[k] - tot[k])))
    return rows


def _fp_check(n, cfg):
    rows = fp_sweep(_geometry_spec(n, cfg), cfg)
    worst = max(r[-1] for r in rows)
    return [("fp-equiv", n, len(rows), worst, 0.0, worst <= 1e-4)]


def _kraus_check(n, cfg):
    rng = np.random.default_rng(cfg.seed)
    if n & (n - 1) == 0:
        fam = pauli_strings(int(round(math.log2(n))))
        rates = RateSchedule.constant(fam.labels, rng.uniform(0, 1, len(fam)))
        pw = dynamics.pauli_pi_from_gamma(rates, np.linspace(0, 1, 5))
        weights = pw.weights[-1]
    else:
        fam = weyl(n)
        weights = rng.dirichlet(np.ones(len(fam)))
    ch = dynamics.KrausChannel(fam, weights)
    pts = geometry.sample_interior(n, cfg.points, cfg.seed)
    p0 = geometry.QuantumDistribution(random_density_matrix(n, rng))
    res = float(np.max(geometry.kraus_geometric_residual(ch, p0, pts, "fd")))
    return [("kraus-residual", n, len(pts), res, 0.0, res <= 1e-6)]


def _box_check(n, cfg):
    if not is_prime(n):
        print(f"note: box-ops skipped, n = {n} is not prime", file=sys.stderr)
        return []
    fam = mub_projectors(n)
    gm = gell_mann(n)
    pts = geometry.sample_interior(n, cfg.points, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(3):
        f = geometry.KahlerFunction(random_hermitian(n, rng, traceless=True))
        box = sum(geometry.mub_box_operator(fam, a, f, pts, "analytic") for a in range(n + 1))
        lap = geometry.laplacian_apply(gm, np.ones(len(gm)), f, pts, "algebraic")
        worst = max(worst, float(np.max(np.abs(box - lap / 2))))
    spec = make_spec(fam, np.ones(n + 1))
    rho = random_density_matrix(n, rng)
    p = geometry.QuantumDistribution(rho)
    lhs = sum(geometry.mub_box_operator(fam, a, p.kahler, pts, "analytic") for a in range(n + 1)) / 2
    rhs = geometry.QuantumDistribution(apply_generator_direct(spec, 0.0, rho))(pts)
    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return [("box-ops", n, len(pts), worst, 0.0, worst <= 1e-6)]


_CHECKS = {
    "volume": _volume_check,
    "normalization": _normalization_check,
    "lemma": _dipole_eigen_check,
    "brackets": _brackets_check,
    "fp-equiv": _fp_check,
    "kraus-residual": _kraus_check,
    "box-ops": _box_check,
}


def cmd_geometry_verify(cfg):
    checks = [c.strip() for c in cfg.checks.split(",") if c.strip()]
    for c in checks:
        if c not in _CHECKS:
            raise ConfigError(f"checks: unknown check {c!r}, expected one of {GEOMETRY_CHECKS}")
    rows = []
    for c in checks:
        rows += _CHECKS[c](cfg.dim, cfg)
    write_csv(cfg.out, ["check", "n", "points", "max_err", "mc_sigma", "pass"], rows)
    return EXIT_OK if all(r[-1] for r in rows) else 1


def cmd_fp_compare(cfg):
    rows = fp_sweep(cfg.spec(), cfg)
    write_csv(cfg.out, ["t", "point", "dpdt", "l_total", "l_qc", "l_pq", "abs_err"], rows)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(p, *extra):
    p.add_argument("--config", help="JSON file with kebab-case ExperimentConfig fields")
    p.add_argument("--family", choices=FAMILY_KINDS)
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV (stdout if omitted)")
    for name in extra:
        _EXTRA[name](p)


_EXTRA = {
    "rates": lambda p: (p.add_argument("--rates", help="preset or comma list of presets"),
                        p.add_argument("--form", help="generator form override")),
    "time": lambda p: (p.add_argument("--t-max", type=float, dest="t_max"),
                       p.add_argument("--steps", type=int),
                       p.add_argument("--substeps", type=int,
                                      help="RK4 steps per unit time")),
    "initial": lambda p: p.add_argument("--initial",
                                        help="maximally-mixed | pure-0 | random(seed) | file"),
    "pairs": lambda p: p.add_argument("--pairs", type=int),
    "t": lambda p: p.add_argument("--t", type=float, help="time at which rates are read"),
    "geometry": lambda p: (p.add_argument("--checks"), p.add_argument("--samples", type=int),
                           p.add_argument("--points", type=int)),
    "times": lambda p: (p.add_argument("--points", type=int),
                        p.add_argument("--times", type=int)),
}


def make_parser():
    parser = argparse.ArgumentParser(prog="qudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("bases", help="emit noise-operator matrices"))
    _common(sub.add_parser("evolve", help="integrate the master equation"),
            "rates", "time", "initial")
    _common(sub.add_parser("spectrum", help="closed-form vs numerical eigenvalues"),
            "rates", "t")
    _common(sub.add_parser("divisibility", help="CP/P-divisibility scan"),
            "rates", "time", "pairs")
    geo = sub.add_parser("geometry", help="geometric checks on CP^(n-1)")
    geo_sub = geo.add_subparsers(dest="geometry_command", required=True)
    _common(geo_sub.add_parser("verify"), "rates", "time", "geometry")
    _common(sub.add_parser("fp-compare", help="Fokker-Planck vs master-equation sweep"),
            "rates", "time", "times")
    return parser


_COMMANDS = {
    "bases": cmd_bases,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "divisibility": cmd_divisibility,
    "geometry": cmd_geometry_verify,
    "fp-compare": cmd_fp_compare,
}


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        code = _COMMANDS[args.command](cfg)
        return EXIT_OK if code is None else code
    except UnsupportedDimension as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ConfigError, PresetError, PreconditionError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (dynamics.DivergenceError, FloatingPointError) as exc:
        print(f"error: numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
