"""Command-line front end: batch computations written as self-describing CSV."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import atom, detector, fieldgeom
from .errors import DomainError, ExtrapolationError, SpinProbeError
from .numerics import Tolerance
from .switching import GaussianSwitching, parse_switching

COMMANDS = ("orbital", "response", "pflip-sweep", "rate", "udw-compare", "oracle")

DEFAULTS = {
    "Z": 1,
    "n0": 1,
    "alpha": atom.ALPHA_CODATA,
    "coupling": None,
    "gap": None,
    "switching": "gaussian:T=10",
    "grid": None,
    "out": None,
    "tol": 1e-10,
    "seed": 0,
    "T_list": None,
    "model": "spin",
    "bloch": "1,0,0",
    "initial": None,
    "draws": 20,
}

GRID_DEFAULTS = {
    "orbital": "1e-3:20:200:log",
    "response": "-3:3:13",
    "pflip-sweep": "-6:2:161",
    "rate": "-3:-0.3:10",
    "udw-compare": "-3:3:13",
}

T_LIST_DEFAULTS = {"pflip-sweep": "10,20,40", "rate": "25,50,100"}

ORBITAL_TOL = 1e-8
RATE_TOL = 0.01
RATE_ZERO_TOL = 1e-3
EQUIVALENCE_TOL = 1e-12
ORACLE_TOL = 1e-6


class CliError(Exception):
    """Bad command-line input, reported without a traceback."""


# -- parsing -------------------------------------------------------------------

def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise CliError(f"grid {text!r} must be <min>:<max>:<steps>[:log]")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise CliError(f"cannot parse grid {text!r}: {exc}") from None
    scale = parts[3] if len(parts) == 4 else "linear"
    if steps < 2 or not hi > lo:
        raise CliError(f"grid {text!r} needs steps >= 2 and max > min")
    if scale == "log":
        if lo <= 0:
            raise CliError("log grids need a positive minimum")
        return np.geomspace(lo, hi, steps)
    if scale != "linear":
        raise CliError(f"grid scale must be 'linear' or 'log', got {scale!r}")
    return np.linspace(lo, hi, steps)


def parse_floats(text: str, count=None):
    try:
        values = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(values) != count:
        raise CliError(f"expected {count} comma-separated numbers, got {text!r}")
    return values


def read_config(path: str) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in DEFAULTS:
            raise CliError(f"{path}:{n}: unrecognised config line {line!r}")
        out[key] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinprobe",
        description="Spin and Unruh-DeWitt detector response of a hydrogen-like electron (units: a0 = 1).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "oracle":
            p.add_argument("kind", choices=["angular"], help="which oracle to run")
        p.add_argument("--config", help="key=value file; flags override its entries")
        p.add_argument("--Z", type=int)
        p.add_argument("--n0", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--coupling", type=float,
                       help="charge q for the spin model (default sqrt(4 pi alpha)); UDW lambda is q / 2 pi")
        p.add_argument("--gap", type=float, help="single energy gap Omega (overrides --grid)")
        p.add_argument("--switching", help="gaussian:T=<v> or window:<a>,<b>")
        p.add_argument("--grid", help="<min>:<max>:<steps>[:log]")
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument("--tol", type=float, help="relative quadrature tolerance")
        p.add_argument("--seed", type=int)
        p.add_argument("--T-list", dest="T_list", help="comma-separated Gaussian widths")
        p.add_argument("--model", choices=["spin", "udw-amplitude", "udw-derivative"])
        p.add_argument("--bloch", help="initial Bloch vector ax,ay,az")
        p.add_argument("--initial", choices=["ground", "excited"])
        p.add_argument("--draws", type=int, help="random draws for the oracle")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    command = args.command
    try:
        cfg["Z"] = int(cfg["Z"])
        cfg["n0"] = int(cfg["n0"])
        cfg["alpha"] = float(cfg["alpha"])
        cfg["tol"] = float(cfg["tol"])
        cfg["seed"] = int(cfg["seed"])
        cfg["draws"] = int(cfg["draws"])
        if cfg["coupling"] is not None:
            cfg["coupling"] = float(cfg["coupling"])
        if cfg["gap"] is not None:
            cfg["gap"] = float(cfg["gap"])
    except ValueError as exc:
        raise CliError(f"bad configuration value: {exc}") from None
    if not 0 <= cfg["seed"] < 2**64:
        raise CliError("seed must be an unsigned 64-bit integer")
    if cfg["coupling"] is None:
        cfg["coupling"] = detector.default_charge(cfg["alpha"])
    if cfg["grid"] is None:
        cfg["grid"] = GRID_DEFAULTS.get(command)
    if cfg["T_list"] is None:
        cfg["T_list"] = T_LIST_DEFAULTS.get(command)
    if cfg["initial"] is None:
        cfg["initial"] = "excited"
    if command == "oracle":
        cfg["kind"] = args.kind
    cfg["command"] = command
    cfg["units"] = "hbar=c=a0=1"
    return cfg


# -- output ----------------------------------------------------------------------

def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return "%.17g" % float(value)


class CsvSink:
    def __init__(self, path, cfg):
        self.path = path
        self.cfg = cfg
        self.lines = ["# config: " + json.dumps(cfg, sort_keys=True)]

    def header(self, columns):
        self.lines.append(",".join(columns))

    def row(self, values):
        self.lines.append(",".join(fmt(v) for v in values))

    def comment(self, text):
        self.lines.append("# " + text)

    def close(self):
        text = "\n".join(self.lines) + "\n"
        if self.path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            with open(self.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {self.path}: {exc.strerror}") from None


def thread_count() -> int:
    raw = os.environ.get("SPINPROBE_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"SPINPROBE_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def parallel_map(fn, items):
    """Apply ``fn`` over ``items`` on worker threads; results keep input order."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- helpers -----------------------------------------------------------------------

def gaps(cfg) -> np.ndarray:
    if cfg["gap"] is not None:
        return np.array([cfg["gap"]])
    return parse_grid(cfg["grid"])


def make_model(kind: str, profile, q: float) -> detector.CouplingModel:
    if kind == "spin":
        return detector.CouplingModel.spin_magnetic(profile, q)
    lam = q / (2.0 * math.pi)
    if kind == "udw-amplitude":
        return detector.CouplingModel.udw_amplitude(profile, lam)
    return detector.CouplingModel.udw_derivative(profile, lam)


def bloch(cfg) -> detector.QubitState:
    return detector.QubitState(parse_floats(cfg["bloch"], 3))


# -- subcommands -------------------------------------------------------------------

def run_orbital(cfg, sink) -> bool:
    profile = atom.make_orbital(cfg["Z"], cfg["n0"], cfg["alpha"])
    tol = Tolerance(rel=cfg["tol"])
    radii = parse_grid(cfg["grid"])

    def row(r):
        closed = atom.smearing_phi(profile, r)
        integral = atom.smearing_phi_integral(profile, r, tol)
        return (r, profile.g(r), profile.f(r), closed, (closed - integral) / integral)

    rows = parallel_map(row, radii)
    sink.header(["r_over_a0", "g", "f", "phi", "phi_closed_minus_integral"])
    for values in rows:
        sink.row(values)
    norm = atom.normalization(profile, tol)
    volume = atom.phi_volume_integral(profile, tol)
    gfac = atom.g_factor_correction(profile, tol)
    sink.comment(f"summary: normalization={fmt(norm)},volume_integral={fmt(volume)},"
                 f"g_factor_correction={fmt(gfac)}")
    worst = max(abs(v[-1]) for v in rows)
    return worst < ORBITAL_TOL and abs(norm - 1.0) < ORBITAL_TOL


def run_response(cfg, sink) -> bool:
    profile = atom.make_orbital(cfg["Z"], cfg["n0"], cfg["alpha"])
    model = make_model(cfg["model"], profile, cfg["coupling"])
    chi = parse_switching(cfg["switching"])
    tol = Tolerance(rel=cfg["tol"])
    rows = parallel_map(lambda W: (W, detector.response_set(model, chi, W, tol)), gaps(cfg))
    sink.header(["Omega_a0", "L_plus", "L_minus", "L_zero", "M_re", "M_im", "K_re", "K_im"])
    for W, r in rows:
        K = r.K if r.K is not None else complex(math.nan, math.nan)
        sink.row([W, r.L_plus, r.L_minus, r.L_zero, r.M.real, r.M.imag, K.real, K.imag])
    return True


def run_pflip_sweep(cfg, sink) -> bool:
    profile = atom.make_orbital(cfg["Z"], cfg["n0"], cfg["alpha"])
    model = make_model(cfg["model"], profile, cfg["coupling"])
    tol = Tolerance(rel=cfg["tol"])
    Ts = parse_floats(cfg["T_list"])
    jobs = [(T, W) for T in Ts for W in gaps(cfg)]
    probs = parallel_map(
        lambda job: detector.flip_probability(model, GaussianSwitching(job[0]), job[1],
                                              cfg["initial"], tol), jobs)
    sink.header(["Omega_a0", "T_over_a0", "P_flip"])
    for (T, W), p in zip(jobs, probs):
        sink.row([W, T, p])
    return all(p >= 0 for p in probs)


def run_rate(cfg, sink) -> bool:
    profile = atom.make_orbital(cfg["Z"], cfg["n0"], cfg["alpha"])
    model = make_model("spin", profile, cfg["coupling"])
    tol = Tolerance(rel=cfg["tol"])
    Ts = parse_floats(cfg["T_list"])
    q = cfg["coupling"]
    peak = max(detector.adiabatic_rate_closed(profile.params, q, W)
               for W in np.linspace(-6.0, -0.05, 120))

    def row(W):
        closed = detector.adiabatic_rate_closed(profile.params, q, W)
        try:
            numeric = detector.adiabatic_rate_numeric(model, W, Ts, tol)
        except (ExtrapolationError, SpinProbeError) as exc:
            return (W, closed, math.nan, math.nan, "error: " + str(exc).replace(",", ";"))
        if closed != 0:
            err = abs(numeric - closed) / abs(closed)
            ok = err < RATE_TOL
        else:
            err = abs(numeric) / peak
            ok = err < RATE_ZERO_TOL
        return (W, closed, numeric, err, "ok" if ok else "tolerance")

    rows = parallel_map(row, gaps(cfg))
    sink.header(["Omega_a0", "rate_closed", "rate_numeric", "rel_err", "status"])
    for values in rows:
        sink.row(values)
    return all(v[-1] == "ok" for v in rows)


def run_udw_compare(cfg, sink) -> bool:
    profile = atom.make_orbital(cfg["Z"], cfg["n0"], cfg["alpha"])
    q = cfg["coupling"]
    models = [make_model(k, profile, q) for k in ("spin", "udw-amplitude", "udw-derivative")]
    chi = parse_switching(cfg["switching"])
    tol = Tolerance(rel=cfg["tol"])
    state = bloch(cfg)

    def row(W):
        out = [W]
        results = []
        for m in models:
            new, r = detector.evolve_leading_order(m, chi, W, state, tol)
            results.append((new, r))
        for new, r in results:
            out += [r.L_plus, r.L_minus, r.M.real, r.M.imag]
            if r.K is not None:
                out += [r.K.real, r.K.imag]
        for new, _ in results:
            out += list(new.a)
        spin, der = results[0][1], results[2][1]
        ok = (abs(der.L_plus - spin.L_plus) <= EQUIVALENCE_TOL * abs(spin.L_plus)
              and abs(der.M - spin.M) <= EQUIVALENCE_TOL * abs(spin.M))
        return out, ok

    rows = parallel_map(row, gaps(cfg))
    cols = ["Omega_a0",
            "L_spin", "Lm_spin", "M_spin_re", "M_spin_im",
            "L_amp", "Lm_amp", "M_amp_re", "M_amp_im", "K_amp_re", "K_amp_im",
            "L_der", "Lm_der", "M_der_re", "M_der_im", "K_der_re", "K_der_im"]
    for tag in ("spin", "amp", "der"):
        cols += [f"a_{tag}_x", f"a_{tag}_y", f"a_{tag}_z"]
    sink.header(cols)
    for values, _ in rows:
        sink.row(values)
    sink.comment("initial_bloch=" + ",".join(fmt(v) for v in state.a))
    return all(ok for _, ok in rows)


def _random_ball(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v) * rng.uniform() ** (1.0 / 3.0)


def run_oracle(cfg, sink) -> bool:
    fixed = None
    if cfg["bloch"] != DEFAULTS["bloch"]:
        fixed = np.array(bloch(cfg).a)
    if cfg["draws"] < 1:
        raise CliError("draws must be positive")
    rng = np.random.default_rng(cfg["seed"])
    sink.header(["draw", "Omega_a0", "t", "tprime", "ax", "ay", "az", "term", "s", "entry",
                 "closed_re", "closed_im", "quad_re", "quad_im", "abs_err"])
    worst = 0.0
    for d in range(cfg["draws"]):
        Omega = rng.uniform(-3.0, 3.0)
        t, tp = rng.uniform(-2.0, 2.0, size=2)
        a = fixed if fixed is not None else _random_ball(rng)
        pairs = []
        for term in fieldgeom.TERMS:
            for s in (1, 2):
                pairs.append((term, str(s),
                              fieldgeom.angular_pauli_closed(term, s, Omega, t, tp, a),
                              fieldgeom.angular_pauli_integral(term, s, Omega, t, tp, a)))
        pairs.append(("R", "sum", fieldgeom.combined_R_matrix(Omega, t, tp, a),
                      fieldgeom.combined_R_quadrature(Omega, t, tp, a)))
        for term, s, closed, quad in pairs:
            for i in range(2):
                for j in range(2):
                    err = abs(closed[i, j] - quad[i, j])
                    worst = max(worst, err)
                    sink.row([d, Omega, t, tp, a[0], a[1], a[2], term, s, f"{i + 1}{j + 1}",
                              closed[i, j].real, closed[i, j].imag,
                              quad[i, j].real, quad[i, j].imag, err])
    sink.comment(f"max_abs_err={fmt(worst)}")
    return worst < ORACLE_TOL


RUNNERS = {
    "orbital": run_orbital,
    "response": run_response,
    "pflip-sweep": run_pflip_sweep,
    "rate": run_rate,
    "udw-compare": run_udw_compare,
    "oracle": run_oracle,
}


_VALUE_FLAGS = {"--grid", "--gap", "--T-list", "--bloch", "--switching", "--coupling", "--alpha"}


def _attach_values(argv):
    # "--grid -6:2:161" would otherwise read the value as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    try:
        cfg = resolve(args)
        sink = CsvSink(cfg["out"], cfg)
        ok = RUNNERS[args.command](cfg, sink)
        sink.close()
    except (CliError, SpinProbeError, DomainError) as exc:
        print(f"spinprobe {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print(f"spinprobe {args.command}: one or more rows missed tolerance", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
