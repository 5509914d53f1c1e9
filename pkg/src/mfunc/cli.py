"""Command-line surface: reproducible experiments with serialized reports.

Every run consumes a single resolved config (defaults, then the --config
JSON document, then flag overrides), executes one experiment, and writes a
versioned JSON report plus CSV data files into the output directory. Given
the same config the outputs are byte-identical up to the wall_time_s field.

Exit codes: 0 success, 2 config error, 3 precondition error, 4 precision
or coverage failure. Module errors are reported on stderr as one JSON
object {"error": <kind>, "message": <text>}.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name, set_threads
from .errors import ConfigError, MfuncError
from .grids import GridSpec, RectangleRegion, rectangle_panel, integrate_rectangle

_SCHEMA = "mfunc-report/1"


# ---------------------------------------------------------------- config --

_DEFAULTS = {
    "density": {
        "primes": {"first": 6},
        "sigma": 1.0,
        "method": "fourier-inversion",
        "resolution": 512,
        "n_samples": 2_000_000,
        "seed": 0,
        "tail_tol": 1e-6,
    },
    "invert": {
        "char_csv": None,
        "primes": {"first": 6},
        "sigma": 1.0,
        "resolution": 512,
        "half_width": None,
        "tail_tol": 1e-6,
        "negative_mass_tol": 1e-3,
    },
    "bohr-jessen": {
        "sigma": 1.5,
        "t_max": 10000.0,
        "step": 0.01,
        "mode": "default",
        "primes": {"up_to": 100},
        "resolution": 512,
        "density_method": "fourier-inversion",
        "rectangles": {"count": 8, "half_width": None, "seed": 20260816},
        "tail_tol": 1e-6,
        "line_tol": 1e-10,
    },
    "chi-tau": {
        "primes": {"first": 6},
        "sigma": 1.0,
        "t_max": 100000.0,
        "step": 0.05,
        "z": [2.0, 1.0],
        "t_values": None,
    },
    "char-avg": {
        "primes": [2, 3],
        "sigma": 1.0,
        "moduli": [101, 211, 401, 809, 1009],
        "phi": {"kind": "gaussian", "center": [0.0, 0.0], "width": 1.0},
        "integral_tol": 1e-9,
    },
    "jw-report": {
        "primes": [2],
        "sigma": 1.0,
        "radii": {"min": 10.0, "max": 10000.0, "count": 25},
        "n_dir": 64,
        "quad_tol": 1e-10,
    },
    "automorphic-density": {
        "form": {"name": "delta", "prime_limit": 100},
        "sigma": 1.0,
        "primes": {"up_to": 100},
        "eps": 0.1,
        "resolution": 512,
        "tail_tol": 1e-8,
    },
    "sympow-identity": {
        "form": {"name": "delta", "prime_limit": 100},
        "mu": 3,
        "sigma": 1.0,
        "primes": {"up_to": 100},
    },
    "pf-census": {
        "form": {"name": "delta", "prime_limit": 100000},
        "eps": 0.1,
        "x_max": 100000,
    },
    "lambda-coeffs": {
        "z": [1.0, 0.5],
        "n_max": 1000,
        "sigma": None,
        "primes": None,
    },
}


def _load_config(command: str, path: str | None) -> dict:
    cfg = json.loads(json.dumps(_DEFAULTS[command]))  # deep copy
    if path is None:
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            user = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(user, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    unknown = sorted(set(user) - set(cfg))
    if unknown:
        raise ConfigError(
            f"unknown config keys for {command}: {', '.join(unknown)}"
        )
    cfg.update(user)
    return cfg


def _apply_tolerances(command: str, cfg: dict, pairs: list[str]):
    allowed = {k for k in _DEFAULTS[command] if k.endswith("tol") or k == "eps"}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--tolerance needs name=value, got {item!r}")
        name, _, raw = item.partition("=")
        if name not in allowed:
            raise ConfigError(
                f"{command} has no tolerance {name!r}; "
                f"available: {', '.join(sorted(allowed)) or 'none'}"
            )
        try:
            cfg[name] = float(raw)
        except ValueError as e:
            raise ConfigError(f"--tolerance {name}: {raw!r} is not a number") from e


def _parse_primes(spec) -> tuple:
    from .primes import first_n_primes, primes_up_to

    if isinstance(spec, list):
        return tuple(int(p) for p in spec)
    if isinstance(spec, dict):
        if set(spec) == {"first"}:
            return tuple(first_n_primes(int(spec["first"])))
        if set(spec) == {"up_to"}:
            return tuple(primes_up_to(int(spec["up_to"])))
    raise ConfigError(
        'primes must be a list, {"first": n}, or {"up_to": x}; '
        f"got {spec!r}"
    )


def _parse_form(spec):
    from .forms import load_eigenvalue_file, ramanujan_delta

    if not isinstance(spec, dict):
        raise ConfigError(f"form must be an object, got {spec!r}")
    if spec.get("name") == "delta":
        return ramanujan_delta(int(spec.get("prime_limit", 1000)))
    if "path" in spec:
        return load_eigenvalue_file(
            spec["path"],
            weight=int(spec.get("weight", 12)),
            level=int(spec.get("level", 1)),
            label=spec.get("label"),
        )
    raise ConfigError(
        'form needs {"name": "delta", "prime_limit": n} or {"path": ...}'
    )


def _parse_phi(spec):
    from .averages import TestFunction

    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f'phi must be an object with "kind", got {spec!r}')
    kind = spec["kind"]
    if kind == "gaussian":
        c = spec.get("center", [0.0, 0.0])
        return TestFunction(
            "gaussian",
            center=complex(c[0], c[1]),
            width=float(spec.get("width", 1.0)),
        )
    if kind == "fourier-kernel":
        z = spec.get("z", [1.0, 0.0])
        return TestFunction("fourier-kernel", z=complex(z[0], z[1]))
    if kind == "rectangle-indicator":
        r = spec.get("rect")
        if not (isinstance(r, list) and len(r) == 4):
            raise ConfigError("rectangle-indicator needs rect: [u0,u1,v0,v1]")
        return TestFunction(
            "rectangle-indicator", region=RectangleRegion(*map(float, r))
        )
    if kind == "builtin":
        return TestFunction("builtin", name=spec.get("name", "one"))
    raise ConfigError(f"unknown phi kind {kind!r}")


def _json_ready(obj):
    """Coerce numpy scalars and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------- subcommands --


def _run_density(cfg: dict, out: Path):
    from .mdensity import default_grid, m_sigma_P, torus_histogram

    P = _parse_primes(cfg["primes"])
    sigma = float(cfg["sigma"])
    spec = default_grid(P, sigma, int(cfg["resolution"]))
    if cfg["method"] == "torus-mc":
        dens = torus_histogram(
            P,
            sigma,
            n_samples=int(cfg["n_samples"]),
            seed=int(cfg["seed"]),
            spec=spec,
        )
    else:
        dens = m_sigma_P(
            P,
            sigma,
            spec=spec,
            method=cfg["method"],
            tail_tol=float(cfg["tail_tol"]),
        )
    dens.write(out / "density.csv")
    results = {
        "mass": dens.mass(),
        "min_value": dens.min_value(),
        "method": dens.method,
        "resolution": dens.spec.resolution,
        "half_width": dens.spec.half_width,
    }
    results.update(_json_ready(dens.diagnostics))
    return results, ["density.csv", "density.csv.json"]


def _run_invert(cfg: dict, out: Path):
    from .grids import CharFunctionGrid
    from .mdensity import support_radius
    from .mfourier import char_function_grid, invert_char_function

    outputs = []
    if cfg["char_csv"] is not None:
        cgrid = CharFunctionGrid.from_csv(cfg["char_csv"])
        if cfg["half_width"] is None:
            raise ConfigError("invert from char_csv needs half_width")
        hw = float(cfg["half_width"])
    else:
        P = _parse_primes(cfg["primes"])
        sigma = float(cfg["sigma"])
        cgrid = char_function_grid(P, sigma, tail_tol=float(cfg["tail_tol"]))
        cgrid.write(out / "char_function.csv")
        outputs += ["char_function.csv", "char_function.csv.json"]
        hw = (
            float(cfg["half_width"])
            if cfg["half_width"] is not None
            else 1.02 * support_radius(P, sigma)
        )
    wspec = GridSpec(0j, hw, int(cfg["resolution"]))
    dens = invert_char_function(
        cgrid, wspec, negative_mass_tol=float(cfg["negative_mass_tol"])
    )
    dens.write(out / "density.csv")
    outputs += ["density.csv", "density.csv.json"]
    results = {
        "mass": dens.mass(),
        "fitted_exponent": cgrid.fitted_exponent,
        "edge_level": cgrid.edge_level,
    }
    results.update(_json_ready(dens.diagnostics))
    return results, outputs


def _run_bohr_jessen(cfg: dict, out: Path):
    from .averages import EmpiricalDistribution, empirical_W
    from .mdensity import m_sigma_P, support_radius
    from .zeta import log_zeta_line

    P = _parse_primes(cfg["primes"])
    sigma = float(cfg["sigma"])
    dens = m_sigma_P(
        P, sigma, method=cfg["density_method"], tail_tol=float(cfg["tail_tol"])
    )
    dens.write(out / "density.csv")

    line = log_zeta_line(
        sigma,
        0.0,
        float(cfg["t_max"]),
        float(cfg["step"]),
        mode=cfg["mode"],
        tol=float(cfg["line_tol"]),
    )
    dist = EmpiricalDistribution.from_line(line)

    rcfg = cfg["rectangles"]
    if isinstance(rcfg, dict) and "list" in rcfg:
        rects = [RectangleRegion(*map(float, r)) for r in rcfg["list"]]
    elif isinstance(rcfg, dict):
        hw = rcfg.get("half_width")
        if hw is None:
            hw = 0.8 * support_radius(P, sigma)
        rects = rectangle_panel(
            float(hw), int(rcfg.get("count", 8)), seed=int(rcfg.get("seed", 0))
        )
    else:
        raise ConfigError("rectangles must be a panel spec or a list")

    rows = []
    for reg in rects:
        we = empirical_W(dist, reg)
        wd = integrate_rectangle(dens, reg)
        rows.append((reg, we, wd, abs(we - wd)))
    lines = ["u_min,u_max,v_min,v_max,empirical_w,density_w,gap"]
    for reg, we, wd, gap in rows:
        lines.append(
            f"{reg.u_min!r},{reg.u_max!r},{reg.v_min!r},{reg.v_max!r},"
            f"{we!r},{wd!r},{gap!r}"
        )
    with open(out / "rectangles.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    results = {
        "gap": max(r[3] for r in rows),
        "mean_gap": sum(r[3] for r in rows) / len(rows),
        "n_rectangles": len(rows),
        "n_samples": int(line.t.size),
        "n_flagged": line.n_flagged,
        "line_error_bound": line.error_bound,
        "density_mass": dens.mass(),
    }
    return results, [
        "density.csv",
        "density.csv.json",
        "rectangles.csv",
    ]


def _run_chi_tau(cfg: dict, out: Path):
    from .averages import log_L_P_line
    from .mfourier import char_function_P

    P = _parse_primes(cfg["primes"])
    sigma = float(cfg["sigma"])
    t_max = float(cfg["t_max"])
    step = float(cfg["step"])
    z = complex(cfg["z"][0], cfg["z"][1])
    t_values = cfg["t_values"]
    if t_values is None:
        t_values = [t_max / 8, t_max / 4, t_max / 2, t_max]
    t_values = sorted(float(t) for t in t_values)
    if t_values[-1] > t_max:
        raise ConfigError("t_values cannot exceed t_max")

    ref = complex(char_function_P(P, sigma, z))
    n = int(math.floor(t_max / step + 1e-9))
    tgrid = step * np.arange(n + 1)
    vals = log_L_P_line(P, sigma, tgrid)
    ph = np.exp(1j * (z.real * vals.real + z.imag * vals.imag))
    ph_conj = np.exp(1j * (z.real * vals.real - z.imag * vals.imag))

    rows = []
    for T in t_values:
        m = int(math.floor(T / step + 1e-9))
        if m < 1:
            raise ConfigError(f"t value {T} smaller than one step")
        # trapezoid over [-T, T]; the tau < 0 half is the conjugate line
        w = np.ones(m)
        w[-1] = 0.5
        acc = (w * (ph[1 : m + 1] + ph_conj[1 : m + 1])).sum() + ph[0]
        est = complex(acc / (2 * m))
        rows.append((T, est, abs(est - ref)))

    lines = ["parameter,estimate,gap"]
    for T, est, gap in rows:
        lines.append(f"{T!r},{abs(est)!r},{gap!r}")
    with open(out / "convergence.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    results = {
        "z": [z.real, z.imag],
        "reference": [ref.real, ref.imag],
        "estimates": [[T, e.real, e.imag] for T, e, _ in rows],
        "gaps": [g for _, _, g in rows],
        "final_gap": rows[-1][2],
    }
    return results, ["convergence.csv"]


def _run_char_avg(cfg: dict, out: Path):
    from .averages import char_average_convergence, write_convergence_csv

    P = _parse_primes(cfg["primes"])
    sigma = float(cfg["sigma"])
    phi = _parse_phi(cfg["phi"])
    rows = char_average_convergence(P, sigma, phi, [int(q) for q in cfg["moduli"]])
    write_convergence_csv(out / "convergence.csv", rows)
    gaps = [r.gap for r in rows]
    results = {
        "moduli": [int(r.parameter) for r in rows],
        "estimates": [r.estimate for r in rows],
        "gaps": gaps,
        "final_gap": gaps[-1],
        "monotone_violations": sum(
            1 for a, b in zip(gaps, gaps[1:]) if b > a
        ),
    }
    return results, ["convergence.csv"]


def _run_jw_report(cfg: dict, out: Path):
    from .mfourier import jw_decay_report

    P = _parse_primes(cfg["primes"])
    rcfg = cfg["radii"]
    radii = np.geomspace(
        float(rcfg["min"]), float(rcfg["max"]), int(rcfg["count"])
    )
    rep = jw_decay_report(
        P,
        float(cfg["sigma"]),
        radii=radii,
        n_dir=int(cfg["n_dir"]),
        quad_tol=float(cfg["quad_tol"]),
    )
    rep.to_csv(out / "decay.csv")
    return _json_ready(rep.summary()), ["decay.csv"]


def _run_automorphic_density(cfg: dict, out: Path):
    from .automorphic import automorphic_density

    form = _parse_form(cfg["form"])
    P = _parse_primes(cfg["primes"])
    dens = automorphic_density(
        form,
        float(cfg["sigma"]),
        P,
        eps=float(cfg["eps"]),
        tail_tol=float(cfg["tail_tol"]),
    )
    dens.write(out / "density.csv")
    results = {
        "mass": dens.mass(),
        "form": form.label,
        "resolution": dens.spec.resolution,
        "half_width": dens.spec.half_width,
    }
    results.update(_json_ready(dens.diagnostics))
    return results, ["density.csv", "density.csv.json"]


def _run_sympow_identity(cfg: dict, out: Path):
    from .automorphic import sym_diff_identity_check

    form = _parse_form(cfg["form"])
    P = _parse_primes(cfg["primes"])
    mu = int(cfg["mu"])
    sigma = float(cfg["sigma"])
    per_p = [
        {"p": int(p), "deviation": sym_diff_identity_check(form, mu, sigma, [p])}
        for p in P
    ]
    results = {
        "form": form.label,
        "mu": mu,
        "sigma": sigma,
        "max_deviation": max(r["deviation"] for r in per_p),
        "per_p": per_p,
    }
    return results, []


def _run_pf_census(cfg: dict, out: Path):
    from .automorphic import pf_epsilon_census

    form = _parse_form(cfg["form"])
    rep = pf_epsilon_census(form, float(cfg["eps"]), int(cfg["x_max"]))
    rep.to_csv(out / "census.csv")
    results = rep.summary()
    results["form"] = form.label
    results["density_gap"] = abs(rep.density - rep.reference_density)
    return results, ["census.csv"]


def _run_lambda_coeffs(cfg: dict, out: Path):
    from .mfourier import lambda_coefficients, mtilde_dirichlet

    z = complex(cfg["z"][0], cfg["z"][1])
    n_max = int(cfg["n_max"])
    lam = lambda_coefficients(z, n_max)
    lines = ["n,re,im"]
    for n in range(1, n_max + 1):
        v = lam[n]
        lines.append(f"{n},{v.real!r},{v.imag!r}")
    with open(out / "lambda.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    results = {"z": [z.real, z.imag], "n_max": n_max}
    if cfg["sigma"] is not None:
        restriction = (
            _parse_primes(cfg["primes"]) if cfg["primes"] is not None else None
        )
        mt = mtilde_dirichlet(
            float(cfg["sigma"]), z, n_max, smooth_restriction=restriction
        )
        results["mtilde"] = [mt.value.real, mt.value.imag]
        results["tail_estimate"] = mt.tail_estimate
    return results, ["lambda.csv"]


_HANDLERS = {
    "density": _run_density,
    "invert": _run_invert,
    "bohr-jessen": _run_bohr_jessen,
    "chi-tau": _run_chi_tau,
    "char-avg": _run_char_avg,
    "jw-report": _run_jw_report,
    "automorphic-density": _run_automorphic_density,
    "sympow-identity": _run_sympow_identity,
    "pf-census": _run_pf_census,
    "lambda-coeffs": _run_lambda_coeffs,
}


# --------------------------------------------------------------- driver --


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mfunc",
        description="explicit M-function construction and cross-verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name, description=f"run the {name} experiment")
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", default="mfunc-out", help="output directory")
        p.add_argument("--threads", type=int, help="compute threads")
        p.add_argument(
            "--tolerance",
            action="append",
            default=[],
            metavar="NAME=VALUE",
            help="override a named tolerance (repeatable)",
        )
    return parser


def _versions() -> dict:
    import numpy
    import scipy

    try:
        import numba

        numba_version = numba.__version__
    except ImportError:
        numba_version = None
    return {
        "mfunc": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "numba": numba_version,
    }


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _load_config(args.command, args.config)
        _apply_tolerances(args.command, cfg, args.tolerance)
        if args.seed is not None:
            if "seed" in cfg:
                cfg["seed"] = args.seed
            elif isinstance(cfg.get("rectangles"), dict):
                cfg["rectangles"]["seed"] = args.seed
            else:
                raise ConfigError(f"{args.command} takes no seed")
        threads = args.threads if args.threads is not None else 1
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        set_threads(threads)

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        results, outputs = _HANDLERS[args.command](cfg, out)
        wall = time.perf_counter() - t0

        report = {
            "schema_version": _SCHEMA,
            "command": args.command,
            "config": _json_ready(cfg),
            "threads": threads,
            "backend": backend_name(),
            "versions": _versions(),
            "wall_time_s": wall,
            "results": _json_ready(results),
            "outputs": outputs + ["report.json"],
        }
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"{args.command}: report written to {out / 'report.json'}")
        for key in ("gap", "final_gap", "max_deviation", "mass", "density_gap"):
            if key in report["results"]:
                print(f"  {key} = {report['results'][key]}")
        return 0
    except MfuncError as e:
        json.dump({"error": e.kind, "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
