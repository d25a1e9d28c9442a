"""Command line entry point and the scenario config format.

Config files are ``key = value`` lines with ``#`` comments.  Keys before any
section header belong to ``[scenario]``; the other sections are
``[initial]`` and ``[boundaries]``.  Unknown sections or keys are rejected.
An empty file gives the 1000x8 shock tube at omega = 1 on D2V33::

    lattice = d2v33          # or d2v37
    nx = 1000
    ny = 8
    omega = 1.0
    steps = 250
    output_times = 0.2, 0.6, 1.0
    output_prefix = out/shock_tube
    write_fields = false
    gamma = 2.0              # Riemann oracle only
    window = 20              # nodes excluded around waves when comparing

    [initial]
    kind = shock_tube        # shock_tube | strips | grid_file
    rho_left = 4.0
    rho_right = 1.0
    theta = 1.0
    # strips = 10            (kind = strips)
    # path = bundled:complex_geometry_200x200.grid   (kind = grid_file)

    [boundaries]
    left = dirichlet         # dirichlet | periodic
    right = dirichlet
    top = symmetric          # symmetric | periodic
    bottom = symmetric
"""
import argparse
import configparser
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, ConfigNotFound, ConfigParseError, LBMError
from .fileio import fmt, write_grid, write_manifest, write_profile
from .lattice import dump_lattice, get_lattice, verify_isotropy
from .riemann import sample
from .scenarios import (
    BUNDLED_PREFIX,
    BoundaryChoice,
    GridFileInit,
    ScenarioConfig,
    ShockTubeInit,
    StripInit,
    compare_lattices,
    diaphragm,
    node_positions,
    ORACLE_SPEED_RATIO,
    plateau_report,
    riemann_solution,
    run,
)

_SCENARIO_KEYS = {
    "lattice": ("lattice_name", str),
    "nx": ("nx", int),
    "ny": ("ny", int),
    "omega": ("omega", float),
    "steps": ("steps", int),
    "output_times": ("output_times", "times"),
    "output_prefix": ("output_prefix", str),
    "write_fields": ("write_fields", "bool"),
    "gamma": ("gamma", float),
    "window": ("window", int),
}
_INITIAL_KEYS = {
    "shock_tube": {"rho_left", "rho_right", "theta"},
    "strips": {"rho_left", "rho_right", "theta", "strips"},
    "grid_file": {"path"},
}
_BOUNDARY_KEYS = ("left", "right", "top", "bottom")


def _convert(key, raw, kind):
    try:
        if kind == "times":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "yes", "1")
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot interpret {raw!r}") from None


def parse_config(text: str, base_dir=None) -> ScenarioConfig:
    """Parse and validate a scenario config.

    Relative grid-file paths are resolved against ``base_dir``.
    """
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",),
        delimiters=("=",), empty_lines_in_values=False,
    )
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigParseError(f"line {lineno - 1}: cannot parse {line.strip()!r}") from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigParseError(f"line {exc.lineno - 1}: {exc.message if hasattr(exc, 'message') else exc}") from None
    except configparser.Error as exc:
        raise ConfigParseError(str(exc)) from None

    unknown = set(parser.sections()) - {"scenario", "initial", "boundaries"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")

    values = {}
    for key, raw in parser["scenario"].items():
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"{key}: unknown key in [scenario]")
        attr, kind = _SCENARIO_KEYS[key]
        values[attr] = _convert(key, raw, kind)

    init_sec = dict(parser["initial"]) if parser.has_section("initial") else {}
    kind = init_sec.pop("kind", "shock_tube").strip()
    if kind not in _INITIAL_KEYS:
        raise ConfigError(f"kind: unknown initial condition {kind!r}")
    for key in init_sec:
        if key not in _INITIAL_KEYS[kind]:
            raise ConfigError(f"{key}: unknown key for initial kind {kind!r}")
    if kind == "grid_file":
        path = init_sec.get("path", GridFileInit().path).strip()
        if not path.startswith(BUNDLED_PREFIX) and base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)
        initial = GridFileInit(path)
    else:
        base = ShockTubeInit(**{k: _convert(k, v, float) for k, v in init_sec.items() if k != "strips"})
        if kind == "strips":
            strips = _convert("strips", init_sec["strips"], int) if "strips" in init_sec else 10
            initial = StripInit(base, strips)
        else:
            initial = base
    values["initial"] = initial

    bc = BoundaryChoice() if kind != "grid_file" else BoundaryChoice("periodic", "periodic", "periodic", "periodic")
    if parser.has_section("boundaries"):
        for key, raw in parser["boundaries"].items():
            if key not in _BOUNDARY_KEYS:
                raise ConfigError(f"{key}: unknown key in [boundaries]")
            bc = replace(bc, **{key: raw.strip().lower()})
    values["boundaries"] = bc
    return ScenarioConfig(**values).validate()


def format_config(config: ScenarioConfig) -> str:
    """Config text that parses back to ``config``."""
    lines = [
        f"lattice = {config.lattice_name}",
        f"nx = {config.nx}",
        f"ny = {config.ny}",
        f"omega = {config.omega!r}",
        f"steps = {config.steps}",
        "output_times = " + ", ".join(repr(float(t)) for t in config.output_times),
        f"output_prefix = {config.output_prefix}",
        f"write_fields = {str(config.write_fields).lower()}",
        f"gamma = {config.gamma!r}",
        f"window = {config.window}",
        "",
        "[initial]",
    ]
    init = config.initial
    if isinstance(init, GridFileInit):
        lines += ["kind = grid_file", f"path = {init.path}"]
    else:
        base = init.base if isinstance(init, StripInit) else init
        lines.append("kind = strips" if isinstance(init, StripInit) else "kind = shock_tube")
        lines += [f"rho_left = {base.rho_left!r}", f"rho_right = {base.rho_right!r}", f"theta = {base.theta!r}"]
        if isinstance(init, StripInit):
            lines.append(f"strips = {init.strips}")
    lines += ["", "[boundaries]"]
    lines += [f"{k} = {getattr(config.boundaries, k)}" for k in _BOUNDARY_KEYS]
    return "\n".join(lines) + "\n"


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigNotFound(f"{path}: no such config file")
    return parse_config(path.read_text(), base_dir=path.parent)


def lattice_fingerprint(lattice):
    return {"name": lattice.name, "c": fmt(lattice.c), "weights": [fmt(w) for w in lattice.weights]}


def _cmd_run(args):
    config = load_config(args.config)
    if args.output_prefix:
        config = replace(config, output_prefix=args.output_prefix)
    lattice = get_lattice(config.lattice_name)
    started = time.perf_counter()
    records = run(config, lattice)
    prefix = config.output_prefix
    outputs = []
    for rec in records:
        outputs.append(str(write_profile(rec, f"{prefix}_step{rec.step:06d}.csv")))
        if rec.grid is not None:
            outputs.append(str(write_grid(rec.grid, f"{prefix}_step{rec.step:06d}.grid")))
        d = rec.diagnostics
        print(f"step {rec.step} t'={rec.t_rel:.3f} mass={d.mass:.12g} rho=[{d.rho_min:.6g}, {d.rho_max:.6g}]")
    manifest = {
        "config": format_config(config),
        "lattice": lattice_fingerprint(lattice),
        "version": __version__,
        "wall_clock_seconds": time.perf_counter() - started,
        "steps": config.steps,
        "final_diagnostics": records[-1].diagnostics.as_dict(),
        "outputs": outputs,
    }
    if config.is_shock_tube:
        sol = riemann_solution(config)
        manifest["riemann"] = {
            "gamma": config.gamma, "p_star": sol.p_star, "u_star": sol.u_star,
            "rho_star_left": sol.rho_star_left, "rho_star_right": sol.rho_star_right,
            "speed_ratio": ORACLE_SPEED_RATIO,
        }
        last = records[-1]
        if last.step > 0:
            try:
                rep = plateau_report(last.profile["rho_total"], config, last.step, lattice.c)
                manifest["plateau"] = {
                    "left_error": rep.left_error, "right_error": rep.right_error,
                    "level_left": rep.level_left, "level_right": rep.level_right,
                    "monotone": rep.monotone, "rebound": rep.rebound,
                }
            except ValueError:
                pass
    print(write_manifest(manifest, f"{prefix}_manifest.json"))
    return 0


def _cmd_compare(args):
    config = load_config(args.config)
    if args.output_prefix:
        config = replace(config, output_prefix=args.output_prefix)
    started = time.perf_counter()
    result = compare_lattices(config)
    manifest = {
        "config": format_config(config),
        "lattices": {n: lattice_fingerprint(get_lattice(n)) for n in result["lattices"]},
        "version": __version__,
        "wall_clock_seconds": time.perf_counter() - started,
        "steps": config.steps,
        "cross_agreement_relative_l2": result["relative_l2"],
    }
    print(f"relative L2 ({' vs '.join(result['lattices'])}) = {result['relative_l2']:.6e}")
    print(write_manifest(manifest, f"{config.output_prefix}_compare_manifest.json"))
    return 0


def _cmd_lattice(args):
    sys.stdout.write(dump_lattice(get_lattice(args.name)))
    return 0


def _cmd_verify(args):
    report = verify_isotropy(get_lattice(args.name), args.max_order)
    sys.stdout.write(report.format())
    if not report.ok:
        print(f"error: isotropy-failure: {len(report.failures)} pair(s) above {report.tolerance:g}", file=sys.stderr)
        return 1
    return 0


def _cmd_riemann(args):
    config = load_config(args.config)
    if not config.is_shock_tube:
        raise ConfigError("initial: the Riemann oracle needs a shock_tube or strips config")
    lattice = get_lattice(config.lattice_name)
    sol = riemann_solution(config)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        out.write(f"# p_star={fmt(sol.p_star)} u_star={fmt(sol.u_star)} step={config.steps}\n")
        out.write("x,rho,u,p\n")
        offsets = node_positions(config.nx) - diaphragm(config.nx)
        for x, off in enumerate(offsets):
            if config.steps:
                st = sample(sol, off * ORACLE_SPEED_RATIO * lattice.c / config.steps)
            else:
                st = sol.left if off < 0 else sol.right
            out.write(f"{x},{fmt(st.rho)},{fmt(st.u)},{fmt(st.p)}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="lbm33", description="D2V33/D2V37 thermal lattice Boltzmann runs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario config")
    p.add_argument("config")
    p.add_argument("--output-prefix")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("compare", help="run a config on D2V33 and D2V37 and report the density gap")
    p.add_argument("config")
    p.add_argument("--output-prefix")
    p.set_defaults(func=_cmd_compare)
    p = sub.add_parser("lattice", help="dump velocities and weights")
    p.add_argument("name")
    p.set_defaults(func=_cmd_lattice)
    p = sub.add_parser("riemann", help="exact Riemann profile for a shock-tube config")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_riemann)
    p = sub.add_parser("verify", help="isotropy report")
    p.add_argument("name")
    p.add_argument("--max-order", type=int, default=8)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except LBMError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
    except KeyError as exc:
        print(f"error: unknown-name: {exc.args[0]}", file=sys.stderr)
    except OSError as exc:
        print(f"error: io-error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
