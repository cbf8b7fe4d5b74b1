"""Command-line interface.

Every command takes its parameters from flags, from a JSON ``--config`` file,
or both (flags win).  Data go to stdout unless an output file is named, in
which case a one-line summary goes to stdout.  ``QWCROSS_OUTPUT_DIR`` sets the
directory for relative output paths and, when set, makes file output the default.

Exit status: 0 success, 1 invalid input, 2 numerical failure, 3 resource bound.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from ._errors import ContractError, PrecisionError, QWError, ResourceError
from .classical import correlated_rw_distribution, lazy_rw_closed_form, lazy_rw_distribution
from .ctqw import CtqwParams, ctqw_distribution, ctrw_distribution
from .diagnostics import phase_diagram
from .limits import Arcsine, AsymArcsine, Delta, DTQWLaw, Gaussian, LatticeI, LatticeJ
from .measurement import (PhasePoint, Schedule, continuous_power_schedule,
                          ctqw_pm_distribution, dtqw_pm_distribution, ftd_ppm_distribution,
                          geometric_schedule, power_schedule, random_coin_states, theta)
from .walk import (CoinOperator, CoinState, Distribution, dtqw_distribution, ftd_coin,
                   preset_coin, symmetric_state)

ENV_OUTPUT_DIR = "QWCROSS_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_RESOURCE = 0, 1, 2, 3


class ConfigError(ContractError):
    pass


# --- value parsers ---------------------------------------------------------


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"not a list of numbers: {text!r}") from None


def parse_ints(text) -> list[int]:
    vals = parse_floats(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers: {text!r}")
    return [int(v) for v in vals]


def parse_coin(text) -> CoinOperator:
    """Preset name (``hadamard``, ``ftd:r=0.01``) or four complex entries ``a,b,c,d``."""
    text = str(text)
    parts = text.split(",")
    if len(parts) == 4 and ":" not in text:
        return CoinOperator(*(parse_complex(p) for p in parts))
    return preset_coin(text)


def parse_state(text, coin: CoinOperator | None = None) -> CoinState:
    key = str(text).strip().lower()
    if key in ("left", "l", "e_l"):
        return CoinState.left()
    if key in ("right", "r", "e_r"):
        return CoinState.right()
    if key == "symmetric":
        if coin is None:
            raise ConfigError("'symmetric' needs a coin")
        return symmetric_state(coin)
    parts = key.split(",")
    if len(parts) != 2:
        raise ConfigError(f"bad coin state {text!r}: use left, right, symmetric or 'qL,qR'")
    return CoinState(parse_complex(parts[0]), parse_complex(parts[1]))


def _int(v) -> int:
    f = float(v)
    if f != int(f):
        raise ConfigError(f"expected an integer, got {v!r}")
    return int(f)


def _pos_int(v) -> int:
    n = _int(v)
    if n < 0:
        raise ConfigError(f"expected a non-negative integer, got {v!r}")
    return n


def _float(v) -> float:
    try:
        f = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {v!r}") from None
    if not math.isfinite(f):
        raise ConfigError(f"expected a finite number, got {v!r}")
    return f


# --- command table -----------------------------------------------------------


@dataclass
class Param:
    name: str
    convert: Callable[[Any], Any]
    default: Any
    help: str
    choices: tuple | None = None


@dataclass
class Output:
    columns: list[str]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)
    summary: str = ""
    report: Any = None


COMMON = [
    Param("out", str, "csv", "output format", ("csv", "json")),
    Param("output", str, None, "output file (relative to $QWCROSS_OUTPUT_DIR when set)"),
]

COMMANDS: dict[str, tuple[str, list[Param], Callable[[dict], Output]]] = {}


def command(name: str, help: str, params: list[Param]):
    def register(fn):
        COMMANDS[name] = (help, params + COMMON, fn)
        return fn
    return register


def _distribution_output(dist: Distribution, full_window: bool = False) -> Output:
    """Rows ``x, probability``; sites of the wrong parity are left out."""
    if not full_window:
        dist = dist.trimmed()
    step = dist.stride()
    xs = dist.support[::step]
    ps = dist.pmf[::step]
    rows = [(int(x), float(p)) for x, p in zip(xs, ps)]
    summary = (f"{len(rows)} sites, total {dist.total:.15f}, mean {dist.mean():.12g}, "
               f"variance {dist.variance():.12g}")
    return Output(["x", "probability"], rows, dict(dist.meta), summary)


@command("dtqw", "discrete-time quantum walk", [
    Param("coin", parse_coin, "hadamard", "preset (hadamard, ftd:r=0.01, ...) or 'a,b,c,d'"),
    Param("init", str, "left", "left, right, symmetric or 'qL,qR'"),
    Param("steps", _pos_int, 100, "number of steps n"),
])
def _dtqw(p):
    state = parse_state(p["init"], p["coin"])
    return _distribution_output(dtqw_distribution(p["coin"], state, p["steps"]),
                                full_window=True)


@command("ctqw", "continuous-time quantum walk", [
    Param("gamma", parse_complex, 1 + 0j, "hopping amplitude"),
    Param("t", _float, 10.0, "time"),
])
def _ctqw(p):
    return _distribution_output(ctqw_distribution(CtqwParams(p["gamma"], p["t"])))


@command("ctrw", "continuous-time random walk", [
    Param("t", _float, 10.0, "time"),
])
def _ctrw(p):
    return _distribution_output(ctrw_distribution(p["t"]))


@command("lazy", "lazy random walk", [
    Param("r", _float, 0.5, "moving probability"),
    Param("steps", _pos_int, 100, "number of steps"),
    Param("method", str, "dp", "evaluation route", ("dp", "closed")),
])
def _lazy(p):
    fn = lazy_rw_distribution if p["method"] == "dp" else lazy_rw_closed_form
    return _distribution_output(fn(p["r"], p["steps"]))


@command("correlated", "correlated random walk", [
    Param("r", _float, 0.5, "probability of keeping direction"),
    Param("steps", _pos_int, 100, "number of steps"),
    Param("pL", _float, 0.5, "initial weight on the left direction"),
    Param("pR", _float, 0.5, "initial weight on the right direction"),
])
def _correlated(p):
    return _distribution_output(
        correlated_rw_distribution(p["r"], p["steps"], p["pL"], p["pR"]))


@command("ftd", "final-time-dependent walk, optionally measured", [
    Param("steps", _pos_int, 100, "final time n"),
    Param("r", _float, 0.5, "scale r of r(n) = r^2 / n^(2 alpha)"),
    Param("alpha", _float, 0.5, "decay exponent alpha"),
    Param("rn", _float, None, "coin parameter r(n) directly (overrides r, alpha)"),
    Param("beta", _float, None, "measure every ~n^beta steps (measured walk)"),
    Param("init", str, "left", "coin state of the unmeasured walk"),
])
def _ftd(p):
    n = p["steps"]
    if p["beta"] is not None:
        dist = ftd_ppm_distribution(PhasePoint(p["alpha"], p["beta"], p["r"]), n)
        return _distribution_output(dist)
    rn = p["rn"] if p["rn"] is not None else p["r"] ** 2 / max(n, 1) ** (2 * p["alpha"])
    coin = ftd_coin(rn)
    out = _distribution_output(dtqw_distribution(coin, parse_state(p["init"], coin), n),
                               full_window=True)
    out.meta["r_n"] = rn
    return out


def _parse_schedule(text: str, n: float, seed: int, continuous: bool) -> Schedule:
    name, _, rest = str(text).partition(":")
    args = {}
    if name != "spans":
        for item in filter(None, rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise ConfigError(f"bad schedule parameter {item!r}")
            args[k.strip()] = _float(v)
    try:
        if name == "power":
            beta = args.pop("beta", 0.5)
            if continuous:
                sched = continuous_power_schedule(n, beta)
            else:
                sched = power_schedule(_int(n), beta)
        elif name == "geometric":
            sched = geometric_schedule(_int(n), args.pop("p", 0.1), seed)
        elif name == "spans":
            spans = parse_floats(rest) if continuous else parse_ints(rest)
            sched = Schedule(tuple(spans), n)
        else:
            raise ConfigError(f"unknown schedule {name!r} (power, geometric, spans)")
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if args:
        raise ConfigError(f"unknown schedule parameters {sorted(args)}")
    return sched


@command("pm", "walk under repeated position measurement", [
    Param("walk", str, "dtqw", "underlying walk", ("dtqw", "ctqw")),
    Param("coin", parse_coin, "hadamard", "coin of the discrete walk"),
    Param("init", str, "symmetric", "restart state, or 'random' for Haar-random states"),
    Param("gamma", parse_complex, 1 + 0j, "hopping amplitude of the continuous walk"),
    Param("steps", _float, 1000, "final time"),
    Param("schedule", str, "power:beta=0.5", "power:beta=B, geometric:p=P or spans:d1,d2,..."),
    Param("seed", _int, 0, "random seed"),
])
def _pm(p):
    continuous = p["walk"] == "ctqw"
    sched = _parse_schedule(p["schedule"], p["steps"], p["seed"], continuous)
    if continuous:
        dist = ctqw_pm_distribution(p["gamma"], sched)
    else:
        if str(p["init"]).lower() == "random":
            states = random_coin_states(sched.M, p["seed"] + 1)
        else:
            states = parse_state(p["init"], p["coin"])
        dist = dtqw_pm_distribution(p["coin"], sched, states)
    out = _distribution_output(dist)
    out.meta.update(M=sched.M, discarded=sched.discarded, theta=theta(sched))
    return out


@command("phase", "phase diagram of the measured final-time-dependent walk", [
    Param("r", _float, 0.5, "scale r"),
    Param("alphas", parse_floats, [0.0, 0.25, 0.5, 0.75], "comma-separated alphas"),
    Param("betas", parse_floats, [0.0, 0.5, 1.0], "comma-separated betas"),
    Param("n", parse_ints, [512, 1024, 2048], "comma-separated even sizes"),
    Param("jobs", _int, 1, "worker processes"),
])
def _phase(p):
    cells = phase_diagram(p["r"], p["alphas"], p["betas"], p["n"], n_jobs=max(1, p["jobs"]))
    rows = [(c.alpha, c.beta, c.exponent_estimate, c.exponent_predicted,
             c.ks_to_predicted_law, c.region) for c in cells]
    regions = sorted({c.region for c in cells})
    return Output(["alpha", "beta", "exponent_estimate", "exponent_predicted", "ks", "region"],
                  rows, {}, f"{len(cells)} cells, regions {', '.join(regions)}",
                  report=[c.as_dict() for c in cells])


def _make_law(p):
    law = p["law"]
    if law == "dtqw":
        return DTQWLaw(p["a"])
    if law == "arcsine":
        return Arcsine(p["gamma_abs"])
    if law == "gaussian":
        return Gaussian(p["variance"])
    if law == "asym_arcsine":
        st = parse_state(p["init"])
        return AsymArcsine(p["r"], st.qL, st.qR)
    if law == "lattice_j":
        return LatticeJ(p["r"])
    if law == "lattice_i":
        return LatticeI(p["r"])
    return Delta()


@command("limits", "tabulate a limit law", [
    Param("law", str, "dtqw", "limit law",
          ("dtqw", "arcsine", "gaussian", "asym_arcsine", "lattice_j", "lattice_i", "delta")),
    Param("a", _float, 2 ** -0.5, "|a| of the ballistic quantum-walk law"),
    Param("gamma_abs", _float, 1.0, "|gamma| of the arcsine law"),
    Param("variance", _float, 1.0, "Gaussian variance"),
    Param("r", _float, 1.0, "parameter r of the tilted arcsine and lattice laws"),
    Param("init", str, "left", "coin state of the tilted arcsine law"),
    Param("grid", parse_floats, [-1.0, 1.0, 201], "lo,hi,count of the continuous grid"),
])
def _limits(p):
    law = _make_law(p)
    if law.lattice:
        xs, pmf = law.table()
        cdf = np.cumsum(pmf)
        rows = [(int(x), float(m), float(c)) for x, m, c in zip(xs, pmf, cdf) if m > 0]
        return Output(["x", "pmf", "cdf"], rows, {"law": law.tag},
                      f"{law.tag}: {len(rows)} atoms")
    if len(p["grid"]) != 3 or p["grid"][2] < 2 or p["grid"][2] != int(p["grid"][2]):
        raise ConfigError("grid must be lo,hi,count with an integer count >= 2")
    lo, hi, count = p["grid"]
    xs = np.linspace(lo, hi, int(count))
    dens = np.asarray(law.density(xs), dtype=float)
    cdf = np.asarray(law.cdf(xs), dtype=float)
    rows = [(float(x), float(d), float(c)) for x, d, c in zip(xs, dens, cdf)]
    return Output(["x", "density", "cdf"], rows, {"law": law.tag},
                  f"{law.tag}: {len(rows)} grid points")


@command("check", "run the acceptance criteria", [
    Param("criteria", parse_ints, None, "comma-separated criterion numbers (default all)"),
])
# the table goes to stdout; a report file is written only when --output is given
def _check(p):
    from .acceptance import format_table, run_all

    results = run_all(p["criteria"])
    rows = [(r.number, r.name, "PASS" if r.passed else "FAIL", round(r.elapsed, 3))
            for r in results]
    failed = [r.number for r in results if not r.passed]
    out = Output(["criterion", "name", "result", "seconds"], rows,
                 {"failed": failed}, format_table(results),
                 report=[{"number": r.number, "name": r.name, "passed": r.passed,
                          "details": r.details} for r in results])
    return out


# --- config handling ------------------------------------------------------------


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def merge_params(name: str, flags: dict, config: dict | None = None) -> dict:
    """Merge defaults < config file < flags and reject unknown keys; values stay raw."""
    params = COMMANDS[name][1]
    known = {p.name: p for p in params}
    config = dict(config or {})
    cfg_cmd = config.pop("command", name)
    if cfg_cmd != name:
        raise ConfigError(f"config is for command {cfg_cmd!r}, not {name!r}")
    config = {k.replace("-", "_"): v for k, v in config.items()}
    unknown = sorted(set(config) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys for {name}: {', '.join(unknown)}")
    raw = {p.name: p.default for p in params}
    raw.update(config)
    raw.update(flags)
    return raw


def resolve_params(name: str, raw: dict) -> dict:
    """Validate and convert merged raw values."""
    known = {p.name: p for p in COMMANDS[name][1]}
    out = {}
    for key, value in raw.items():
        param = known[key]
        if value is None:
            out[key] = None
            continue
        if param.choices and str(value) not in param.choices:
            raise ConfigError(f"{key} must be one of {', '.join(param.choices)}")
        out[key] = param.convert(value)
    return out


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, CoinOperator):
        return [_jsonable(complex(e)) for e in (v.a, v.b, v.c, v.d)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    s = str(v)
    return f'"{s}"' if ("," in s or '"' in s) else s


def render(name: str, params: dict, out: Output, fmt: str) -> str:
    """CSV (with ``#`` metadata lines) or JSON text."""
    meta = {"command": name, "version": __version__,
            "params": _jsonable({k: v for k, v in params.items() if k not in ("out", "output")}),
            "result": _jsonable(out.meta)}
    if fmt == "json":
        body = {"meta": meta, "columns": out.columns,
                "rows": [_jsonable(list(r)) for r in out.rows]}
        if out.report is not None:
            body["report"] = _jsonable(out.report)
        return json.dumps(body, sort_keys=True, indent=2) + "\n"
    lines = [f"# qwcross {__version__} {name}",
             "# params: " + json.dumps(meta["params"], sort_keys=True),
             "# result: " + json.dumps(meta["result"], sort_keys=True),
             ",".join(out.columns)]
    lines += [",".join(_fmt(v) for v in row) for row in out.rows]
    return "\n".join(lines) + "\n"


def _output_path(name: str, params: dict) -> Path | None:
    base = os.environ.get(ENV_OUTPUT_DIR)
    target = params.get("output")
    if target is None:
        if not base:
            return None
        target = f"{name}.{params['out']}"
    path = Path(target)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


# --- entry point -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwcross", description="exact 1D quantum and random walk simulator")
    parser.add_argument("--version", action="version", version=f"qwcross {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (help_text, params, _) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of parameters")
        for p in params:
            flags = [f"--{p.name}"]
            if "_" in p.name:
                flags.append(f"--{p.name.replace('_', '-')}")
            sp.add_argument(*flags, dest=p.name, default=argparse.SUPPRESS,
                            choices=p.choices, help=f"{p.help} (default: {p.default})")
    return parser


def _error_exit(kind: str, exc: BaseException, code: int) -> int:
    json.dump({"error": kind, "message": str(exc), "exit_code": code}, sys.stderr)
    sys.stderr.write("\n")
    return code


def run(argv: list[str] | None = None) -> int:
    try:
        ns = vars(build_parser().parse_args(argv))
        name = ns.pop("command")
        config = _load_config(ns.pop("config")) if "config" in ns else None
        raw = merge_params(name, ns, config)
        params = resolve_params(name, raw)
        out = COMMANDS[name][2](params)
        shown = {k: raw[k] if isinstance(v, CoinOperator) else v for k, v in params.items()}
        text = render(name, shown, out, params["out"])
        path = _output_path(name, params)
        if name == "check" and params["output"] is None:
            print(out.summary)
        elif path is None:
            sys.stdout.write(text)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            print(out.summary)
            print(f"wrote {path}")
        if name == "check" and out.meta["failed"]:
            return EXIT_NUMERICAL
        return EXIT_OK
    except ResourceError as exc:
        return _error_exit("resource", exc, EXIT_RESOURCE)
    except MemoryError as exc:
        return _error_exit("resource", exc, EXIT_RESOURCE)
    except PrecisionError as exc:
        return _error_exit("numerical", exc, EXIT_NUMERICAL)
    except (ContractError, ValueError, TypeError) as exc:
        return _error_exit("validation", exc, EXIT_INVALID)
    except (QWError, ArithmeticError) as exc:
        return _error_exit("numerical", exc, EXIT_NUMERICAL)


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
