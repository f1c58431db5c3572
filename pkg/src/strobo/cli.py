"""Command line entry point: ``strobo <command> [flags]``.

Exit status: 0 on success, 2 on invalid parameters, 3 on numerical failure.
Parameters may also come from a JSON config file (``--config``); flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import reporting as rp
from . import su2
from .clock import ClockDistribution
from .errors import ContractViolation, DivergenceError, ResourceError, SolverError, StroboError

log = logging.getLogger("strobo")

EXIT_USAGE = 2
EXIT_SOLVER = 3


class UsageError(Exception):
    pass


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise ValueError(f"must be positive, got {text}")
        return v
    conv.__name__ = f"positive {kind.__name__}"
    return conv


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"must be finite, got {text}")
    return v


def _spin(text):
    v = float(text)
    if v <= 0 or abs(2 * v - round(2 * v)) > 1e-12:
        raise ValueError(f"s must be a positive half-integer, got {text}")
    return v


def _ns(text):
    """``64,128,256`` or ``64,128,...,4096`` (geometric continuation of the first ratio)."""
    if isinstance(text, (list, tuple)):
        parts = [str(p) for p in text]
    else:
        parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if "..." in parts:
        i = parts.index("...")
        head, tail = [int(p) for p in parts[:i]], [int(p) for p in parts[i + 1:]]
        if len(head) < 2 or len(tail) != 1:
            raise ValueError("ellipsis needs two leading values and one final value")
        ratio = head[1] / head[0]
        if ratio <= 1 or ratio != int(ratio):
            raise ValueError("ellipsis needs an integer growth ratio > 1")
        Ns = list(head)
        while Ns[-1] * int(ratio) <= tail[0]:
            Ns.append(Ns[-1] * int(ratio))
        if Ns[-1] != tail[0]:
            raise ValueError(f"{tail[0]} is not reached by the progression {head}")
    else:
        Ns = [int(p) for p in parts]
    if len(Ns) < 2 or any(n < 2 for n in Ns) or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be at least two strictly increasing integers >= 2")
    return Ns


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"must be one of {options}, got {text!r}")
        return text
    conv.__name__ = "choice"
    return conv


# name -> (converter, default)
COMMANDS: dict[str, dict[str, tuple[Callable, Any]]] = {
    "spectrum": {
        "model": (_choice("osc-a", "osc-b"), "osc-b"),
        "N": (_positive(int), 64),
        "omega": (_positive(float), 1.0),
        "delta": (_finite, -0.5),
        "solver": (_choice("auto", "dense"), "auto"),
    },
    "converge": {
        "model": (_choice("osc-a", "osc-b"), "osc-b"),
        "mode": (_positive(int), 1),
        "omega": (_positive(float), 1.0),
        "delta": (_finite, -0.5),
        "Ns": (_ns, [64, 128, 256, 512, 1024, 2048, 4096]),
    },
    "evolve": {
        "model": (_choice("osc-a", "osc-b", "su2"), "osc-b"),
        "N": (_positive(int), 32),
        "omega": (_positive(float), 1.0),
        "delta": (_finite, -0.5),
        "s": (_spin, 1.0),
        "clock": (_choice("delta", "gaussian", "uniform"), "gaussian"),
        "gamma": (_positive(float), 1.0),
        "width": (_positive(float), 2.0),
        "T": (_positive(float), 1.0),
        "steps": (_positive(int), 10),
        "nodes": (_positive(int), 64),
    },
    "su2-check": {
        "s": (_spin, 10.0),
        "omega": (_positive(float), 1.0),
    },
    "particle": {
        "s": (_spin, 1.0),
        "L": (_positive(float), 2 * math.pi),
        "mass": (_positive(float), 1.0),
    },
    "report": {
        "omega": (_positive(float), 1.0),
        "Nmax": (_positive(int), 4096),
    },
}

FORMATS = {
    "spectrum": ("csv", "json"),
    "converge": ("json", "csv", "svg"),
    "evolve": ("csv", "json"),
    "su2-check": ("json",),
    "particle": ("csv", "json"),
    "report": ("json",),
}


@dataclass
class RunConfig:
    """Validated command and parameters."""

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    format: str | None = None
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        spec = COMMANDS[self.command]
        unknown = set(self.parameters) - set(spec)
        if unknown:
            raise UsageError(f"unknown parameter(s) for {self.command}: {sorted(unknown)}")
        clean = {}
        for name, (conv, default) in spec.items():
            raw = self.parameters.get(name, default)
            try:
                clean[name] = conv(raw) if raw is not None else None
            except (TypeError, ValueError) as exc:
                raise UsageError(f"--{name}: {exc}") from exc
        self.parameters = clean
        fmt = self.format or FORMATS[self.command][0]
        if fmt not in FORMATS[self.command]:
            raise UsageError(f"format {fmt!r} not available for {self.command}")
        self.format = fmt

    def as_dict(self) -> dict:
        return {"command": self.command, "format": self.format, **self.parameters}


def _emit(config: RunConfig, text: str | bytes):
    if config.out:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(config.out, mode) as fh:
            fh.write(text)
    elif isinstance(text, bytes):
        sys.stdout.buffer.write(text)
    else:
        sys.stdout.write(text)


def _table_output(config: RunConfig, columns, rows) -> str:
    if config.format == "csv":
        return rp.csv_document(config.as_dict(), columns, rows)
    return rp.json_document(config.command, config.as_dict(),
                            {"columns": list(columns), "rows": [list(r) for r in rows]})


def _convergence_svg(config: RunConfig, result: dict) -> bytes:
    import io

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "strobo"
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(result["Ns"], result["errors"], "o-")
    ax.set_xlabel("N")
    ax.set_ylabel("spectral error")
    p = config.parameters
    ax.set_title(f"{p['model']} mode {p['mode']}: order {result['fitted_order']:.3f}")
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _report(p: dict) -> dict:
    omega, Nmax = p["omega"], p["Nmax"]
    spectra = {}
    for model in ("osc-a", "osc-b"):
        worst = 0.0
        for N in (4, 16, 64, 256):
            for delta in (0.0, -0.5, 0.3):
                _, rows = rp.spectrum_table(model, N, omega, delta)
                worst = max(worst, max(r[-1] for r in rows))
        spectra[model] = worst
    Ns = [n for n in (64, 128, 256, 512, 1024, 2048, 4096, 8192) if n <= Nmax]
    converge = {m: rp.convergence_result(m, 1, omega, -0.5, Ns) for m in ("osc-a", "osc-b")}
    su2_checks = {str(s): rp.su2_result(int(2 * s), omega) for s in (0.5, 1, 2.5, 10, 50)}
    cross = {}
    for two_s in (1, 2, 3):
        c = su2.lattice_crosscheck(two_s)
        cross[str(two_s / 2)] = {"passed": c.passed, "onshell_count": c.onshell_count,
                                 "max_pointwise_error": c.max_pointwise_error}
    return {"spectrum_max_error": spectra, "convergence": converge, "su2_identities": su2_checks,
            "lattice_crosscheck": cross}


def run(config: RunConfig) -> int:
    """Execute a validated configuration; returns the process exit status."""
    p = config.parameters
    cmd = config.command
    if cmd == "spectrum":
        columns, rows = rp.spectrum_table(p["model"], p["N"], p["omega"], p["delta"], p["solver"])
        _emit(config, _table_output(config, columns, rows))
    elif cmd == "converge":
        result = rp.convergence_result(p["model"], p["mode"], p["omega"], p["delta"], p["Ns"])
        if config.format == "svg":
            _emit(config, _convergence_svg(config, result))
        elif config.format == "csv":
            rows = list(zip(result["Ns"], result["errors"]))
            _emit(config, rp.csv_document(config.as_dict(), ["N", "error"], rows))
        else:
            _emit(config, rp.json_document(cmd, config.as_dict(), result))
    elif cmd == "evolve":
        clock = {
            "delta": ClockDistribution.delta,
            "gaussian": lambda: ClockDistribution.gaussian(p["gamma"]),
            "uniform": lambda: ClockDistribution.uniform(p["width"]),
        }[p["clock"]]()
        columns, rows = rp.evolution_table(p["model"], p["N"], p["omega"], p["delta"], round(2 * p["s"]),
                                           clock, p["T"], p["steps"], p["nodes"])
        _emit(config, _table_output(config, columns, rows))
    elif cmd == "su2-check":
        _emit(config, rp.json_document(cmd, config.as_dict(), rp.su2_result(round(2 * p["s"]), p["omega"])))
    elif cmd == "particle":
        columns, rows = rp.particle_table(round(2 * p["s"]), p["L"], p["mass"])
        _emit(config, _table_output(config, columns, rows))
    elif cmd == "report":
        _emit(config, rp.json_document(cmd, config.as_dict(), _report(p)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strobo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sp = sub.add_parser(name)
        for pname in spec:
            # strings only here; conversion and defaults happen in RunConfig so config files get the same checks
            sp.add_argument(f"--{pname}", dest=pname, default=None)
        sp.add_argument("--format", choices=FORMATS[name], default=None)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--config", default=None, help="JSON file with parameters; flags override it")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    params: dict[str, Any] = {}
    fmt, out = None, None
    if args.config:
        data = _load_config_file(args.config)
        if data.get("command", args.command) != args.command:
            raise UsageError(f"config file is for {data['command']!r}, not {args.command!r}")
        fmt, out = data.get("format"), data.get("out")
        params.update(data.get("parameters", {}))
        extra = set(data) - {"command", "parameters", "format", "out"}
        if extra:
            raise UsageError(f"unknown top-level config keys: {sorted(extra)}")
    for name in COMMANDS[args.command]:
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    return RunConfig(args.command, params, args.format or fmt, args.out or out)


def main(argv: list[str] | None = None) -> int:
    verbose = argv is not None and ("-v" in argv or "--verbose" in argv) or argv is None and (
        "-v" in sys.argv[1:] or "--verbose" in sys.argv[1:])
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(argv)
        return run(config)
    except (UsageError, ContractViolation) as exc:
        print(f"strobo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, DivergenceError, ResourceError, StroboError, np.linalg.LinAlgError) as exc:
        print(f"strobo: numerical failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
