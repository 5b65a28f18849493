"""Command-line front end: one subcommand per experiment, JSON configs in, CSV/JSON out.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .circuit import GateKind, circuit_to_text, count_gates
from .errors import CalibrationError, NumericalError, ParseError
from .operators import Hamiltonian, build_heisenberg, diagonalize, parse_hamiltonian

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class HamiltonianRef(_Strict):
    """Either a built-in Heisenberg chain or a Hamiltonian text file."""

    model: Optional[Literal["heisenberg"]] = "heisenberg"
    n: int = Field(2, ge=1, le=14)
    J: float = 1.0
    B: float = 1.0
    boundary: Literal["open", "periodic"] = "open"
    file: Optional[str] = None

    def build(self, base: Path) -> Hamiltonian:
        if self.file is not None:
            return _read_hamiltonian(base / self.file)
        return build_heisenberg(self.n, self.J, self.B, self.boundary)


class NoiseConfig(_Strict):
    two_qubit: float = Field(0.0, ge=0, le=1)
    one_qubit: float = Field(0.0, ge=0, le=1)


class SeriesConfig(_Strict):
    hamiltonian: HamiltonianRef = HamiltonianRef()
    T: float = Field(6.0, gt=0)
    dt: float = Field(0.04, gt=0)
    mode: Literal["exact", "shots"] = "exact"
    shots: int = Field(8192, ge=1)
    seed: int = Field(0, ge=0)
    evolution: Literal["exact", "trotter"] = "exact"
    trotter_steps: int = Field(1, ge=1)
    trotter_step: Optional[float] = Field(None, gt=0)
    variant: Literal["a", "b", "c"] = "c"
    native_rzz: bool = False
    purified: bool = False
    noise: Optional[NoiseConfig] = None
    output: str = "series.csv"

    @model_validator(mode="after")
    def _check(self):
        if self.dt > self.T:
            raise ValueError("dt must not exceed T")
        if self.noise is not None and self.evolution != "trotter":
            raise ValueError("noise requires evolution = 'trotter'")
        return self


class StochasticConfig(_Strict):
    hamiltonian: HamiltonianRef = HamiltonianRef()
    K: int = Field(100, ge=1)
    T: float = Field(6.0, gt=0)
    dt: float = Field(1e-4, gt=0)
    propagator: Literal["exact", "euler"] = "exact"
    inner_dt: Optional[float] = Field(None, gt=0)
    seed: int = Field(0, ge=0)
    basis: Union[Literal["computational"], HamiltonianRef] = "computational"
    output: str = "stochastic.csv"

    @model_validator(mode="after")
    def _check(self):
        if self.dt > self.T:
            raise ValueError("dt must not exceed T")
        return self


class SpectrumConfig(_Strict):
    input: str = "series.csv"
    normalize: bool = True
    window: Optional[Literal["hann"]] = None
    threshold: float = Field(0.2, gt=0, lt=1)
    resample_dt: Optional[float] = Field(None, gt=0)
    output: str = "spectrum.csv"
    peaks_output: str = "peaks.csv"


class SynthCountConfig(_Strict):
    hamiltonian: HamiltonianRef = HamiltonianRef()
    dt: float = 0.1
    variants: list[Literal["a", "b", "c"]] = ["a", "b", "c"]
    native_rzz: bool = False
    output: str = "synth_counts.csv"


class GraphConfig(_Strict):
    kind: Literal["heavy-hex", "line", "file"] = "heavy-hex"
    rows: int = Field(7, ge=1)
    cells: int = Field(3, ge=1)
    nodes: int = Field(8, ge=2)
    file: Optional[str] = None
    path: Optional[list[int]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "file" and self.file is None:
            raise ValueError("kind 'file' requires 'file'")
        return self


class RouteConfig(_Strict):
    hamiltonian: HamiltonianRef = HamiltonianRef()
    t: float = 6.0
    n_steps: int = Field(1, ge=1)
    variant: Literal["a", "b", "c"] = "c"
    native_rzz: bool = True
    graph: GraphConfig = GraphConfig()
    seed: int = Field(0, ge=0)
    trials: int = Field(4, ge=1)
    output: str = "routed.txt"
    summary: str = "route.json"


class FidelityConfig(_Strict):
    sizes: list[int] = list(range(2, 15))
    J: float = 1.0
    B: float = 1.0
    t: float = 6.0
    variant: Literal["a", "b", "c"] = "c"
    eps1: float = Field(3e-4, ge=0, lt=1)
    eps2: float = Field(0.007, ge=0, lt=1)
    calibration: Optional[str] = None
    pulse_scaling: bool = True
    graph: GraphConfig = GraphConfig()
    seed: int = Field(0, ge=0)
    trials: int = Field(4, ge=1)
    output: str = "fidelity.csv"

    @model_validator(mode="after")
    def _check(self):
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be a non-empty list of positive integers")
        return self


class LifetimeConfig(_Strict):
    n: int = Field(2, ge=1, le=5)
    t1: float = Field(100.0, gt=0)
    idle_times: Optional[list[float]] = None
    t_max: float = Field(300.0, gt=0)
    num: int = Field(20, ge=2)
    output: str = "lifetime.csv"


def _read_hamiltonian(path: Path) -> Hamiltonian:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read Hamiltonian file {path}: {exc.strerror}") from None
    return parse_hamiltonian(text)


def _load_config(model: type[_Strict], path: str | None, seed: int | None):
    data = {}
    base = Path(".")
    if path is not None:
        p = Path(path)
        try:
            data = json.loads(p.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        base = p.parent
    if seed is not None:
        if "seed" not in model.model_fields:
            raise ConfigError("--seed is not used by this command")
        data = {**data, "seed": seed}
    return model.model_validate(data), base


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        lines.append(f"  {loc}: {err['msg']}")
    return "invalid config:\n" + "\n".join(lines)


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    target = out / name
    target.write_text(text)
    return target


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _graph(cfg: GraphConfig, base: Path):
    from .synthesis import heavy_hex_graph, heavy_hex_snake, line_graph, parse_edge_list

    if cfg.kind == "heavy-hex":
        g = heavy_hex_graph(cfg.rows, cfg.cells)
        path = cfg.path or heavy_hex_snake(cfg.rows, cfg.cells)
    elif cfg.kind == "line":
        g = line_graph(cfg.nodes)
        path = cfg.path or list(range(cfg.nodes))
    else:
        try:
            g = parse_edge_list((base / cfg.file).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read edge list {cfg.file}: {exc.strerror}") from None
        if cfg.path is None:
            raise ConfigError("graph.path is required for edge-list graphs")
        path = cfg.path
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise ConfigError(f"graph.path: ({a}, {b}) is not an edge")
    return g, list(path)


def cmd_diagonalize(args) -> int:
    if args.seed is not None:
        raise ConfigError("--seed is not used by this command")
    if args.hamiltonian is not None:
        H = _read_hamiltonian(Path(args.hamiltonian))
    else:
        cfg, base = _load_config(HamiltonianRef, args.config, None)
        H = cfg.build(base)
    spec = diagonalize(H, eigenvectors=False)
    lines = ["eigenvalue,multiplicity"]
    for e, m in zip(spec.eigenvalues, spec.multiplicities):
        e = 0.0 if abs(e) < 1e-12 else float(e)
        lines.append(f"{e:.12g},{int(m)}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        _write(Path(args.out), "eigenvalues.csv", text)
    return EXIT_OK


def cmd_series(args) -> int:
    from .protocol import NoiseSchedule, Shots, Trotter, run_hadamard_series

    cfg, base = _load_config(SeriesConfig, args.config, args.seed)
    H = cfg.hamiltonian.build(base)
    mode = Shots(cfg.shots, cfg.seed) if cfg.mode == "shots" else "exact"
    evolution = "exact"
    if cfg.evolution == "trotter":
        evolution = Trotter(cfg.trotter_steps, cfg.variant, cfg.native_rzz, cfg.trotter_step)
    noise = NoiseSchedule(cfg.noise.two_qubit, cfg.noise.one_qubit) if cfg.noise else None
    series = run_hadamard_series(H, cfg.T, cfg.dt, mode, evolution, noise, cfg.purified)
    out = Path(args.out or ".")
    target = _write(out, cfg.output, series.to_csv())
    _write(out, Path(cfg.output).stem + ".meta.json", _dump_json(series.meta))
    print(f"wrote {len(series)} points to {target}")
    return EXIT_OK


def cmd_stochastic(args) -> int:
    from .protocol import Euler, run_stochastic_series

    cfg, base = _load_config(StochasticConfig, args.config, args.seed)
    H = cfg.hamiltonian.build(base)
    if cfg.propagator == "euler":
        if cfg.inner_dt is None:
            raise ConfigError("invalid config:\n  inner_dt: required for propagator 'euler'")
        prop = Euler(cfg.inner_dt)
    else:
        prop = "exact"
    basis = cfg.basis if cfg.basis == "computational" else cfg.basis.build(base)
    res = run_stochastic_series(H, cfg.K, cfg.T, cfg.dt, prop, cfg.seed, basis)
    out = Path(args.out or ".")
    target = _write(out, cfg.output, res.mean.to_csv())
    _write(out, Path(cfg.output).stem + ".meta.json", _dump_json(res.mean.meta))
    if res.norm_drift is not None and res.norm_drift > 0.1:
        print(f"warning: Euler norm drift {res.norm_drift:.3g} exceeds 10%", file=sys.stderr)
    print(f"wrote {len(res.mean)} points to {target}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .protocol import TimeSeries, uniform_grid
    from .spectral import dft, find_peaks, interpolate_quadratic

    cfg, base = _load_config(SpectrumConfig, args.config, args.seed)
    src = base / cfg.input
    if args.config is None and args.input is not None:
        src = Path(args.input)
    try:
        series = TimeSeries.from_csv(src)
    except OSError as exc:
        raise ConfigError(f"cannot read series {src}: {exc.strerror}") from None
    if cfg.resample_dt is not None:
        grid, _ = uniform_grid(series.T, cfg.resample_dt, series.times[0])
        grid[-1] = min(grid[-1], series.times[-1])
        series = interpolate_quadratic(series, grid)
    spec = dft(series, cfg.normalize, cfg.window)
    peaks = find_peaks(spec, cfg.threshold)
    out = Path(args.out or ".")
    _write(out, cfg.output, spec.to_csv())
    target = _write(out, cfg.peaks_output, peaks.to_csv())
    print(f"{len(peaks)} peaks written to {target}")
    for p in peaks:
        print(f"  omega = {p.omega:+.6f}  magnitude = {p.magnitude:.6f}")
    return EXIT_OK


def cmd_synth_count(args) -> int:
    from .synthesis import controlled_trotter_step

    cfg, base = _load_config(SynthCountConfig, args.config, args.seed)
    H = cfg.hamiltonian.build(base)
    lines = ["variant,cx,rzz,one_qubit,rz"]
    for v in cfg.variants:
        c = controlled_trotter_step(H, cfg.dt, v, H.num_qubits, native_rzz=cfg.native_rzz)
        one_q = sum(1 for g in c.gates if g.kind.arity == 1 and g.kind is not GateKind.RZ)
        lines.append(f"{v},{count_gates(c, GateKind.CX, effective=True)},"
                     f"{count_gates(c, GateKind.RZZ)},{one_q},{count_gates(c, GateKind.RZ)}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _write(Path(args.out or "."), cfg.output, text)
    return EXIT_OK


def cmd_route(args) -> int:
    from .synthesis import compile_protocol

    cfg, base = _load_config(RouteConfig, args.config, args.seed)
    H = cfg.hamiltonian.build(base)
    g, path = _graph(cfg.graph, base)
    comp = compile_protocol(H, g, path, cfg.t, cfg.n_steps, cfg.variant, cfg.native_rzz,
                            cfg.seed, cfg.trials)
    r = comp.routed
    summary = {
        "graph": g.name,
        "logical_width": comp.logical.width,
        "logical_cx": count_gates(comp.logical, GateKind.CX),
        "logical_rzz": count_gates(comp.logical, GateKind.RZZ),
        "swaps": r.swap_count,
        "cx_effective": r.cx_count,
        "rzz": r.rzz_count,
        "initial_layout": list(r.initial_layout),
        "final_layout": list(r.final_layout),
        "conformant": r.is_conformant(),
    }
    out = Path(args.out or ".")
    _write(out, cfg.output, circuit_to_text(r.circuit))
    _write(out, cfg.summary, _dump_json(summary))
    sys.stdout.write(_dump_json(summary))
    return EXIT_OK


def cmd_fidelity(args) -> int:
    from .synthesis import CalibrationModel, fidelity_vs_chain_length

    cfg, base = _load_config(FidelityConfig, args.config, args.seed)
    g, path = _graph(cfg.graph, base)
    if cfg.calibration is not None:
        try:
            cal = CalibrationModel.load(base / cfg.calibration)
        except OSError as exc:
            raise ConfigError(f"cannot read calibration {cfg.calibration}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{cfg.calibration}: invalid JSON: {exc.msg}") from None
    else:
        cal = CalibrationModel.uniform(g, cfg.eps1, cfg.eps2, pulse_scaling=cfg.pulse_scaling)
    rows = fidelity_vs_chain_length(cfg.sizes, cal, g, path, cfg.J, cfg.B, cfg.t, cfg.variant,
                                    cfg.seed, cfg.trials)
    lines = ["n,fidelity,cx,rzz,swaps"]
    for r in rows:
        lines.append(f"{r['n']},{r['fidelity']!r},{r['cx']},{r['rzz']},{r['swaps']}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _write(Path(args.out or "."), cfg.output, text)
    return EXIT_OK


def cmd_mms_lifetime(args) -> int:
    import numpy as np

    from .protocol import mms_lifetime_experiment

    cfg, _ = _load_config(LifetimeConfig, args.config, args.seed)
    times = cfg.idle_times if cfg.idle_times is not None else np.linspace(0, cfg.t_max, cfg.num)
    t, fid, p0 = mms_lifetime_experiment(cfg.n, cfg.t1, times)
    lines = ["t,fidelity,p_all_zero"]
    for a, b, c in zip(t, fid, p0):
        lines.append(f"{float(a)!r},{float(b)!r},{float(c)!r}")
    text = "\n".join(lines) + "\n"
    target = _write(Path(args.out or "."), cfg.output, text)
    print(f"wrote {len(t)} rows to {target}")
    return EXIT_OK


COMMANDS = {
    "diagonalize": (cmd_diagonalize, "print the eigenvalues and multiplicities of a Hamiltonian"),
    "series": (cmd_series, "Hadamard-test time series on the maximally mixed state"),
    "stochastic": (cmd_stochastic, "random-phase classical baseline series"),
    "spectrum": (cmd_spectrum, "DFT power spectrum and peak list of a series CSV"),
    "synth-count": (cmd_synth_count, "gate counts of one controlled Trotter step per variant"),
    "route": (cmd_route, "compile and route the full protocol onto a coupling graph"),
    "fidelity": (cmd_fidelity, "estimated protocol fidelity versus chain length"),
    "mms-lifetime": (cmd_mms_lifetime, "decay of the purified maximally mixed state"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        if name == "diagonalize":
            p.add_argument("hamiltonian", nargs="?", help="Hamiltonian text file")
        if name == "spectrum":
            p.add_argument("input", nargs="?", help="series CSV (when no --config is given)")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, help="root seed (overrides the config)")
        p.add_argument("--out", help="output directory (default: current directory)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ValidationError as exc:
        print(_format_validation(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, ParseError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
