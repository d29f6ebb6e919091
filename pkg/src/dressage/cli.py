"""Command line front end.

Subcommands: make-kernel, check-kernel, gauge-test, efield, overlap,
entangle-demo, report. Exit status is 0 when every check passes, 1 when a
check fails and 2 on invalid input or any library error.

Coulomb kernels use the inverse *Laplacian* of the lattice delta. The
original dressing formula writes its denominator as a bare nabla; it is read
here as the Laplacian, which is what makes the kernel's divergence a delta.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import dressing, fieldio, gauge, observables, qstates, suite
from .errors import ConfigError, ConstraintViolationError, DressageError
from .lattice import Lattice, VectorField, new_lattice
from .suite import Check, Report

DEFAULT_TOL = 1e-10
BARE_SPREAD_MIN = 0.1


@dataclass
class RunConfig:
    dims: tuple[int, ...] = (8, 8, 8)
    seed: int = 0
    coupling: float = 1.0
    smoothness: float = 0.0
    kind: str = "coulomb"
    path: str | None = None
    anchors: str | None = None
    tolerance: float = DEFAULT_TOL
    transforms: int = 100
    offset: float = 0.0
    charge: int = 1
    kernel: str | None = None

    def validate(self) -> Lattice:
        lat = new_lattice(self.dims)
        if self.coupling == 0 or not math.isfinite(self.coupling):
            raise ConfigError(f"coupling must be finite and nonzero, got {self.coupling}")
        if self.smoothness < 0:
            raise ConfigError(f"smoothness must be nonnegative, got {self.smoothness}")
        if self.kind not in dressing.KINDS:
            raise ConfigError(f"--kind must be coulomb or path, got {self.kind!r}")
        if self.kind == "path" and not self.path and not self.kernel:
            raise ConfigError("--kind path needs --path, e.g. --path +x,+x")
        if self.transforms < 1:
            raise ConfigError(f"need at least one gauge transform, got {self.transforms}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.charge not in (1, -1):
            raise ConfigError(f"--charge must be +1 or -1, got {self.charge}")
        self.anchor_sites(lat)
        return lat

    def anchor_sites(self, lat: Lattice):
        if self.anchors in (None, "all"):
            return None
        try:
            sites = [tuple(int(c) for c in part.split(",")) for part in self.anchors.split(";") if part]
        except ValueError as exc:
            raise ConfigError(f"bad --anchors {self.anchors!r}; expected e.g. 0,0,0;1,2,3") from exc
        if not sites:
            raise ConfigError("--anchors is empty")
        return [lat.normalize_site(s) for s in sites]

    def echo(self) -> dict:
        doc = asdict(self)
        doc["dims"] = list(self.dims)
        return doc


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(n) for n in text.split(",") if n.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --dims {text!r}; expected e.g. 8,8,8")


def _config(args) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(args).items() if k in fields and v is not None})


def _build_kernel(cfg: RunConfig, lat: Lattice) -> dressing.DressingKernel:
    if cfg.kind == "path":
        return dressing.path_kernel(lat, dressing.parse_path(cfg.path, lat.ndim))
    return dressing.coulomb_kernel(lat)


def _kernel_from_args(args, cfg: RunConfig) -> tuple[dressing.DressingKernel, Lattice]:
    if cfg.kernel:
        k = dressing.read_kernel(cfg.kernel)
        cfg.dims, cfg.kind = k.lattice.dims, k.kind
        cfg.validate()
        return k, k.lattice
    lat = cfg.validate()
    return _build_kernel(cfg, lat), lat


def _emit(report: Report, json_path: str | None, quiet: bool = False) -> int:
    if not quiet:
        for c in report.checks:
            print(c.line())
        print("overall:", "PASS" if report.passed else "FAIL")
    if json_path:
        Path(json_path).write_text(report.to_json())
    return 0 if report.passed else 1


def cmd_make_kernel(args) -> int:
    cfg = _config(args)
    lat = cfg.validate()
    k = _build_kernel(cfg, lat)
    field_path, sidecar = dressing.write_kernel(k, args.out)
    print(f"kind: {k.kind}")
    print(f"dims: {','.join(map(str, lat.dims))}")
    print(f"divergence_residual: {k.divergence_residual:.3e}")
    if k.sink_offset is not None:
        print(f"sink_offset: {','.join(map(str, k.sink_offset))}")
    print(f"wrote: {field_path} {sidecar}")
    return 0


def cmd_check_kernel(args) -> int:
    meta = json.loads(Path(args.kernel + ".json").read_text())
    field = fieldio.read_field(args.kernel, vector=True)
    if meta.get("kind") not in dressing.KINDS:
        raise ConfigError(f"sidecar declares unknown kind {meta.get('kind')!r}")
    try:
        k = dressing.load_kernel(field, meta["kind"], meta.get("sink_offset"), tol=args.tolerance)
    except ConstraintViolationError as exc:
        print(f"FAIL  {exc}")
        return 1
    print(f"PASS  {k.kind} kernel, divergence_residual: {k.divergence_residual:.3e}")
    return 0


def _gauge_state(k: dressing.DressingKernel, lat: Lattice, charge: int):
    origin = (0,) * lat.ndim
    if k.kind == "path":
        # the string ends on an anticharge, making a neutral pair
        sink = tuple(-c % n for c, n in zip(k.sink_offset, lat.dims))
        if sink == origin:
            return qstates.make_qftbit(origin, 1, 0, charge, k)
        return qstates.entangle(qstates.make_qftbit(origin, 1, 0, charge, k),
                                qstates.make_qftbit(sink, 1, 0, -charge, None, lat),
                                np.array([[1, 0], [0, 1]]) / math.sqrt(2))
    return qstates.make_qftbit(origin, 1, 0, charge, k)


def cmd_gauge_test(args) -> int:
    cfg = _config(args)
    if cfg.transforms < 1:
        raise ConfigError(f"need at least one gauge transform, got {cfg.transforms}")
    k, lat = _kernel_from_args(args, cfg)
    anchors = cfg.anchor_sites(lat)
    state = _gauge_state(k, lat, cfg.charge)
    bare = qstates.undressed(state)
    dev = law = 0.0
    min_spread = math.inf
    for i in range(cfg.transforms):
        A = gauge.random_vector(lat, cfg.seed + i)
        g = gauge.random_gauge_transform(lat, cfg.seed + 7919 * (i + 1), cfg.smoothness,
                                         cfg.offset, cfg.coupling)
        rep = qstates.gauge_action(state, A, g, anchors)
        dev = max(dev, rep.max_local_deviation)
        law = max(law, rep.global_phase_error)
        min_spread = min(min_spread, qstates.gauge_action(bare, A, g, anchors).phase_spread)
    report = Report("gauge-test", cfg.echo())
    report.checks += [
        Check("dressed_local_deviation", dev, cfg.tolerance),
        Check("bare_phase_spread_min", min_spread, BARE_SPREAD_MIN, ">="),
        Check("global_phase_law", law, cfg.tolerance),
    ]
    report.extra["total_charge"] = qstates.as_state(state).total_charge
    return _emit(report, args.json)


def cmd_efield(args) -> int:
    cfg = _config(args)
    k, lat = _kernel_from_args(args, cfg)
    anchors = cfg.anchor_sites(lat) or [(0,) * lat.ndim]
    x = anchors[0]
    E = observables.electric_field(k, x, cfg.coupling)
    bins = args.bins or max(2, min(lat.dims) // 2)
    prof = observables.radial_profile(E, x, bins)
    text = observables.profile_csv(prof, cfg.coupling, lat.ndim)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.field_out:
        fieldio.write_field(args.field_out, E)
    residual = observables.source_residual(E, k, x, cfg.coupling)
    report = Report("efield", cfg.echo(), [Check("gauss_law_residual", residual, cfg.tolerance)])
    print(report.checks[0].line(), file=sys.stderr)
    if args.json:
        Path(args.json).write_text(report.to_json())
    return 0 if report.passed else 1


def cmd_overlap(args) -> int:
    cfg = _config(args)
    lat = cfg.validate()
    x = (cfg.anchor_sites(lat) or [(0,) * lat.ndim])[0]
    coulomb = dressing.coulomb_kernel(lat)
    loop = dressing.path_kernel(lat, dressing.parse_path(args.loop, lat.ndim))
    if any(loop.sink_offset):
        qstates.overlap_phase(coulomb, loop, VectorField.zeros(lat), x, cfg.coupling)
    other = dressing.combine([coulomb, loop], "custom")
    A = gauge.random_vector(lat, cfg.seed)
    ref = qstates.overlap_phase(coulomb, other, A, x, cfg.coupling)
    worst = 0.0
    for i in range(cfg.transforms):
        g = gauge.random_gauge_transform(lat, cfg.seed + 7919 * (i + 1), cfg.smoothness,
                                         cfg.offset, cfg.coupling)
        ph = qstates.overlap_phase(coulomb, other, gauge.apply_gauge_transform(A, g), x, cfg.coupling)
        worst = max(worst, abs(ph - ref))
    report = Report("overlap", dict(cfg.echo(), loop=args.loop),
                    [Check("overlap_gauge_deviation", worst, cfg.tolerance)],
                    {"overlap_re": ref.real, "overlap_im": ref.imag})
    return _emit(report, args.json)


def cmd_entangle_demo(args) -> int:
    cfg = _config(args)
    lat = cfg.validate()
    if args.amplitudes:
        try:
            amps = np.array([float(a) for a in args.amplitudes.split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad --amplitudes {args.amplitudes!r}") from exc
    else:
        amps = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    k = dressing.coulomb_kernel(lat)
    origin = (0,) * lat.ndim
    far = tuple(n // 2 for n in lat.dims)
    state = qstates.entangle(qstates.make_qftbit(origin, 1, 0, 1, k),
                             qstates.make_qftbit(far, 1, 0, 1, k), amps)
    s0 = qstates.entanglement_entropy(state, 0)
    s1 = qstates.entanglement_entropy(state, 1)
    A = gauge.random_vector(lat, cfg.seed)
    g = gauge.random_gauge_transform(lat, cfg.seed + 1, cfg.smoothness, cfg.offset, cfg.coupling)
    rep = qstates.gauge_action(state, A, g, cfg.anchor_sites(lat))
    report = Report("entangle-demo", dict(cfg.echo(), bell=not args.amplitudes, amplitudes=list(amps)))
    report.checks += [
        Check("entropy_cut_symmetry", abs(s0 - s1), cfg.tolerance),
        Check("dressed_local_deviation", rep.max_local_deviation, cfg.tolerance),
        Check("global_phase_law", rep.global_phase_error, cfg.tolerance),
    ]
    if not args.amplitudes:
        report.checks.append(Check("bell_entropy_error", abs(s0 - math.log(2)), cfg.tolerance))
    report.extra.update(entropy=s0, state=qstates.state_to_json(state, ["coulomb", "coulomb"]))
    doc = report.to_json()
    if args.json:
        Path(args.json).write_text(doc)
    else:
        sys.stdout.write(doc)
    return 0 if report.passed else 1


def cmd_report(args) -> int:
    report = suite.full_suite(args.seed or 0)
    return _emit(report, args.json)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dressage", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kind=True):
        p.add_argument("--dims", type=_dims, help="lattice extents, e.g. 8,8,8")
        p.add_argument("--seed", type=int)
        p.add_argument("--coupling", type=float, help="coupling e (default 1)")
        p.add_argument("--smoothness", type=float, help="low-pass strength for random gauge functions")
        if kind:
            p.add_argument("--kind", choices=["coulomb", "path"])
            p.add_argument("--path", help="string steps, e.g. +x,+x,-y")
        p.add_argument("--anchors", help="'all' or sites like 0,0,0;1,2,3")
        p.add_argument("--tolerance", type=float)
        p.add_argument("--json", help="write the JSON report here")

    p = sub.add_parser("make-kernel", help="build a dressing kernel and write it to disk")
    common(p)
    p.add_argument("--out", default="kernel.field")
    p.set_defaults(func=cmd_make_kernel)

    p = sub.add_parser("check-kernel", help="validate a kernel file against its declared kind")
    p.add_argument("kernel")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_check_kernel)

    p = sub.add_parser("gauge-test", help="seeded gauge transforms of a dressed state")
    common(p)
    p.add_argument("--kernel", help="kernel file from make-kernel")
    p.add_argument("--transforms", type=int)
    p.add_argument("--offset", type=float, help="constant added to every gauge function")
    p.add_argument("--charge", type=int, choices=[1, -1])
    p.set_defaults(func=cmd_gauge_test)

    p = sub.add_parser("efield", help="electric field profile of a dressed charge as CSV")
    common(p)
    p.add_argument("--kernel")
    p.add_argument("--bins", type=int)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--field-out", help="also dump E in dressage-field format")
    p.set_defaults(func=cmd_efield, dims=(32, 32, 32))

    p = sub.add_parser("overlap", help="gauge invariance of the relative phase of two dressings")
    common(p, kind=False)
    p.add_argument("--loop", default="+x,+y,-x,-y", help="path added to the Coulomb kernel")
    p.add_argument("--transforms", type=int)
    p.add_argument("--offset", type=float)
    p.set_defaults(func=cmd_overlap, transforms=20)

    p = sub.add_parser("entangle-demo", help="entangled Coulomb-dressed pair")
    common(p, kind=False)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--bell", action="store_true", help="(|00> + |11>)/sqrt 2 (default)")
    group.add_argument("--amplitudes", help="four real amplitudes a00,a01,a10,a11")
    p.add_argument("--offset", type=float)
    p.set_defaults(func=cmd_entangle_demo)

    p = sub.add_parser("report", help="run the full verification suite")
    p.add_argument("--all", action="store_true", help="run every check family (the only mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the JSON report here")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DressageError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
