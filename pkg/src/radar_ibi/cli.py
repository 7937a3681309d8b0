"""Command-line entry point: ``radar-ibi {synth,run,eval,spectrum,batch}``.

Failures exit with status 2 and print one JSON error record
(``{"error": <type>, "message": <text>}``) on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .enhance import abs_kth_derivative, held_phase
from .errors import InvalidInputError, RadarIbiError
from .evaluation import GRID_RATE, T0, TTH_MS, evaluate, reference_ibi_from_rpeaks
from .ibi import TopologyParams
from .pipeline import ALL_METHODS, MethodId, RunConfig, run_ensemble, run_method
from .radar_image import (
    average_power_image,
    extract_signal,
    read_rvc1,
    remove_clutter,
    select_target,
    write_rvc1,
)
from .signal_core import ComplexSeries, RealSeries, kth_derivative, periodogram
from .synth import SynthConfig, SynthRecord, generate_record, make_cube

log = logging.getLogger("radar_ibi")

TRANSFORMS = ("phase", "raw", "d2", "absd2", "absdk")
_DATASET_KEYS = {"n_records", "write_cube", "n_range", "n_angle", "clutter_level"}


def cmd_synth(args) -> int:
    raw = io.read_json(args.config)
    extra = {k: raw.pop(k) for k in list(raw) if k in _DATASET_KEYS}
    if raw.get("snr_db") in ("inf", "Infinity"):
        raw["snr_db"] = None
    base = SynthConfig.from_dict(raw)
    n_records = int(extra.get("n_records", 1))
    write_cube = bool(extra.get("write_cube", False)) or args.cube
    out = Path(args.out)
    names = []
    for i in range(n_records):
        cfg = replace(base, seed=base.seed + i)
        rec = generate_record(cfg)
        name = f"record_{i:03d}"
        _write_record(rec, out / name)
        if write_cube:
            cube = make_cube(
                rec,
                n_range=int(extra.get("n_range", 16)),
                n_angle=int(extra.get("n_angle", 9)),
                clutter_level=float(extra.get("clutter_level", 1.0)),
                seed=cfg.seed,
                quantize=True,
            )
            write_rvc1(cube, out / name / "cube.rvc1")
        names.append(name)
        log.info("wrote %s (%d beats)", name, rec.rpeaks_s.size)
    io.write_json({"records": names, "config": base.to_dict(), **extra}, out / "dataset.json")
    return 0


def _write_record(rec: SynthRecord, d: Path) -> None:
    d.mkdir(parents=True, exist_ok=True)
    io.write_signal_csv(rec.signal, d / "signal.csv")
    io.write_rpeaks_csv(rec.rpeaks_s, d / "rpeaks.csv")
    io.write_ibi_csv(rec.true_ibi, d / "true_ibi.csv")
    io.write_json(rec.config.to_dict(), d / "config.json")


def _load_signal(args) -> ComplexSeries:
    if getattr(args, "cube", None):
        cube = read_rvc1(args.cube)
        r0, th0 = select_target(average_power_image(remove_clutter(cube)))
        log.info("target at range %.3f m, angle %.4f rad", r0, th0)
        return extract_signal(remove_clutter(cube), r0, th0)
    if not args.signal:
        raise InvalidInputError("one of --signal or --cube is required")
    return io.read_signal_csv(args.signal)


def _run_config(args) -> RunConfig:
    topo = TopologyParams(
        tau_min=args.tau_min, tau_max=args.tau_max, window=args.window,
        delta=args.delta, threshold=args.threshold, p_min=args.p_min,
    )
    return RunConfig(
        method=MethodId.parse(args.method),
        alpha=args.alpha,
        max_iters=args.max_iters,
        tol=args.tol,
        update_center=not args.fixed_center,
        topology=topo,
        reject=not args.no_reject,
    )


def cmd_run(args) -> int:
    cfg = _run_config(args)
    signal = _load_signal(args)
    run = run_method(signal, cfg)
    out = Path(args.out)
    io.write_ibi_csv(run.ibi, out / "ibi.csv")
    io.write_real_csv(run.pre_ibi, out / "pre_ibi.csv", "value")
    io.write_json(run.diagnostics, out / "diagnostics.json")
    log.info("%s: %d IBIs", cfg.method.value, len(run.ibi))
    return 0


def cmd_eval(args) -> int:
    est = io.read_ibi_csv(args.est)
    ref = reference_ibi_from_rpeaks(io.read_rpeaks_csv(args.ref))
    report = evaluate(est, ref, duration=args.duration, grid_rate=args.grid_rate,
                      t0=args.t0, tth_ms=args.tth)
    text = io.dumps_json(report.to_dict())
    if args.out:
        io.atomic_write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def spectrum_input(signal: ComplexSeries, transform: str, k: int = 2):
    """Series whose periodogram is plotted for ``transform``."""
    if transform == "phase":
        return held_phase(signal)
    if transform == "raw":
        return signal
    if transform == "d2":
        d = kth_derivative(signal, 2).samples
        return ComplexSeries(d[2:-2], signal.dt, signal.t0 + 2 * signal.dt)
    if transform == "absd2":
        return abs_kth_derivative(signal, 2).trimmed()
    if transform == "absdk":
        return abs_kth_derivative(signal, k).trimmed()
    raise InvalidInputError(f"unknown transform {transform!r}; expected one of {', '.join(TRANSFORMS)}")


def cmd_spectrum(args) -> int:
    signal = io.read_signal_csv(args.signal)
    x = spectrum_input(signal, args.transform, args.k)
    io.write_psd_csv(periodogram(x, remove_mean=not args.keep_mean, nfft=args.nfft), args.out)
    return 0


def _load_dataset_record(d: Path):
    signal = io.read_signal_csv(d / "signal.csv")
    ref = reference_ibi_from_rpeaks(io.read_rpeaks_csv(d / "rpeaks.csv"))
    cfg = SynthConfig.from_dict(io.read_json(d / "config.json"))
    return SynthRecord(signal, RealSeries(np.zeros(1), signal.dt), ref.times, ref, cfg)


def cmd_batch(args) -> int:
    root = Path(args.dataset)
    manifest = io.read_json(root / "dataset.json")
    records = [_load_dataset_record(root / name) for name in manifest["records"]]
    methods = ALL_METHODS if args.methods == "all" else tuple(
        MethodId.parse(m.strip()) for m in args.methods.split(",")
    )
    summary = run_ensemble(records, methods, workers=args.workers)
    io.write_json(summary.to_dict(), args.out)
    for m in summary.methods:
        rm = summary.rmse_ms[m]
        log.info("%s  CC %.3f  RMSE %s  TCR %.1f%%", m, summary.cc[m],
                 "n/a" if rm is None else f"{rm:.1f} ms", summary.tcr_percent[m])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radar-ibi", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate synthetic records")
    s.add_argument("--config", required=True, help="flat JSON of simulator settings")
    s.add_argument("--out", required=True)
    s.add_argument("--cube", action="store_true", help="also write cube.rvc1 per record")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("run", help="estimate IBIs with one method")
    r.add_argument("--method", required=True, help=", ".join(m.value for m in MethodId))
    r.add_argument("--signal", help="signal CSV (time_s,re,im)")
    r.add_argument("--cube", help="RVC1 cube; the target cell is selected automatically")
    r.add_argument("--out", required=True)
    r.add_argument("--alpha", type=float, default=None)
    r.add_argument("--max-iters", type=int, default=500)
    r.add_argument("--tol", type=float, default=1e-7)
    r.add_argument("--fixed-center", action="store_true", help="do not refine the VME centre")
    r.add_argument("--no-reject", action="store_true", help="skip outlier rejection")
    d = TopologyParams()
    r.add_argument("--tau-min", type=float, default=d.tau_min)
    r.add_argument("--tau-max", type=float, default=d.tau_max)
    r.add_argument("--window", type=float, default=d.window)
    r.add_argument("--delta", type=float, default=d.delta)
    r.add_argument("--threshold", type=float, default=d.threshold)
    r.add_argument("--p-min", type=float, default=d.p_min)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="score estimated IBIs against R-peaks")
    e.add_argument("--est", required=True)
    e.add_argument("--ref", required=True)
    e.add_argument("--t0", type=float, default=T0)
    e.add_argument("--tth", type=float, default=TTH_MS)
    e.add_argument("--grid-rate", type=float, default=GRID_RATE)
    e.add_argument("--duration", type=float, default=None,
                   help="record length for TCR (default: last R-peak)")
    e.add_argument("--out", help="also write the report here")
    e.set_defaults(func=cmd_eval)

    sp = sub.add_parser("spectrum", help="export a periodogram")
    sp.add_argument("--signal", required=True)
    sp.add_argument("--transform", required=True, help=", ".join(TRANSFORMS))
    sp.add_argument("--k", type=int, default=2, help="derivative order for absdk")
    sp.add_argument("--nfft", type=int, default=None)
    sp.add_argument("--keep-mean", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_spectrum)

    b = sub.add_parser("batch", help="evaluate methods over a synthetic dataset")
    b.add_argument("--dataset", required=True)
    b.add_argument("--methods", default="all")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_batch)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (RadarIbiError, OSError, KeyError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(record) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
