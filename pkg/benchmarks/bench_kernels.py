"""Compare the compiled and pure-Python IBI kernels on realistic inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--duration S]
"""
import argparse
import sys
import timeit
import warnings

import numpy as np

from radar_ibi import _kernels_py
from radar_ibi.enhance import enhanced_heartbeat
from radar_ibi.ibi import TopologyParams
from radar_ibi.pipeline import MethodId, RunConfig, run_method
from radar_ibi.synth import SynthConfig, generate_record


def inputs(duration):
    """Kernel inputs for a raw |s''| waveform and a VME-filtered one."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rec = generate_record(SynthConfig(duration=duration, seed=1))
    raw = enhanced_heartbeat(rec.signal).trimmed().demeaned()
    filtered = run_method(rec.signal, RunConfig(method=MethodId.PROP3)).pre_ibi
    out = {}
    for name, y in (("abs_d2", raw), ("prop3_vme", filtered)):
        idx, kind, prom = _kernels_py.feature_points(y.samples)
        keep = prom >= TopologyParams().p_min * prom.max()
        t = idx[keep] * y.dt
        amp = y.samples[idx[keep]]
        scan_args = (t, kind[keep], amp, 0.4, 1.4, 0.3, 0.05, 0.5, 1e-12 * np.abs(amp).max())
        out[name] = (y.samples, scan_args)
    return out


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--duration", type=float, default=60.0)
    args = ap.parse_args(argv)
    try:
        from radar_ibi import _kernels as compiled
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1

    print(f"{'input':<10} {'kernel':<15} {'features':>8} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, (y, scan_args) in inputs(args.duration).items():
        cases = (
            ("feature_points", lambda m: m.feature_points(y)),
            ("topology_scan", lambda m: m.topology_scan(*scan_args)),
        )
        for kernel, call in cases:
            a, b = call(_kernels_py), call(compiled)
            if not all(np.array_equal(u, v) for u, v in zip(a, b)):
                print(f"{name}/{kernel}: backends disagree", file=sys.stderr)
                return 1
            tp = bench(lambda: call(_kernels_py), args.repeat)
            tc = bench(lambda: call(compiled), args.repeat)
            print(f"{name:<10} {kernel:<15} {scan_args[0].size:>8} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
