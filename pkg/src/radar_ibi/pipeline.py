"""The six IBI estimation methods: phase or |s''| input, with 0, 1 or 2 VME modes."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .enhance import enhanced_heartbeat, held_phase
from .errors import InvalidInputError, LengthError
from .evaluation import evaluate
from .ibi import IbiSeries, TopologyParams, reject_outliers, topology_ibi
from .signal_core import ComplexSeries, RealSeries
from .vme import ALPHA_ENHANCED, ALPHA_PHASE, VmeConfig, harmonic_enhance

MIN_DURATION_S = 10.0


class MethodId(str, enum.Enum):
    CONV1 = "conv1"
    CONV2 = "conv2"
    CONV3 = "conv3"
    PROP1 = "prop1"
    PROP2 = "prop2"
    PROP3 = "prop3"

    @property
    def uses_phase(self) -> bool:
        return self.value.startswith("conv")

    @property
    def vme_modes(self) -> int:
        return int(self.value[-1]) - 1

    @classmethod
    def parse(cls, value: "str | MethodId") -> "MethodId":
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise InvalidInputError(f"unknown method {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class RunConfig:
    method: MethodId = MethodId.PROP3
    alpha: float | None = None
    max_iters: int = 500
    tol: float = 1e-7
    update_center: bool = True
    topology: TopologyParams = field(default_factory=TopologyParams)
    reject: bool = True

    def resolved_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return ALPHA_PHASE if MethodId.parse(self.method).uses_phase else ALPHA_ENHANCED


@dataclass
class MethodRun:
    ibi: IbiSeries
    pre_ibi: RealSeries
    diagnostics: dict


def run_method(signal: ComplexSeries, cfg: RunConfig = RunConfig()) -> MethodRun:
    """Run one method end to end and return the IBIs with stage diagnostics."""
    method = MethodId.parse(cfg.method)
    duration = len(signal) * signal.dt
    if duration < MIN_DURATION_S:
        raise LengthError(f"signal covers {duration:.2f} s, need at least {MIN_DURATION_S} s")
    stages = []
    diag: dict = {"method": method.value, "stages": stages}

    enhanced = enhanced_heartbeat(signal)
    edge = enhanced.edge
    enhanced = enhanced.trimmed()
    if method.uses_phase:
        psi = held_phase(signal).samples[edge:-edge]
        x = RealSeries(psi, signal.dt, enhanced.t0)
        stages.append("input:phase")
    else:
        x = enhanced
        stages.append("input:abs_d2")
    x = x.demeaned()

    if method.vme_modes:
        alpha = cfg.resolved_alpha()
        vcfg = VmeConfig(alpha=alpha, max_iters=cfg.max_iters, tol=cfg.tol,
                         update_center=cfg.update_center)
        h = harmonic_enhance(x, alpha, method.vme_modes, fd_reference=enhanced, cfg=vcfg)
        y = h.signal
        diag.update(alpha=alpha, f_desired=h.f_desired, fd_fallback=h.used_fallback)
        diag["modes"] = [
            {
                "f_init": m.f_init,
                "f_final": m.f_final,
                "iterations": m.iterations,
                "converged": m.converged,
                "objective_trace": [float(v) for v in m.objective_trace],
            }
            for m in h.modes
        ]
        stages.extend(f"vme:mode{i + 1}" for i in range(method.vme_modes))
    else:
        y = x

    raw = topology_ibi(y, cfg.topology)
    stages.append("ibi:topology")
    ibi = reject_outliers(raw) if cfg.reject else raw
    if cfg.reject:
        stages.append("ibi:reject_outliers")
    diag.update(n_ibi_raw=len(raw), n_ibi=len(ibi))
    return MethodRun(ibi, y, diag)


ALL_METHODS = tuple(MethodId)


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-method ensemble means plus the per-record reports behind them.

    A record whose estimate is empty (or does not overlap the reference)
    has undefined CC and RMSE. Its CC counts as 0 in the mean, since a
    method that emits nothing correlates with nothing. Its RMSE is left
    out of the mean and counted in ``n_undefined``.
    """

    methods: tuple[str, ...]
    cc: dict
    cc_pearson: dict
    rmse_ms: dict
    tcr_percent: dict
    n_undefined: dict
    reports: dict

    def to_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "mean": {
                m: {
                    "cc": self.cc[m],
                    "cc_pearson": self.cc_pearson[m],
                    "rmse_ms": self.rmse_ms[m],
                    "tcr_percent": self.tcr_percent[m],
                    "n_undefined": self.n_undefined[m],
                }
                for m in self.methods
            },
            "records": {m: [r.to_dict() for r in self.reports[m]] for m in self.methods},
        }


def _record_reports(signal, true_ibi, duration, methods, base):
    out = {}
    for m in methods:
        run = run_method(signal, replace(base, method=MethodId.parse(m)))
        out[MethodId.parse(m).value] = evaluate(run.ibi, true_ibi, duration=duration)
    return out


def run_ensemble(records, methods=ALL_METHODS, base: RunConfig = RunConfig(),
                 workers: int = 1) -> EnsembleSummary:
    """Evaluate each method on every synthetic record against its ground truth."""
    names = tuple(MethodId.parse(m).value for m in methods)
    jobs = [(r.signal, r.true_ibi, r.config.duration, names, base) for r in records]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_record = list(pool.map(_record_reports, *zip(*jobs)))
    else:
        per_record = [_record_reports(*job) for job in jobs]
    reports = {m: [pr[m] for pr in per_record] for m in names}
    cc, ccp, err, cov, und = {}, {}, {}, {}, {}
    for m in names:
        rs = reports[m]
        cc[m] = float(np.mean([0.0 if np.isnan(r.cc) else r.cc for r in rs]))
        ccp_vals = [r.cc_pearson for r in rs if not np.isnan(r.cc_pearson)]
        ccp[m] = float(np.mean(ccp_vals)) if ccp_vals else None
        rm = [r.rmse_ms for r in rs if not np.isnan(r.rmse_ms)]
        err[m] = float(np.mean(rm)) if rm else None
        cov[m] = float(np.mean([r.tcr_percent for r in rs]))
        und[m] = len(rs) - len(rm)
    return EnsembleSummary(names, cc, ccp, err, cov, und, reports)
