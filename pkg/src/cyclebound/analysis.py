"""Pipeline assembly: loop-count bound vs detected cycles, plus morsification.

The headline quantity is B, the sum over equilibria of stabilized closed-loop
counts of the local level curves.  detect_limit_cycles supplies the empirical
side.  The verdict compares the two; a violated inequality is reported as a
finding, never suppressed.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction

from .critfind import CritFindError, SolveConfig, find_critical_points
from .cycledetect import (
    DetectConfig,
    cycle_class_map,
    detect_limit_cycles,
    fiber_residence,
)
from .milnorfiber import (
    FiberConfig,
    FiberError,
    MilnorData,
    extract_fiber,
    vanishing_cycle_count,
)
from .polyalg import Poly2, VectorField

VERDICT_HOLDS = "inequality_holds"
VERDICT_VIOLATED = "inequality_violated"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PipelineConfig:
    solve: SolveConfig = SolveConfig()
    fiber: FiberConfig = FiberConfig()
    detect: DetectConfig = DetectConfig()
    threads: int = 1


@dataclass(frozen=True)
class AnalysisReport:
    system_name: str
    config_echo: dict
    critical_points: tuple
    milnor: tuple
    bound: int
    detected: tuple
    verdict: str
    equality_hypothesis: dict
    diagnostics: tuple
    timestamp: str
    notes: tuple


def _config_echo(cfg: PipelineConfig) -> dict:
    from dataclasses import asdict

    return asdict(cfg)


def _cp_summary(cp) -> dict:
    a, b = cp.jacobian[0]
    c, d = cp.jacobian[1]
    return {
        "id": int(cp.id),
        "x": float(cp.x),
        "y": float(cp.y),
        "enclosure": [float(e) for e in cp.enclosure],
        "jacobian": [[float(a), float(b)], [float(c), float(d)]],
        "determinant": float(cp.jacobian_determinant()),
        "nondegenerate": bool(cp.nondegenerate),
        "index": None if cp.index is None else int(cp.index),
        "on_boundary": bool(cp.on_boundary),
    }


def _cycle_summary(lc) -> dict:
    return {
        "period": float(lc.period),
        "stability": str(lc.stability),
        "return_derivative": float(lc.return_derivative),
        "enclosed_cp_ids": [int(i) for i in lc.enclosed_cp_ids],
        "closure_residual": float(lc.closure_residual),
        "mean_radius": float(lc.mean_radius()),
        "points": [[float(x), float(y)] for x, y in lc.points],
    }


def _map_items(fn, items, threads: int):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def decide_verdict(milnor, n_detected: int, bound: int, had_failures: bool) -> str:
    """Pure verdict rule: inconclusive on any instability or failure,
    otherwise violated iff more cycles were detected than the bound allows."""
    if had_failures or any(not m.stable for m in milnor):
        return VERDICT_INCONCLUSIVE
    if n_detected > bound:
        return VERDICT_VIOLATED
    return VERDICT_HOLDS


def homology_bound(v: VectorField, cfg: PipelineConfig = PipelineConfig()):
    """B = sum of stabilized per-point loop counts; critfind errors propagate."""
    cps = find_critical_points(v, cfg.solve)
    locs = [(cp.x, cp.y) for cp in cps]

    def one(i_cp):
        i, cp = i_cp
        others = locs[:i] + locs[i + 1:]
        return vanishing_cycle_count(v, cp.id, locs[i], others, cfg.fiber)

    milnor = _map_items(one, enumerate(cps), cfg.threads)
    bound = sum(m.l for m in milnor if m.stable)
    return bound, milnor


def _placeholder_milnor(point_id: int) -> MilnorData:
    return MilnorData(point_id=point_id, delta=0.0, eta_sweep=(), counts_per_eta=(),
                      l=0, stable=False, submersion_ok=False, witness=None)


def _diagnostics(v, cycles, milnor_by_id, loc_by_id, cfg: PipelineConfig, notes):
    """One row per (cycle, enclosed point): level-set residence statistics and,
    when the cycle sits inside the point's ball at a swept level, the closest
    closed fiber component."""
    rows = []
    fiber_cache = {}
    for ci, lc in enumerate(cycles):
        for pid in lc.enclosed_cp_ids:
            md = milnor_by_id.get(pid)
            if md is None or not md.eta_sweep:
                continue
            mean, var = fiber_residence(lc, v, None)
            row = {
                "cycle": ci,
                "cp": int(pid),
                "mean_speed": float(mean),
                "relative_variation": float(var),
                "eta_matched": None,
                "component_index": None,
                "hausdorff": None,
                "in_tube": False,
            }
            eta_lo, eta_hi = min(md.eta_sweep), max(md.eta_sweep)
            cp_loc = loc_by_id[pid]
            pts = lc.points
            far = float(max(math.hypot(x - cp_loc[0], y - cp_loc[1]) for x, y in pts))
            if eta_lo <= mean <= eta_hi and far <= md.delta:
                key = (md.point_id, round(mean, 12))
                try:
                    fiber = fiber_cache.get(key)
                    if fiber is None:
                        fiber = extract_fiber(v, cp_loc, md.delta, mean, cfg.fiber)
                        fiber_cache[key] = fiber
                    comp_idx, hd = cycle_class_map(lc, fiber)
                    row.update(eta_matched=float(mean), in_tube=True,
                               component_index=comp_idx,
                               hausdorff=None if not math.isfinite(hd) else float(hd))
                except FiberError as e:
                    notes.append(f"fiber match at point {md.point_id} failed: {e}")
            rows.append(row)
    return rows


def compare(v: VectorField, cfg: PipelineConfig = PipelineConfig()) -> AnalysisReport:
    """Full pipeline on one field; failures downgrade the verdict, never raise."""
    notes: list[str] = []
    had_failures = False
    try:
        cps = find_critical_points(v, cfg.solve)
    except CritFindError as e:
        notes.append(f"critical point search failed: {type(e).__name__}: {e}")
        return _assemble(v, cfg, [], [], [], VERDICT_INCONCLUSIVE, notes)

    locs = [(cp.x, cp.y) for cp in cps]

    def one(i_cp):
        i, cp = i_cp
        others = locs[:i] + locs[i + 1:]
        try:
            return vanishing_cycle_count(v, cp.id, locs[i], others, cfg.fiber)
        except FiberError as e:
            return (cp.id, f"{type(e).__name__}: {e}")

    milnor = []
    for got in _map_items(one, enumerate(cps), cfg.threads):
        if isinstance(got, MilnorData):
            milnor.append(got)
        else:
            pid, msg = got
            had_failures = True
            notes.append(f"fiber sweep failed at point {pid}: {msg}")
            milnor.append(_placeholder_milnor(pid))

    try:
        cycles = detect_limit_cycles(v, cps, cfg.detect)
    except Exception as e:  # contract: detection must not abort the report
        had_failures = True
        notes.append(f"cycle detection failed: {type(e).__name__}: {e}")
        cycles = []

    return _assemble(v, cfg, cps, milnor, cycles, None, notes,
                     had_failures=had_failures)


def _assemble(v, cfg, cps, milnor, cycles, forced_verdict, notes, had_failures=False):
    bound = sum(m.l for m in milnor if m.stable)
    verdict = forced_verdict or decide_verdict(milnor, len(cycles), bound, had_failures)
    failed_at = [m.point_id for m in milnor if not m.submersion_ok]
    milnor_by_id = {m.point_id: m for m in milnor}
    loc_by_id = {cp.id: (cp.x, cp.y) for cp in cps}
    diag = _diagnostics(v, cycles, milnor_by_id, loc_by_id, cfg, notes) if cycles else []
    return AnalysisReport(
        system_name=v.name,
        config_echo=_config_echo(cfg),
        critical_points=tuple(_cp_summary(cp) for cp in cps),
        milnor=tuple(milnor),
        bound=int(bound),
        detected=tuple(_cycle_summary(c) for c in cycles),
        verdict=verdict,
        equality_hypothesis={
            "submersion_ok_all": not failed_at and not had_failures,
            "failed_at": [int(i) for i in failed_at],
        },
        diagnostics=tuple(diag),
        timestamp=datetime.now(timezone.utc).isoformat(),
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# morsification


def morsify(v: VectorField, s: float, seed: int) -> VectorField:
    """V + s * (random affine field), coefficients uniform in [-1, 1] from the
    seeded generator; s = 0 returns the input field unchanged."""
    if s < 0:
        raise ValueError("perturbation size must be nonnegative")
    if s == 0:
        return v
    rng = random.Random(seed)
    coef = [Fraction(rng.uniform(-1.0, 1.0)) for _ in range(6)]
    sf = Fraction(float(s))
    pert_p = Poly2({(0, 0): coef[0], (1, 0): coef[1], (0, 1): coef[2]}).scale(sf)
    pert_q = Poly2({(0, 0): coef[3], (1, 0): coef[4], (0, 1): coef[5]}).scale(sf)
    return VectorField(p=v.p + pert_p, q=v.q + pert_q,
                       name=f"{v.name}+{s:g}*affine(seed={seed})", box=v.box)


def morsification_invariance(v: VectorField, s_values, seeds,
                             cfg: PipelineConfig = PipelineConfig()):
    """Table of (s, seed, k, B, detected, changed) rows; row 0 is the base
    field.  'changed' flags any deviation of (k, B, detected) from the base."""

    def run(field):
        try:
            cps = find_critical_points(field, cfg.solve)
        except CritFindError as e:
            return {"k": None, "B": None, "detected": None,
                    "error": f"{type(e).__name__}: {e}"}
        locs = [(cp.x, cp.y) for cp in cps]
        milnor = []
        for i, cp in enumerate(cps):
            others = locs[:i] + locs[i + 1:]
            try:
                milnor.append(vanishing_cycle_count(field, cp.id, locs[i], others,
                                                    cfg.fiber))
            except FiberError:
                milnor.append(_placeholder_milnor(cp.id))
        bound = sum(m.l for m in milnor if m.stable)
        cycles = detect_limit_cycles(field, cps, cfg.detect)
        return {"k": len(cps), "B": int(bound), "detected": len(cycles), "error": None}

    jobs = [(0.0, None, v)]
    for s in s_values:
        for seed in seeds:
            jobs.append((float(s), int(seed), morsify(v, s, seed)))
    results = _map_items(lambda j: run(j[2]), jobs, cfg.threads)
    base = results[0]
    rows = []
    for (s, seed, _), res in zip(jobs, results):
        changed = (res["k"] != base["k"] or res["B"] != base["B"]
                   or res["detected"] != base["detected"])
        rows.append({"s": s, "seed": seed, "k": res["k"], "B": res["B"],
                     "detected": res["detected"], "changed": bool(changed),
                     "error": res["error"]})
    return rows


# ---------------------------------------------------------------------------
# serialization


def _milnor_to_dict(m: MilnorData) -> dict:
    return {
        "point_id": int(m.point_id),
        "delta": float(m.delta),
        "eta_sweep": [float(e) for e in m.eta_sweep],
        "counts_per_eta": [None if c is None else [int(c[0]), int(c[1])]
                           for c in m.counts_per_eta],
        "l": int(m.l),
        "stable": bool(m.stable),
        "submersion_ok": bool(m.submersion_ok),
        "witness": None if m.witness is None else [float(m.witness[0]),
                                                   float(m.witness[1])],
    }


def _milnor_from_dict(d: dict) -> MilnorData:
    return MilnorData(
        point_id=int(d["point_id"]),
        delta=float(d["delta"]),
        eta_sweep=tuple(float(e) for e in d["eta_sweep"]),
        counts_per_eta=tuple(None if c is None else (int(c[0]), int(c[1]))
                             for c in d["counts_per_eta"]),
        l=int(d["l"]),
        stable=bool(d["stable"]),
        submersion_ok=bool(d["submersion_ok"]),
        witness=None if d["witness"] is None else (float(d["witness"][0]),
                                                   float(d["witness"][1])),
    )


def report_to_dict(r: AnalysisReport) -> dict:
    return {
        "system_name": r.system_name,
        "config_echo": r.config_echo,
        "critical_points": list(r.critical_points),
        "milnor": [_milnor_to_dict(m) for m in r.milnor],
        "bound": r.bound,
        "detected": list(r.detected),
        "verdict": r.verdict,
        "equality_hypothesis": r.equality_hypothesis,
        "diagnostics": list(r.diagnostics),
        "timestamp": r.timestamp,
        "notes": list(r.notes),
    }


def report_from_dict(d: dict) -> AnalysisReport:
    return AnalysisReport(
        system_name=d["system_name"],
        config_echo=d["config_echo"],
        critical_points=tuple(d["critical_points"]),
        milnor=tuple(_milnor_from_dict(m) for m in d["milnor"]),
        bound=int(d["bound"]),
        detected=tuple(d["detected"]),
        verdict=d["verdict"],
        equality_hypothesis=d["equality_hypothesis"],
        diagnostics=tuple(d["diagnostics"]),
        timestamp=d["timestamp"],
        notes=tuple(d["notes"]),
    )


def report_to_json(r: AnalysisReport) -> str:
    return json.dumps(report_to_dict(r), indent=2, sort_keys=True, allow_nan=False)


def report_from_json(text: str) -> AnalysisReport:
    return report_from_dict(json.loads(text))


__all__ = [
    "AnalysisReport",
    "PipelineConfig",
    "VERDICT_HOLDS",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_VIOLATED",
    "compare",
    "decide_verdict",
    "homology_bound",
    "morsification_invariance",
    "morsify",
    "report_from_dict",
    "report_from_json",
    "report_to_dict",
    "report_to_json",
]
