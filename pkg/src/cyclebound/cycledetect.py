"""Empirical limit-cycle detection for planar polynomial fields.

Strategy: seed trajectories on rays around each equilibrium and on a coarse
box grid, integrate them forward and backward with a vectorized adaptive
stepper, and watch where they cross the horizontal line through each
equilibrium.  A crossing sequence that converges geometrically marks a
candidate periodic orbit; candidates are refined by Newton shooting on the
return map (anchor offset and period as unknowns), classified by the
finite-difference return-map derivative, deduplicated by Hausdorff distance,
and tagged with the equilibria they enclose via winding numbers.

Repelling cycles are found by the backward pass (they attract in reversed
time) and refined in that direction; the reported return derivative is the
reciprocal of the backward one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .odeflow import DP_A, DP_E, Section, T_END, integrate, section_crossings
from .polyalg import VectorField

log = logging.getLogger(__name__)

_polyval2d = np.polynomial.polynomial.polyval2d


class NoReturn(RuntimeError):
    """Trajectory never comes back to the section."""


class PointOnCycle(RuntimeError):
    """Winding number undefined: the point sits on the polyline."""


@dataclass(frozen=True)
class DetectConfig:
    rays: int = 16
    radii: int = 12
    grid_seeds: int = 20
    t_horizon: float = 200.0
    scout_rtol: float = 1e-6
    scout_atol: float = 1e-9
    refine_rtol: float = 1e-10
    refine_atol: float = 1e-13
    deriv_step: float = 1e-4
    isolation_tol: float = 1e-3
    dedup_tol: float = 1e-3
    conv_tol: float = 1e-3
    stall_tol: float = 1e-7
    min_cycle_size: float = 1e-3
    max_returns: int = 48
    max_candidates: int = 12
    newton_iters: int = 30
    cycle_vertices: int = 512


@dataclass(eq=False)
class LimitCycle:
    points: np.ndarray  # (n, 2), one traversal, first vertex not repeated
    period: float
    stability: str  # attracting | repelling | semi_stable
    return_derivative: float
    enclosed_cp_ids: tuple[int, ...]
    closure_residual: float

    def mean_radius(self) -> float:
        return _mean_radius(self.points)


def _section_point(sec: Section, u: float) -> tuple[float, float]:
    tx, ty = sec.tangent
    return (sec.anchor[0] + u * tx, sec.anchor[1] + u * ty)


def _mean_radius(pts: np.ndarray) -> float:
    c = pts.mean(axis=0)
    return float(np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1]).mean())


def _close_loop(pts: np.ndarray) -> np.ndarray:
    if pts[0, 0] == pts[-1, 0] and pts[0, 1] == pts[-1, 1]:
        return pts
    return np.vstack([pts, pts[:1]])


def _directed_hausdorff(pts: np.ndarray, poly: np.ndarray) -> float:
    a = poly[:-1]
    d = poly[1:] - a
    l2 = np.maximum((d * d).sum(1), 1e-300)
    ap = pts[:, None, :] - a[None]
    t = np.clip((ap * d[None]).sum(-1) / l2[None], 0.0, 1.0)
    proj = a[None] + t[..., None] * d[None]
    dist2 = ((pts[:, None, :] - proj) ** 2).sum(-1)
    return float(np.sqrt(dist2.min(axis=1).max()))


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric point-to-segment Hausdorff distance of two closed polylines."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    ca, cb = _close_loop(a), _close_loop(b)
    return max(_directed_hausdorff(a, cb), _directed_hausdorff(b, ca))


def _min_dist_to_polyline(p, pts: np.ndarray) -> float:
    poly = _close_loop(pts)
    a = poly[:-1]
    d = poly[1:] - a
    l2 = np.maximum((d * d).sum(1), 1e-300)
    ap = np.asarray(p, float)[None] - a
    t = np.clip((ap * d).sum(-1) / l2, 0.0, 1.0)
    proj = a + t[:, None] * d
    return float(np.sqrt(((np.asarray(p, float)[None] - proj) ** 2).sum(-1)).min())


def winding_number(pts: np.ndarray, p, tol: float = 1e-9) -> int:
    """Winding of a closed polyline around p by angle accumulation."""
    if _min_dist_to_polyline(p, pts) <= tol:
        raise PointOnCycle(f"point {p} lies on the polyline")
    ang = np.arctan2(pts[:, 1] - p[1], pts[:, 0] - p[0])
    d = np.diff(np.append(ang, ang[0]))
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(d.sum() / (2.0 * np.pi)))


# ---------------------------------------------------------------------------
# scouting


def _make_seeds(v: VectorField, cps, cfg: DetectConfig) -> np.ndarray:
    x0, x1, y0, y1 = v.box.floats()
    chunks = []
    for cp in cps:
        r_hi = 0.95 * min(cp.x - x0, x1 - cp.x, cp.y - y0, y1 - cp.y)
        if r_hi <= 1e-9:
            continue
        radii = np.geomspace(max(0.05 * r_hi, 1e-6), r_hi, cfg.radii)
        ang = np.linspace(0.0, 2.0 * math.pi, cfg.rays, endpoint=False)
        rr, aa = np.meshgrid(radii, ang)
        chunks.append(np.column_stack([(cp.x + rr * np.cos(aa)).ravel(),
                                       (cp.y + rr * np.sin(aa)).ravel()]))
    g = cfg.grid_seeds
    gx = x0 + (x1 - x0) * (np.arange(g) + 0.5) / g
    gy = y0 + (y1 - y0) * (np.arange(g) + 0.5) / g
    mx, my = np.meshgrid(gx, gy)
    chunks.append(np.column_stack([mx.ravel(), my.ravel()]))
    seeds = np.concatenate(chunks, axis=0)
    for cp in cps:
        seeds = seeds[np.hypot(seeds[:, 0] - cp.x, seeds[:, 1] - cp.y) > 1e-8]
    return seeds


def _hermite01(y0, d0, y1, d1, t):
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1)


def _hermite01_deriv(y0, d0, y1, d1, t):
    t2 = t * t
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * d0
            + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * d1)


def _scout(v: VectorField, seeds: np.ndarray, sections, cfg: DetectConfig, time_sign: float):
    """Integrate all seeds at once, logging section-line crossings.

    Returns one dict per seed mapping (section_index, crossing_direction,
    positive_side) to the time-ordered list of (t, u) crossing events.
    """
    m = len(seeds)
    fams: list[dict] = [dict() for _ in range(m)]
    if m == 0:
        return fams
    cpm = v.p.coeff_matrix()
    cqm = v.q.coeff_matrix()

    def field(xx, yy):
        return time_sign * _polyval2d(xx, yy, cpm), time_sign * _polyval2d(xx, yy, cqm)

    bx0, bx1, by0, by1 = v.box.inflate(1.5)
    sy = [s.anchor[1] for s in sections]
    sax = [s.anchor[0] for s in sections]

    x = seeds[:, 0].astype(float).copy()
    y = seeds[:, 1].astype(float).copy()
    t = np.zeros(m)
    h = np.full(m, 1e-3)
    errp = np.ones(m)
    k1x, k1y = field(x, y)
    active = np.hypot(k1x, k1y) > 1e-10
    counts: list[dict] = [dict() for _ in range(m)]

    with np.errstate(all="ignore"):
        for _ in range(200_000):
            if not active.any():
                break
            idx = np.nonzero(active)[0]
            xa, ya = x[idx], y[idx]
            ha = np.minimum(h[idx], cfg.t_horizon - t[idx])
            kx = np.empty((7, idx.size))
            ky = np.empty((7, idx.size))
            kx[0], ky[0] = k1x[idx], k1y[idx]
            x5 = y5 = None
            for s in range(1, 7):
                accx = np.zeros(idx.size)
                accy = np.zeros(idx.size)
                for j, c in enumerate(DP_A[s]):
                    if c:
                        accx += c * kx[j]
                        accy += c * ky[j]
                nx = xa + ha * accx
                ny = ya + ha * accy
                kx[s], ky[s] = field(nx, ny)
                if s == 6:
                    x5, y5 = nx, ny
            ex = ha * sum(c * kx[j] for j, c in enumerate(DP_E) if c)
            ey = ha * sum(c * ky[j] for j, c in enumerate(DP_E) if c)
            scx = cfg.scout_atol + cfg.scout_rtol * np.maximum(np.abs(xa), np.abs(x5))
            scy = cfg.scout_atol + cfg.scout_rtol * np.maximum(np.abs(ya), np.abs(y5))
            errn = np.sqrt(0.5 * ((ex / scx) ** 2 + (ey / scy) ** 2))
            good = np.isfinite(errn) & np.isfinite(x5) & np.isfinite(y5)
            errn = np.where(good, np.maximum(errn, 1e-16), 4.0)
            acc = errn <= 1.0
            fac = np.where(
                acc,
                np.clip(0.9 * errn ** -0.14 * errp[idx] ** 0.08, 0.2, 5.0),
                np.clip(0.9 * errn ** -0.2, 0.2, 0.9),
            )
            h[idx] = np.minimum(ha * fac, 5.0)

            if not acc.any():
                if (h[idx] < 1e-12).any():
                    active[idx[h[idx] < 1e-12]] = False
                continue
            gidx = idx[acc]
            ha_a = ha[acc]
            ya_a = ya[acc]
            x5_a, y5_a = x5[acc], y5[acc]
            k0y_a, k6y_a = ky[0][acc], ky[6][acc]
            k0x_a, k6x_a = kx[0][acc], kx[6][acc]
            xa_a = xa[acc]

            for si in range(len(sections)):
                f0 = ya_a - sy[si]
                f1 = y5_a - sy[si]
                hit = (f0 < 0) != (f1 < 0)
                for w in np.nonzero(hit)[0]:
                    g = int(gidx[w])
                    hh = float(ha_a[w])
                    py0, py1 = float(ya_a[w]), float(y5_a[w])
                    dy0, dy1 = float(k0y_a[w]) * hh, float(k6y_a[w]) * hh
                    a, b = 0.0, 1.0
                    fa = py0 - sy[si]
                    for _ in range(45):
                        mid = 0.5 * (a + b)
                        fm = _hermite01(py0, dy0, py1, dy1, mid) - sy[si]
                        if (fa < 0) != (fm < 0):
                            b = mid
                        else:
                            a, fa = mid, fm
                    tau = 0.5 * (a + b)
                    t_cross = float(t[g]) + tau * hh
                    if t_cross - float(t[g]) < 1e-12 and t[g] == 0.0:
                        continue
                    px0, px1 = float(xa_a[w]), float(x5_a[w])
                    dx0, dx1 = float(k0x_a[w]) * hh, float(k6x_a[w]) * hh
                    xc = _hermite01(px0, dx0, px1, dx1, tau)
                    dydt = _hermite01_deriv(py0, dy0, py1, dy1, tau)
                    if dydt == 0.0:
                        dydt = py1 - py0
                    dirc = 1 if dydt > 0 else -1
                    u = -(xc - sax[si])
                    if abs(u) < 1e-12:
                        continue
                    key = (si, dirc, u > 0)
                    fams[g].setdefault(key, []).append((t_cross, u))
                    cnt = counts[g].get(key, 0) + 1
                    counts[g][key] = cnt
                    if cnt >= cfg.max_returns:
                        active[g] = False

            x[gidx] = x5_a
            y[gidx] = y5_a
            t[gidx] += ha_a
            k1x[gidx] = k6x_a
            k1y[gidx] = k6y_a
            errp[gidx] = np.maximum(errn[acc], 1e-10)
            out = (
                (x5_a < bx0) | (x5_a > bx1) | (y5_a < by0) | (y5_a > by1)
                | ~np.isfinite(x5_a) | ~np.isfinite(y5_a)
            )
            eqm = np.hypot(k6x_a, k6y_a) < 1e-10
            tend = t[gidx] >= cfg.t_horizon - 1e-12
            dead = out | eqm | tend
            if dead.any():
                active[gidx[dead]] = False
    return fams


def _analyze_family(events, cfg: DetectConfig):
    """Convergence test on one crossing sequence; (u_limit, period) or None.

    Sequences that sit still from the start are closed-orbit bands (centers)
    and yield nothing; genuine convergence either collapses to the scout
    measurement floor after a real approach or shows a geometric difference
    ratio below 1 - conv_tol, in which case the limit is Aitken-extrapolated.
    The floor sits below the scouting tolerance rather than at machine
    epsilon: adaptive steps phase-lock onto the orbit, so the recorded
    crossings repeat with a coherent interpolation bias of that size.
    Anything nominated here still has to survive Newton shooting and the
    isolation probe, which keep closed-orbit bands out of the results.
    """
    if len(events) < 4:
        return None
    us = np.array([u for _, u in events])
    ts = np.array([tt for tt, _ in events])
    scale = max(1.0, float(np.abs(us).max()))
    d = np.diff(us)
    ad = np.abs(d)
    if ad.max() < cfg.stall_tol * scale:
        return None
    t_est = float(ts[-1] - ts[-2])
    if ad[-1] < max(1e-9, 0.1 * cfg.scout_rtol) * scale:
        return float(us[-1]), t_est
    ratios = ad[1:] / np.maximum(ad[:-1], 1e-300)
    tail = ratios[-3:]
    if len(tail) >= 2 and np.all(tail < 1.0 - cfg.conv_tol):
        denom = d[-1] - d[-2]
        u_star = float(us[-1] - d[-1] * d[-1] / denom) if denom != 0.0 else float(us[-1])
        return u_star, t_est
    return None


def _cluster(pool, cfg: DetectConfig):
    groups: dict = {}
    for c in pool:
        groups.setdefault((c["sec"], c["dirc"], c["sign"], c["u"] > 0), []).append(c)
    reps = []
    for key in sorted(groups):
        items = sorted(groups[key], key=lambda c: c["u"])
        bunches = [[items[0]]]
        for a, b in zip(items, items[1:]):
            gap = max(0.02 * max(1.0, abs(b["u"])), 1e-3)
            if b["u"] - a["u"] > gap:
                bunches.append([])
            bunches[-1].append(b)
        for bunch in bunches:
            us = sorted(c["u"] for c in bunch)
            Ts = sorted(c["T"] for c in bunch)
            reps.append({
                "sec": key[0], "dirc": key[1], "sign": key[2],
                "u": us[len(us) // 2], "T": Ts[len(Ts) // 2], "support": len(bunch),
            })
    reps.sort(key=lambda r: (-r["support"], r["sec"], r["u"]))
    return reps


# ---------------------------------------------------------------------------
# refinement


def _flow_to(v, q, T, sgn, cfg):
    if not (T > 0):
        return None
    try:
        traj = integrate(v, q, T, rtol=cfg.refine_rtol, atol=cfg.refine_atol,
                         direction=sgn, equilibrium_tol=1e-14)
    except Exception:
        return None
    if traj.terminated_by != T_END:
        return None
    return traj


def _first_return_u(v, sec, u, t_ref, sgn, dirc, cfg):
    q = _section_point(sec, u)
    try:
        traj = integrate(v, q, 3.0 * t_ref, rtol=cfg.refine_rtol, atol=cfg.refine_atol,
                         direction=sgn, equilibrium_tol=1e-14)
    except Exception:
        return None
    for c in section_crossings(v, traj, sec, direction=dirc):
        if c.t > 0.05 * t_ref:
            return float(c.u)
    return None


def _probe_semistable(v, sec, u_star, period, dirc_fwd, probe, cfg):
    trends = []
    for side in (1.0, -1.0):
        ucur = u_star + side * probe
        dist = probe
        for _ in range(4):
            r = _first_return_u(v, sec, ucur, period, 1.0, dirc_fwd, cfg)
            if r is None:
                dist = math.inf
                break
            ucur = r
            dist = abs(ucur - u_star)
        if dist < 0.6 * probe:
            trends.append("conv")
        elif dist > 1.6 * probe:
            trends.append("div")
        else:
            trends.append("flat")
    pair = tuple(trends)
    if pair in (("conv", "div"), ("div", "conv")):
        return "semi_stable"
    if pair == ("conv", "conv"):
        return "attracting"
    if pair == ("div", "div"):
        return "repelling"
    return None


def _refine_candidate(v: VectorField, sections, cand, cfg: DetectConfig):
    sec = sections[cand["sec"]]
    sgn = cand["sign"]
    u = float(cand["u"])
    T = float(cand["T"])
    scale = max(1.0, abs(u))
    tol = 1e-9 * scale
    tx, ty = sec.tangent
    traj = None
    res = math.inf
    for _ in range(cfg.newton_iters):
        q = _section_point(sec, u)
        traj = _flow_to(v, q, T, sgn, cfg)
        if traj is None:
            return None
        ex, ey = traj.states[-1]
        gx, gy = float(ex - q[0]), float(ey - q[1])
        res = math.hypot(gx, gy)
        if res <= tol:
            break
        du = 1e-6 * scale
        traj2 = _flow_to(v, _section_point(sec, u + du), T, sgn, cfg)
        if traj2 is None:
            return None
        e2 = traj2.states[-1]
        j11 = (float(e2[0]) - float(ex)) / du - tx
        j21 = (float(e2[1]) - float(ey)) / du - ty
        fx, fy = v.eval(float(ex), float(ey))
        j12, j22 = sgn * fx, sgn * fy
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            return None
        step_u = (-j22 * gx + j12 * gy) / det
        step_t = (j21 * gx - j11 * gy) / det
        step_u = max(-0.2 * scale, min(0.2 * scale, step_u))
        step_t = max(-0.3 * T, min(0.3 * T, step_t))
        u += step_u
        T += step_t
        if T <= 0.01 * cand["T"] or T > 50.0 * cand["T"]:
            return None
    if res > 1e-8 or traj is None:
        log.debug("shooting left residual %.3e at u=%.6g, dropped", res, u)
        return None
    if abs(u) < cfg.min_cycle_size:
        return None

    q = _section_point(sec, u)
    fx, fy = v.eval(*q)
    wy = sgn * (fx * sec.normal[0] + fy * sec.normal[1])
    if wy == 0.0:
        return None
    dirc = 1 if wy > 0 else -1

    fd = cfg.deriv_step * scale
    up = _first_return_u(v, sec, u + fd, T, sgn, dirc, cfg)
    um = _first_return_u(v, sec, u - fd, T, sgn, dirc, cfg)
    if up is None or um is None:
        log.debug("return probes at u=%.6g escaped, dropped", u)
        return None
    r_w = (up - um) / (2.0 * fd)
    r_w = max(r_w, 0.0)
    if sgn > 0:
        r_f = r_w
    else:
        r_f = 1.0 / r_w if r_w > 1e-12 else 1e12
    r_f = min(r_f, 1e12)

    if r_f < 1.0 - cfg.isolation_tol:
        stability = "attracting"
    elif r_f > 1.0 + cfg.isolation_tol:
        stability = "repelling"
    else:
        dirc_fwd = dirc if sgn > 0 else -dirc
        probe = max(100.0 * fd, 1e-2 * scale)
        stability = _probe_semistable(v, sec, u, T, dirc_fwd, probe, cfg)
        if stability is None:
            log.debug("candidate at u=%.6g not isolated, dropped", u)
            return None

    ts = np.linspace(0.0, T, cfg.cycle_vertices, endpoint=False)
    pts = np.array([traj.state_at(tt) for tt in ts])
    if sgn < 0:
        pts = pts[::-1]
    area = 0.5 * float(
        np.sum(pts[:, 0] * np.roll(pts[:, 1], -1) - np.roll(pts[:, 0], -1) * pts[:, 1])
    )
    if area < 0:
        pts = pts[::-1]
    pts = np.roll(pts, -int(np.argmax(pts[:, 0])), axis=0)
    return {"points": pts, "period": float(T), "residual": float(res),
            "rprime": float(r_f), "stability": stability}


def detect_limit_cycles(v: VectorField, cps, cfg: DetectConfig = DetectConfig()):
    """Find, refine, and classify limit cycles; sorted by mean radius."""
    cps = list(cps)
    if not cps:
        return []
    x0, x1, y0, y1 = v.box.floats()
    diag = math.hypot(x1 - x0, y1 - y0)
    sections = [Section(anchor=(cp.x, cp.y), normal=(0.0, 1.0), halfwidth=diag)
                for cp in cps]
    seeds = _make_seeds(v, cps, cfg)

    pool = []
    for time_sign in (1.0, -1.0):
        fams = _scout(v, seeds, sections, cfg, time_sign)
        for per_seed in fams:
            for (si, dirc, _side), evs in sorted(per_seed.items()):
                got = _analyze_family(evs, cfg)
                if got is None:
                    continue
                u_star, t_est = got
                if abs(u_star) < cfg.min_cycle_size or t_est <= 0:
                    continue
                pool.append({"sec": si, "dirc": dirc, "sign": time_sign,
                             "u": u_star, "T": t_est})

    raw = []
    for cand in _cluster(pool, cfg)[: cfg.max_candidates]:
        got = _refine_candidate(v, sections, cand, cfg)
        if got is not None:
            raw.append(got)

    kept = []
    for c in sorted(raw, key=lambda c: (c["residual"], c["period"])):
        scale = max(1.0, _mean_radius(c["points"]))
        if any(hausdorff_distance(c["points"], k["points"]) < cfg.dedup_tol * scale
               for k in kept):
            continue
        kept.append(c)

    out = []
    for c in kept:
        ids = []
        for cp in cps:
            try:
                w = winding_number(c["points"], (cp.x, cp.y))
            except PointOnCycle:
                continue
            if w != 0:
                ids.append(int(cp.id))
        if not ids:
            log.debug("cycle of period %.6g encloses nothing, dropped", c["period"])
            continue
        out.append(LimitCycle(points=c["points"], period=c["period"],
                              stability=c["stability"], return_derivative=c["rprime"],
                              enclosed_cp_ids=tuple(sorted(ids)),
                              closure_residual=c["residual"]))
    out.sort(key=lambda lc: lc.mean_radius())
    return out


# ---------------------------------------------------------------------------
# stand-alone operations


def return_map(v: VectorField, section: Section, x, t_max: float = 200.0,
               rtol: float = 1e-10, atol: float = 1e-13, direction: float = 1.0):
    """First return of the flow through x to the section, same crossing
    direction.  Returns ((x, y), t); raises NoReturn."""
    fx, fy = v.eval(float(x[0]), float(x[1]))
    wn = direction * (fx * section.normal[0] + fy * section.normal[1])
    if wn == 0.0:
        raise NoReturn("departure is tangent to the section")
    dirc = 1.0 if wn > 0 else -1.0
    traj = integrate(v, x, t_max, rtol=rtol, atol=atol, direction=direction)
    for c in section_crossings(v, traj, section, direction=dirc):
        if c.t > 1e-8:
            return (float(c.state[0]), float(c.state[1])), float(c.t)
    raise NoReturn(f"no return to the section within t={t_max:g}")


def enclosure_matrix(cycles, cps) -> np.ndarray:
    """Winding numbers, entry (c, i) = winding of cycle c around point i."""
    mat = np.zeros((len(cycles), len(cps)), dtype=int)
    for ci, cyc in enumerate(cycles):
        for pi, cp in enumerate(cps):
            mat[ci, pi] = winding_number(cyc.points, (cp.x, cp.y))
    return mat


def fiber_residence(cycle: LimitCycle, v: VectorField, cp) -> tuple[float, float]:
    """Mean of ||V|| along the cycle and its relative spread (max-min)/mean.

    At a zero of V the local level sets are ||V(x) - V(p)|| = const with
    V(p) = 0, so a cycle lying in a single level set has zero spread.
    """
    pts = cycle.points
    speeds = np.hypot(v.p.eval_grid(pts[:, 0], pts[:, 1]),
                      v.q.eval_grid(pts[:, 0], pts[:, 1]))
    mean = float(speeds.mean())
    if mean == 0.0:
        return 0.0, 0.0
    return mean, float((speeds.max() - speeds.min()) / mean)


def cycle_class_map(cycle: LimitCycle, fiber) -> tuple[int | None, float]:
    """Closest closed fiber component to the cycle, by Hausdorff distance."""
    best = None
    best_d = math.inf
    for i, comp in enumerate(fiber.components):
        if not comp.closed:
            continue
        d = hausdorff_distance(cycle.points, comp.as_array())
        if d < best_d:
            best, best_d = i, d
    return best, best_d


__all__ = [
    "DetectConfig",
    "LimitCycle",
    "NoReturn",
    "PointOnCycle",
    "cycle_class_map",
    "detect_limit_cycles",
    "enclosure_matrix",
    "fiber_residence",
    "hausdorff_distance",
    "return_map",
    "winding_number",
]
