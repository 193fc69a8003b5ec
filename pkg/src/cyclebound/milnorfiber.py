"""Fibers of the local squared-distance map around a critical point.

For a zero p of the field V, the local model is f = V - V(p) and the fiber
at level eta is the curve {x : ||V(x) - V(p)||^2 = eta^2} clipped to the ball
B_delta(p).  Closed loops of that curve are what the homological cycle bound
counts; the count is swept over a geometric range of eta values and read off
where it stabilizes toward small eta.

Extraction is marching squares on g = ||V - V(p)||^2 - eta^2 with linear edge
interpolation.  Saddle cells are resolved by the sign of g at the cell
center.  Cells whose corner signs hide a possible component (uniform sign,
not next to any crossed cell, but with a Taylor enclosure of g straddling 0)
trigger grid doubling; topology is accepted once two successive grids agree
or nothing is left unresolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyalg import Poly2, VectorField

_polyval2d = np.polynomial.polynomial.polyval2d


class FiberError(RuntimeError):
    pass


class DeltaCollapse(FiberError):
    """No usable ball radius: a neighbor zero or the box edge is too close."""


class GridTooCoarse(FiberError):
    """Topology still changing between refinements at the grid cap."""


class EtaTooLarge(FiberError):
    """The fiber touches the ball boundary tangentially."""


@dataclass(frozen=True)
class FiberConfig:
    grid: int = 256
    max_grid: int = 2048
    sweep_len: int = 8
    stable_tail: int = 4
    delta_cap: float = 10.0
    submersion_tol: float = 1e-8
    sphere_samples: int = 720
    delta_min: float = 1e-6
    tangency_tol: float = 1e-6


@dataclass(frozen=True)
class Component:
    """One connected piece of the fiber curve, as a vertex polyline."""

    vertices: tuple[tuple[float, float], ...]
    closed: bool
    arc_endpoints_on_sphere: bool

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("component needs at least 3 vertices")

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices)


@dataclass(frozen=True)
class FiberCurve:
    components: tuple[Component, ...]
    eta: float
    delta: float
    grid_resolution: int

    @property
    def closed_count(self) -> int:
        return sum(1 for c in self.components if c.closed)

    @property
    def arc_count(self) -> int:
        return sum(1 for c in self.components if not c.closed)


@dataclass(frozen=True)
class MilnorData:
    """Loop-count sweep for one critical point."""

    point_id: int
    delta: float
    eta_sweep: tuple[float, ...]
    counts_per_eta: tuple  # (closed, arcs) per eta, None where extraction failed
    l: int
    stable: bool
    submersion_ok: bool
    witness: tuple[float, float] | None


def select_radii(
    v: VectorField,
    location: tuple[float, float],
    other_locations=(),
    cfg: FiberConfig = FiberConfig(),
) -> tuple[float, list[float]]:
    """Ball radius delta and a descending geometric eta sweep for one zero.

    delta = min(cap, half the distance to the nearest other zero, half the
    distance to the box boundary); the sweep top is half the minimal field
    distance on the sphere of radius delta, the bottom is top/100.
    """
    x, y = location
    x0, x1, y0, y1 = v.box.floats()
    d_box = min(x - x0, x1 - x, y - y0, y1 - y)
    d_cp = math.inf
    for ox, oy in other_locations:
        d = math.hypot(x - ox, y - oy)
        if d > 0:
            d_cp = min(d_cp, d)
    delta = min(cfg.delta_cap, 0.5 * d_box, 0.5 * d_cp)
    if delta < cfg.delta_min:
        raise DeltaCollapse(
            f"ball radius {delta:.3e} below {cfg.delta_min:.1e} at ({x:.6g}, {y:.6g})"
        )
    theta = np.linspace(0.0, 2.0 * math.pi, cfg.sphere_samples, endpoint=False)
    sx = x + delta * np.cos(theta)
    sy = y + delta * np.sin(theta)
    p0 = v.p.eval(x, y)
    q0 = v.q.eval(x, y)
    norms = np.hypot(v.p.eval_grid(sx, sy) - p0, v.q.eval_grid(sx, sy) - q0)
    eta_max = 0.5 * float(norms.min())
    if eta_max <= 0.0:
        raise DeltaCollapse("field distance vanishes on the sphere; another zero nearby?")
    sweep = list(np.geomspace(eta_max, eta_max / 100.0, cfg.sweep_len))
    return delta, sweep


class _Workspace:
    """Per-(field, point, delta) caches: the distance-squared polynomial and
    per-grid node/center evaluations reused across the eta sweep."""

    def __init__(self, v: VectorField, location: tuple[float, float], delta: float):
        self.v = v
        self.location = (float(location[0]), float(location[1]))
        self.delta = float(delta)
        px, py = self.location
        p0 = Fraction(v.p.eval(px, py))
        q0 = Fraction(v.q.eval(px, py))
        dp = v.p - Poly2({(0, 0): p0})
        dq = v.q - Poly2({(0, 0): q0})
        self.g0 = dp * dp + dq * dq
        g0x = self.g0.partial(0)
        g0y = self.g0.partial(1)
        self.g0x = g0x
        self.g0y = g0y
        axm = max(abs(px - delta), abs(px + delta))
        aym = max(abs(py - delta), abs(py + delta))
        bxx = float(_polyval2d(axm, aym, g0x.partial(0).abs_coeff_matrix()))
        bxy = float(_polyval2d(axm, aym, g0x.partial(1).abs_coeff_matrix()))
        byy = float(_polyval2d(axm, aym, g0y.partial(1).abs_coeff_matrix()))
        self._hess_bound = bxx + 2.0 * bxy + byy
        self._levels: dict[int, dict] = {}

    def level(self, n: int) -> dict:
        lv = self._levels.get(n)
        if lv is not None:
            return lv
        px, py = self.location
        d = self.delta
        xs = np.linspace(px - d, px + d, n + 1)
        ys = np.linspace(py - d, py + d, n + 1)
        xn, yn = np.meshgrid(xs, ys, indexing="ij")
        g0n = self.g0.eval_grid(xn, yn)
        h = 2.0 * d / n
        cx = 0.5 * (xs[:-1] + xs[1:])
        cy = 0.5 * (ys[:-1] + ys[1:])
        cxg, cyg = np.meshgrid(cx, cy, indexing="ij")
        g0c = self.g0.eval_grid(cxg, cyg)
        gxc = np.abs(self.g0x.eval_grid(cxg, cyg))
        gyc = np.abs(self.g0y.eval_grid(cxg, cyg))
        rad = (gxc + gyc) * (0.5 * h) + 0.5 * self._hess_bound * (0.5 * h) ** 2
        rad += 1e-12 * float(np.abs(g0n).max()) + 1e-300
        # cells fully outside the closed ball get discarded
        ndx = np.maximum(np.abs(cxg - px) - 0.5 * h, 0.0)
        ndy = np.maximum(np.abs(cyg - py) - 0.5 * h, 0.0)
        keep = ndx * ndx + ndy * ndy <= d * d
        lv = {"xs": xs, "ys": ys, "g0n": g0n, "g0c": g0c, "rad": rad, "keep": keep, "h": h}
        self._levels[n] = lv
        return lv


# case -> list of segments, each segment a pair of local edge names;
# corner bit 1 = (i, j), 2 = (i+1, j), 4 = (i+1, j+1), 8 = (i, j+1)
_SEGMENTS = {
    1: (("left", "bottom"),),
    2: (("bottom", "right"),),
    3: (("left", "right"),),
    4: (("right", "top"),),
    6: (("bottom", "top"),),
    7: (("left", "top"),),
    8: (("top", "left"),),
    9: (("bottom", "top"),),
    11: (("right", "top"),),
    12: (("left", "right"),),
    13: (("bottom", "right"),),
    14: (("left", "bottom"),),
}
_SADDLE = {
    # center negative / center nonnegative
    5: ((("bottom", "right"), ("top", "left")), (("left", "bottom"), ("right", "top"))),
    10: ((("left", "bottom"), ("right", "top")), (("bottom", "right"), ("top", "left"))),
}


def _edge_key(name: str, i: int, j: int):
    if name == "bottom":
        return ("h", i, j)
    if name == "top":
        return ("h", i, j + 1)
    if name == "left":
        return ("v", i, j)
    return ("v", i + 1, j)


def _march(ws: _Workspace, eta: float, n: int):
    """One marching-squares pass; returns (chains, unresolved_count).

    chains: list of (vertex array, closed flag), unclipped.
    """
    lv = ws.level(n)
    g = lv["g0n"] - eta * eta
    neg = g < 0.0
    case = (
        neg[:-1, :-1].astype(np.int8)
        + 2 * neg[1:, :-1]
        + 4 * neg[1:, 1:]
        + 8 * neg[:-1, 1:]
    )
    keep = lv["keep"]
    crossing = (case != 0) & (case != 15) & keep
    uniform = ((case == 0) | (case == 15)) & keep

    # a uniform cell not next to any crossed cell, whose Taylor enclosure of g
    # straddles zero, may hide a component below grid resolution
    adj = crossing.copy()
    adj[1:, :] |= crossing[:-1, :]
    adj[:-1, :] |= crossing[1:, :]
    adj[:, 1:] |= crossing[:, :-1]
    adj[:, :-1] |= crossing[:, 1:]
    adj[1:, 1:] |= crossing[:-1, :-1]
    adj[1:, :-1] |= crossing[:-1, 1:]
    adj[:-1, 1:] |= crossing[1:, :-1]
    adj[:-1, :-1] |= crossing[1:, 1:]
    gc = lv["g0c"] - eta * eta
    unresolved = int((uniform & ~adj & (np.abs(gc) <= lv["rad"])).sum())

    xs, ys = lv["xs"], lv["ys"]
    verts: dict[tuple, tuple[float, float]] = {}

    def vertex(key) -> tuple[float, float]:
        pt = verts.get(key)
        if pt is not None:
            return pt
        kind, i, j = key
        if kind == "h":
            ga, gb = g[i, j], g[i + 1, j]
            t = ga / (ga - gb)
            pt = (xs[i] + t * (xs[i + 1] - xs[i]), ys[j])
        else:
            ga, gb = g[i, j], g[i, j + 1]
            t = ga / (ga - gb)
            pt = (xs[i], ys[j] + t * (ys[j + 1] - ys[j]))
        verts[key] = pt
        return pt

    adjacency: dict[tuple, list[tuple]] = {}
    seg_set = set()
    for i, j in np.argwhere(crossing):
        c = int(case[i, j])
        if c in _SADDLE:
            segs = _SADDLE[c][0] if gc[i, j] < 0.0 else _SADDLE[c][1]
        else:
            segs = _SEGMENTS[c]
        for e1, e2 in segs:
            k1 = _edge_key(e1, int(i), int(j))
            k2 = _edge_key(e2, int(i), int(j))
            if k1 == k2:
                continue
            seg = (k1, k2) if k1 < k2 else (k2, k1)
            if seg in seg_set:
                continue
            seg_set.add(seg)
            adjacency.setdefault(k1, []).append(k2)
            adjacency.setdefault(k2, []).append(k1)

    chains = []
    used = set()

    def walk(start, first):
        keys = [start, first]
        used.add((start, first) if start < first else (first, start))
        prev, cur = start, first
        while True:
            nxts = [k for k in adjacency[cur] if k != prev and
                    ((cur, k) if cur < k else (k, cur)) not in used]
            if not nxts:
                return keys, cur == start
            nxt = min(nxts)
            used.add((cur, nxt) if cur < nxt else (nxt, cur))
            keys.append(nxt)
            if nxt == start:
                return keys, True
            prev, cur = cur, nxt

    for start in sorted(k for k, nb in adjacency.items() if len(nb) == 1):
        for first in sorted(adjacency[start]):
            seg = (start, first) if start < first else (first, start)
            if seg in used:
                continue
            keys, closed = walk(start, first)
            chains.append((keys, closed))
    for start in sorted(adjacency):
        for first in sorted(adjacency[start]):
            seg = (start, first) if start < first else (first, start)
            if seg in used:
                continue
            keys, closed = walk(start, first)
            chains.append((keys, closed))

    out = []
    for keys, closed in chains:
        pts = np.array([vertex(k) for k in keys])
        if closed and (keys[0] != keys[-1]):
            pts = np.vstack([pts, pts[:1]])
        out.append((pts, closed))
    return out, unresolved


def _snap_chain(ws: _Workspace, eta: float, pts: np.ndarray, h: float) -> np.ndarray:
    """Project marching vertices onto {g0 = eta^2} by damped Newton steps.

    Edge interpolation is only first order in the cell size, which is too
    sloppy for components spanning a few cells; two or three gradient-flow
    corrections push the residual to roundoff. Steps are capped at 0.6 h so
    a near-critical gradient cannot throw a vertex far from its cell.
    """
    x = pts[:, 0].copy()
    y = pts[:, 1].copy()
    cg = ws.g0.coeff_matrix()
    cgx = ws.g0x.coeff_matrix()
    cgy = ws.g0y.coeff_matrix()
    lvl = eta * eta
    cap = 0.6 * h
    for _ in range(3):
        g = _polyval2d(x, y, cg) - lvl
        gx = _polyval2d(x, y, cgx)
        gy = _polyval2d(x, y, cgy)
        n2 = gx * gx + gy * gy
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(n2 > 0.0, g / np.maximum(n2, 1e-300), 0.0)
        dx = -step * gx
        dy = -step * gy
        d = np.hypot(dx, dy)
        scale = np.where(d > cap, cap / np.maximum(d, 1e-300), 1.0)
        x = x + dx * scale
        y = y + dy * scale
    return np.column_stack([x, y])


def _circle_cut(a, b, center, delta):
    """Parameter t in [0, 1] where segment a->b crosses the circle."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - center[0], a[1] - center[1]
    aa = dx * dx + dy * dy
    if aa == 0.0:
        return 0.0
    bb = 2.0 * (dx * fx + dy * fy)
    cc = fx * fx + fy * fy - delta * delta
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0.0:
        disc = 0.0
    root = math.sqrt(disc)
    t1 = (-bb - root) / (2.0 * aa)
    t2 = (-bb + root) / (2.0 * aa)
    if 0.0 <= t1 <= 1.0:
        return t1
    return min(max(t2, 0.0), 1.0)


def _clip_chain(pts: np.ndarray, closed: bool, center, delta):
    """Portions of a chain inside the closed ball; exits become sphere arcs."""
    r2 = (pts[:, 0] - center[0]) ** 2 + (pts[:, 1] - center[1]) ** 2
    inside = r2 <= delta * delta * (1.0 + 1e-12)
    if inside.all():
        return [(pts, closed)]
    if not inside.any():
        return []
    if closed:
        # open the loop at an outside vertex and scan linearly
        k = int(np.argmax(~inside))
        pts = np.vstack([pts[k:], pts[1 : k + 1]])
        r2 = (pts[:, 0] - center[0]) ** 2 + (pts[:, 1] - center[1]) ** 2
        inside = r2 <= delta * delta * (1.0 + 1e-12)
    pieces = []
    cur: list = []
    for n in range(len(pts)):
        if inside[n]:
            if not cur and n > 0:
                t = _circle_cut(pts[n], pts[n - 1], center, delta)
                cut = pts[n] + t * (pts[n - 1] - pts[n])
                cur.append(tuple(cut))
            cur.append(tuple(pts[n]))
        else:
            if cur:
                t = _circle_cut(pts[n - 1], pts[n], center, delta)
                cut = pts[n - 1] + t * (pts[n] - pts[n - 1])
                cur.append(tuple(cut))
                pieces.append(cur)
                cur = []
    if cur:
        pieces.append(cur)
    return [(np.array(p), False) for p in pieces if len(p) >= 3]


def _extract_once(ws: _Workspace, eta: float, n: int):
    chains, unresolved = _march(ws, eta, n)
    h = ws.level(n)["h"]
    comps = []
    for pts, closed in chains:
        pts = _snap_chain(ws, eta, pts, h)
        for cpts, cclosed in _clip_chain(pts, closed, ws.location, ws.delta):
            if len(cpts) < 3:
                continue
            comps.append(
                Component(
                    vertices=tuple((float(x), float(y)) for x, y in cpts),
                    closed=cclosed,
                    arc_endpoints_on_sphere=not cclosed,
                )
            )
    comps.sort(key=lambda c: (min(p[0] for p in c.vertices), min(p[1] for p in c.vertices)))
    return comps, unresolved


def _check_tangency(comps, ws: _Workspace, n: int, cfg: FiberConfig):
    cx, cy = ws.location
    d = ws.delta
    cell = 2.0 * d / n
    for c in comps:
        arr = c.as_array()
        rmax = float(np.hypot(arr[:, 0] - cx, arr[:, 1] - cy).max())
        if c.closed and rmax >= d * (1.0 - cfg.tangency_tol):
            raise EtaTooLarge(
                f"closed fiber component reaches radius {rmax:.9g} of ball {d:.9g}"
            )
        if not c.closed:
            e1 = np.array(c.vertices[0])
            e2 = np.array(c.vertices[-1])
            if np.hypot(*(e1 - e2)) < cell and len(c.vertices) <= 4:
                raise EtaTooLarge("fiber grazes the ball boundary within one cell")


def extract_fiber(
    v: VectorField,
    location: tuple[float, float],
    delta: float,
    eta: float,
    cfg: FiberConfig = FiberConfig(),
    grid: int | None = None,
    _ws: _Workspace | None = None,
) -> FiberCurve:
    """Marching-squares extraction of the fiber curve at one eta level.

    Doubles the grid while unresolved cells remain or the topology keeps
    changing, up to cfg.max_grid; raises GridTooCoarse when the cap is hit
    with the topology still moving.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    ws = _ws if _ws is not None else _Workspace(v, location, delta)
    n = int(grid) if grid is not None else cfg.grid
    if n < 64:
        raise ValueError("grid must be at least 64")
    prev_topo = None
    while True:
        comps, unresolved = _extract_once(ws, eta, n)
        topo = (sum(c.closed for c in comps), sum(not c.closed for c in comps))
        can_refine = 2 * n <= cfg.max_grid
        settled = prev_topo is None or topo == prev_topo
        if unresolved == 0 and settled:
            break
        if not can_refine:
            if settled:
                break
            raise GridTooCoarse(
                f"topology changed from {prev_topo} to {topo} at the {cfg.max_grid} grid cap"
            )
        prev_topo = topo
        n *= 2
    _check_tangency(comps, ws, n, cfg)
    return FiberCurve(components=tuple(comps), eta=float(eta), delta=float(ws.delta),
                      grid_resolution=n)


def betti(fiber: FiberCurve) -> tuple[int, int]:
    """(number of components, number of closed components)."""
    return len(fiber.components), fiber.closed_count


def submersion_check(
    v: VectorField,
    location: tuple[float, float],
    delta: float,
    eta_lo: float,
    eta_hi: float,
    cfg: FiberConfig = FiberConfig(),
    _ws: _Workspace | None = None,
):
    """Does the first field component have a nonvanishing gradient on the
    eta annulus inside the ball?  Returns (ok, witness_or_None)."""
    ws = _ws if _ws is not None else _Workspace(v, location, delta)
    lv = ws.level(cfg.grid)
    xs, ys = lv["xs"], lv["ys"]
    xn, yn = np.meshgrid(xs, ys, indexing="ij")
    px, py = ws.location
    in_ball = (xn - px) ** 2 + (yn - py) ** 2 <= delta * delta
    g0n = lv["g0n"]
    mask = in_ball & (g0n >= eta_lo * eta_lo) & (g0n <= eta_hi * eta_hi)
    if not mask.any():
        return True, None
    gpx = v.p.partial(0).eval_grid(xn, yn)
    gpy = v.p.partial(1).eval_grid(xn, yn)
    grad = np.hypot(gpx, gpy)
    bad = mask & (grad <= cfg.submersion_tol)
    if not bad.any():
        return True, None
    i, j = np.argwhere(bad)[0]
    return False, (float(xs[i]), float(ys[j]))


def vanishing_cycle_count(
    v: VectorField,
    point_id: int,
    location: tuple[float, float],
    other_locations=(),
    cfg: FiberConfig = FiberConfig(),
) -> MilnorData:
    """Sweep the eta range for one zero and read off the stabilized loop count.

    Individual level failures are recorded as None and do not abort the
    sweep; stability requires the final cfg.stable_tail levels (the small-eta
    end) to agree exactly.
    """
    delta, sweep = select_radii(v, location, other_locations, cfg)
    ws = _Workspace(v, location, delta)
    counts: list[tuple[int, int] | None] = []
    for eta in sweep:
        try:
            fiber = extract_fiber(v, location, delta, eta, cfg, _ws=ws)
            counts.append((fiber.closed_count, fiber.arc_count))
        except FiberError:
            counts.append(None)
    tail = counts[-cfg.stable_tail:]
    stable = len(tail) == cfg.stable_tail and all(c is not None for c in tail) and \
        len({c[0] for c in tail}) == 1
    if stable:
        l = tail[-1][0]
    else:
        l = next((c[0] for c in reversed(counts) if c is not None), 0)
    ok, witness = submersion_check(v, location, delta, min(sweep), max(sweep), cfg, _ws=ws)
    return MilnorData(
        point_id=point_id,
        delta=float(delta),
        eta_sweep=tuple(float(e) for e in sweep),
        counts_per_eta=tuple(counts),
        l=int(l),
        stable=bool(stable),
        submersion_ok=bool(ok),
        witness=witness,
    )


__all__ = [
    "Component",
    "DeltaCollapse",
    "EtaTooLarge",
    "FiberConfig",
    "FiberCurve",
    "FiberError",
    "GridTooCoarse",
    "MilnorData",
    "betti",
    "extract_fiber",
    "select_radii",
    "submersion_check",
    "vanishing_cycle_count",
]
