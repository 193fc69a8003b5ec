"""Independent reference routes used by the test suite.

Everything here deliberately avoids the library's own counting, chaining,
and refinement code paths: polynomial values come straight from the term
dictionaries, fiber counts from a sign-grid flood fill, periods from scipy,
distances from dense resampling.
"""

import math
from fractions import Fraction

import numpy as np
import scipy.integrate
import scipy.ndimage

from cyclebound.polyalg import Poly2, VectorField


def eval_terms(poly: Poly2, x, y):
    """Evaluate a polynomial straight off its term dict (no Horner, no cache)."""
    out = np.zeros_like(np.asarray(x, dtype=float))
    for (i, j), c in poly.terms.items():
        out = out + float(c) * np.asarray(x, dtype=float) ** i * np.asarray(y) ** j
    return out


class _Labels:
    """Union-find over flood-fill labels, for saddle and boundary merges."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def floodfill_fiber_counts(v: VectorField, location, delta: float, eta: float,
                           n: int) -> tuple[int, int]:
    """(b0, closed_count) of {‖V−V(p)‖ = eta} ∩ B_delta from a sign grid.

    Counts 4-connected sign regions of g − eta² on the (n+1)² node grid
    restricted to the closed disk, merging across saddle cells by the sign
    of g at the cell center (the same geometric convention the extraction
    uses, reached by a completely different algorithm). With R regions of
    which Rb touch the disk boundary, the level curve has R − 1 components
    and R − Rb closed ones: each component, closed or arc, splits exactly
    one region in two, and every region except the Rb outer ones has a
    closed component as its outer boundary.
    """
    px, py = float(location[0]), float(location[1])
    xs = np.linspace(px - delta, px + delta, n + 1)
    ys = np.linspace(py - delta, py + delta, n + 1)
    xn, yn = np.meshgrid(xs, ys, indexing="ij")
    p0 = eval_terms(v.p, px, py)
    q0 = eval_terms(v.q, px, py)
    g = (eval_terms(v.p, xn, yn) - p0) ** 2 + (eval_terms(v.q, xn, yn) - q0) ** 2
    disk = (xn - px) ** 2 + (yn - py) ** 2 <= delta * delta
    neg = (g < eta * eta) & disk
    pos = (~(g < eta * eta)) & disk

    four = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    lab_n, k_n = scipy.ndimage.label(neg, structure=four)
    lab_p, k_p = scipy.ndimage.label(pos, structure=four)
    # one flat labelling: negatives 1..k_n, positives k_n+1..k_n+k_p
    lab = lab_n + np.where(lab_p > 0, lab_p + k_n, 0)
    uf = _Labels(k_n + k_p + 1)

    # saddle cells: equal-sign diagonals of opposite sign; connect the
    # diagonal that matches the center sign
    s00 = neg[:-1, :-1]
    s10 = neg[1:, :-1]
    s11 = neg[1:, 1:]
    s01 = neg[:-1, 1:]
    cell_in = disk[:-1, :-1] & disk[1:, :-1] & disk[1:, 1:] & disk[:-1, 1:]
    saddle = (s00 == s11) & (s10 == s01) & (s00 != s10) & cell_in
    if saddle.any():
        cx = 0.5 * (xs[:-1] + xs[1:])
        cy = 0.5 * (ys[:-1] + ys[1:])
        cxg, cyg = np.meshgrid(cx, cy, indexing="ij")
        gc = (eval_terms(v.p, cxg, cyg) - p0) ** 2 + \
            (eval_terms(v.q, cxg, cyg) - q0) ** 2
        cneg = gc < eta * eta
        for i, j in np.argwhere(saddle):
            if cneg[i, j] == s00[i, j]:
                uf.union(int(lab[i, j]), int(lab[i + 1, j + 1]))
            else:
                uf.union(int(lab[i, j + 1]), int(lab[i + 1, j]))

    # regions touching the disk boundary: nodes whose 4-neighborhood leaves
    # the disk mask (including the array edge)
    rim = disk.copy()
    inner = np.zeros_like(disk)
    inner[1:-1, 1:-1] = (disk[:-2, 1:-1] & disk[2:, 1:-1] &
                         disk[1:-1, :-2] & disk[1:-1, 2:])
    rim &= ~inner
    touching = set(int(t) for t in np.unique(lab[rim]) if t > 0)

    roots = {uf.find(t) for t in range(1, k_n + k_p + 1)}
    troots = {uf.find(t) for t in touching}
    r_all = len(roots)
    r_b = len(troots)
    return r_all - 1, r_all - r_b


def random_field(seed: int, degree: int = 4, box=None) -> VectorField:
    """Seeded random polynomial field with exact dyadic coefficients."""
    rng = np.random.default_rng(seed)
    def poly():
        terms = {}
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                terms[(i, j)] = Fraction(float(rng.uniform(-1.0, 1.0)))
        return Poly2(terms)
    p = poly()
    q = poly()
    if box is None:
        return VectorField(p, q, name=f"random-{seed}")
    return VectorField(p, q, name=f"random-{seed}", box=box)


def winding_brute(points: np.ndarray, px: float, py: float,
                  subdiv: int = 32) -> int:
    """Winding number by dense angle summation along the closed polyline."""
    pts = np.asarray(points, dtype=float)
    if not np.allclose(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    a = pts[:-1]
    b = pts[1:]
    t = np.linspace(0.0, 1.0, subdiv + 1)
    dense = (a[:, None, :] * (1.0 - t)[None, :, None] +
             b[:, None, :] * t[None, :, None]).reshape(-1, 2)
    ang = np.arctan2(dense[:, 1] - py, dense[:, 0] - px)
    d = np.diff(ang)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    total = float(d.sum())
    return int(round(total / (2.0 * math.pi)))


def _close_loop(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if not np.allclose(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    return pts


def _densify(pts: np.ndarray, step: float) -> np.ndarray:
    out = []
    for s, e in zip(pts[:-1], pts[1:]):
        seg = math.hypot(e[0] - s[0], e[1] - s[1])
        k = max(1, int(math.ceil(seg / step)))
        t = np.arange(k) / k
        out.append(s[None, :] * (1.0 - t)[:, None] + e[None, :] * t[:, None])
    return np.vstack(out)


def _dist_to_polyline(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Exact point-to-segment distances from each point to the polyline."""
    s = poly[:-1]
    d = poly[1:] - s
    len2 = np.maximum((d * d).sum(axis=1), 1e-300)
    best = np.full(len(pts), np.inf)
    chunk = 4096
    for lo in range(0, len(pts), chunk):
        p = pts[lo:lo + chunk]
        w = p[:, None, :] - s[None, :, :]
        t = np.clip((w * d[None, :, :]).sum(axis=2) / len2[None, :], 0.0, 1.0)
        proj = w - t[:, :, None] * d[None, :, :]
        best[lo:lo + chunk] = np.sqrt((proj ** 2).sum(axis=2).min(axis=1))
    return best


def hausdorff_resampled(a: np.ndarray, b: np.ndarray, step: float) -> float:
    """Symmetric Hausdorff distance between two closed polylines.

    Each curve is densified at the given arc-length step and measured
    against the other curve's segments exactly, so the only sampling
    error left is the variation of the distance field along one step,
    second order in step for smooth curves.
    """
    pa, pb = _close_loop(a), _close_loop(b)
    da = _dist_to_polyline(_densify(pa, step), pb).max()
    db = _dist_to_polyline(_densify(pb, step), pa).max()
    return float(max(da, db))


def circle(radius: float, n: int = 2048, cx: float = 0.0, cy: float = 0.0) -> np.ndarray:
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.column_stack([cx + radius * np.cos(th), cy + radius * np.sin(th)])


def vdp_period_reference(rtol: float = 1e-12) -> float:
    """Van der Pol (mu=1) period from scipy DOP853 at tight tolerance.

    Field orientation matches the corpus file: x' = y, y' = (1−x²)y − x.
    """
    def f(_, s):
        x, y = s
        return [y, (1.0 - x * x) * y - x]

    settle = scipy.integrate.solve_ivp(f, (0.0, 200.0), [2.0, 0.0],
                                       method="DOP853", rtol=rtol, atol=1e-14,
                                       dense_output=False)
    s0 = settle.y[:, -1]

    crossings = []

    def event(_, s):
        return s[1]
    event.direction = -1.0

    sol = scipy.integrate.solve_ivp(f, (0.0, 50.0), s0, method="DOP853",
                                    rtol=rtol, atol=1e-14, events=event)
    for t, s in zip(sol.t_events[0], sol.y_events[0]):
        if s[0] > 1.0:
            crossings.append(t)
    gaps = np.diff(crossings)
    return float(np.median(gaps))


def fd_partial(poly: Poly2, var: int, x: float, y: float, h: float = 1e-6) -> float:
    """Central-difference partial of a polynomial via the term-dict evaluator."""
    if var == 0:
        return float(eval_terms(poly, x + h, y) - eval_terms(poly, x - h, y)) / (2 * h)
    return float(eval_terms(poly, x, y + h) - eval_terms(poly, x, y - h)) / (2 * h)
