#!/usr/bin/env python3
"""Write a Cessna-172-class triangle mesh (OBJ, feet, x forward, y right, z down).

The geometry is a simple high-wing single: lofted fuselage, wing, struts,
tail surfaces, gear and propeller. Each axis is then scaled so the frontal,
side and plan silhouettes match the reference areas given on the command
line (defaults 110, 118 and 430 ft^2).
"""

import argparse
import math

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union


class Mesh:
    def __init__(self):
        self.v = []
        self.f = []

    def add(self, verts, faces):
        base = len(self.v)
        self.v.extend(verts)
        self.f.extend([(a + base, b + base, c + base) for a, b, c in faces])

    def box(self, x0, x1, y0, y1, z0, z1):
        verts = [(x, y, z) for x in (x0, x1) for y in (y0, y1) for z in (z0, z1)]
        quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
        faces = []
        for a, b, c, d in quads:
            faces += [(a, b, c), (a, c, d)]
        self.add(verts, faces)

    def beam(self, p, q, w):
        """Square-section strut from p to q with half-width w."""
        p, q = np.asarray(p, float), np.asarray(q, float)
        d = q - p
        d /= np.linalg.norm(d)
        helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        u = np.cross(d, helper)
        u /= np.linalg.norm(u)
        v = np.cross(d, u)
        ring = [u * w + v * w, -u * w + v * w, -u * w - v * w, u * w - v * w]
        verts = [tuple(p + r) for r in ring] + [tuple(q + r) for r in ring]
        faces = []
        for i in range(4):
            j = (i + 1) % 4
            faces += [(i, j, 4 + j), (i, 4 + j, 4 + i)]
        faces += [(0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7)]
        self.add(verts, faces)

    def loft(self, stations, segments=16):
        """Closed body through elliptical stations (x, half_width, half_height, z_centre)."""
        verts, faces = [], []
        for x, hw, hh, zc in stations:
            for k in range(segments):
                a = 2.0 * math.pi * k / segments
                verts.append((x, hw * math.cos(a), zc + hh * math.sin(a)))
        n = len(stations)
        for s in range(n - 1):
            for k in range(segments):
                a = s * segments + k
                b = s * segments + (k + 1) % segments
                faces += [(a, b, b + segments), (a, b + segments, a + segments)]
        for end, flip in ((0, True), (n - 1, False)):
            centre = len(verts)
            x, _, _, zc = stations[end]
            verts.append((x, 0.0, zc))
            for k in range(segments):
                a = end * segments + k
                b = end * segments + (k + 1) % segments
                faces.append((centre, b, a) if flip else (centre, a, b))
        self.add(verts, faces)


def build():
    m = Mesh()
    # Fuselage, nose at +13 ft, tail at -14 ft.
    m.loft([
        (13.0, 0.6, 0.6, 0.0),
        (12.0, 1.5, 1.6, 0.0),
        (9.5, 1.9, 2.0, -0.2),
        (6.0, 2.0, 2.4, -0.4),
        (2.0, 2.0, 2.4, -0.4),
        (-2.0, 1.6, 1.9, -0.6),
        (-7.0, 1.0, 1.2, -0.9),
        (-12.0, 0.5, 0.7, -1.1),
        (-14.0, 0.3, 0.5, -1.2),
    ])
    # High wing.
    m.box(2.0, 7.3, -18.0, 18.0, -3.1, -2.6)
    # Struts.
    for side in (-1.0, 1.0):
        m.beam((4.5, side * 1.8, 1.6), (4.8, side * 8.5, -2.6), 0.15)
    # Horizontal stabilizer and elevator.
    m.box(-14.0, -10.5, -5.7, 5.7, -1.3, -1.0)
    # Vertical fin and rudder.
    m.add([(-10.5, -0.15, -1.5), (-14.3, -0.15, -1.5), (-14.3, -0.15, -6.5), (-12.8, -0.15, -6.5),
           (-10.5, 0.15, -1.5), (-14.3, 0.15, -1.5), (-14.3, 0.15, -6.5), (-12.8, 0.15, -6.5)],
          [(0, 1, 2), (0, 2, 3), (4, 6, 5), (4, 7, 6), (0, 4, 5), (0, 5, 1), (1, 5, 6), (1, 6, 2),
           (2, 6, 7), (2, 7, 3), (3, 7, 4), (3, 4, 0)])
    # Main gear legs and wheels.
    for side in (-1.0, 1.0):
        m.beam((3.0, side * 1.5, 2.0), (3.0, side * 3.8, 3.6), 0.12)
        m.box(2.3, 3.7, side * 3.8 - 0.3, side * 3.8 + 0.3, 3.3, 4.5)
    # Nose gear and wheel.
    m.beam((11.0, 0.0, 1.8), (11.3, 0.0, 3.6), 0.12)
    m.box(10.7, 11.9, -0.25, 0.25, 3.4, 4.4)
    # Two-blade propeller.
    m.box(13.1, 13.3, -0.3, 0.3, -3.2, 3.2)
    return m


def silhouette(m, axis):
    keep = [i for i in range(3) if i != axis]
    v = np.asarray(m.v)[:, keep]
    polys = []
    for a, b, c in m.f:
        p = Polygon([v[a], v[b], v[c]])
        if p.area > 1e-12:
            polys.append(p)
    return unary_union(polys).area


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("output")
    ap.add_argument("--front", type=float, default=110.0)
    ap.add_argument("--side", type=float, default=118.0)
    ap.add_argument("--top", type=float, default=430.0)
    args = ap.parse_args()

    m = build()
    f0, s0, t0 = silhouette(m, 0), silhouette(m, 1), silhouette(m, 2)
    # front ~ sy*sz, side ~ sx*sz, top ~ sx*sy
    kf, ks, kt = args.front / f0, args.side / s0, args.top / t0
    sx = math.sqrt(ks * kt / kf)
    sy = math.sqrt(kf * kt / ks)
    sz = math.sqrt(kf * ks / kt)
    m.v = [(x * sx, y * sy, z * sz) for x, y, z in m.v]
    print(f"scale x {sx:.4f} y {sy:.4f} z {sz:.4f}; areas front {silhouette(m, 0):.1f} "
          f"side {silhouette(m, 1):.1f} top {silhouette(m, 2):.1f}")

    with open(args.output, "w") as out:
        out.write("# Cessna-172-class airframe, feet, x forward y right z down\n")
        for x, y, z in m.v:
            out.write(f"v {x:.6f} {y:.6f} {z:.6f}\n")
        for a, b, c in m.f:
            out.write(f"f {a + 1} {b + 1} {c + 1}\n")


if __name__ == "__main__":
    main()
