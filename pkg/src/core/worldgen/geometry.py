import numpy as np

_CHUNK = 8192
_PARALLEL_EPS = 1e-12


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def ccw_vertices(vertices: np.ndarray) -> np.ndarray:
    """Return the polygon with counter-clockwise vertex order."""
    area2 = np.sum(_cross(vertices, np.roll(vertices, -1, axis=0)))
    return vertices if area2 > 0 else vertices[::-1].copy()


def is_convex(vertices: np.ndarray) -> bool:
    edges = np.roll(vertices, -1, axis=0) - vertices
    turns = _cross(edges, np.roll(edges, -1, axis=0))
    return bool(np.all(turns > 0) or np.all(turns < 0))


class CollisionGeometry:
    """Flat numpy view of everything an agent can hit.

    Holds line segments (walls, room bounds, polygon edges), discs (circular
    obstacles and goal objects) and convex polygons (for inside tests).
    Instances are read-only once constructed.
    """

    def __init__(
        self,
        segments: np.ndarray,
        discs: np.ndarray,
        polygons: list[np.ndarray],
    ):
        self.seg_a = np.ascontiguousarray(segments[:, 0, :], dtype=np.float64)
        self.seg_b = np.ascontiguousarray(segments[:, 1, :], dtype=np.float64)
        self.disc_c = np.ascontiguousarray(discs[:, :2], dtype=np.float64)
        self.disc_r = np.ascontiguousarray(discs[:, 2], dtype=np.float64)
        self.polygons = [np.asarray(p, dtype=np.float64) for p in polygons]
        self._seg_e = self.seg_b - self.seg_a
        self._seg_len2 = np.einsum("ij,ij->i", self._seg_e, self._seg_e)

    @property
    def num_segments(self) -> int:
        return self.seg_a.shape[0]

    @property
    def num_discs(self) -> int:
        return self.disc_c.shape[0]

    def clearance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the nearest boundary; 0 inside solids."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        out = np.empty(points.shape[0], dtype=np.float64)
        for start in range(0, points.shape[0], _CHUNK):
            out[start : start + _CHUNK] = self._clearance_chunk(
                points[start : start + _CHUNK]
            )
        return out

    def _clearance_chunk(self, p: np.ndarray) -> np.ndarray:
        best = np.full(p.shape[0], np.inf)
        if self.num_segments:
            ap = p[:, None, :] - self.seg_a[None, :, :]
            t = np.einsum("pmk,mk->pm", ap, self._seg_e) / np.maximum(
                self._seg_len2, _PARALLEL_EPS
            )
            t = np.clip(t, 0.0, 1.0)
            closest = self.seg_a[None, :, :] + t[..., None] * self._seg_e[None, :, :]
            dist = np.hypot(p[:, None, 0] - closest[..., 0], p[:, None, 1] - closest[..., 1])
            best = np.minimum(best, dist.min(axis=1))
        if self.num_discs:
            centre_dist = np.hypot(
                p[:, None, 0] - self.disc_c[None, :, 0],
                p[:, None, 1] - self.disc_c[None, :, 1],
            )
            best = np.minimum(best, np.maximum(centre_dist - self.disc_r, 0.0).min(axis=1))
        for polygon in self.polygons:
            best[self._inside_polygon(p, polygon)] = 0.0
        return best

    @staticmethod
    def _inside_polygon(p: np.ndarray, polygon: np.ndarray) -> np.ndarray:
        edges = np.roll(polygon, -1, axis=0) - polygon
        rel = p[:, None, :] - polygon[None, :, :]
        return np.all(_cross(edges[None, :, :], rel) >= 0.0, axis=1)

    def cast_rays(self, origin: np.ndarray, angles: np.ndarray) -> np.ndarray:
        """Distance along each ray to its first hit; ``inf`` when nothing is hit."""
        origin = np.asarray(origin, dtype=np.float64)
        angles = np.atleast_1d(np.asarray(angles, dtype=np.float64))
        u = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        best = np.full(angles.shape[0], np.inf)

        if self.num_segments:
            denom = _cross(u[:, None, :], self._seg_e[None, :, :])
            ao = self.seg_a - origin
            safe = np.where(np.abs(denom) > _PARALLEL_EPS, denom, 1.0)
            s = _cross(ao[None, :, :], self._seg_e[None, :, :]) / safe
            v = _cross(ao[None, :, :], u[:, None, :]) / safe
            hit = (np.abs(denom) > _PARALLEL_EPS) & (s >= 0.0) & (v >= 0.0) & (v <= 1.0)
            best = np.minimum(best, np.where(hit, s, np.inf).min(axis=1))

        if self.num_discs:
            oc = origin - self.disc_c
            b = u @ oc.T
            c = np.einsum("dk,dk->d", oc, oc) - self.disc_r**2
            disc = b**2 - c[None, :]
            root = -b - np.sqrt(np.maximum(disc, 0.0))
            hit = (disc >= 0.0) & (root >= 0.0)
            dist = np.where(hit, root, np.inf)
            dist = np.where(c[None, :] <= 0.0, 0.0, dist)
            best = np.minimum(best, dist.min(axis=1))
        return best

    def sweep(self, start: np.ndarray, end: np.ndarray, radius: float) -> float | None:
        """Earliest fraction of the move start -> end at which a disc of
        ``radius`` touches the geometry, or None if the move is clear."""
        start = np.asarray(start, dtype=np.float64)
        end = np.asarray(end, dtype=np.float64)
        if self.clearance(start[None, :])[0] < radius:
            return 0.0
        d = end - start
        a = float(d @ d)
        if a == 0.0:
            return None
        candidates: list[float] = []

        # Round contacts: segment endpoints (radius r) and discs (radius R + r).
        centres = [self.seg_a, self.seg_b, self.disc_c]
        radii = [
            np.full(self.num_segments, radius),
            np.full(self.num_segments, radius),
            self.disc_r + radius,
        ]
        for c, rho in zip(centres, radii):
            if c.shape[0] == 0:
                continue
            f = start - c
            b = 2.0 * (f @ d)
            cc = np.einsum("dk,dk->d", f, f) - rho**2
            disc = b**2 - 4.0 * a * cc
            ok = disc >= 0.0
            t = (-b - np.sqrt(np.maximum(disc, 0.0))) / (2.0 * a)
            ok &= (t >= 0.0) & (t <= 1.0)
            if np.any(ok):
                candidates.append(float(t[ok].min()))

        # Flat contacts against segment interiors.
        if self.num_segments:
            length = np.sqrt(np.maximum(self._seg_len2, _PARALLEL_EPS))
            normal = np.stack([-self._seg_e[:, 1], self._seg_e[:, 0]], axis=1) / length[:, None]
            s0 = np.einsum("mk,mk->m", start - self.seg_a, normal)
            sd = normal @ d
            side = np.sign(s0)
            approaching = (side * sd < 0.0) & (np.abs(sd) > _PARALLEL_EPS)
            safe_sd = np.where(approaching, sd, 1.0)
            t = (side * radius - s0) / safe_sd
            at = start[None, :] + t[:, None] * d[None, :]
            u = np.einsum("mk,mk->m", at - self.seg_a, self._seg_e) / np.maximum(
                self._seg_len2, _PARALLEL_EPS
            )
            ok = approaching & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
            if np.any(ok):
                candidates.append(float(t[ok].min()))

        return min(candidates) if candidates else None
