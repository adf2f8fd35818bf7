"""numpy implementation of the shot-noise accumulation, used when the compiled
extension is unavailable."""

import numpy as np


def accumulate(points, xi, radius2, weight, out, start, stop):
    pts = points[start:stop]
    n_jumps, dim = xi.shape
    dist2 = np.square(pts[:, :1] - xi[:, 0])
    for a in range(1, dim):
        dist2 = dist2 + np.square(pts[:, a : a + 1] - xi[:, a])
    acc = np.zeros((stop - start, radius2.shape[0]))
    for k in range(n_jumps):
        mask = dist2[:, k : k + 1] <= radius2[:, k]
        np.add(acc, weight[:, k], out=acc, where=mask)
    out[start:stop] = acc
