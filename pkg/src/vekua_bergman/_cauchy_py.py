"""Pure-numpy fallback for :mod:`vekua_bergman._cauchy`.

Same contract as the compiled ``cauchy_sum``; targets are processed in
fixed-size blocks so peak memory stays bounded.
"""

import numpy as np

BLOCK = 128


def cauchy_sum(t_re, t_im, s_re, s_im, q_re, q_im, radius):
    t = np.asarray(t_re) + 1j * np.asarray(t_im)
    s = np.asarray(s_re) + 1j * np.asarray(s_im)
    q = np.asarray(q_re) + 1j * np.asarray(q_im)
    out = np.zeros((q.shape[0], t.size), dtype=complex)
    r2 = radius * radius
    for start in range(0, t.size, BLOCK):
        d = t[start:start + BLOCK, None] - s[None, :]
        d2 = d.real ** 2 + d.imag ** 2
        keep = (d2 >= r2) & (d2 > 0.0)
        inv = np.zeros_like(d)
        inv[keep] = 1.0 / d[keep]
        out[:, start:start + BLOCK] = q @ inv.T
    return out.real.copy(), out.imag.copy()
