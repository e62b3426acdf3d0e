# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the truncated Cauchy-type area sum.

Computes, for every target t_i and density row k,

    out[k, i] = sum_{j : |t_i - s_j| >= radius} q[k, j] / (t_i - s_j)

where q already carries the quadrature weights and the 1/pi factor.
Each target is summed in node order, so results do not depend on how
targets are batched.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def cauchy_sum(const double[::1] t_re, const double[::1] t_im,
               const double[::1] s_re, const double[::1] s_im,
               q_re_in, q_im_in, double radius):
    cdef Py_ssize_t m = t_re.shape[0]
    cdef Py_ssize_t n = s_re.shape[0]
    # node-major copies keep the innermost loop contiguous
    cdef const double[:, ::1] q_re = np.ascontiguousarray(np.asarray(q_re_in).T)
    cdef const double[:, ::1] q_im = np.ascontiguousarray(np.asarray(q_im_in).T)
    cdef Py_ssize_t nk = q_re.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double r2 = radius * radius
    cdef double dx, dy, d2, ix, iy, inv

    out_re_arr = np.zeros((m, nk), dtype=np.float64)
    out_im_arr = np.zeros((m, nk), dtype=np.float64)
    cdef double[:, ::1] out_re = out_re_arr
    cdef double[:, ::1] out_im = out_im_arr
    cdef double *acc_re = <double *> malloc(nk * sizeof(double))
    cdef double *acc_im = <double *> malloc(nk * sizeof(double))
    if acc_re == NULL or acc_im == NULL:
        free(acc_re)
        free(acc_im)
        raise MemoryError()

    try:
        with nogil:
            for i in range(m):
                for k in range(nk):
                    acc_re[k] = 0.0
                    acc_im[k] = 0.0
                for j in range(n):
                    dx = t_re[i] - s_re[j]
                    dy = t_im[i] - s_im[j]
                    d2 = dx * dx + dy * dy
                    if d2 < r2 or d2 == 0.0:
                        continue
                    # 1/(dx + i dy) = (dx - i dy) / d2
                    inv = 1.0 / d2
                    ix = dx * inv
                    iy = -dy * inv
                    for k in range(nk):
                        acc_re[k] += q_re[j, k] * ix - q_im[j, k] * iy
                        acc_im[k] += q_re[j, k] * iy + q_im[j, k] * ix
                for k in range(nk):
                    out_re[i, k] = acc_re[k]
                    out_im[i, k] = acc_im[k]
    finally:
        free(acc_re)
        free(acc_im)
    return out_re_arr.T.copy(), out_im_arr.T.copy()
