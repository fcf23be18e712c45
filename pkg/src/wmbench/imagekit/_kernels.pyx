# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pixel kernels: reflect-padded 2-D convolution and bilinear
rotation. Semantics mirror _reference.py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, floor

cnp.import_array()

BACKEND_NAME = "compiled"


def conv2d_reflect(cnp.ndarray plane, cnp.ndarray kernel):
    cdef Py_ssize_t kh = kernel.shape[0]
    cdef Py_ssize_t kw = kernel.shape[1]
    padded_obj = np.pad(np.asarray(plane, dtype=np.float64),
                        ((kh // 2, (kh - 1) // 2), (kw // 2, (kw - 1) // 2)),
                        mode="reflect")
    cdef double[:, ::1] padded = np.ascontiguousarray(padded_obj)
    cdef double[:, ::1] kern = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = padded.shape[0] - kh + 1
    cdef Py_ssize_t w = padded.shape[1] - kw + 1
    out_obj = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_obj
    cdef Py_ssize_t i, j, u, v
    cdef double acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for u in range(kh):
                for v in range(kw):
                    acc += kern[u, v] * padded[i + kh - 1 - u, j + kw - 1 - v]
            out[i, j] = acc
    return out_obj


def rotate_bilinear(cnp.ndarray image, double degrees):
    cdef double[:, :, ::1] img = np.ascontiguousarray(image, dtype=np.float64)
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t c = img.shape[2]
    cdef double theta = degrees * (3.141592653589793 / 180.0)
    cdef double cos_t = cos(theta)
    cdef double sin_t = sin(theta)
    cdef double cy = (h - 1) / 2.0
    cdef double cx = (w - 1) / 2.0
    out_obj = np.zeros((h, w, c), dtype=np.float64)
    cdef double[:, :, ::1] out = out_obj
    cdef Py_ssize_t i, j, k, x0, y0
    cdef double dx, dy, src_x, src_y, fx, fy, w00, w01, w10, w11, acc
    for i in range(h):
        for j in range(w):
            dx = j - cx
            dy = i - cy
            src_x = cos_t * dx - sin_t * dy + cx
            src_y = sin_t * dx + cos_t * dy + cy
            x0 = <Py_ssize_t>floor(src_x)
            y0 = <Py_ssize_t>floor(src_y)
            fx = src_x - x0
            fy = src_y - y0
            w00 = (1 - fy) * (1 - fx)
            w01 = (1 - fy) * fx
            w10 = fy * (1 - fx)
            w11 = fy * fx
            for k in range(c):
                acc = 0.0
                if 0 <= y0 < h and 0 <= x0 < w:
                    acc += w00 * img[y0, x0, k]
                if 0 <= y0 < h and 0 <= x0 + 1 < w:
                    acc += w01 * img[y0, x0 + 1, k]
                if 0 <= y0 + 1 < h and 0 <= x0 < w:
                    acc += w10 * img[y0 + 1, x0, k]
                if 0 <= y0 + 1 < h and 0 <= x0 + 1 < w:
                    acc += w11 * img[y0 + 1, x0 + 1, k]
                out[i, j, k] = acc
    return out_obj
