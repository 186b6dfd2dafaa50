# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for documentation."""
from libc.math cimport fabs, sqrt, sin, cos, sinh, cosh, exp, log, copysign, isinf, isnan, M_PI, INFINITY

import numpy as np
cimport numpy as cnp

from .errors import NumericError

cnp.import_array()

cdef double EPS = 1e-16
cdef double FPMIN = 1e-300
cdef double RESCALE = 1e250
cdef long MAXIT = 1000000
cdef double XMIN = 2.0
cdef double XASYM = 30.0
cdef int ASYM_TERMS = 200
cdef int RESYNC = 64

cdef double[26] _RGAM
_RGAM[:] = [
    1.0, 0.5772156649015329, -0.6558780715202538, -0.0420026350340952,
    0.1665386113822915, -0.0421977345555443, -0.0096219715278770,
    0.0072189432466630, -0.0011651675918591, -0.0002152416741149,
    0.0001280502823882, -0.0000201348547807, -0.0000012504934821,
    0.0000011330272320, -0.0000002056338417, 0.0000000061160950,
    0.0000000050020075, -0.0000000011812746, 0.0000000001043427,
    0.0000000000077823, -0.0000000000036968, 0.0000000000005100,
    -0.0000000000000206, -0.0000000000000054, 0.0000000000000014,
    0.0000000000000001,
]


cdef void _gamma_terms(double mu, double* gam1, double* gam2,
                       double* gampl, double* gammi) nogil:
    cdef double g1 = 0.0, g2 = 0.0, m2 = mu * mu, p = 1.0
    cdef int j
    for j in range(13):
        g2 += _RGAM[2 * j] * p
        g1 -= _RGAM[2 * j + 1] * p
        p *= m2
    gam1[0] = g1
    gam2[0] = g2
    gampl[0] = g2 - mu * g1
    gammi[0] = g2 + mu * g1


def gamma_terms(double mu):
    cdef double g1, g2, gp, gm
    _gamma_terms(mu, &g1, &g2, &gp, &gm)
    return g1, g2, gp, gm


# status: 0 ok, 1 CF1, 2 Temme, 3 CF2
cdef int _hankel_asymptotic(double nu, double x, double* out) nogil:
    cdef double mu = 4.0 * nu * nu, y8 = 8.0 * x, a = 1.0, b, sgn, size
    cdef double pp = 1.0, qq = 0.0, rr = 1.0, ss = 0.0, last = INFINITY
    cdef double theta, sx, cx, st, ct, cchi, schi, amp
    cdef int k
    for k in range(1, ASYM_TERMS + 1):
        b = a * (mu + 4.0 * k * k - 1.0) / (k * y8)
        a = a * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * y8)
        sgn = 1.0 if (k % 4 == 0 or k % 4 == 1) else -1.0
        if k % 2:
            qq += sgn * a
            ss += sgn * b
        else:
            pp += sgn * a
            rr += sgn * b
        size = fabs(a) + fabs(b)
        if size < 0.1 * EPS:
            break
        if size > last:
            return 1
        last = size
    else:
        return 1
    theta = (0.5 * nu + 0.25) * M_PI
    sx = sin(x)
    cx = cos(x)
    st = sin(theta)
    ct = cos(theta)
    cchi = cx * ct + sx * st
    schi = sx * ct - cx * st
    amp = sqrt(2.0 / (M_PI * x))
    out[0] = amp * (pp * cchi - qq * schi)
    out[1] = amp * (pp * schi + qq * cchi)
    out[2] = -amp * (rr * schi + ss * cchi)
    out[3] = amp * (rr * cchi - ss * schi)
    return 0


cdef int _bessel_jy(double nu, double x, double* out) nogil:
    cdef long i, l, nl
    cdef int isign = 1
    cdef double xmu, xmu2, xi, xi2, w, h, b, c, d, delta, rjl, rjpl, rjl1, rjp1
    cdef double fact, rjtemp, f, x2, pimu, e, fact2, gam1, gam2, gampl, gammi
    cdef double ff, p, q, pimu2, fact3, r, s, s1, del1, rymu, ry1, rymup, rjmu
    cdef double a, br, bi, cr, ci, den, dr, di, dlr, dli, temp, gam, rytemp
    if x >= XASYM and nu * nu <= x:
        if _hankel_asymptotic(nu, x, out) == 0:
            return 0
    if x < XMIN:
        nl = <long>(nu + 0.5)
    else:
        nl = <long>(nu - x + 1.5)
        if nl < 0:
            nl = 0
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / M_PI

    h = nu * xi
    if h < FPMIN:
        h = FPMIN
    b = xi2 * nu
    d = 0.0
    c = h
    i = 1
    while True:
        if i > MAXIT:
            return 1
        b += xi2
        d = b - d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = b - 1.0 / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = c * d
        h = delta * h
        if d < 0.0:
            isign = -isign
        if fabs(delta - 1.0) < EPS:
            break
        i += 1

    rjl = isign * 1e-30
    rjpl = h * rjl
    rjl1 = rjl
    rjp1 = rjpl
    fact = nu * xi
    l = nl
    while l >= 1:
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
        if fabs(rjl) > RESCALE:
            rjl /= RESCALE
            rjpl /= RESCALE
            rjl1 /= RESCALE
            rjp1 /= RESCALE
        l -= 1
    if rjl == 0.0:
        rjl = EPS
    f = rjpl / rjl

    if x < XMIN:
        x2 = 0.5 * x
        pimu = M_PI * xmu
        fact = 1.0 if fabs(pimu) < EPS else pimu / sin(pimu)
        d = -log(x2)
        e = xmu * d
        fact2 = 1.0 if fabs(e) < EPS else sinh(e) / e
        _gamma_terms(xmu, &gam1, &gam2, &gampl, &gammi)
        ff = 2.0 / M_PI * fact * (gam1 * cosh(e) + gam2 * fact2 * d)
        e = exp(e)
        p = e / (gampl * M_PI)
        q = 1.0 / (e * M_PI * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if fabs(pimu2) < EPS else sin(pimu2) / pimu2
        r = M_PI * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        s = ff + r * q
        s1 = p
        i = 1
        while True:
            if i > MAXIT:
                return 2
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * (ff + r * q)
            s += delta
            del1 = c * p - i * delta
            s1 += del1
            if fabs(delta) < (1.0 + fabs(s)) * EPS:
                break
            i += 1
        rymu = -s
        ry1 = -s1 * xi2
        rymup = xmu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        i = 2
        while True:
            if i > MAXIT:
                return 3
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if fabs(dr) + fabs(di) < FPMIN:
                dr = FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if fabs(cr) + fabs(ci) < FPMIN:
                cr = FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if fabs(dlr - 1.0) + fabs(dli) < EPS:
                break
            i += 1
        gam = (p - f) / q
        rjmu = sqrt(w / ((p - f) * gam + q))
        rjmu = copysign(rjmu, rjl)
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup

    fact = rjmu / rjl
    out[0] = rjl1 * fact
    out[2] = rjp1 * fact
    for i in range(1, nl + 1):
        rytemp = (xmu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
        if isinf(rymu) or isnan(rymu):
            out[1] = -INFINITY
            out[3] = INFINITY
            return 0
    out[1] = rymu
    out[3] = nu * xi * rymu - ry1
    return 0


_STAGES = {1: "CF1", 2: "Temme series", 3: "CF2"}


def bessel_jy(double nu, double x):
    cdef double out[4]
    cdef int status
    if not (x > 0.0) or not (nu >= 0.0):
        raise ValueError(f"bessel_jy needs nu >= 0 and x > 0, got nu={nu}, x={x}")
    with nogil:
        status = _bessel_jy(nu, x, out)
    if status:
        raise NumericError(f"{_STAGES[status]} did not converge", nu=nu, x=x)
    return out[0], out[1], out[2], out[3]


def fourier_sum(phi, long n0, coef):
    cdef const double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    cdef const double complex[::1] cf = np.ascontiguousarray(coef, dtype=np.complex128)
    result = np.zeros(ph.shape[0], dtype=np.complex128)
    cdef double complex[::1] res = result
    cdef Py_ssize_t m, j, nterms = cf.shape[0]
    cdef double complex acc, rot, step
    cdef double ang
    with nogil:
        for m in range(ph.shape[0]):
            acc = 0.0
            step = cos(ph[m]) + 1j * sin(ph[m])
            rot = 0.0
            for j in range(nterms):
                if j % RESYNC == 0:
                    ang = (n0 + j) * ph[m]
                    rot = cos(ang) + 1j * sin(ang)
                acc = acc + cf[j] * rot
                rot = rot * step
            res[m] = acc
    return result.reshape(np.shape(phi))
