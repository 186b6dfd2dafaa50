"""Pure-Python implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` operation for operation; selected at import when the
compiled extension is unavailable or ``ABVORTEX_PURE_PYTHON`` is set.
"""
import math

import numpy as np

from .errors import NumericError

EPS = 1e-16
FPMIN = 1e-300
RESCALE = 1e250
MAXIT = 1_000_000
XMIN = 2.0
XASYM = 30.0
ASYM_TERMS = 200

# Taylor coefficients of 1/Gamma(z) around z = 0 (A&S 6.1.34).
_RGAM = (
    1.0, 0.5772156649015329, -0.6558780715202538, -0.0420026350340952,
    0.1665386113822915, -0.0421977345555443, -0.0096219715278770,
    0.0072189432466630, -0.0011651675918591, -0.0002152416741149,
    0.0001280502823882, -0.0000201348547807, -0.0000012504934821,
    0.0000011330272320, -0.0000002056338417, 0.0000000061160950,
    0.0000000050020075, -0.0000000011812746, 0.0000000001043427,
    0.0000000000077823, -0.0000000000036968, 0.0000000000005100,
    -0.0000000000000206, -0.0000000000000054, 0.0000000000000014,
    0.0000000000000001,
)


def gamma_terms(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2.

    ``gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)`` and
    ``gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2``, both summed from the
    series so that gam1 has no cancellation as mu -> 0.
    """
    gam1 = 0.0
    gam2 = 0.0
    m2 = mu * mu
    p = 1.0
    # even-index coefficient c_{2j} (1-based c_k = _RGAM[k-1]) feeds gam1
    for j in range(13):
        gam2 += _RGAM[2 * j] * p
        gam1 -= _RGAM[2 * j + 1] * p
        p *= m2
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def _hankel_asymptotic(nu, x):
    """Hankel's large-argument expansion, or None if it stops converging.

    Used for ``x >= max(30, nu^2)``, where the continued fractions would
    need ~x iterations and their rounding drifts the phase. The phase
    ``x - (nu/2 + 1/4) pi`` is never formed; ``sin x`` and ``cos x`` are
    combined with the small angle instead.
    """
    mu = 4.0 * nu * nu
    y8 = 8.0 * x
    a = 1.0
    pp, qq, rr, ss = 1.0, 0.0, 1.0, 0.0
    last = math.inf
    for k in range(1, ASYM_TERMS + 1):
        b = a * (mu + 4.0 * k * k - 1.0) / (k * y8)
        a = a * (mu - (2 * k - 1) ** 2) / (k * y8)
        sign = 1.0 if k % 4 in (0, 1) else -1.0
        if k % 2:
            qq += sign * a
            ss += sign * b
        else:
            pp += sign * a
            rr += sign * b
        size = abs(a) + abs(b)
        if size < 0.1 * EPS:
            break
        if size > last:
            return None
        last = size
    else:
        return None
    theta = (0.5 * nu + 0.25) * math.pi
    sx, cx, st, ct = math.sin(x), math.cos(x), math.sin(theta), math.cos(theta)
    cchi = cx * ct + sx * st
    schi = sx * ct - cx * st
    amp = math.sqrt(2.0 / (math.pi * x))
    return (amp * (pp * cchi - qq * schi), amp * (pp * schi + qq * cchi),
            -amp * (rr * schi + ss * cchi), amp * (rr * cchi - ss * schi))


def bessel_jy(nu, x):
    """J_nu(x), Y_nu(x) and their x-derivatives for real nu >= 0, x > 0.

    Hankel's asymptotic expansion for ``x >= max(30, nu^2)``. Otherwise
    Temme's series for x < 2 and Steed's complex continued fraction above,
    both joined to the requested order through the CF1 ratio and a
    downward recurrence for J plus an upward recurrence for Y, so the
    turning-point band x ~ nu needs no special casing.

    Returns
    -------
    tuple of float
        ``(J, Y, J', Y')``. Y may overflow to ``-inf`` for nu >> x.
    """
    if not (x > 0.0) or not (nu >= 0.0):
        raise ValueError(f"bessel_jy needs nu >= 0 and x > 0, got nu={nu}, x={x}")
    if x >= XASYM and nu * nu <= x:
        res = _hankel_asymptotic(nu, x)
        if res is not None:
            return res
    if x < XMIN:
        nl = int(nu + 0.5)
    else:
        nl = max(0, int(nu - x + 1.5))
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: f_nu = J'_nu / J_nu by modified Lentz.
    isign = 1
    h = nu * xi
    if h < FPMIN:
        h = FPMIN
    b = xi2 * nu
    d = 0.0
    c = h
    for i in range(1, MAXIT + 1):
        b += xi2
        d = b - d
        if abs(d) < FPMIN:
            d = FPMIN
        c = b - 1.0 / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = c * d
        h = delta * h
        if d < 0.0:
            isign = -isign
        if abs(delta - 1.0) < EPS:
            break
    else:
        raise NumericError("CF1 did not converge", nu=nu, x=x, iterations=MAXIT)

    # Downward recurrence from nu to mu, rescaling to stay finite.
    rjl = isign * 1e-30
    rjpl = h * rjl
    rjl1 = rjl
    rjp1 = rjpl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
        if abs(rjl) > RESCALE:
            rjl /= RESCALE
            rjpl /= RESCALE
            rjl1 /= RESCALE
            rjp1 /= RESCALE
    if rjl == 0.0:
        rjl = EPS
    f = rjpl / rjl

    if x < XMIN:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = gamma_terms(xmu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < EPS else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        s = ff + r * q
        s1 = p
        for i in range(1, MAXIT + 1):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * (ff + r * q)
            s += delta
            del1 = c * p - i * delta
            s1 += del1
            if abs(delta) < (1.0 + abs(s)) * EPS:
                break
        else:
            raise NumericError("Temme series did not converge", nu=nu, x=x)
        rymu = -s
        ry1 = -s1 * xi2
        rymup = xmu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        # CF2: p + iq = (J' + iY') / (J + iY) by Steed's algorithm.
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
        for i in range(2, MAXIT + 1):
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < FPMIN:
                dr = FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < FPMIN:
                cr = FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < EPS:
                break
        else:
            raise NumericError("CF2 did not converge", nu=nu, x=x)
        gam = (p - f) / q
        rjmu = math.sqrt(w / ((p - f) * gam + q))
        rjmu = math.copysign(rjmu, rjl)
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup

    fact = rjmu / rjl
    rj = rjl1 * fact
    rjp = rjp1 * fact
    for i in range(1, nl + 1):
        rytemp = (xmu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
        if math.isinf(rymu) or math.isnan(rymu):
            return rj, -math.inf, rjp, math.inf
    ry = rymu
    ryp = nu * xi * rymu - ry1
    return rj, ry, rjp, ryp


def fourier_sum(phi, n0, coef):
    """Evaluate ``sum_j coef[j] * exp(1j*(n0 + j)*phi)`` at every angle.

    Terms are accumulated in index order in fixed-size blocks, so the result
    does not depend on how the caller chunks the grid.
    """
    phi = np.ascontiguousarray(phi, dtype=float)
    coef = np.ascontiguousarray(coef, dtype=complex)
    out = np.zeros(phi.shape, dtype=complex)
    block = 4096
    for start in range(0, coef.size, block):
        c = coef[start:start + block]
        n = np.arange(n0 + start, n0 + start + c.size, dtype=float)
        out += np.exp(1j * np.multiply.outer(phi, n)) @ c
    return out
