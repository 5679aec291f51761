"""Compiled numerical kernels behind the 22 features.

Everything here runs in numba nopython mode, float64 only, with neither
fastmath nor parallel targets: results must be bit-identical across
runs, call sites, and thread counts. The FFT is a self-contained
radix-2 implementation so a full extraction is one compiled call with
no library round-trips. Python-level wrappers with validation live in
kernels.py and features.py.

Flag codes mirror core.py: 0 computed, 1 NotComputable, 2 DegenerateInput.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_INV_E = math.exp(-1.0)

# ACF switches from direct summation to the FFT path above this lag count.
FFT_LAG_THRESHOLD = 64


@njit(cache=True, nogil=True)
def zscore_kernel(x):
    """Return (z, sample_std); z is all zeros when the std is 0."""
    n = x.shape[0]
    z = np.zeros(n)
    if n < 2:
        return z, 0.0
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    ss = 0.0
    for i in range(n):
        d = x[i] - mu
        ss += d * d
    sd = math.sqrt(ss / (n - 1))
    if sd > 0.0:
        for i in range(n):
            z[i] = (x[i] - mu) / sd
    return z, sd


@njit(cache=True, nogil=True)
def _fft_inplace(re, im, sign):
    """Radix-2 complex FFT; sign -1 forward, +1 inverse (unscaled)."""
    n = re.shape[0]
    if n <= 1:
        return
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            tr = re[i]
            re[i] = re[j]
            re[j] = tr
            ti = im[i]
            im[i] = im[j]
            im[j] = ti
    # Twiddles from exact trig per index; a recurrence would drift past
    # the 1e-10 direct-vs-FFT agreement contract at long lengths.
    half_n = n >> 1
    tw_re = np.empty(half_n)
    tw_im = np.empty(half_n)
    step = sign * 2.0 * math.pi / n
    for k in range(half_n):
        a = step * k
        tw_re[k] = math.cos(a)
        tw_im[k] = math.sin(a)
    length = 2
    while length <= n:
        half = length >> 1
        stride = n // length
        for start in range(0, n, length):
            for k in range(half):
                wr = tw_re[k * stride]
                wi = tw_im[k * stride]
                i0 = start + k
                i1 = i0 + half
                vr = re[i1] * wr - im[i1] * wi
                vi = re[i1] * wi + im[i1] * wr
                re[i1] = re[i0] - vr
                im[i1] = im[i0] - vi
                re[i0] = re[i0] + vr
                im[i0] = im[i0] + vi
        length <<= 1


@njit(cache=True, nogil=True)
def _next_pow2(n):
    p = 1
    while p < n:
        p <<= 1
    return p


@njit(cache=True, nogil=True)
def acf_direct(x, max_lag):
    """Biased-estimator ACF by direct summation, lags 0..max_lag."""
    n = x.shape[0]
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    d = np.empty(n)
    s0 = 0.0
    for i in range(n):
        d[i] = x[i] - mu
        s0 += d[i] * d[i]
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for tau in range(1, max_lag + 1):
        acc = 0.0
        for t in range(n - tau):
            acc += d[t] * d[t + tau]
        out[tau] = acc / s0
    return out


@njit(cache=True, nogil=True)
def acf_fft(x, max_lag):
    """Biased-estimator ACF via zero-padded FFT, lags 0..max_lag."""
    n = x.shape[0]
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    nfft = _next_pow2(n + max_lag + 1)
    re = np.zeros(nfft)
    im = np.zeros(nfft)
    for i in range(n):
        re[i] = x[i] - mu
    _fft_inplace(re, im, -1.0)
    for i in range(nfft):
        p = re[i] * re[i] + im[i] * im[i]
        re[i] = p
        im[i] = 0.0
    _fft_inplace(re, im, 1.0)
    # Normalizing by the lag-0 term keeps out[0] at exactly 1.0 and
    # cancels the 1/nfft inverse-transform scale.
    out = np.empty(max_lag + 1)
    r0 = re[0]
    out[0] = 1.0
    for tau in range(1, max_lag + 1):
        out[tau] = re[tau] / r0
    return out


@njit(cache=True, nogil=True)
def acf_any(x, max_lag):
    if max_lag > FFT_LAG_THRESHOLD:
        return acf_fft(x, max_lag)
    return acf_direct(x, max_lag)


@njit(cache=True, nogil=True)
def pop_variance(x):
    n = x.shape[0]
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    ss = 0.0
    for i in range(n):
        d = x[i] - mu
        ss += d * d
    return ss / n


@njit(cache=True, nogil=True)
def first_zero_from_acf(acf):
    """Smallest lag >= 1 with acf <= 0, else the maximum lag."""
    max_lag = acf.shape[0] - 1
    for tau in range(1, max_lag + 1):
        if acf[tau] <= 0.0:
            return tau
    return max_lag


@njit(cache=True, nogil=True)
def welch_rect(x):
    """Welch PSD: rectangular window, segment = largest power of two <= N,
    50% overlap between segments, one-sided, angular frequency grid."""
    n = x.shape[0]
    seg = 1
    while seg * 2 <= n:
        seg <<= 1
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    half = seg >> 1
    nfreq = half + 1
    power = np.zeros(nfreq)
    nseg = 0
    start = 0
    while start + seg <= n:
        re = np.empty(seg)
        im = np.zeros(seg)
        for i in range(seg):
            re[i] = x[start + i] - mu
        _fft_inplace(re, im, -1.0)
        for k in range(nfreq):
            p = (re[k] * re[k] + im[k] * im[k]) / (2.0 * math.pi * seg)
            if 0 < k < half:
                p *= 2.0
            power[k] += p
        nseg += 1
        start += half
    for k in range(nfreq):
        power[k] /= nseg
    freqs = np.empty(nfreq)
    for k in range(nfreq):
        freqs[k] = 2.0 * math.pi * k / seg
    return freqs, power


@njit(cache=True, nogil=True)
def histogram_mode_kernel(z, n_bins):
    n = z.shape[0]
    lo = z[0]
    hi = z[0]
    for i in range(n):
        v = z[i]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    width = (hi - lo) / n_bins
    counts = np.zeros(n_bins, dtype=np.int64)
    for i in range(n):
        k = int((z[i] - lo) / width)
        if k < 0:
            k = 0
        elif k >= n_bins:
            k = n_bins - 1
        counts[k] += 1
    best = 0
    for k in range(n_bins):
        if counts[k] > best:
            best = counts[k]
    acc = 0.0
    ties = 0
    for k in range(n_bins):
        if counts[k] == best:
            acc += lo + width * (k + 0.5)
            ties += 1
    return acc / ties


@njit(cache=True, nogil=True)
def longstretch_above_mean_kernel(z):
    n = z.shape[0]
    mu = 0.0
    for i in range(n):
        mu += z[i]
    mu /= n
    best = 0
    run = 0
    for i in range(n):
        if z[i] > mu:
            run += 1
            if run > best:
                best = run
        else:
            run = 0
    return best


@njit(cache=True, nogil=True)
def longstretch_decreasing_kernel(z):
    n = z.shape[0]
    best = 0
    run = 0
    for i in range(n - 1):
        if z[i + 1] < z[i]:
            run += 1
            if run > best:
                best = run
        else:
            run = 0
    return best


@njit(cache=True, nogil=True)
def _median_sorted_copy(buf):
    srt = np.sort(buf.copy())
    m = srt.shape[0]
    mid = m >> 1
    if m % 2 == 1:
        return srt[mid]
    return 0.5 * (srt[mid - 1] + srt[mid])


@njit(cache=True, nogil=True)
def outlier_mdrmd_kernel(s):
    """Median (over 0.01-spaced thresholds) of the relative median
    position of threshold-exceeding events; s is the signed series."""
    n = s.shape[0]
    mx = s[0]
    for i in range(n):
        if s[i] > mx:
            mx = s[i]
    if mx < 0.0:
        return 0.0, False
    n_th = int(mx / 0.01) + 1
    rec = np.empty(n_th)
    m = 0
    idx = np.empty(n, dtype=np.int64)
    for k in range(n_th):
        th = 0.01 * k
        c = 0
        for t in range(n):
            if s[t] >= th:
                idx[c] = t
                c += 1
        if c >= 2 and c >= 0.02 * n:
            # indices are collected ascending, so the median is direct
            if c % 2 == 1:
                med = float(idx[c >> 1])
            else:
                med = 0.5 * (idx[(c >> 1) - 1] + idx[c >> 1])
            rec[m] = 2.0 * (med / n - 0.5)
            m += 1
    if m == 0:
        return 0.0, False
    return _median_sorted_copy(rec[:m]), True


@njit(cache=True, nogil=True)
def f1ecac_from_acf(acf):
    thr = _INV_E
    max_lag = acf.shape[0] - 1
    for tau in range(1, max_lag + 1):
        if acf[tau] < thr:
            prev = acf[tau - 1]
            return (tau - 1) + (prev - thr) / (prev - acf[tau])
    return float(max_lag)


@njit(cache=True, nogil=True)
def first_min_from_acf(acf):
    max_lag = acf.shape[0] - 1
    for tau in range(1, max_lag):
        if acf[tau] < acf[tau - 1] and acf[tau] < acf[tau + 1]:
            return tau
    return max_lag


@njit(cache=True, nogil=True)
def spectral_area_from(freqs, power):
    nfreq = power.shape[0]
    cut = math.pi / 5.0
    tot = 0.0
    low = 0.0
    for k in range(nfreq):
        tot += power[k]
        if freqs[k] < cut:
            low += power[k]
    return low / tot


@njit(cache=True, nogil=True)
def spectral_centroid_from(freqs, power):
    nfreq = power.shape[0]
    tot = 0.0
    for k in range(nfreq):
        tot += power[k]
    half = 0.5 * tot
    acc = 0.0
    for k in range(nfreq):
        acc += power[k]
        if acc >= half:
            return freqs[k]
    return freqs[nfreq - 1]


@njit(cache=True, nogil=True)
def local_mean_stderr_kernel(z, window):
    n = z.shape[0]
    m = n - window
    res = np.empty(m)
    for t in range(window, n):
        s = 0.0
        for i in range(t - window, t):
            s += z[i]
        res[t - window] = z[t] - s / window
    mu = 0.0
    for i in range(m):
        mu += res[i]
    mu /= m
    ss = 0.0
    for i in range(m):
        d = res[i] - mu
        ss += d * d
    return math.sqrt(ss / (m - 1))


@njit(cache=True, nogil=True)
def trev_kernel(z):
    n = z.shape[0]
    acc = 0.0
    for t in range(n - 1):
        d = z[t + 1] - z[t]
        acc += d * d * d
    return acc / (n - 1)


@njit(cache=True, nogil=True)
def histogram_ami_kernel(z, lag, n_bins):
    n = z.shape[0]
    m = n - lag
    lo = z[0]
    hi = z[0]
    for t in range(m):
        v = z[t]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    for t in range(lag, n):
        v = z[t]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    width = (hi - lo) / n_bins
    if width <= 0.0:
        return 0.0
    joint = np.zeros((n_bins, n_bins))
    for t in range(m):
        a = int((z[t] - lo) / width)
        if a >= n_bins:
            a = n_bins - 1
        b = int((z[t + lag] - lo) / width)
        if b >= n_bins:
            b = n_bins - 1
        joint[a, b] += 1.0
    row = np.zeros(n_bins)
    col = np.zeros(n_bins)
    for a in range(n_bins):
        for b in range(n_bins):
            row[a] += joint[a, b]
            col[b] += joint[a, b]
    tot = float(m)
    mi = 0.0
    for a in range(n_bins):
        for b in range(n_bins):
            c = joint[a, b]
            if c > 0.0:
                mi += (c / tot) * math.log(c * tot / (row[a] * col[b]))
    return mi


@njit(cache=True, nogil=True)
def ami_gaussian_first_min_from_acf(acf, max_lag):
    n_lags = acf.shape[0] - 1
    lim = max_lag if max_lag < n_lags else n_lags
    if lim < 1:
        return 0
    ami = np.empty(lim + 1)
    ami[0] = np.inf
    for tau in range(1, lim + 1):
        r = acf[tau]
        one_minus = 1.0 - r * r
        if one_minus <= 0.0:
            ami[tau] = np.inf
        else:
            ami[tau] = -0.5 * math.log(one_minus)
    for tau in range(1, lim):
        if ami[tau] < ami[tau - 1] and ami[tau] < ami[tau + 1]:
            return tau
    return lim


@njit(cache=True, nogil=True)
def pnn40_kernel(z):
    n = z.shape[0]
    c = 0
    for t in range(n - 1):
        if abs(z[t + 1] - z[t]) > 0.04:
            c += 1
    return c / (n - 1.0)


@njit(cache=True, nogil=True)
def quantile_symbolize_kernel(x, n_symbols):
    """Type-1 (inverse empirical CDF) quantile bands; ties take the
    lower symbol. Returns (symbols, ok)."""
    n = x.shape[0]
    srt = np.sort(x.copy())
    distinct = 1
    for i in range(1, n):
        if srt[i] != srt[i - 1]:
            distinct += 1
    sym = np.zeros(n, dtype=np.int64)
    if distinct < n_symbols:
        return sym, False
    edges = np.empty(n_symbols - 1)
    for j in range(1, n_symbols):
        pos = (n * j + n_symbols - 1) // n_symbols - 1
        edges[j - 1] = srt[pos]
    for i in range(n):
        s = 0
        for j in range(n_symbols - 1):
            if edges[j] < x[i]:
                s = j + 1
        sym[i] = s
    return sym, True


@njit(cache=True, nogil=True)
def pair_entropy3_kernel(sym):
    counts = np.zeros((3, 3))
    m = sym.shape[0] - 1
    for t in range(m):
        counts[sym[t], sym[t + 1]] += 1.0
    h = 0.0
    for a in range(3):
        for b in range(3):
            c = counts[a, b]
            if c > 0.0:
                p = c / m
                h -= p * math.log(p)
    return h


@njit(cache=True, nogil=True)
def embed2_expfit_meandiff_kernel(z, tau):
    n = z.shape[0]
    cnt = n - tau - 1
    if cnt < 2:
        return 0.0, False
    d = np.empty(cnt)
    s = 0.0
    mx = 0.0
    for t in range(cnt):
        da = z[t + 1] - z[t]
        db = z[t + 1 + tau] - z[t + tau]
        v = math.sqrt(da * da + db * db)
        d[t] = v
        s += v
        if v > mx:
            mx = v
    if mx <= 0.0:
        return 0.0, False
    mean_d = s / cnt
    n_bins = int(math.ceil(math.sqrt(cnt)))
    width = mx / n_bins
    counts = np.zeros(n_bins)
    for t in range(cnt):
        k = int(d[t] / width)
        if k >= n_bins:
            k = n_bins - 1
        counts[k] += 1.0
    acc = 0.0
    for k in range(n_bins):
        center = width * (k + 0.5)
        emp = counts[k] / (cnt * width)
        fit = math.exp(-center / mean_d) / mean_d
        acc += abs(emp - fit)
    return acc / n_bins, True


@njit(cache=True, nogil=True)
def _line_rss(xs, ys, a, b):
    m = b - a
    sx = 0.0
    sy = 0.0
    for i in range(a, b):
        sx += xs[i]
        sy += ys[i]
    mx = sx / m
    my = sy / m
    sxx = 0.0
    sxy = 0.0
    for i in range(a, b):
        dx = xs[i] - mx
        sxx += dx * dx
        sxy += dx * (ys[i] - my)
    slope = sxy / sxx
    rss = 0.0
    for i in range(a, b):
        r = ys[i] - (my + slope * (xs[i] - mx))
        rss += r * r
    return rss


@njit(cache=True, nogil=True)
def fluct_prop_r1_kernel(z, use_dfa):
    """Two-regime split of the log-log fluctuation curve; returns
    (split fraction, ok)."""
    n = z.shape[0]
    prof = np.empty(n)
    s = 0.0
    for i in range(n):
        s += z[i]
        prof[i] = s
    hi = n // 2
    if hi < 5:
        return 0.0, False
    taus = np.empty(50, dtype=np.int64)
    ln_lo = math.log(5.0)
    ln_hi = math.log(float(hi))
    m = 0
    prev = 0
    for k in range(50):
        f = ln_lo + (ln_hi - ln_lo) * k / 49.0
        t = int(math.floor(math.exp(f) + 0.5))
        if t > prev:
            taus[m] = t
            m += 1
            prev = t
    if m < 6:
        return 0.0, False
    xs = np.empty(m)
    ys = np.empty(m)
    nv = 0
    for si in range(m):
        tau = taus[si]
        nwin = n // tau
        st = tau * (tau - 1) / 2.0
        stt = (tau - 1.0) * tau * (2.0 * tau - 1.0) / 6.0
        denom = tau * stt - st * st
        acc = 0.0
        for w in range(nwin):
            base = w * tau
            sy = 0.0
            sty = 0.0
            for i in range(tau):
                v = prof[base + i]
                sy += v
                sty += i * v
            slope = (tau * sty - st * sy) / denom
            inter = (sy - slope * st) / tau
            if use_dfa:
                for i in range(tau):
                    r = prof[base + i] - (slope * i + inter)
                    acc += r * r
            else:
                rmin = np.inf
                rmax = -np.inf
                for i in range(tau):
                    r = prof[base + i] - (slope * i + inter)
                    if r < rmin:
                        rmin = r
                    if r > rmax:
                        rmax = r
                acc += rmax - rmin
        if use_dfa:
            fl = math.sqrt(acc / (nwin * tau))
        else:
            fl = acc / nwin
        if fl > 0.0:
            xs[nv] = math.log(float(tau))
            ys[nv] = math.log(fl)
            nv += 1
    if nv < 6:
        return 0.0, False
    best_rss = np.inf
    best_k = 3
    for k in range(3, nv - 2):
        rss = _line_rss(xs, ys, 0, k) + _line_rss(xs, ys, k, nv)
        if rss < best_rss:
            best_rss = rss
            best_k = k
    return best_k / nv, True


@njit(cache=True, nogil=True)
def transition_sumdiagcov_kernel(z, stride):
    n = z.shape[0]
    m = 0
    ds = np.empty(n)
    for t in range(0, n, stride):
        ds[m] = z[t]
        m += 1
    if m < 4:
        return 0.0, False
    sym, ok = quantile_symbolize_kernel(ds[:m], 3)
    if not ok:
        return 0.0, False
    trans = np.zeros((3, 3))
    colsum = np.zeros(3)
    for t in range(m - 1):
        a = sym[t]
        b = sym[t + 1]
        trans[b, a] += 1.0
        colsum[a] += 1.0
    for a in range(3):
        if colsum[a] == 0.0:
            # a symbol never occurs as a source: matrix cannot be
            # column-stochastic
            return 0.0, False
        for b in range(3):
            trans[b, a] /= colsum[a]
    tr = 0.0
    for r in range(3):
        rm = (trans[r, 0] + trans[r, 1] + trans[r, 2]) / 3.0
        d0 = trans[r, 0] - rm
        d1 = trans[r, 1] - rm
        d2 = trans[r, 2] - rm
        tr += (d0 * d0 + d1 * d1 + d2 * d2) / 2.0
    return tr, True


@njit(cache=True, nogil=True)
def spline_detrend_kernel(z):
    """Least-squares cubic spline (3 evenly spaced interior knots) via the
    truncated-power basis and normal equations. Returns
    (residual, residual population variance, ok)."""
    n = z.shape[0]
    ncoef = 7
    basis = np.empty((n, ncoef))
    for i in range(n):
        u = i / (n - 1.0)
        basis[i, 0] = 1.0
        basis[i, 1] = u
        basis[i, 2] = u * u
        basis[i, 3] = u * u * u
        t1 = u - 0.25
        t2 = u - 0.5
        t3 = u - 0.75
        basis[i, 4] = t1 * t1 * t1 if t1 > 0.0 else 0.0
        basis[i, 5] = t2 * t2 * t2 if t2 > 0.0 else 0.0
        basis[i, 6] = t3 * t3 * t3 if t3 > 0.0 else 0.0
    ata = np.zeros((ncoef, ncoef))
    atz = np.zeros(ncoef)
    for i in range(n):
        for a in range(ncoef):
            va = basis[i, a]
            atz[a] += va * z[i]
            for b in range(a, ncoef):
                ata[a, b] += va * basis[i, b]
    for a in range(ncoef):
        for b in range(a):
            ata[a, b] = ata[b, a]
    # Gaussian elimination with partial pivoting
    coef = np.zeros(ncoef)
    for col in range(ncoef):
        piv = col
        big = abs(ata[col, col])
        for r in range(col + 1, ncoef):
            if abs(ata[r, col]) > big:
                big = abs(ata[r, col])
                piv = r
        if big < 1e-12:
            return np.zeros(1), 0.0, False
        if piv != col:
            for c in range(ncoef):
                tmp = ata[col, c]
                ata[col, c] = ata[piv, c]
                ata[piv, c] = tmp
            tmp = atz[col]
            atz[col] = atz[piv]
            atz[piv] = tmp
        for r in range(col + 1, ncoef):
            factor = ata[r, col] / ata[col, col]
            for c in range(col, ncoef):
                ata[r, c] -= factor * ata[col, c]
            atz[r] -= factor * atz[col]
    for col in range(ncoef - 1, -1, -1):
        acc = atz[col]
        for c in range(col + 1, ncoef):
            acc -= ata[col, c] * coef[c]
        coef[col] = acc / ata[col, col]
    resid = np.empty(n)
    for i in range(n):
        fit = 0.0
        for a in range(ncoef):
            fit += basis[i, a] * coef[a]
        resid[i] = z[i] - fit
    return resid, pop_variance(resid), True


@njit(cache=True, nogil=True)
def periodicity_scan(acf):
    """First local ACF maximum after a trough with value > 0.01 and rise
    from the preceding trough > 0.01; 0 when none qualifies."""
    max_lag = acf.shape[0] - 1
    last_trough = -1
    for i in range(1, max_lag):
        if acf[i] < acf[i - 1] and acf[i] < acf[i + 1]:
            last_trough = i
        elif acf[i] > acf[i - 1] and acf[i] > acf[i + 1]:
            if last_trough > 0 and acf[i] > 0.01 and acf[i] - acf[last_trough] > 0.01:
                return i
    return 0


@njit(cache=True, nogil=True)
def periodicity_wang_kernel(z):
    """Spline-detrended ACF peak period; returns (lag, flag) with flag
    codes 0 ok, 1 NotComputable (spline system singular)."""
    n = z.shape[0]
    resid, rvar, ok = spline_detrend_kernel(z)
    if not ok:
        return 0, 1
    if rvar < 1e-12:
        return 0, 0
    max_lag = n // 3
    if max_lag < 2:
        return 0, 0
    acf = acf_any(resid, max_lag)
    return periodicity_scan(acf), 0


@njit(cache=True, nogil=True)
def extract_core(x):
    """All 22 features in canonical order; returns (values, flags)."""
    values = np.full(22, np.nan)
    flags = np.zeros(22, dtype=np.int8)
    n = x.shape[0]
    z, sd = zscore_kernel(x)
    if n < 5 or sd <= 0.0:
        for i in range(22):
            flags[i] = 2
        return values, flags

    acf_full = acf_any(z, n - 1)
    fzc = first_zero_from_acf(acf_full)

    values[0] = histogram_mode_kernel(z, 5)
    values[1] = histogram_mode_kernel(z, 10)
    values[2] = float(longstretch_above_mean_kernel(z))

    v, ok = outlier_mdrmd_kernel(z)
    if ok:
        values[3] = v
    else:
        flags[3] = 2
    neg = np.empty(n)
    for i in range(n):
        neg[i] = -z[i]
    v, ok = outlier_mdrmd_kernel(neg)
    if ok:
        values[4] = v
    else:
        flags[4] = 2

    values[5] = f1ecac_from_acf(acf_full)
    values[6] = float(first_min_from_acf(acf_full))

    if n >= 16:
        freqs, power = welch_rect(z)
        values[7] = spectral_area_from(freqs, power)
        values[8] = spectral_centroid_from(freqs, power)
    else:
        flags[7] = 2
        flags[8] = 2

    values[9] = local_mean_stderr_kernel(z, 3)
    values[10] = trev_kernel(z)
    values[11] = histogram_ami_kernel(z, 2, 5)
    values[12] = float(ami_gaussian_first_min_from_acf(acf_full, 40))
    values[13] = pnn40_kernel(z)
    values[14] = float(longstretch_decreasing_kernel(z))

    sym, ok = quantile_symbolize_kernel(z, 3)
    if ok:
        values[15] = pair_entropy3_kernel(sym)
    else:
        flags[15] = 2

    dz = np.empty(n - 1)
    for i in range(n - 1):
        dz[i] = z[i + 1] - z[i]
    if pop_variance(dz) > 0.0:
        acf_d = acf_any(dz, n - 2)
        values[16] = first_zero_from_acf(acf_d) / fzc
    else:
        flags[16] = 2

    tau_e = n // 10
    if tau_e < 1:
        tau_e = 1
    if fzc < tau_e:
        tau_e = fzc
    v, ok = embed2_expfit_meandiff_kernel(z, tau_e)
    if ok:
        values[17] = v
    else:
        flags[17] = 2

    if n >= 64:
        v, ok = fluct_prop_r1_kernel(z, True)
        if ok:
            values[18] = v
        else:
            flags[18] = 2
        v, ok = fluct_prop_r1_kernel(z, False)
        if ok:
            values[19] = v
        else:
            flags[19] = 2
    else:
        flags[18] = 2
        flags[19] = 2

    v, ok = transition_sumdiagcov_kernel(z, fzc)
    if ok:
        values[20] = v
    else:
        flags[20] = 2

    lag, flag = periodicity_wang_kernel(z)
    if flag == 0:
        values[21] = float(lag)
    else:
        flags[21] = flag

    return values, flags
