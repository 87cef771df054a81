# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled island-model and propagation kernels.

Mirrors ``_pykernel`` draw for draw; see that module for the reference
semantics.
"""
import numpy as np

from libc.math cimport floor, log
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memcpy

cdef enum:
    ONEMAX = 0
    LEADING_ONES = 1
    JUMP = 2


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t next64(uint64_t* s) noexcept nogil:
    cdef uint64_t result = rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = rotl(s[3], 45)
    return result


cdef inline double uniform(uint64_t* s) noexcept nogil:
    return <double>(next64(s) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t below(uint64_t* s, int64_t b) noexcept nogil:
    return <int64_t>(uniform(s) * <double>b)


cdef inline double geometric(uint64_t* s, double log1mp) noexcept nogil:
    return floor(log(1.0 - uniform(s)) / log1mp)


cdef inline int64_t jump_value(int64_t ones, int64_t n, int64_t k) noexcept nogil:
    if ones <= n - k or ones == n:
        return k + ones
    return n - ones


cdef int64_t full_fitness(int kind, uint8_t* x, int64_t n, int64_t k, int64_t* ones_out) noexcept nogil:
    cdef int64_t i, ones = 0
    for i in range(n):
        ones += x[i]
    ones_out[0] = ones
    if kind == ONEMAX:
        return ones
    if kind == JUMP:
        return jump_value(ones, n, k)
    i = 0
    while i < n and x[i]:
        i += 1
    return i


cdef inline bint in_flips(int64_t* flips, int64_t count, int64_t pos) noexcept nogil:
    cdef int64_t j
    for j in range(count):
        if flips[j] == pos:
            return True
    return False


cdef int64_t sample_flips(int64_t n, const double* cdf, uint64_t* s, int64_t* flips) noexcept nogil:
    cdef double u = uniform(s)
    cdef int64_t count = 0, have = 0, pos
    while u >= cdf[count]:
        count += 1
    while have < count:
        pos = below(s, n)
        if not in_flips(flips, have, pos):
            flips[have] = pos
            have += 1
    return count


cdef void mutate_select(int kind, uint8_t* x, int64_t* fx, int64_t* ones, int64_t n, int64_t k,
                        const double* cdf, uint64_t* s, int64_t* flips) noexcept nogil:
    cdef int64_t count = sample_flips(n, cdf, s, flips)
    cdef int64_t j, pos, fy, new_ones, minpos, lo
    if count == 0:
        return
    if kind == LEADING_ONES:
        lo = fx[0]
        minpos = flips[0]
        for j in range(1, count):
            if flips[j] < minpos:
                minpos = flips[j]
        if minpos < lo:
            return
        if minpos > lo:
            fy = lo
        else:
            j = lo + 1
            while j < n and (x[j] ^ in_flips(flips, count, j)):
                j += 1
            fy = j
        for j in range(count):
            x[flips[j]] ^= 1
        fx[0] = fy
        return
    new_ones = ones[0]
    for j in range(count):
        new_ones += 1 - 2 * x[flips[j]]
    fy = new_ones if kind == ONEMAX else jump_value(new_ones, n, k)
    if fy >= fx[0]:
        for j in range(count):
            x[flips[j]] ^= 1
        fx[0] = fy
        ones[0] = new_ones


cdef int64_t migrate(uint8_t* bits, uint8_t* snap, int64_t* fit, int64_t* ones, int64_t* snap_fit,
                     int64_t* snap_ones, int64_t mu, int64_t n, const int64_t* out_ptr, const int64_t* out_idx,
                     double p, double log1mp, uint64_t* st, int64_t* best_in, int64_t* best_src,
                     int64_t* cnt) noexcept nogil:
    cdef int64_t i, j, e, lo, deg, fi, sent = 0
    cdef double pos
    cdef bint any_in = False
    cdef uint64_t* mig
    for j in range(mu):
        best_in[j] = -1
        best_src[j] = -1
        cnt[j] = 0
    for i in range(mu):
        lo = out_ptr[i]
        deg = out_ptr[i + 1] - lo
        fi = fit[i]
        mig = st + 4 * (mu + i)
        if p >= 1.0:
            pos = 0.0
        else:
            pos = geometric(mig, log1mp)
        while pos < <double>deg:
            sent += 1
            j = out_idx[lo + <int64_t>pos]
            if fi >= fit[j]:
                if fi > best_in[j]:
                    best_in[j] = fi
                    best_src[j] = i
                    cnt[j] = 1
                    any_in = True
                elif fi == best_in[j]:
                    cnt[j] += 1
                    if below(st + 4 * (2 * mu + j), cnt[j]) == 0:
                        best_src[j] = i
            if p >= 1.0:
                pos = pos + 1.0
            else:
                pos = pos + 1.0 + geometric(mig, log1mp)
    if any_in:
        memcpy(snap, bits, mu * n)
        memcpy(snap_fit, fit, mu * sizeof(int64_t))
        memcpy(snap_ones, ones, mu * sizeof(int64_t))
        for j in range(mu):
            if cnt[j]:
                i = best_src[j]
                memcpy(bits + j * n, snap + i * n, n)
                fit[j] = snap_fit[i]
                ones[j] = snap_ones[i]
    return sent


def run_islands(int kind, int64_t n, int64_t jump_k, const int64_t[::1] out_ptr,
                const int64_t[::1] out_idx, double p, double log1mp, int64_t tau, int64_t budget,
                const double[::1] cdf, uint64_t[:, :, ::1] states, fixed_start=None,
                evaluate=None, optimum_value=None):
    if evaluate is not None:
        raise TypeError("the compiled kernel only supports built-in objectives")
    if kind not in (ONEMAX, LEADING_ONES, JUMP):
        raise ValueError(f"unknown kernel objective code {kind}")
    cdef int64_t reps = states.shape[0]
    cdef int64_t mu = out_ptr.shape[0] - 1
    cdef int64_t optimum = n + jump_k if kind == JUMP else n
    cdef bint has_fixed = fixed_start is not None
    cdef uint8_t[::1] fixed = np.ascontiguousarray(
        fixed_start if has_fixed else np.zeros(n, np.uint8), dtype=np.uint8)

    t_par_a = np.zeros(reps, dtype=np.int64)
    t_com_a = np.zeros(reps, dtype=np.int64)
    success_a = np.zeros(reps, dtype=np.uint8)
    best_a = np.zeros(reps, dtype=np.int64)
    cdef int64_t[::1] t_par = t_par_a
    cdef int64_t[::1] t_com = t_com_a
    cdef uint8_t[::1] success = success_a
    cdef int64_t[::1] best = best_a

    cdef uint8_t[::1] bits = np.zeros(mu * n, dtype=np.uint8)
    cdef uint8_t[::1] snap = np.zeros(mu * n, dtype=np.uint8)
    cdef int64_t[::1] work = np.zeros(7 * mu + n + 1, dtype=np.int64)
    cdef uint64_t[::1] st = np.zeros(3 * mu * 4, dtype=np.uint64)

    cdef int64_t* fit = &work[0]
    cdef int64_t* ones = fit + mu
    cdef int64_t* snap_fit = ones + mu
    cdef int64_t* snap_ones = snap_fit + mu
    cdef int64_t* best_in = snap_ones + mu
    cdef int64_t* best_src = best_in + mu
    cdef int64_t* cnt = best_src + mu
    cdef int64_t* flips = cnt + mu

    cdef int64_t r, i, b, w, words = (n + 63) // 64, gen, sent, top
    cdef uint64_t word
    cdef bint migrating = mu > 1 and p > 0.0, done
    with nogil:
        for r in range(reps):
            memcpy(&st[0], &states[r, 0, 0], 3 * mu * 4 * sizeof(uint64_t))
            for i in range(mu):
                if has_fixed:
                    memcpy(&bits[i * n], &fixed[0], n)
                else:
                    for w in range(words):
                        word = next64(&st[4 * i])
                        b = 64 * w
                        while b < n and b < 64 * (w + 1):
                            bits[i * n + b] = (word >> (b - 64 * w)) & 1
                            b += 1
                fit[i] = full_fitness(kind, &bits[i * n], n, jump_k, &ones[i])
            top = fit[0]
            for i in range(1, mu):
                if fit[i] > top:
                    top = fit[i]
            sent = 0
            done = top >= optimum
            gen = 0
            while not done and gen < budget:
                gen += 1
                for i in range(mu):
                    mutate_select(kind, &bits[i * n], &fit[i], &ones[i], n, jump_k, &cdf[0],
                                  &st[4 * i], flips)
                    if fit[i] > top:
                        top = fit[i]
                if top >= optimum:
                    done = True
                elif migrating and gen % tau == 0:
                    sent += migrate(&bits[0], &snap[0], fit, ones, snap_fit, snap_ones, mu, n,
                                    &out_ptr[0], &out_idx[0], p, log1mp, &st[0], best_in,
                                    best_src, cnt)
            t_par[r] = gen
            t_com[r] = sent
            success[r] = done
            best[r] = top
    return t_par_a, t_com_a, success_a, best_a


def hitting_times(const int64_t[::1] out_ptr, const int64_t[::1] out_idx, double p,
                  int64_t source, int64_t budget, uint64_t[:, ::1] states):
    cdef int64_t reps = states.shape[0]
    cdef int64_t mu = out_ptr.shape[0] - 1
    T_a = np.full((reps, mu), -1, dtype=np.int64)
    cdef int64_t[:, ::1] T = T_a
    cdef int64_t[::1] informed = np.zeros(mu, dtype=np.int64)
    cdef uint64_t[4] s
    cdef int64_t r, u, v, e, count, rnd, ru
    with nogil:
        for r in range(reps):
            s[0] = states[r, 0]
            s[1] = states[r, 1]
            s[2] = states[r, 2]
            s[3] = states[r, 3]
            for u in range(mu):
                informed[u] = -1
            informed[source] = 0
            T[r, 0] = 0
            count = 1
            if p <= 0.0:
                continue
            rnd = 0
            while count < mu and rnd < budget:
                rnd += 1
                for u in range(mu):
                    ru = informed[u]
                    if ru < 0 or ru >= rnd:
                        continue
                    for e in range(out_ptr[u], out_ptr[u + 1]):
                        v = out_idx[e]
                        if informed[v] >= 0:
                            continue
                        if p >= 1.0 or uniform(s) < p:
                            informed[v] = rnd
                            count += 1
                            T[r, count - 1] = rnd
    return T_a
