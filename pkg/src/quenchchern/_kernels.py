"""Compiled per-k propagators.

All kernels work in the *reduced frame*: the spin-orbit pair (hx, hy) is
rotated onto the x axis, so the Hamiltonian is the real matrix

    H(t) = [[hz(t),  b   ],
            [b,     -hz(t)]],   hz(t) = sign * g / t + h0,   b = |h_so| >= 0.

The azimuth of h_so is constant in time for every protocol handled here, so
the populations and the reduced-frame trajectory depend on (h0, b) only.
Callers rotate the in-plane components back with the azimuth.
"""

import numpy as np
from numba import njit, prange

# status codes returned by the kernels
OK = 0
STEP_UNDERFLOW = 1
NORM_DRIFT = 2

DT_MIN = 1e-12
NORM_ABORT = 1e-7

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# difference between the 5th- and 4th-order weights
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


@njit(cache=True, inline="always")
def _hz(t, h0, sign, g):
    if g == 0.0:
        return h0
    return sign * g / t + h0


@njit(cache=True, inline="always")
def _rhs(t, a, c, h0, b, sign, g):
    hz = _hz(t, h0, sign, g)
    return -1j * (hz * a + b * c), -1j * (b * a - hz * c)


@njit(cache=True)
def propagate(a, c, t0, t1, h0, b, sign, g, tol, eps_frac, t_frac):
    """Integrate i d/dt psi = H psi from t0 to t1 (reduced frame).

    Step size is controlled by the embedded error estimate (error per unit
    time <= tol) and capped by eps_frac / eps(t) and, for g != 0, by
    t_frac * t.  The state is renormalized after every accepted step.

    Returns (a, c, status, n_steps, max_norm_drift).
    """
    t = t0
    max_drift = 0.0
    n_steps = 0
    if t1 <= t0:
        return a, c, OK, 0, 0.0
    hz = _hz(t, h0, sign, g)
    dt = eps_frac / np.sqrt(hz * hz + b * b + 1e-300)
    k1a, k1c = _rhs(t, a, c, h0, b, sign, g)
    while t < t1:
        hz = _hz(t, h0, sign, g)
        eps = np.sqrt(hz * hz + b * b)
        cap = eps_frac / eps if eps > 0.0 else dt
        if g != 0.0:
            cap = min(cap, t_frac * t)
        if dt > cap:
            dt = cap
        last = False
        if t + dt >= t1:
            dt = t1 - t
            last = True
        if dt < DT_MIN and not last:
            return a, c, STEP_UNDERFLOW, n_steps, max_drift

        k2a, k2c = _rhs(t + _C2 * dt, a + dt * _A21 * k1a, c + dt * _A21 * k1c, h0, b, sign, g)
        k3a, k3c = _rhs(t + _C3 * dt,
                        a + dt * (_A31 * k1a + _A32 * k2a),
                        c + dt * (_A31 * k1c + _A32 * k2c), h0, b, sign, g)
        k4a, k4c = _rhs(t + _C4 * dt,
                        a + dt * (_A41 * k1a + _A42 * k2a + _A43 * k3a),
                        c + dt * (_A41 * k1c + _A42 * k2c + _A43 * k3c), h0, b, sign, g)
        k5a, k5c = _rhs(t + _C5 * dt,
                        a + dt * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a),
                        c + dt * (_A51 * k1c + _A52 * k2c + _A53 * k3c + _A54 * k4c),
                        h0, b, sign, g)
        k6a, k6c = _rhs(t + dt,
                        a + dt * (_A61 * k1a + _A62 * k2a + _A63 * k3a + _A64 * k4a + _A65 * k5a),
                        c + dt * (_A61 * k1c + _A62 * k2c + _A63 * k3c + _A64 * k4c + _A65 * k5c),
                        h0, b, sign, g)
        na = a + dt * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a + _B6 * k6a)
        nc = c + dt * (_B1 * k1c + _B3 * k3c + _B4 * k4c + _B5 * k5c + _B6 * k6c)
        k7a, k7c = _rhs(t + dt, na, nc, h0, b, sign, g)
        ea = dt * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a + _E7 * k7a)
        ec = dt * (_E1 * k1c + _E3 * k3c + _E4 * k4c + _E5 * k5c + _E6 * k6c + _E7 * k7c)
        err = max(abs(ea), abs(ec))
        allowed = tol * dt
        if err > allowed:
            # reject; shrink and retry
            dt = dt * max(0.2, 0.9 * (allowed / err) ** 0.25)
            if dt < DT_MIN:
                return a, c, STEP_UNDERFLOW, n_steps, max_drift
            continue

        n2 = (na.real * na.real + na.imag * na.imag) + (nc.real * nc.real + nc.imag * nc.imag)
        drift = abs(n2 - 1.0)
        if drift > max_drift:
            max_drift = drift
        if drift > NORM_ABORT:
            return na, nc, NORM_DRIFT, n_steps, max_drift
        s = 1.0 / np.sqrt(n2)
        a = na * s
        c = nc * s
        t = t1 if last else t + dt
        n_steps += 1
        k1a, k1c = _rhs(t, a, c, h0, b, sign, g)
        if err == 0.0:
            dt = dt * 5.0
        else:
            dt = dt * min(5.0, max(0.2, 0.9 * (allowed / err) ** 0.25))
    return a, c, OK, n_steps, max_drift


@njit(cache=True, inline="always")
def _ground(hz, b):
    # eigenvector of [[hz, b], [b, -hz]] with eigenvalue -eps; a_up >= 0
    eps = np.sqrt(hz * hz + b * b)
    if hz <= 0.0:
        u, d = eps - hz, -b
    else:
        u, d = b, -(eps + hz)
    n = np.sqrt(u * u + d * d)
    return u / n, d / n


@njit(cache=True, inline="always")
def _excited(hz, b):
    eps = np.sqrt(hz * hz + b * b)
    if hz >= 0.0:
        u, d = eps + hz, b
    else:
        u, d = b, eps - hz
    n = np.sqrt(u * u + d * d)
    return u / n, d / n


@njit(cache=True)
def evolve_one(h0, b, sign, g, t_start, start_at_zero, t_switch, tol, eps_frac, t_frac):
    """Evolve one reduced-frame k point and project at t_switch.

    Returns (p_up, p_down, rel_phase, a, c, status, n_steps, max_drift).
    """
    if start_at_zero:
        # ground state of the divergent sign*g/t sigma_z term
        if sign * g > 0.0:
            a, c = 0.0 + 0.0j, 1.0 + 0.0j
        else:
            a, c = 1.0 + 0.0j, 0.0 + 0.0j
    else:
        gu, gd = _ground(_hz(t_start, h0, sign, g), b)
        a, c = gu + 0.0j, gd + 0.0j
    a, c, status, n_steps, drift = propagate(
        a, c, t_start, t_switch, h0, b, sign, g, tol, eps_frac, t_frac)
    hz = _hz(t_switch, h0, sign, g)
    eu, ed = _excited(hz, b)
    gu, gd = _ground(hz, b)
    cp = eu * a + ed * c
    cm = gu * a + gd * c
    p_up = cp.real * cp.real + cp.imag * cp.imag
    p_down = cm.real * cm.real + cm.imag * cm.imag
    s = p_up + p_down
    p_up /= s
    p_down /= s
    rel = np.angle(cm * np.conj(cp))
    return p_up, p_down, rel, a, c, status, n_steps, drift


@njit(cache=True, parallel=True)
def evolve_many(h0s, bs, sign, g, t_start, start_at_zero, t_switches,
                tol, eps_frac, t_frac):
    n = h0s.shape[0]
    p_up = np.empty(n)
    p_down = np.empty(n)
    rel = np.empty(n)
    status = np.empty(n, dtype=np.int64)
    drift = np.empty(n)
    for i in prange(n):
        pu, pd, ph, _a, _c, st, _ns, dr = evolve_one(
            h0s[i], bs[i], sign, g, t_start, start_at_zero, t_switches[i],
            tol, eps_frac, t_frac)
        p_up[i] = pu
        p_down[i] = pd
        rel[i] = ph
        status[i] = st
        drift[i] = dr
    return p_up, p_down, rel, status, drift


@njit(cache=True)
def static_average(a, c, h0, b, window, n_samples, tol, eps_frac):
    """Trapezoid time average of <sigma> under a static field over `window`.

    The trajectory is integrated between uniformly spaced sample times.
    Returns (sx, sy, sz, status) in the reduced frame.
    """
    dt = window / n_samples
    sx = 0.0
    sy = 0.0
    sz = 0.0
    for i in range(n_samples + 1):
        w = 0.5 if (i == 0 or i == n_samples) else 1.0
        cross = 2.0 * np.conj(a) * c
        sx += w * cross.real
        sy += w * cross.imag
        sz += w * (abs(a) ** 2 - abs(c) ** 2)
        if i < n_samples:
            a, c, status, _ns, _dr = propagate(a, c, 0.0, dt, h0, b, 1.0, 0.0, tol, eps_frac, 0.05)
            if status != OK:
                return sx, sy, sz, status
    return sx / n_samples, sy / n_samples, sz / n_samples, OK


@njit(cache=True, parallel=True)
def sudden_average_many(h0_int, h0_f, bs, periods, samples_per_period, tol, eps_frac):
    """Numerical sudden quench: ground state of H_int evolved under static H_f."""
    n = h0_f.shape[0]
    out = np.empty((n, 3))
    status = np.empty(n, dtype=np.int64)
    for i in prange(n):
        gu, gd = _ground(h0_int[i], bs[i])
        eps_f = np.sqrt(h0_f[i] ** 2 + bs[i] ** 2)
        window = periods * np.pi / eps_f
        sx, sy, sz, st = static_average(gu + 0.0j, gd + 0.0j, h0_f[i], bs[i], window,
                                        periods * samples_per_period, tol, eps_frac)
        out[i, 0] = sx
        out[i, 1] = sy
        out[i, 2] = sz
        status[i] = st
    return out, status
