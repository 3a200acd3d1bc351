"""Brute-force redispatch optimum for the 3-bus overvoltage instance.

Grid over (dP3, dQ2, dQ3) at 0.01 p.u.; dP2 follows from holding the
external import at its base value. Everything here is numpy only.
"""
import itertools
import math

import numpy as np

S_BASE = 100.0
VN = 20.0
ZB = VN**2 / S_BASE
I_BASE = S_BASE / (math.sqrt(3) * VN)  # kA
LINES = [(0, 1, 0.3, 0.1, 10.0, 1.0), (1, 2, 0.3, 0.1, 10.0, 1.0)]  # r, x ohm/km, km, max_i_ka
LOAD = np.array([0, 1.0 + 0.33j, 0.5 + 0.16j]) / S_BASE
P_BASE = np.array([1.0, 6.0]) / S_BASE
Q_BASE = np.array([0.14, 0.85]) / S_BASE
HIST = np.array([20.0, 20.0]) / S_BASE
GEN_BUS = [1, 2]
W_P, W_Q = 10.0, 1.0
K_PF = math.tan(math.acos(0.95))
H = 0.01

Y = np.zeros((3, 3), complex)
for f, t, r, x, km, _ in LINES:
    y = 1 / complex(r * km / ZB, x * km / ZB)
    Y[f, f] += y; Y[t, t] += y; Y[f, t] -= y; Y[t, f] -= y


def power_flow(s):
    v = np.ones(3, complex)
    for _ in range(50):
        mis = s - v * np.conj(Y @ v)
        m = np.concatenate([mis.real[1:], mis.imag[1:]])
        if np.abs(m).max() < 1e-12:
            return v
        jac = np.zeros((4, 4))
        eps = 1e-7
        x0 = np.concatenate([np.angle(v[1:]), np.abs(v[1:])])
        for k in range(4):
            x = x0.copy(); x[k] += eps
            vv = v.copy(); vv[1:] = x[2:] * np.exp(1j * x[:2])
            mm = s - vv * np.conj(Y @ vv)
            jac[:, k] = (np.concatenate([mm.real[1:], mm.imag[1:]]) - m) / eps
        x0 -= np.linalg.solve(jac, m)
        v[1:] = x0[2:] * np.exp(1j * x0[:2])
    raise RuntimeError("no convergence")


def injections(p, q):
    s = -LOAD.copy()
    for g, b in enumerate(GEN_BUS):
        s[b] += complex(p[g], q[g])
    return s


def import_pu(v):
    return (v[0] * np.conj(Y[0] @ v)).real


v_base = power_flow(injections(P_BASE, Q_BASE))
P_EXT = import_pu(v_base)


def hold_import(p3, q):
    p2 = P_BASE[0]
    for _ in range(30):
        f = import_pu(power_flow(injections([p2, p3], q))) - P_EXT
        if abs(f) < 1e-13:
            break
        d = 1e-6
        g = (import_pu(power_flow(injections([p2 + d, p3], q))) - P_EXT - f) / d
        p2 -= f / g
    return p2, power_flow(injections([p2, p3], q))


def feasible(p, q, v):
    if np.any(np.abs(v) < 0.95) or np.any(np.abs(v) > 1.05):
        return False
    for g in range(2):
        if abs(p[g]) > 0.85 * HIST[g] or abs(q[g]) > K_PF * abs(p[g]):
            return False
    for f, t, r, x, km, imax in LINES:
        y = 1 / complex(r * km / ZB, x * km / ZB)
        if abs(y * (v[f] - v[t])) > 0.9 * imax / I_BASE:
            return False
    return True


def main():
    print(f"base max |V| = {np.abs(v_base).max():.6f}, import = {P_EXT:.9f} pu")
    best = None
    steps = lambda lo, hi: [k * H for k in range(round(lo / H), round(hi / H) + 1)]
    for dp3, dq2, dq3 in itertools.product(steps(-0.06, 0.0), steps(-0.02, 0.02), steps(-0.03, 0.01)):
        p3 = P_BASE[1] + dp3
        q = [Q_BASE[0] + dq2, Q_BASE[1] + dq3]
        p2, v = hold_import(p3, q)
        p = [p2, p3]
        if not feasible(p, q, v):
            continue
        dp = np.array(p) - P_BASE
        obj = W_P * (dp**2).sum() + W_Q * (dq2**2 + dq3**2)
        if best is None or obj < best[0]:
            best = (obj, dp, (dq2, dq3))
    obj, dp, dq = best
    # Objective change across one grid cell around the optimum.
    bound = sum(W_P * (2 * abs(d) * H + H * H) for d in dp) + sum(W_Q * (2 * abs(d) * H + H * H) for d in dq)
    print(f"grid optimum = {obj:.9f} at dP = {dp}, dQ = {dq}")
    print(f"resolution bound = {bound:.9f}")


if __name__ == "__main__":
    main()
