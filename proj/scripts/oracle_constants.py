#!/usr/bin/env python3
"""Standalone scalar oracles for the frozen expected values used in tests.

Each block evaluates one closed-form quantity independently of the C++
implementation; the printed values are copied verbatim into the test sources.
"""

import math

# one-step forward Euler of the conductance LIF voltage equation
v, g_e, g_i = -60.0, 0.5, 0.0
tau, dt, v_rest, e_exc, e_inh = 100.0, 0.5, -65.0, 0.0, -100.0
v1 = v + (dt / tau) * ((v_rest - v) + g_e * (e_exc - v) + g_i * (e_inh - v))
print(f"euler one-step v' = {v1!r}")

# exact exponential conductance decay
print(f"decay 0.8*exp(-0.5/1.0) = {0.8 * math.exp(-0.5):.17g}")

# STDP depression on presynaptic spike: dw = -eta_pre * a_post * w
w, a_post, eta_pre = 0.5, 1.0, 0.01
print(f"pre-spike w' = {w - eta_pre * a_post * w!r}")

# STDP potentiation on postsynaptic spike: dw = eta_post * a_pre * (w_max - w)
w, a_pre, eta_post, w_max = 0.2, 0.5, 0.01, 1.0
print(f"post-spike w' = {w + eta_post * a_pre * (w_max - w)!r}")

# lazy trace decay over 3.5 ms at tau = 20 ms
print(f"trace 0.7*exp(-3.5/20) = {0.7 * math.exp(-3.5 / 20.0):.17g}")

# Poisson encoding expectation: intensity 1, 63.75 Hz, 350 ms at 0.5 ms steps
p = 63.75 * 0.5e-3
steps = 700
mean = steps * p
var_trial = steps * p * (1 - p)
print(f"poisson mean count = {mean!r}, sd of 1e4-trial mean = {math.sqrt(var_trial / 1e4)!r}")

# uniform-init mean estimator: w ~ U[0, 0.3], 10,000 draws
lo, hi, n = 0.0, 0.3, 10000
sd_mean = (hi - lo) / math.sqrt(12.0) / math.sqrt(n)
print(f"init mean = {(hi - lo) / 2!r}, 3*sigma = {3 * sd_mean!r}")

# cost model at the paper's measured rates
n_in, m, T, r_x, r_e = 784, 100, 700, 4e-3, 2.75e-4
ops = T * (3 * m + 2 * n_in * m + (m - 1) ** 2 + r_x * m + r_e * n_in)
mem = 3 * n_in * m + (m - 1) ** 2 + 3 * m
print(f"cost ops = {ops!r}, memory = {mem!r}")

# binomial 3-sigma band for chance-level accuracy over 250 trials
p, n = 0.1, 250
print(f"chance accuracy 3-sigma = {3 * math.sqrt(p * (1 - p) / n)!r}")
