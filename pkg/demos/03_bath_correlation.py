"""
The Ohmic bath correlation function
===================================

C(tau) is a frequency integral of J(W) = G W exp(-W / wc).  Its imaginary part
has a closed form, which makes a convenient check on the quadrature.
"""
import numpy as np

from cdd2q.bath import OhmicBath, build_correlation_table, correlation, imag_correlation_exact

bath = OhmicBath(G=0.05, omega_c=2 * np.pi, kT=2.0)
tau = np.array([0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0])
c = correlation(bath, tau)
s = correlation(bath, tau, method="simpson")

print("   tau       Re C          Im C      Im exact      Gauss-Simpson")
for t, g, si, ex in zip(tau, c, s, imag_correlation_exact(bath, tau)):
    print(f"{t:6.2f}  {g.real: .6e}  {g.imag: .6e}  {ex: .6e}  {abs(g - si):.1e}")

# the integrator reads C from a table on its fine grid
table = build_correlation_table(bath, tau_max=4.0, step=1e-3)
probe = np.random.default_rng(0).uniform(0, 4, 200)
err = np.max(np.abs(table(probe) - correlation(bath, probe)))
print(f"\ntable lookup error at 200 random lags: {err:.1e}")
