"""Reference NumPy implementation of the hot numeric kernels.

Both kernels integrate products of two-photon amplitudes.  In rotated
coordinates u = k1 + k2, v = k2 the u-integral of the biexciton factor has
a closed form, so the 2-d window integral reduces to a 1-d v-integral whose
integrand overlap_integrand evaluates.  midpoint_overlap is the brute-force
2-d midpoint rule over the original (k1, k2) box, used as a cross check.

Pole conventions for the product conj(A_a) * A_b:
the conjugated factor carries poles in the upper half plane
(exx_a + i*gxx_a along u, e_a + i*g_a along v), the direct factor in the
lower half plane (exx_b - i*gxx_b, e_b - i*g_b).
"""
import numpy as np


def overlap_integrand(v, k1_lo, k1_hi, exx_a, gxx_a, exx_b, gxx_b,
                      e_a, g_a, e_b, g_b, pref):
    """Closed-form u-integral times the v-pole factors, on an array of v."""
    v = np.asarray(v, dtype=float)
    u1 = k1_lo + v
    u2 = k1_hi + v
    if exx_a == exx_b and gxx_a == gxx_b:
        # Conjugate u-poles collapse to a real Lorentzian with an arctan
        # antiderivative.
        fu = (np.arctan((u2 - exx_a) / gxx_a)
              - np.arctan((u1 - exx_a) / gxx_a)) / gxx_a
    else:
        p = exx_a + 1j * gxx_a
        q = exx_b - 1j * gxx_b
        # Both u-paths stay on one side of each branch cut (Im(u - p) < 0,
        # Im(u - q) > 0), so principal logs are safe.
        fu = (np.log(u2 - p) - np.log(u1 - p)
              - np.log(u2 - q) + np.log(u1 - q)) / (p - q)
    pa = e_a + 1j * g_a
    pb = e_b - 1j * g_b
    return pref * fu / ((v - pa) * (v - pb))


def midpoint_overlap(k1_lo, k1_hi, n1, k2_lo, k2_hi, n2, exx_a, gxx_a,
                     exx_b, gxx_b, e_a, g_a, e_b, g_b, pref, chunk=256):
    """Midpoint-rule value of the same window integral on an n1 x n2 grid."""
    n1 = int(n1)
    n2 = int(n2)
    h1 = (k1_hi - k1_lo) / n1
    h2 = (k2_hi - k2_lo) / n2
    k1 = k1_lo + (np.arange(n1) + 0.5) * h1
    same = exx_a == exx_b and gxx_a == gxx_b
    p = exx_a + 1j * gxx_a
    q = exx_b - 1j * gxx_b
    pa = e_a + 1j * g_a
    pb = e_b - 1j * g_b
    total = 0.0 + 0.0j
    for j0 in range(0, n2, chunk):
        k2 = k2_lo + (np.arange(j0, min(j0 + chunk, n2)) + 0.5) * h2
        u = k1[:, None] + k2[None, :]
        if same:
            fu = 1.0 / ((u - exx_a) ** 2 + gxx_a * gxx_a)
        else:
            fu = 1.0 / ((u - p) * (u - q))
        gv = 1.0 / ((k2 - pa) * (k2 - pb))
        total += np.sum(fu * gv[None, :])
    return pref * h1 * h2 * total
