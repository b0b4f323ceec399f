"""
XXZ spin chain in the single-excitation sector
==============================================

A spin chain with exchange couplings ``c_n``, local fields ``b_n`` and
anisotropy ``Delta`` conserves the number of flipped spins. Restricted to
one flip it is a tight-binding chain with hopping ``2 c_n``, so the same two
spectra recover it.
"""
# %%
import numpy as np

import zeeman as z

spin = z.SpinChainSpec(5, [1.0, 0.8, 1.2, 0.9], [0.1, -0.2, 0.0, 0.3, -0.1], anisotropy=0.5)
effective = z.build_spin_single_excitation(spin)
print("effective hopping:", effective.couplings)
print("effective on-site:", np.round(effective.onsite, 4))

# %%
h = z.build_chain_matrix(effective)
s = z.spectrum(h)
s_prime = z.spectrum(z.apply_perturbation(h, z.Perturbation.at_site(0, 5, 10.0)))
est = z.estimate_chain(s, s_prime)
print("recovered exchange couplings:", np.round(est.couplings / 2, 10))
