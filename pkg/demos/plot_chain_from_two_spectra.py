"""
Chain parameters from two spectra
=================================

A tight-binding chain is measured twice: once as it is, and once with a
strong local field on its first site. The two eigenvalue lists alone are
enough to recover every coupling and on-site energy.
"""
# %%
# A random chain with ten sites.
import numpy as np

import zeeman as z

rng = np.random.default_rng(2)
true = z.ChainSpec(10, rng.uniform(0.5, 1.5, 9), rng.uniform(-0.3, 0.3, 10))
h = z.build_chain_matrix(true)

# %%
# Spectroscopy without and with the marker field on site 0.
s = z.spectrum(h, "H")
s_prime = z.spectrum(z.apply_perturbation(h, z.Perturbation.at_site(0, 10, 10.0)), "H'")
print("interlacing:", z.check_interlacing(s, s_prime))

# %%
# The field strength is the trace shift, and the weights of site 0 on every
# eigenvector follow from products of spectral differences.
print("inferred field:", z.infer_field_strength(s, s_prime))
measure = z.recover_weights(s, s_prime)
print("weights:", np.round(measure.weights, 4))

# %%
# The weights define a discrete measure; its Jacobi matrix is the chain.
est = z.reconstruct_chain(measure)
print("max coupling error:", np.abs(est.couplings - true.couplings).max())
print("max on-site error:", np.abs(est.onsite - true.onsite).max())

# %%
# Moments of the measure are the return amplitudes of site 0.
print("second moment:", z.moment(measure, 2), "expected", true.couplings[0] ** 2 + true.onsite[0] ** 2)
