"""
A general network from probe spectra
====================================

Without a chain structure every matrix element must be measured. Markers on
single sites give the diagonal weights; markers on the superpositions
``(|n> + |m>)/sqrt(2)`` and ``(|n> + i|m>)/sqrt(2)`` give the cross terms
between sites. Together they fix every eigenvector up to a phase, and with
the spectrum of H they fix H itself.
"""
# %%
import numpy as np

import zeeman as z

rng = np.random.default_rng(5)
a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
h = (a + a.conj().T) / 2

# %%
s, site_measures, cross = z.network_measurements(h, f=10.0)
print("site 0 weights:", np.round(site_measures[0].weights, 4))
print("cross terms (0, 1):", np.round(cross[0].values, 4))

# %%
rebuilt = z.assemble_network(site_measures, cross, s)
print("max entry error:", np.abs(rebuilt.entries - h).max())
