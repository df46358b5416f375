"""Limit behaviour of the GLS coefficient in the eigenbasis world.

Prints the classifier verdict for a few (p, alpha, gamma) triples and the
median |beta_hat| along n for the matching power-law spectra.
"""

import numpy as np

from gpconfound import SpectralModel, classify_limit, eigenbasis_beta_path

ns = [10, 100, 1000, 10000]
for p, alpha, gamma in [(1.0, 2.0, 0.0), (1.0, 2.0, -0.5), (1.0, 2.0, 0.5), (4.0, 2.0, 1.0)]:
    model = SpectralModel.power_law(eta=2.0, alpha=alpha, gamma=gamma, p=p)
    paths = np.array([eigenbasis_beta_path(model, ns, seed=s) for s in range(100)])
    eigen = classify_limit(p, alpha, gamma, "eigen").tag.value
    point = classify_limit(p, alpha, gamma, "point").tag.value
    med = " ".join(f"{m:9.3g}" for m in np.median(np.abs(paths), axis=0))
    print(f"p={p} alpha={alpha} gamma={gamma:+}: {eigen:20s} (point: {point:20s}) median|beta| {med}")
