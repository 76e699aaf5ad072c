"""
Integration-time schedules
==========================

The constant schedule repeats pi / (2 sqrt(2L)); the Chebyshev schedule uses
pi / (2 sqrt(2 r_k)) for each root r_k, in a shuffled order.
"""

import numpy as np

from chebyhmc import (
    IntegrationSchedule,
    SpectralBounds,
    chebyshev_schedule,
    constant_schedule,
    contraction_factor,
    total_and_average_time,
)
from chebyhmc.schedules import average_time_limit

b = SpectralBounds(1.0, 100.0)
const = constant_schedule(400, b)
cheb = chebyshev_schedule(400, b, "random", seed=0)

print("constant time:", const.times[0])
print("chebyshev times range:", cheb.times.min(), "to", cheb.times.max())

# %% Average time per iteration (cost of a leapfrog implementation)
for s in (const, cheb):
    total, avg = total_and_average_time(s)
    print(f"{s.kind:>9}: total {total:8.2f}  average {avg:.5f}")
print("large-K limit of the Chebyshev average:", average_time_limit(b))

# %% Contraction after 400 iterations over the spectrum grid {1, 1.1, ..., 100}
grid = np.arange(1.0, 100.0001, 0.1)
print("chebyshev contraction:", contraction_factor(grid, cheb))
print("constant contraction: ", contraction_factor(grid, const))

# %% The order of the roots does not change the final contraction
ident = chebyshev_schedule(400, b, "identity")
print("identity order:        ", contraction_factor(grid, ident))

# %% Schedules serialize to JSON for provenance
text = cheb.to_json()
again = IntegrationSchedule.from_json(text)
print("roundtrip equal:", np.array_equal(again.times, cheb.times))
