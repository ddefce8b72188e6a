"""Flows on spaces of unimodular lattices."""

from .groups import OneParamSubgroup, geodesic, horocycle, unipotent_exp
from .lattice import (LatticePoint, random_unimodular, reduce, shortest_vector_length,
                      successive_minima)
from .orbits import (EXP_INV_SHORTEST, ONE, SHORTEST, HaarSample, Observable, OrbitSeries,
                     ScanBins, equidistribution_gap, haar_bin_mass, hecke_sample_sl3, flow_orbit, haar_sample_sl2,
                     generic_start_sl2, period_average, so_nilpotent_generators,
                     so_orbit_scan)
from .polynomial import chebyshev_eta, eta_of, poly_divergence_eta
