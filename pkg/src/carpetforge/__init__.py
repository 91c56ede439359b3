"""Quantum carpets: revival structure, beats and intermode traces of bound wavepackets."""

from .errors import CarpetError, ConfigError, NumericalError
from .spectra import Eigenbasis, Eigenfunction, bohr_sommerfeld_solve, eigen_system
from .wavepacket import PacketSpec, Timescales, make_coefficients, timescales
from .evolve import DensityGrid, density_grid, psi_direct
from .revivals import (Fraction, farey_listing, farey_sequence, psi_cl,
                       reconstruct_at_fraction, revival_coefficients)
from .beats import BeatSpec, beat_signal_direct, dephase_time
from .carpet_closed import CarpetClosedParams, carpet_grid, dephase_curve, isw_carpet_closed
from .traces import degeneracy_bundles, partition_density, intermode_velocities
from .render import write_csv, write_pgm

__version__ = "0.1.0"
