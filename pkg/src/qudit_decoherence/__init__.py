"""Time-dependent qudit decoherence: generators, dynamics, divisibility and
their phase-space picture on complex projective space."""

from .generators import GeneratorSpec, assemble_generator, make_spec
from .noise_bases import family, gell_mann, mub_projectors, pauli_strings, weyl
from .rates import RateSchedule

__all__ = [
    "GeneratorSpec", "RateSchedule", "assemble_generator", "family",
    "gell_mann", "make_spec", "mub_projectors", "pauli_strings", "weyl",
]
