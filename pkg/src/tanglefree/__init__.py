"""Tangling of word pairs under random homomorphisms F_m -> Sym_n, carrier graphs,
and horoball decisions for random covers of punctured surfaces."""

__version__ = "0.1.0"
