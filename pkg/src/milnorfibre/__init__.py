"""Poincaré polynomials of real Milnor fibres of ADE singularities.

The package builds the germs and their one-parameter morsifications,
certifies critical points with interval arithmetic, emits the predicted
Betti data and checks it against a meshed model of the fibre.
"""

from milnorfibre.poly import Interval, MultiPoly, parse_poly
from milnorfibre.germ import GermDescriptor, build_germ, enumerate_catalog, parse_code
from milnorfibre.morsify import MorsificationFamily, build_family, family_at, representative_t
from milnorfibre.predict import EMPTY, PoincarePolynomial, Prediction, betti_from_morse, predict_table
from milnorfibre.critical import MorseReport, certify_points, closed_form_points, morse_report
from milnorfibre.verify import BettiReport, FibreSpec, betti_numbers, compare, mesh_fibre, verify_germ

__version__ = "0.1.0"

__all__ = [
    "BettiReport",
    "EMPTY",
    "FibreSpec",
    "GermDescriptor",
    "Interval",
    "MorseReport",
    "MorsificationFamily",
    "MultiPoly",
    "PoincarePolynomial",
    "Prediction",
    "betti_from_morse",
    "betti_numbers",
    "build_family",
    "build_germ",
    "certify_points",
    "closed_form_points",
    "compare",
    "enumerate_catalog",
    "family_at",
    "mesh_fibre",
    "morse_report",
    "parse_code",
    "parse_poly",
    "predict_table",
    "representative_t",
    "verify_germ",
]
