from nematiclab.duhamel.lemmas import LemmaCase, random_time_family, verify_lemma, weighted_bound_report
from nematiclab.duhamel.operators import DuhamelOperator, exponential_convolution, op_A, op_B, op_C
from nematiclab.duhamel.series import TimeSeriesField, lebesgue_norm, weighted_norm

__all__ = [
    "DuhamelOperator",
    "LemmaCase",
    "TimeSeriesField",
    "exponential_convolution",
    "lebesgue_norm",
    "op_A",
    "op_B",
    "op_C",
    "random_time_family",
    "verify_lemma",
    "weighted_bound_report",
    "weighted_norm",
]
