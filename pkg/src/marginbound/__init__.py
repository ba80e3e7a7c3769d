"""Margin-distribution and approximate-dimension bounds for voting classifiers."""

from .data import LabeledDataset, gen_boolean_dnf, gen_intervals, gen_twonorm, load_csv
from .dimension import DeltaBoundParams, WeightSpectrum, delta_bound, delta_dimension, eps_n
from .doomlp import doom_lp, margin_cost
from .ensemble import ConvexCombination, TrainingTrace, adaboost, bagging, exact_oracle_1d
from .errors import ConfigError, DataError, MarginBoundError, NumericalError
from .margins import BoundParams, MarginProfile, PsiFunction, empirical_psi_bound, gamma_bound
from .rng import RngState
from .stumps import Stump, train_stump

__version__ = "0.1.0"
