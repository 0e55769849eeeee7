"""Binary additive and step-wise memory Markov chains."""

from ._backend import BACKEND
from .chain import (
    AdditiveChainSpec,
    HistoryWindow,
    SpecError,
    StepWiseChainSpec,
    eval_additive_cpdf,
    eval_stepwise_cpdf,
    linear_memory,
    load_spec,
    two_sided_prob,
    validate,
    validate_additive,
)
from .correlation import (
    CorrelationSeq,
    correlation_from_memory,
    estimate_correlation,
    memory_from_correlation,
    variance_of_k,
)
from .entropy import entropy_curve, source_entropy, stationary_distribution, word_probabilities
from .equivalence import map_to_stepwise, match_entropy
from .generator import GenerationConfig, SymbolSequence, generate, read_sequence, write_sequence
from .temperature import inv_temperature, mu_from_inv_temperature

__version__ = "0.1.0"
