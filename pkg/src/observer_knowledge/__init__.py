"""Density matrices as observer knowledge: built from outcome probabilities,
updated with Bayes' theorem, merged across observers and checked for
uncertainty-principle violations."""

__version__ = "0.1.0"

from .bayes import (
    CountData,
    HypothesisState,
    Posterior,
    Prior,
    amalgamate,
    effective_density,
    hypothesis_update,
    posterior,
    posterior_density_at,
    posterior_mean,
)
from .density import (
    BlochVector,
    DensityMatrix,
    ObservableBasis,
    Physicality,
    ProbabilityTable,
    build_basis,
    density_from_probs,
    expectation,
    pauli_expand,
    physicality,
    probs_from_density,
)
from .merge import (
    MergeReport,
    ObserverRecord,
    density_from_observable,
    merge_commuting,
    merge_noncommuting,
    observer_density,
    partial_knowledge_density,
    product_criterion,
)
from .simulator import DetectorSpec, Simulator, SourceSpec, sample_counts, sequential_run
from .violations import ViolationWitness, find_witness, inject_offdiagonal, robertson_deficit
