"""Coherence engine: a qubit charged with coherence from a coherent bosonic bath.

Coherence between distinct energies of one qubit cannot be turned into
work; several charged copies together hold coherence inside degenerate
energy blocks, which can.  The modules model the charging step, the
multi-copy activation, and the resulting work, coherence flows and
efficiency.
"""

from .coherence import CoherenceReport, coherence_report, external_coherence, internal_coherence
from .engine_cycle import (
    CyclePerformance,
    EngineOperatingPoint,
    activated_internal_coherence,
    cycle_performance,
    maximally_coherent_benchmark,
)
from .jc_charging import BathSpec, charged_qubit_state, coherence_amplitude, effective_bath_dimension
from .operator_core import DensityOperator, partial_trace, relative_entropy, von_neumann_entropy
from .optimizer import SweepGrid, grid_sweep, optimal_per_n, refine

__all__ = [
    "BathSpec",
    "CoherenceReport",
    "CyclePerformance",
    "DensityOperator",
    "EngineOperatingPoint",
    "SweepGrid",
    "activated_internal_coherence",
    "charged_qubit_state",
    "coherence_amplitude",
    "coherence_report",
    "cycle_performance",
    "effective_bath_dimension",
    "external_coherence",
    "grid_sweep",
    "internal_coherence",
    "maximally_coherent_benchmark",
    "optimal_per_n",
    "partial_trace",
    "refine",
    "relative_entropy",
    "von_neumann_entropy",
]
