from .pheno import (
    BLOCK_SIZE,
    ERROR_TYPES,
    ImportanceResult,
    PhenoModel,
    SimResult,
    run_importance,
    run_trials,
    sweep,
    trials_schedule,
)
from .circuit import (
    Circuit,
    DepolarizingModel,
    Fault,
    Instruction,
    Op,
    PauliFrame,
    PseudothresholdResult,
    build_extraction_circuit,
    enumerate_single_faults,
    protocol_sweep,
    pseudothreshold,
    run_faults,
    run_protocol_trial,
    simulate_protocol,
    threshold_from_results,
)
