"""Device-independent lower bounds on a party's Hilbert-space dimension in multiparty Bell experiments."""

from .bounds import (
    AmsOptions,
    BoundReport,
    ams,
    dimension_bound,
    dimension_bound_grouped,
    fidelity_bound_ams,
    fidelity_bound_trivial,
    purity_bound,
    round_bound,
)
from .correlation import (
    Correlation,
    CorrelationError,
    PDCorrelation,
    ValidationReport,
    bell_to_pd,
    check_no_signalling,
    group_bobs,
    new_correlation,
    promote_party,
    read,
    reorder_bobs,
    tensor_product,
    validate,
    write,
)
from .ensemble import EnsembleResult, ensemble_run, table_rows
from .generators import eq19_correlation, generate, ghz_correlation, maxent_cb_correlation, prbox_correlation
from .quantum import (
    DensityMatrix,
    MeasurementSet,
    PureState,
    QuantumScenario,
    born_correlation,
    builtin_state,
    collapse,
    fidelity,
    partial_trace,
    pd_correlation,
    purity,
    random_measurement_set,
)

__version__ = "0.1.0"
