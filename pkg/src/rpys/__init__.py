"""Reference publication year spectroscopy toolkit.

Parse citation-database exports, deduplicate cited-reference variants,
compute spectrogram series and influence indicators, flag peak years,
replay analysis scripts, and serve an interactive explorer.
"""

from .wos import (
    CitingRecord,
    RawCitedReference,
    WosFormatError,
    WosParseResult,
    parse_cited_reference,
    parse_wos_file,
)
from .model import (
    CitedReference,
    Dataset,
    DatasetStats,
    EmptyDatasetError,
    YearFilter,
    build_dataset,
    compute_stats,
    normalize_raw,
    remove_by_ncr,
)
from .clustering import (
    ClusterAssignment,
    ClusterConfig,
    cluster,
    comparison_string,
    levenshtein_distance,
    levenshtein_similarity,
    merge,
)
from .indicators import (
    IndicatorRow,
    MissingRpyError,
    highly_influential,
    indicator_rows,
    n_top_family,
    ncr_by_rpy,
    perc_yr,
)
from .spectroscopy import (
    PeakReference,
    SpectrogramRow,
    median_deviation,
    peak_report,
    spectrogram,
    tukey_peaks,
    tukey_upper_fence,
)
from .scripting import (
    ExecutionReport,
    ScriptCommand,
    ScriptExecutionError,
    ScriptSemanticError,
    ScriptSyntaxError,
    StepReport,
    execute,
    format_script,
    parse_script,
    run_script_text,
)
from .exports import (
    CreFormatError,
    export_csv_cr,
    export_csv_graph,
    export_ui_bundle,
    load_cre,
    save_cre,
)
from .session import OperationOrderError, Session

__version__ = "0.1.0"
