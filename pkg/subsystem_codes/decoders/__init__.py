from .bp import (
    BpBatchResult,
    BpConfig,
    BpDecoder,
    BpResult,
    TannerGraph,
    bsc_failure_rate,
    bsc_trial,
    decode,
    decode_batch,
    init_llrs,
)
from .exact import MAX_EXACT_LOCI, ExactDecoder
from .induced import (
    BBSInducedDecoder,
    ClassicalDecoder,
    CorrectionFrame,
    InducedDecoder,
    LogicalOutcome,
    SHPInducedDecoder,
    SyndromeFrame,
    bbs_decode,
    classify_residual,
    classify_residual_batch,
    induced_decoder_for,
    shp_decode,
)
from .lookup import LookupDecoder, lookup_decoder_build
