"""Routine discovery from unsegmented UI logs.

Pipeline: parse -> preprocess -> normalize -> control-flow graph ->
back-edges -> segments -> closed sequential patterns -> routines.
"""

from uiroutines.cfg import BackEdgeSet, Cfg, DominatorTree, Scc, build_cfg, detect_back_edges
from uiroutines.metrics import jaccard, normalized_led
from uiroutines.mining import (
    RoutineCandidate,
    SequentialPattern,
    extract_routines,
    mine_closed_patterns,
)
from uiroutines.preprocess import apply_rules, default_rules
from uiroutines.segmenter import Segment, SegmentationReport, identify_segments
from uiroutines.uilog import (
    ContextSchema,
    LogFormat,
    NormalizedUI,
    UILog,
    UserInteraction,
    normalize,
    parse_log,
)

__version__ = "0.1.0"

__all__ = [
    "BackEdgeSet",
    "Cfg",
    "ContextSchema",
    "DominatorTree",
    "LogFormat",
    "NormalizedUI",
    "RoutineCandidate",
    "Scc",
    "Segment",
    "SegmentationReport",
    "SequentialPattern",
    "UILog",
    "UserInteraction",
    "apply_rules",
    "build_cfg",
    "default_rules",
    "detect_back_edges",
    "extract_routines",
    "identify_segments",
    "jaccard",
    "mine_closed_patterns",
    "normalize",
    "normalized_led",
    "parse_log",
]
