from src.metrics.quality import (
    CutAxis,
    ImageCut,
    QualityReport,
    extract_cut,
    ghost_level,
    peak_sidelobe_ratio,
    quality_report,
    suppression_delta,
)

__all__ = [
    "CutAxis",
    "ImageCut",
    "QualityReport",
    "extract_cut",
    "ghost_level",
    "peak_sidelobe_ratio",
    "quality_report",
    "suppression_delta",
]
