"""laughline: multimodal timeline alignment and laughter analytics.

The package nests subtitle, laughter, shot, and pose streams into 60-second
anchor blocks by half-open timestamp containment (no resampling), derives
kinematic signals from raw skeletal keypoints, evaluates and post-processes
external topic-model outputs, aggregates corpus-level laughter analytics,
and runs a short-horizon laughter-onset prediction benchmark.
"""

from .errors import LaughlineError, ParseError, SchemaError, StructuralError
from .kinematics import KinematicSample, arm_spread, compute_kinematics, kinetic_energy, smooth, trunk_lean
from .laughter import LaughWindow, coverage, merge_windows
from .metrics import MetricsReport, auprc, auroc, compute_metrics, tune_threshold
from .onset import (
    AnchorSample,
    BenchShow,
    ClassifierConfig,
    PCATransform,
    SplitAssignment,
    fit_pca,
    group_split,
    history_features,
    run_ablation,
    sample_anchors,
    train_classifier,
    vision_features,
)
from .subtitles import SubtitleCue, TextBlock, build_blocks, parse_srt, parse_vtt, remove_stopwords
from .timeline import (
    BBox,
    LaughterEvent,
    Overflow,
    PoseFrame,
    ShotFrame,
    ShowTimeline,
    TimedSpan,
    TopicBlock,
    assign_by_containment,
    build_timeline,
    deserialize_show,
    serialize_show,
)
from .topics import (
    TopicAssignment,
    TopicDescriptor,
    TopicModelDiagnostics,
    centroid_reassign,
    composite_score,
    diagnostics,
    gap_fill,
    normalize_embedding,
    npmi_coherence,
    select_model,
)
from .analysis import (
    FeatureMatrix,
    TopicProfile,
    build_feature_matrix,
    cluster_order,
    correlations_with_laughter,
    pearson,
    topic_profiles,
    zscore_rows,
)

__version__ = "0.1.0"
