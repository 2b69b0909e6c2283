"""User-adaptive filtering of harassing messages.

Corpus analytics over categorized message surveys, from-scratch learners
(Naive Bayes, linear SVM, random forest), general vs user-adapted vs
majority-baseline filter regimes with cross-validated comparison, a
statistical battery (ANOVA, Tukey HSD, Wilcoxon, proportion CIs), a seeded
synthetic population generator, and a live labeling HTTP service.
"""

from .config import RunConfig, load_config
from .corpus import (
    NON_CODABLE,
    Category,
    Message,
    SurveySet,
    UserResponse,
    agreement_distribution,
    category_frequencies,
    filter_rate_by_category,
    filter_rate_by_category_intensity,
    load_messages,
    load_responses,
    load_survey,
    majority_category,
    user_filter_histogram,
)
from .filters import (
    EvalReport,
    GeneralFilter,
    UserAgent,
    compare_regimes,
    cross_validate_user,
    evaluate_general_per_user,
    majority_baseline,
    train_general,
    train_user_agent,
)
from .learners import (
    KINDS,
    ClassifierModel,
    LearnerParams,
    TrainingSet,
    accuracy,
    deserialize_model,
    fit,
    predict,
    serialize_model,
)
from .stats import (
    AnovaResult,
    PropDiffCI,
    StatConfig,
    TukeyResult,
    WilcoxonResult,
    anova_oneway,
    f_cdf,
    prop_diff_ci,
    spearman,
    studentized_range_quantile,
    tukey_hsd,
    wilcoxon_signed_rank,
)
from .synthpop import GenConfig, SynthUserProfile, generate
from .textfeat import (
    FeatureConfig,
    SparseVector,
    Vocabulary,
    build_vocabulary,
    tokenize,
    vectorize,
)

__version__ = "0.1.0"
