"""augsim: perceptual similarity between augmentations and corruptions.

The toolkit embeds image transforms into a feature space (the mean
embedded difference a transform induces over a fixed image subset),
measures nearest-sample and mean-discrepancy distances between
augmentation schemes and corruption distributions, and synthesizes
corruption benchmarks that are maximally dissimilar from a reference set
under an error-matching constraint.
"""

from .builder import (
    BenchmarkResult,
    CandidateDataset,
    ContributionRanking,
    ErrorTable,
    SeverityGroup,
    build_benchmark,
    dataset_distance,
    form_severity_groups,
    rank_contributions,
    read_error_table,
    sample_candidates,
    select_benchmark,
    write_error_table,
)
from .cbf import read_features, write_features
from .distances import (
    DistanceReport,
    SampleSet,
    mmd,
    mmd_to_center,
    msd,
    rank_augmentations,
    select_subset,
    spearman,
    variance_probe,
)
from .errors import (
    AugsimError,
    CompositionError,
    ConfigError,
    CoverageError,
    DataError,
    DomainError,
    FeasibilityError,
    FingerprintError,
    FormatError,
    RegistryError,
)
from .features import (
    BuiltinExtractor,
    FileExtractor,
    TransformFeature,
    corruption_center,
    embed_image,
    featurize_transform,
)
from .images import (
    ImageSubset,
    list_images,
    load_image,
    sample_subset,
    save_image,
    subset_from_arrays,
)
from .transforms import (
    AugmentationScheme,
    SampledAugmentation,
    TransformSpec,
    apply_transform,
    enumerate_powerset,
    registry_list,
    render_dataset,
    sample_augmentation,
)

__version__ = "0.1.0"
