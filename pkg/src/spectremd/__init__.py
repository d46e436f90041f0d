"""Graph-spectral classification toolkit.

Converts weighted connectivity graphs into normalized-Laplacian spectra,
compares spectra with the earth mover's distance, builds exponential
distance kernels, and evaluates precomputed-kernel SVM classification under
repeated stratified cross-validation.
"""

from .graphs import (
    ConnectivityGraph,
    apply_weighting,
    degrees,
    group_average,
    normalized_laplacian,
    scale_by_total_weight,
    weight_combined,
    weight_distance,
    weight_original,
)
from .spectral import (
    ConvergenceError,
    DensityCurve,
    Spectrum,
    density_curve,
    eigenvalues_symmetric,
    spectrum_of,
)
from .distances import TransportPlan, emd, emd_lp, emd_sorted, pairwise_distances
from .kernels import (
    GramMatrix,
    bag_of_edges,
    emd_kernel_gram,
    gram_for_kernel,
    linear_gram,
    spectrum_features,
)
from .svm import TrainedSvm, dual_objective, svm_decision, svm_decisions, svm_train
from .evaluation import (
    CvReport,
    cross_validate,
    kfold_splits,
    mean_roc_curve,
    precision_recall,
    roc_auc,
    run_experiment,
    run_pipeline,
)
from .randgraphs import generate_ba, generate_er, generate_ws
from .io import (
    AsymmetryWarning,
    DataFormatError,
    DatasetManifest,
    ManifestEntry,
    load_coordinates,
    load_dataset,
    load_gram,
    load_manifest,
    load_matrix,
    save_gram,
    save_matrix,
)

__version__ = "0.1.0"
