"""Time-series classification with histograms of symbolic polynomial words."""

from .bagging import Histogram, build_dictionary, populate_histogram, write_histogram_csv
from .baselines import SaxConfig, bsax_transform, dtw_distance, euclidean_distance, paa, sax_word
from .evaluation import (
    CvReport,
    MethodConfig,
    cross_validate,
    default_grid,
    grid_search,
    holdout_evaluate,
    make_folds,
    nn_classify,
)
from .pipeline import sympol_transform, sympol_words
from .polyfit import build_design_matrix, build_projection, extract_coefficients, fit_window
from .symbolic import coefficients_to_words, compute_thresholds, make_alphabet, symbol_index
from .synthetic import generate_bag_of_patterns
from .timeseries import (
    DatasetError,
    LabeledSeries,
    SeriesDataset,
    load_dataset,
    save_dataset,
    znormalize_window,
)

__version__ = "0.1.0"
