"""Controlled variable selection with directional error control.

Knockoff-based selection for Gaussian linear models, including a
high-dimensional screen-then-infer pipeline with data splitting or
recycling, sign-restricted statistics, a BH baseline, directional error
metrics, a simulation harness, and brute-force verification oracles.
"""

from .errors import (ConfigError, ConvergenceError, DegenerateInputError,
                     DimensionError, DirFdrError, SingularDesignError,
                     VerificationError)
from .filter import (SelectionResult, StatVector, estimate_signs,
                     knockoff_threshold, select, stat_coef_diff,
                     stat_lasso_entry, stat_omp_entry)
from .knockoffs import (KnockoffPair, construct_knockoffs, equicorrelated_s,
                        recycle_knockoffs)
from .metrics import TrialScore, fdp, fdp_dir, mean_and_se, mfdr_dir_summand, power, score_trial
from .model import (Design, LinearModelSpec, Response, SplitData,
                    load_design_csv, load_response_csv, normalize_columns)
from .oracles import (BernoulliStoppingInstance, GramReport, gram_check,
                      stopping_ratio_exact, scalar_lasso_oracle, swap_antisymmetry_check)
from .pipeline import (HighDimResult, PipelineConfig, ScreenedModelRef,
                       bh_baseline, bh_stepup, knockoff_filter_highdim,
                       knockoff_filter_lowdim, partial_coefficients)
from .screening import (RotationSplit, ScreenResult, lasso_screen,
                        marginal_prescreen, random_rotation, rotate_then_split,
                        split_rows)
from .simulate import (CoefSpec, DesignSpec, ExperimentReport, GeneralGaussianResponse,
                       MethodSpec, gen_ar_design, gen_coefficients, gen_response,
                       run_experiment)
from .solvers import (EntryPath, LassoConfig, SignConstraints, lasso,
                      lasso_path, least_squares, omp, sqrt_lasso,
                      sqrt_lasso_lambda)

__version__ = "0.1.0"
