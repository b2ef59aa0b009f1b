"""DODGE: hyperparameter tuning that skips options whose results land within epsilon of earlier ones."""
from .algorithm import DodgeConfig, DodgeResult, is_redundant, run_dodge
from .baselines import DEConfig, de_optimize, de_rf, random_search, smotuned
from .data import CrossValPlan, Dataset, DataError, Split, TextCorpus, cross_val_splits, load_tabular_csv, version_split
from .evaluate import Evaluator
from .fftrees import FFtree, train_fftree
from .metrics import Goal, GoalScore, d2h, popt20
from .space import OptionTree, Task, build_table1_tree

__version__ = "0.1.0"

__all__ = [
    "CrossValPlan", "DEConfig", "DataError", "Dataset", "DodgeConfig", "DodgeResult", "Evaluator", "FFtree",
    "Goal", "GoalScore", "OptionTree", "Split", "Task", "TextCorpus", "build_table1_tree", "cross_val_splits",
    "d2h", "de_optimize", "de_rf", "is_redundant", "load_tabular_csv", "popt20", "random_search", "run_dodge",
    "smotuned", "train_fftree", "version_split",
]
