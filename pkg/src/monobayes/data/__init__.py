from .corpus import DATASETS, CorpusEntry, load_corpus, raw_table
from .dataset import DiscreteDataset
from .discretize import (
    DiscretizationSpec,
    EqualFrequencyDiscretizer,
    Recipe,
    apply_cutpoints,
    discretize,
    equal_frequency_cutpoints,
    infer_recipe,
)
from .dsl import format_qualitative_model, parse_qualitative_model
from .split import SplitSpec, sample_training_set, stratified_split
from .tables import RawTable, drop_incomplete, load_table

__all__ = [
    "DATASETS", "CorpusEntry", "DiscreteDataset", "DiscretizationSpec",
    "EqualFrequencyDiscretizer", "RawTable", "Recipe", "SplitSpec", "apply_cutpoints",
    "discretize", "drop_incomplete", "equal_frequency_cutpoints", "format_qualitative_model",
    "infer_recipe", "load_corpus", "load_table", "parse_qualitative_model", "raw_table",
    "sample_training_set", "stratified_split",
]
