"""The five benchmark datasets and their knowledge-based networks."""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources

from ..exceptions import DomainError
from ..model import QualitativeModel
from .dataset import DiscreteDataset
from .discretize import (
    ALLOWED_BINS,
    ColumnRule,
    DiscretizationSpec,
    Mapped,
    Numeric,
    Ordinal,
    Recipe,
    Threshold,
    discretize,
)
from .dsl import parse_qualitative_model
from .tables import RawTable, drop_incomplete, load_table

_PRICE = ("low", "med", "high", "vhigh")

RECIPES: dict[str, Recipe] = {
    "auto-mpg": Recipe((
        ColumnRule("cylinders", "cylinders", Numeric()),
        ColumnRule("displacement", "disp", Numeric()),
        ColumnRule("horsepower", "horsepwr", Numeric()),
        ColumnRule("weight", "weight", Numeric()),
        ColumnRule("acceleration", "accel", Numeric()),
        ColumnRule("model_year", "modelyear", Numeric()),
        # Japan against Europe and USA
        ColumnRule("origin", "origin", Mapped({"1": 0, "2": 0, "3": 1}, 2)),
        ColumnRule("mpg", "mpg", Threshold(28.0)),
    ), "mpg"),
    "haberman": Recipe((
        ColumnRule("age", "age", Numeric()),
        ColumnRule("year", "year", Numeric()),
        ColumnRule("nodes", "nodes", Numeric()),
        # 1 = survived five years or longer
        ColumnRule("survival", "class", Mapped({"1": 1, "2": 0}, 2)),
    ), "class"),
    "pima": Recipe((
        *(ColumnRule(c, c, Numeric())
          for c in ("preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age")),
        ColumnRule("class", "class", Mapped({"0": 0, "1": 1}, 2)),
    ), "class"),
    "bcw": Recipe((
        ColumnRule("class", "malignant", Mapped({"2": 0, "4": 1}, 2)),
        ColumnRule("clump_thickness", "clumpthick", Numeric()),
        ColumnRule("cell_size", "cellsize", Numeric()),
        ColumnRule("cell_shape", "cellshape", Numeric()),
        ColumnRule("marginal_adhesion", "adhesion", Numeric()),
        ColumnRule("epithelial_size", "epitsize", Numeric()),
        ColumnRule("bare_nuclei", "barenucl", Numeric()),
        ColumnRule("bland_chromatin", "blandchr", Numeric()),
        ColumnRule("normal_nucleoli", "normnuc", Numeric()),
        ColumnRule("mitoses", "mitoses", Numeric()),
    ), "malignant"),
    "car": Recipe((
        ColumnRule("buying", "price", Ordinal(_PRICE)),
        ColumnRule("maint", "maint", Ordinal(_PRICE)),
        ColumnRule("doors", "doors", Ordinal(("2", "3", "4", "5more"))),
        ColumnRule("persons", "person", Ordinal(("2", "4", "more"))),
        ColumnRule("lug_boot", "luggage", Ordinal(("small", "med", "big"))),
        ColumnRule("safety", "safety", Ordinal(("low", "med", "high"))),
        ColumnRule("class", "class", Mapped({"unacc": 0, "acc": 1, "good": 1, "vgood": 1}, 2)),
    ), "class"),
}

DATASETS = tuple(RECIPES)

# alternative structures over the same data
MODEL_VARIANTS = {"car-nodoors": "car"}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    dataset: DiscreteDataset
    model: QualitativeModel
    discretization: DiscretizationSpec
    dropped: int


def _read(filename: str) -> str:
    return resources.files(__package__).joinpath("corpus", filename).read_text()


def raw_table(name: str) -> RawTable:
    if name not in RECIPES:
        raise DomainError(f"unknown dataset {name!r}; choose from {', '.join(DATASETS)}")
    return load_table(io.StringIO(_read(f"{name}.csv")))


def model_source(name: str) -> str:
    return _read(f"{name}.bn")


def load_corpus(name: str, bins: int = 2, model: str | None = None) -> CorpusEntry:
    """Prepared dataset plus its network, with cardinalities bound to the data.

    ``model`` selects a structure variant (e.g. ``car-nodoors``); variables
    it omits are dropped from the dataset.
    """
    if bins not in ALLOWED_BINS:
        raise DomainError(f"bins must be one of {ALLOWED_BINS}")
    data_name = MODEL_VARIANTS.get(name, name)
    model_name = model or name
    recipe = RECIPES.get(data_name)
    if recipe is None:
        raise DomainError(f"unknown dataset {name!r}; choose from {', '.join(DATASETS)}")
    table = drop_incomplete(raw_table(data_name), recipe.sources)
    dataset, spec = discretize(table, recipe, bins)
    qm = parse_qualitative_model(model_source(model_name), dataset.cardinalities)
    if set(qm.names) != set(dataset.names):
        keep = [dataset.column_index(n) for n in qm.names]
        dataset = DiscreteDataset(tuple(dataset.variables[i] for i in keep),
                                  dataset.values[:, keep], qm.class_variable)
    return CorpusEntry(model_name, dataset, qm, spec, table.dropped)
