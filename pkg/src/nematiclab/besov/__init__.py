from nematiclab.besov.decomposition import DyadicDecomposition, dyadic_blocks
from nematiclab.besov.norms import (
    besov_norm,
    embedding_ratio,
    geometric_time_grid,
    heat_characterization_norm,
    lr_in_time_norm,
    rescale_field,
    smallness_eta,
    smallness_holds,
)

__all__ = [
    "DyadicDecomposition",
    "besov_norm",
    "dyadic_blocks",
    "embedding_ratio",
    "geometric_time_grid",
    "heat_characterization_norm",
    "lr_in_time_norm",
    "rescale_field",
    "smallness_eta",
    "smallness_holds",
]
