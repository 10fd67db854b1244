"""Preprocessing-robustness benchmark for recommender-system evaluation.

Thin wrapper over the C++ core; see `reprobench._core` for the full surface.
"""

from ._core import (  # noqa: F401
    ConfigError,
    DataError,
    Interaction,
    PDataset,
    RankedList,
    RawDataset,
    RecModel,
    Session,
    __version__,
    bootstrap_std_ci,
    build_pdataset,
    dataset_stats,
    embed_2d,
    fit,
    generate_synthetic,
    ndcg_at_k,
    parse_interactions,
    percentile_linear,
    precision_at_k,
    rank_average_ties,
    read_canonical,
    robustness,
    run_experiment,
    select_protocol,
    spearman,
    write_canonical,
)
