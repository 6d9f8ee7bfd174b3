"""Ordinal classification by data replication, unimodal networks and rank metrics."""

from ordrep.core import Dataset, MinMaxScaler, SplitPlan
from ordrep.replicate import ExtendedDataset, ReplicationConfig

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "ExtendedDataset",
    "MinMaxScaler",
    "ReplicationConfig",
    "SplitPlan",
]
