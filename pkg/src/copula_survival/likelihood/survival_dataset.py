from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import torch


@dataclass(frozen=True)
class SurvivalRecord:
    """
    A right-censored observation.

    Attributes:
        x (tuple[float, ...]): The covariate vector.
        t (float): The observed time `min(T, U)`.
        delta (int): The event indicator (1 if the event was observed, 0 if
            censored).
    """

    x: tuple[float, ...]
    t: float
    delta: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.t) and self.t >= 0):
            raise ValueError(
                f"Observed times must be finite and nonnegative, got {self.t}."
            )

        if self.delta not in (0, 1):
            raise ValueError(
                f"Event indicators must be 0 or 1, got {self.delta}."
            )


@dataclass(frozen=True)
class SurvivalDataset:
    """
    A nonempty collection of right-censored observations stored as tensors.

    Attributes:
        x (torch.Tensor): The covariates, with shape `(n, d)`.
        t (torch.Tensor): The observed times, with shape `(n,)`.
        delta (torch.Tensor): The event indicators (0.0 or 1.0), with shape
            `(n,)`.
    """

    x: torch.Tensor
    t: torch.Tensor
    delta: torch.Tensor

    def __post_init__(self) -> None:
        x = torch.as_tensor(self.x, dtype=torch.float64)
        t = torch.as_tensor(self.t, dtype=torch.float64)
        delta = torch.as_tensor(self.delta, dtype=torch.float64)
        if x.dim() == 1:
            x = x.unsqueeze(-1)

        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "delta", delta)

        if t.dim() != 1 or t.numel() == 0:
            raise ValueError("A survival dataset must contain records.")

        if x.dim() != 2 or x.shape[0] != t.shape[0]:
            raise ValueError(
                f"Covariate matrix shape {tuple(x.shape)} does not match "
                f"{t.shape[0]} records."
            )

        if delta.shape != t.shape:
            raise ValueError(
                "Event indicators must have one entry per record."
            )

        if not torch.isfinite(t).all() or (t < 0).any():
            raise ValueError("Observed times must be finite and nonnegative.")

        if not ((delta == 0) | (delta == 1)).all():
            raise ValueError("Event indicators must be 0 or 1.")

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def __getitem__(self, index: int) -> SurvivalRecord:
        return SurvivalRecord(
            x=tuple(self.x[index].tolist()),
            t=float(self.t[index]),
            delta=int(self.delta[index]),
        )

    def __iter__(self) -> Iterator[SurvivalRecord]:
        for index in range(len(self)):
            yield self[index]

    @property
    def covariate_dim(self) -> int:
        return int(self.x.shape[1])

    @property
    def num_events(self) -> int:
        return int(self.delta.sum().item())

    @property
    def num_censored(self) -> int:
        return len(self) - self.num_events

    @property
    def censoring_rate(self) -> float:
        return self.num_censored / len(self)

    def subset(
        self, indices: torch.Tensor | Sequence[int]
    ) -> "SurvivalDataset":
        indices = torch.as_tensor(indices, dtype=torch.long)

        return SurvivalDataset(
            x=self.x[indices].clone(),
            t=self.t[indices].clone(),
            delta=self.delta[indices].clone(),
        )

    @classmethod
    def from_records(
        cls, records: Sequence[SurvivalRecord]
    ) -> "SurvivalDataset":
        if not records:
            raise ValueError("A survival dataset must contain records.")

        dims = {len(record.x) for record in records}
        if len(dims) != 1:
            raise ValueError(
                "All records must have the same covariate dimension, got "
                f"dimensions {sorted(dims)}."
            )

        return cls(
            x=torch.tensor(
                [list(record.x) for record in records], dtype=torch.float64
            ).reshape(len(records), dims.pop()),
            t=torch.tensor(
                [record.t for record in records], dtype=torch.float64
            ),
            delta=torch.tensor(
                [record.delta for record in records], dtype=torch.float64
            ),
        )
