"""Per-cell training and sweep execution.

Each sweep cell is an independent job: seed everything, build the
model the cell prescribes, train under the shared hyperparameter
block, evaluate once, and append one CSV row.  Failures of a single
cell (dataset missing, out of memory) are recorded and the sweep moves
on; the results file only ever grows.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import Tensor, nn
from torch.utils.data import DataLoader, Dataset

from mixtrain.config import Hyperparameters, SweepCell, SweepConfig
from mixtrain.errors import ConfigurationError, DatasetMissing
from mixtrain.model import build_model

CSV_HEADER = "budget,ratio,seed,p,d,accuracy,epochs,seconds"

# (train dataset, test dataset, number of classes) for one cell
DatasetFactory = Callable[[SweepCell, Hyperparameters], tuple[Dataset, Dataset, int]]

CIFAR100_MEAN = (0.5071, 0.4865, 0.4409)
CIFAR100_STD = (0.2673, 0.2564, 0.2762)


@dataclass(frozen=True)
class RunResult:
    budget: int
    ratio: float
    seed: int
    p: int
    d: int
    accuracy: float
    epochs: int
    seconds: float

    def csv_row(self) -> str:
        return (
            f"{self.budget},{self.ratio},{self.seed},{self.p},{self.d},"
            f"{self.accuracy},{self.epochs},{self.seconds}"
        )


class SyntheticImages(Dataset):
    """Class-prototype images plus noise; learnable in a few epochs.

    The prototypes are drawn from a fixed generator so every instance
    with the same shape parameters describes the same classification
    task; ``seed`` only varies the noise, which is what distinguishes a
    train split from a test split.
    """

    def __init__(
        self,
        n: int,
        num_classes: int = 10,
        *,
        seed: int = 0,
        image_size: int = 32,
        in_channels: int = 3,
        noise: float = 0.75,
    ) -> None:
        proto_gen = torch.Generator().manual_seed(9173)
        prototypes = torch.randn(num_classes, in_channels, image_size, image_size, generator=proto_gen)
        noise_gen = torch.Generator().manual_seed(seed)
        self.labels = torch.arange(n) % num_classes
        self.images = prototypes[self.labels] + noise * torch.randn(
            n, in_channels, image_size, image_size, generator=noise_gen
        )

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, index: int) -> tuple[Tensor, int]:
        return self.images[index], int(self.labels[index])


def cifar100_datasets(
    data_root: str | Path,
    augment: tuple[str, ...],
    *,
    download: bool = False,
) -> tuple[Dataset, Dataset]:
    """Load the 100-class 32x32 dataset from disk, optionally fetching it."""
    from torchvision import datasets, transforms

    base = [transforms.ToTensor()]
    if "normalize" in augment:
        base.append(transforms.Normalize(CIFAR100_MEAN, CIFAR100_STD))
    train_tf = list(base)
    if "random_crop" in augment:
        train_tf.insert(0, transforms.RandomCrop(32, padding=4))
    try:
        train = datasets.CIFAR100(
            str(data_root), train=True, transform=transforms.Compose(train_tf), download=download
        )
        test = datasets.CIFAR100(
            str(data_root), train=False, transform=transforms.Compose(base), download=download
        )
    except RuntimeError as exc:
        raise DatasetMissing(f"CIFAR-100 unavailable under {data_root}: {exc}") from exc
    return train, test


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    torch.manual_seed(seed)
    try:
        import numpy

        numpy.random.seed(seed % 2**32)
    except ImportError:
        pass


@torch.no_grad()
def _evaluate(model: nn.Module, loader: DataLoader, device: torch.device) -> float:
    model.eval()
    correct = 0
    total = 0
    for images, labels in loader:
        logits = model(images.to(device))
        correct += int((logits.argmax(dim=1).cpu() == labels).sum())
        total += len(labels)
    return correct / total


def train_run(
    cell: SweepCell,
    hyper: Hyperparameters,
    data_root: str | Path | None = None,
    *,
    epochs: int | None = None,
    device: str | None = None,
    sigma2: bool = False,
    norm: bool = True,
    residual: bool = True,
    num_classes: int = 100,
    download: bool = False,
    dataset_factory: DatasetFactory | None = None,
) -> RunResult:
    """Train one cell and return its results row.

    The default data source is CIFAR-100 under ``data_root``;
    ``dataset_factory`` substitutes any other (train, test, classes)
    triple, which is how the test suite runs the full pipeline on
    synthetic data.  Training is deterministic per seed as far as the
    stack allows: seeds fix initialization, shuffling, dropout, and
    augmentation on a single device.

    Undocumented choices in the protocol are resolved as constants
    here: constant learning rate, no warmup, and the embedding and head
    excluded from the parameter budget.
    """
    if hyper.optimizer != "adam":
        raise ConfigurationError(f"unsupported optimizer {hyper.optimizer!r}")
    started = time.perf_counter()
    _seed_everything(cell.seed)
    if dataset_factory is not None:
        train_ds, test_ds, classes = dataset_factory(cell, hyper)
    else:
        if data_root is None:
            raise ConfigurationError("data_root is required without a dataset factory")
        train_ds, test_ds = cifar100_datasets(data_root, hyper.augment, download=download)
        classes = num_classes
    dev = torch.device(device) if device else torch.device("cuda" if torch.cuda.is_available() else "cpu")
    model = build_model(
        cell.p,
        cell.d,
        hyper.patch,
        classes,
        sigma2=sigma2,
        dropout=hyper.dropout,
        norm=norm,
        residual=residual,
    ).to(dev)
    optimizer = torch.optim.Adam(
        model.parameters(),
        lr=hyper.lr,
        weight_decay=hyper.weight_decay,
        betas=hyper.betas,
    )
    loss_fn = nn.CrossEntropyLoss()
    loader = DataLoader(
        train_ds,
        batch_size=hyper.batch_size,
        shuffle=True,
        num_workers=0,
        generator=torch.Generator().manual_seed(cell.seed),
    )
    epochs_run = hyper.epochs if epochs is None else epochs
    for _ in range(epochs_run):
        model.train()
        for images, labels in loader:
            optimizer.zero_grad()
            loss = loss_fn(model(images.to(dev)), labels.to(dev))
            loss.backward()
            optimizer.step()
    accuracy = _evaluate(model, DataLoader(test_ds, batch_size=256, num_workers=0), dev)
    return RunResult(
        budget=cell.budget,
        ratio=cell.ratio,
        seed=cell.seed,
        p=cell.p,
        d=cell.d,
        accuracy=accuracy,
        epochs=epochs_run,
        seconds=round(time.perf_counter() - started, 3),
    )


def _ensure_header(out_csv: Path) -> None:
    if not out_csv.exists() or not out_csv.read_text().strip():
        out_csv.write_text(CSV_HEADER + "\n")


def run_sweep(
    config: SweepConfig,
    *,
    out_csv: str | Path,
    data_root: str | Path | None = None,
    epochs: int | None = None,
    device: str | None = None,
    sigma2: bool = False,
    norm: bool = True,
    residual: bool = True,
    download: bool = False,
    dataset_factory: DatasetFactory | None = None,
    progress: Callable[[str], None] | None = None,
) -> tuple[list[RunResult], list[tuple[SweepCell, str]]]:
    """Run every cell sequentially, appending each row as it lands.

    A cell that fails with a missing dataset or a runtime blowup (out
    of memory, numerical collapse) is recorded in the error list and
    skipped; the sweep never aborts mid-grid.  The CSV is append-only
    with this function as its single writer.
    """
    path = Path(out_csv)
    _ensure_header(path)
    results: list[RunResult] = []
    failures: list[tuple[SweepCell, str]] = []
    for cell in config.cells:
        if progress is not None:
            progress(f"cell B={cell.budget} R={cell.ratio} seed={cell.seed} (p={cell.p}, d={cell.d})")
        try:
            result = train_run(
                cell,
                config.hyperparameters,
                data_root,
                epochs=epochs,
                device=device,
                sigma2=sigma2,
                norm=norm,
                residual=residual,
                download=download,
                dataset_factory=dataset_factory,
            )
        except (DatasetMissing, RuntimeError) as exc:
            failures.append((cell, f"{type(exc).__name__}: {exc}"))
            continue
        results.append(result)
        with path.open("a") as fh:
            fh.write(result.csv_row() + "\n")
    return results, failures
