"""Width-matched mixer classifiers for small images.

The model follows the structure whose depth-to-width trade-off the
planner reasons about: after patch embedding, the token axis is
projected to the channel width d, and the trunk is p alternating
mixing layers, each a single d-by-d linear map on one axis followed by
an activation.  With both axes at width d every mixing layer costs
d^2 + O(d) parameters, so the trunk as a whole costs about p * d^2,
which is exactly the quantity the sweep budgets count.  Patch
embedding, the token projection, and the classifier head sit outside
the budget; ``count_params`` reports either view.

The activation is a smooth default (GELU) with elementwise squaring
available behind a flag, since squaring is the variant the rank
analysis studies while the smooth one is what trains well.  Norm and
residual wiring around each layer are likewise flags: on by default
because deep plain stacks do not optimize, off when the algebraic
contract of a bare layer is being checked.
"""

from __future__ import annotations

import torch
from torch import Tensor, nn

from mixtrain.errors import ConfigurationError


class SquareActivation(nn.Module):
    def forward(self, x: Tensor) -> Tensor:
        return x * x


class MixingBlock(nn.Module):
    """One mixing layer: a d-by-d linear map on one axis, then the activation.

    ``axis`` is "token" or "channel"; inputs are [batch, channel, token]
    with both non-batch axes of size d.  In plain mode (no norm, no
    residual) the forward pass is exactly activation(linear(x)) on the
    chosen axis.
    """

    def __init__(
        self,
        width: int,
        axis: str,
        *,
        sigma2: bool = False,
        dropout: float = 0.0,
        norm: bool = True,
        residual: bool = True,
    ) -> None:
        super().__init__()
        if axis not in ("token", "channel"):
            raise ConfigurationError(f"unknown mixing axis {axis!r}")
        self.axis = axis
        self.residual = residual
        self.norm = nn.LayerNorm(width) if norm else None
        self.linear = nn.Linear(width, width)
        self.act: nn.Module = SquareActivation() if sigma2 else nn.GELU()
        self.drop = nn.Dropout(dropout)

    def forward(self, x: Tensor) -> Tensor:
        z = x if self.axis == "token" else x.transpose(1, 2)
        y = z if self.norm is None else self.norm(z)
        y = self.drop(self.act(self.linear(y)))
        if self.axis == "channel":
            y = y.transpose(1, 2)
        return x + y if self.residual else y


class MixerClassifier(nn.Module):
    def __init__(
        self,
        p: int,
        d: int,
        patch: tuple[int, int],
        num_classes: int,
        *,
        sigma2: bool = False,
        dropout: float = 0.0,
        norm: bool = True,
        residual: bool = True,
        image_size: int = 32,
        in_channels: int = 3,
    ) -> None:
        super().__init__()
        ph, pw = patch
        if p < 1 or d < 1:
            raise ConfigurationError(f"depth and width must be positive, got p={p}, d={d}")
        if num_classes < 2:
            raise ConfigurationError("a classifier needs at least two classes")
        if ph < 1 or pw < 1 or image_size % ph or image_size % pw:
            raise ConfigurationError(f"patch {patch} does not tile a {image_size}x{image_size} image")
        if not 0.0 <= dropout < 1.0:
            raise ConfigurationError(f"dropout must be in [0, 1), got {dropout}")
        tokens = (image_size // ph) * (image_size // pw)
        self.p = p
        self.d = d
        self.embed = nn.Conv2d(in_channels, d, kernel_size=(ph, pw), stride=(ph, pw))
        self.token_proj = nn.Linear(tokens, d)
        self.blocks = nn.ModuleList(
            MixingBlock(
                d,
                "token" if i % 2 == 0 else "channel",
                sigma2=sigma2,
                dropout=dropout,
                norm=norm,
                residual=residual,
            )
            for i in range(p)
        )
        self.head = nn.Linear(d, num_classes)

    def forward(self, x: Tensor) -> Tensor:
        z = self.embed(x).flatten(2)  # [batch, channel=d, tokens]
        z = self.token_proj(z)  # [batch, d, d]
        for block in self.blocks:
            z = block(z)
        return self.head(z.mean(dim=2))


def build_model(
    p: int,
    d: int,
    patch: tuple[int, int],
    num_classes: int,
    *,
    sigma2: bool = False,
    dropout: float = 0.0,
    norm: bool = True,
    residual: bool = True,
    image_size: int = 32,
    in_channels: int = 3,
) -> MixerClassifier:
    """Construct a mixer; every configuration error raises before training."""
    return MixerClassifier(
        p,
        d,
        patch,
        num_classes,
        sigma2=sigma2,
        dropout=dropout,
        norm=norm,
        residual=residual,
        image_size=image_size,
        in_channels=in_channels,
    )


def overhead_param_count(
    d: int,
    patch: tuple[int, int],
    num_classes: int,
    *,
    image_size: int = 32,
    in_channels: int = 3,
) -> int:
    """Parameters outside the mixing stack: embedding, token projection, head."""
    ph, pw = patch
    tokens = (image_size // ph) * (image_size // pw)
    conv = in_channels * ph * pw * d + d
    proj = tokens * d + d
    head = d * num_classes + num_classes
    return conv + proj + head


def count_params(model: MixerClassifier, mode: str = "mixing") -> int:
    """Count trainable parameters; "mixing" covers the budgeted trunk, "all" everything."""
    if mode == "mixing":
        modules: nn.Module = model.blocks
    elif mode == "all":
        modules = model
    else:
        raise ConfigurationError(f"unknown count mode {mode!r}")
    return sum(t.numel() for t in modules.parameters() if t.requires_grad)
