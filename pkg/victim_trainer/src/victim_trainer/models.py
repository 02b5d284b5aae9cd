"""The three victim architectures, adapted to single-channel log-Mel input.

Exact layer widths were never published for the first two networks; the
choices here (conv channels 32,32,64,64,128,128 with 3x3 kernels and a
max-pool every two layers) match the stated depth and are reported in
every EvalReport via the model name.
"""

from __future__ import annotations

import torch
from torch import nn
from torchvision.models import resnet18

ARCHS = ("CNN", "CNN_LSTM", "RESNET18")


def _conv_trunk() -> nn.Sequential:
    # six conv layers, max-pool after every second one
    chans = [1, 32, 32, 64, 64, 128, 128]
    layers: list[nn.Module] = []
    for i in range(6):
        layers += [
            nn.Conv2d(chans[i], chans[i + 1], 3, padding=1),
            nn.BatchNorm2d(chans[i + 1]),
            nn.ReLU(inplace=True),
        ]
        if i % 2 == 1:
            layers.append(nn.MaxPool2d(2))
    return nn.Sequential(*layers)


class KwsCnn(nn.Module):
    """Six conv layers + two fully connected layers."""

    def __init__(self, n_classes: int, n_mels: int, n_frames: int):
        super().__init__()
        self.trunk = _conv_trunk()
        h, w = n_mels // 8, n_frames // 8
        self.fc = nn.Sequential(
            nn.Flatten(),
            nn.Linear(128 * h * w, 256),
            nn.ReLU(inplace=True),
            nn.Linear(256, n_classes),
        )

    def forward(self, x):
        return self.fc(self.trunk(x))


class KwsCnnLstm(nn.Module):
    """Same conv trunk, with the fully connected block replaced by an LSTM
    over the frame-major sequence."""

    def __init__(self, n_classes: int, n_mels: int, n_frames: int, hidden: int = 128):
        super().__init__()
        self.trunk = _conv_trunk()
        h = n_mels // 8
        self.lstm = nn.LSTM(128 * h, hidden, batch_first=True)
        self.head = nn.Linear(hidden, n_classes)

    def forward(self, x):
        z = self.trunk(x)  # (B, 128, H, W)
        z = z.permute(0, 3, 1, 2).flatten(2)  # frame-major: (B, W, 128*H)
        _, (hn, _) = self.lstm(z)
        return self.head(hn[-1])


def make_model(arch: str, n_classes: int, n_mels: int, n_frames: int) -> nn.Module:
    if arch == "CNN":
        return KwsCnn(n_classes, n_mels, n_frames)
    if arch == "CNN_LSTM":
        return KwsCnnLstm(n_classes, n_mels, n_frames)
    if arch == "RESNET18":
        model = resnet18(weights=None, num_classes=n_classes)
        model.conv1 = nn.Conv2d(1, 64, kernel_size=7, stride=2, padding=3, bias=False)
        return model
    raise ValueError(f"unknown architecture {arch!r}, expected one of {ARCHS}")
