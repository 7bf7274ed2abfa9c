# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from collections import OrderedDict

import torch
import torch.nn as nn
import torch.nn.functional as F

from core.errors import DatasetError


class OneHotCrossEntropyLoss(nn.Module):
    """Mean cross-entropy between softmax(logits) and one-hot targets."""

    def __init__(self, num_classes=7):
        super(OneHotCrossEntropyLoss, self).__init__()
        self.num_classes = num_classes

    def forward(self, logits, target):
        one_hot = F.one_hot(target, self.num_classes).to(logits.dtype)
        log_prob = F.log_softmax(logits, dim=1)
        return -(one_hot * log_prob).sum(dim=1).mean()


def loss_and_gradient(model, features, targets):
    """Full-batch loss and its gradient, keyed like `model.named_parameters()`."""
    features = torch.as_tensor(features, dtype=torch.float64)
    targets = torch.as_tensor(targets, dtype=torch.long)
    if features.shape[0] == 0:
        raise DatasetError("loss_and_gradient needs a nonempty batch")

    criterion = OneHotCrossEntropyLoss(model.output.out_features)
    names, params = zip(*model.named_parameters())
    loss = criterion(model.logits(features), targets)
    grads = torch.autograd.grad(loss, params)

    return loss.item(), OrderedDict(
        (name, g.detach().clone()) for name, g in zip(names, grads))
