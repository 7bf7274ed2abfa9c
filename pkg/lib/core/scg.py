# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Scaled Conjugate Gradient (Moller, 1993) as a torch optimizer.

Usage mirrors torch.optim.LBFGS: `optimizer.step(closure)` where the closure
zeroes the gradients, computes the full-batch loss, calls backward and returns
the loss. One call performs one SCG iteration (successful or not).
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import math

import torch
from torch.nn.utils import parameters_to_vector
from torch.nn.utils import vector_to_parameters
from torch.optim import Optimizer


class SCG(Optimizer):
    def __init__(self, params, sigma=1e-4, lambd=1e-6, restart=None):
        if not sigma > 0:
            raise ValueError(f"Invalid sigma: {sigma}")
        if not lambd > 0:
            raise ValueError(f"Invalid lambda: {lambd}")
        defaults = dict(sigma=sigma, lambd=lambd)
        super(SCG, self).__init__(params, defaults)

        if len(self.param_groups) != 1:
            raise ValueError("SCG doesn't support per-parameter options")
        self._params = self.param_groups[0]["params"]
        self._numel = sum(p.numel() for p in self._params)
        self.restart = int(restart) if restart else self._numel

    def _flat_grad(self):
        views = []
        for p in self._params:
            if p.grad is None:
                views.append(torch.zeros_like(p).reshape(-1))
            else:
                views.append(p.grad.reshape(-1))
        return torch.cat(views).detach().clone()

    def _flat_params(self):
        return parameters_to_vector(self._params).detach().clone()

    def _set_params(self, vec):
        vector_to_parameters(vec, self._params)

    def _evaluate(self, closure, w):
        self._set_params(w)
        loss = float(closure())
        return loss, self._flat_grad()

    @property
    def grad_norm(self):
        state = self.state[self._params[0]]
        if "r" not in state:
            return float("nan")
        return float(state["r"].norm())

    @property
    def lambd(self):
        return self.state[self._params[0]].get("lambd", self.param_groups[0]["lambd"])

    @torch.no_grad()
    def step(self, closure):
        closure = torch.enable_grad()(closure)
        group = self.param_groups[0]
        state = self.state[self._params[0]]

        if "k" not in state:
            w = self._flat_params()
            loss, g = self._evaluate(closure, w)
            state.update(
                k=1, w=w, loss=loss, r=-g, p=-g, success=True,
                lambd=group["lambd"], lambd_bar=0.0, delta=0.0, s=None,
            )

        w, r, p = state["w"], state["r"], state["p"]
        loss = state["loss"]
        lambd, lambd_bar = state["lambd"], state["lambd_bar"]
        delta, success = state["delta"], state["success"]

        if float(r.dot(r)) == 0.0:
            self._set_params(w)
            return loss

        # keep p a descent direction
        if float(p.dot(r)) <= 0.0:
            p = r.clone()
            success = True
            lambd_bar = 0.0

        p_sq = float(p.dot(p))

        if success:
            sigma = group["sigma"] / math.sqrt(p_sq)
            _, g_sigma = self._evaluate(closure, w + sigma * p)
            s = (g_sigma + r) / sigma
            delta = float(p.dot(s))

        delta = delta + (lambd - lambd_bar) * p_sq
        if delta <= 0.0:
            lambd_bar = 2.0 * (lambd - delta / p_sq)
            delta = -delta + lambd * p_sq
            lambd = lambd_bar

        mu = float(p.dot(r))
        alpha = mu / delta
        new_loss, g_new = self._evaluate(closure, w + alpha * p)
        comparison = 2.0 * delta * (loss - new_loss) / (mu * mu)

        if comparison >= 0.0 and math.isfinite(new_loss):
            w = w + alpha * p
            r_new = -g_new
            lambd_bar = 0.0
            success = True
            if state["k"] % self.restart == 0:
                p = r_new.clone()
            else:
                beta = (float(r_new.dot(r_new)) - float(r_new.dot(r))) / mu
                p = r_new + beta * p
            r = r_new
            loss = new_loss
            if comparison >= 0.75:
                lambd = lambd / 4.0
        else:
            lambd_bar = lambd
            success = False

        if comparison < 0.25 or not math.isfinite(comparison):
            lambd = lambd + delta * (1.0 - comparison) / p_sq \
                if math.isfinite(comparison) else 4.0 * lambd

        self._set_params(w)
        state.update(
            k=state["k"] + 1, w=w, loss=loss, r=r, p=p, success=success,
            lambd=lambd, lambd_bar=lambd_bar, delta=delta,
        )
        return loss
