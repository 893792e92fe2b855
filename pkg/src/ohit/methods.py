"""Name-based dispatch over the available oversamplers.

Method names are ``none``, ``ros``, ``smote`` and ``ohit``; an OHIT ablation
mode is selected with a colon suffix, e.g. ``ohit:no_shrinkage``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .baselines import no_oversample, random_oversample, smote
from .datasets import BinaryDataset
from .errors import ContractViolation
from .pipeline import MODES, OhitConfig, OhitResult, fit_ohit, resolve_eta
from .synthesis import SyntheticSet

BASE_METHODS = ("none", "ros", "smote", "ohit")


@dataclass(frozen=True)
class ResampleOutcome:
    data: BinaryDataset
    synthetic: SyntheticSet
    ohit: OhitResult | None = None


def parse_method(method: str) -> tuple[str, str | None]:
    name, _, mode = method.strip().lower().partition(":")
    if name not in BASE_METHODS:
        raise ContractViolation(f"unknown method {method!r}; expected one of {BASE_METHODS}")
    if mode and (name != "ohit" or mode not in MODES):
        raise ContractViolation(f"invalid mode in {method!r}")
    return name, (mode or None)


def oversample(
    method: str,
    data: BinaryDataset,
    seed: int = 0,
    eta: int | str = "balance",
    ohit_cfg: OhitConfig | None = None,
    k_smote: int = 5,
) -> ResampleOutcome:
    name, mode = parse_method(method)
    n_eta = resolve_eta(eta, data.n_min, data.n_maj)
    result = None
    if name == "none":
        syn = no_oversample(data.minority)
    elif name == "ros":
        syn = random_oversample(data.minority, n_eta, seed)
    elif name == "smote":
        syn = smote(data.minority, n_eta, k_smote=k_smote, seed=seed)
    else:
        cfg = ohit_cfg or OhitConfig()
        cfg = replace(cfg, seed=seed, eta=eta, mode=mode or cfg.mode)
        result = fit_ohit(data.minority, n_eta, cfg)
        syn = result.synthetic
    out = data if len(syn) == 0 else data.with_minority(np.vstack([data.minority, syn.samples]))
    return ResampleOutcome(out, syn, result)
