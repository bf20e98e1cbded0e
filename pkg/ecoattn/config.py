"""
Configuration settings for EcoAttn.
"""

import copy
import os
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from ecoattn.accounting.models import EnergyModel
from ecoattn.exceptions import ConfigurationError
from ecoattn.training.schemas import TrainConfig

SEED_ENV_VAR = "ECOATTN_SEED"

# Training Configuration (NeedleRetrieval parity baseline)
TRAINING_CONFIG = {
    "layers": 2,
    "heads": 2,
    "d_model": 32,
    "ffn_dim": 64,
    "seq_len": 16,
    "vocab": 16,
    "classes": 4,
    "samples": 2000,
    "lr": 0.05,
    "momentum": 0.9,
    "grad_clip": 1.0,
    "epochs": 30,
    "batch": 32,
    "eval_fraction": 0.2,
    "seed": 42,
    "attention_kind": "dot-product",
    "lambda": 1.0,
    "p": 2.0,
    "lambda_grid": [1.0, 2.0, 3.0, 5.0]
}

# Energy Model (picojoules per FP32 operation)
ENERGY_CONFIG = {
    "pj_mult": 3.7,
    "pj_add": 0.9,
    "pj_abs_diff": 0.9,
    "pj_exp": 0.0,
    "pj_div": 0.0
}

# Gradient Check Thresholds
GRADCHECK_CONFIG = {
    "step": 1e-5,
    "max_rel_err": 1e-5,
    "kink_gap": 1e-3
}

# Dot-product equivalence check
EQUIVALENCE_CONFIG = {
    "lambda": 0.5,
    "max_deviation": 1e-10
}

# Kernel curve defaults
CURVES_CONFIG = {
    "d_k": 16,
    "lambdas": [1.0],
    "d_max": 6.0,
    "steps": 121
}


class EcoAttnConfig:
    """EcoAttn configuration manager."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration."""
        self.config_path = config_path
        self.config = copy.deepcopy({
            "training": TRAINING_CONFIG,
            "energy": ENERGY_CONFIG,
            "gradcheck": GRADCHECK_CONFIG,
            "equivalence": EQUIVALENCE_CONFIG,
            "curves": CURVES_CONFIG
        })

        if config_path:
            self._load_custom_config()

    def _load_custom_config(self) -> None:
        """Load custom configuration from file."""
        if not os.path.exists(self.config_path):
            raise FileNotFoundError(f"Config file not found: {self.config_path}")

        with open(self.config_path, "r") as f:
            custom_config = yaml.safe_load(f) or {}

        if not isinstance(custom_config, dict):
            raise ConfigurationError(f"{self.config_path} must hold a mapping of sections")

        for section, values in custom_config.items():
            if section in self.config and isinstance(values, dict):
                self.config[section].update(values)

    def get_section(self, name: str) -> Dict[str, Any]:
        """Get one configuration section."""
        if name not in self.config:
            raise ConfigurationError(f"Unknown configuration section: {name}")
        return self.config[name]

    def train_config(self, **overrides: Any) -> TrainConfig:
        """Validated training hyperparameters, with ``overrides`` applied."""
        values = dict(self.get_section("training"))
        values.update({key: value for key, value in overrides.items() if value is not None})
        if "lam" in values:
            values["lambda"] = values.pop("lam")
        try:
            return TrainConfig(**values)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid training configuration: {e}") from e

    def energy_model(self) -> EnergyModel:
        try:
            return EnergyModel(**self.get_section("energy"))
        except ValidationError as e:
            raise ConfigurationError(f"Invalid energy model: {e}") from e

    def default_seed(self) -> int:
        """ECOATTN_SEED from the environment (or .env), else the training seed."""
        load_dotenv()
        raw = os.getenv(SEED_ENV_VAR)
        if raw is None or not raw.strip():
            return int(self.get_section("training")["seed"])
        try:
            return int(raw, 0)
        except ValueError as e:
            raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from e

    def update_config(self, section: str, key: str, value: Any) -> None:
        """Update configuration value."""
        self.get_section(section)[key] = value

    def save_config(self, output_path: str) -> None:
        """Save current configuration to file."""
        with open(output_path, "w") as f:
            yaml.dump(self.config, f, default_flow_style=False)
