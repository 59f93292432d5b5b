"""Rule-based harmonization of tabular data files."""

from ._harmonize import (
    HarmonizeError,
    RuleStore,
    apply_primitive,
    canonical_rule,
    harmonize,
    replay,
    sha256_hex,
    validate_rules,
)

__all__ = [
    "HarmonizeError",
    "RuleStore",
    "apply_primitive",
    "canonical_rule",
    "harmonize",
    "replay",
    "sha256_hex",
    "validate_rules",
]
