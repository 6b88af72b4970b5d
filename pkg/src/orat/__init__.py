"""Outlier robust adversarial training on ranked-range losses."""
