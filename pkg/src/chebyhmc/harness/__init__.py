"""Experiment harness: invariant checks, figure data and ESS benchmarks."""
