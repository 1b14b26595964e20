"""LLM-pruned Monte-Carlo tree search for two-player zero-sum games."""
