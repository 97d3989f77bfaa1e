"""Agent-driven temporal hypergraph generation, pattern measurement and rank-attachment simulation."""
