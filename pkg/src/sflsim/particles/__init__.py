"""Domain, particle positions and neighbor search."""
