"""Special Lagrangian submanifolds of the resolved conifold."""
