"""J+-type invariants of periodic orbits in the rotating Kepler problem."""
