# Special functions, beta distribution helpers and reproducible random streams
