# Pairwise divergences between beta posteriors and borrowing weights
