# Posterior inference engines and the efficacy decision
