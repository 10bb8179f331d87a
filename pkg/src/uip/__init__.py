# Unit-information priors and effective sample size
