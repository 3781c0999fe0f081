"""Integer tags shared by the numpy and numba kernels."""

EXPONENTIAL = 0
GAMMA = 1
LOGNORMAL = 2
NORMAL = 3

POWER_CDF = 0
POWER_SURVIVAL = 1
CENSOR_LOWER = 2
CENSOR_UPPER = 3
SKEWING = 4
