# qsg: exact quadratic Sylvester-Gallai toolkit over the Gaussian rationals.
