"""How to spend a fixed per-area budget of reflecting elements.

With density * array-size pinned to a budget, denser deployments shorten the
reflector-user hop while larger arrays sharpen the beam.  The optimizer
resolves the trade: under random phase shifts with a mild access-link
exponent the closed form lands on a finite array size; for steeper exponents
spreading single elements as densely as possible wins.

Run:  python demos/03_deployment_budget.py
"""

import risgeo as rg


def make_params(alpha_ris_ue):
    return rg.SystemParams.from_engineering(
        tx_power_dbm=15.0,
        noise_dbm=-80.0,
        beta_db=-30.0,
        alpha_direct=3.0,
        alpha_bs_ris=2.0,
        alpha_ris_ue=alpha_ris_ue,
        d_min=180.0,
        d_max=220.0,
        serve_radius=3.0,
    )


BUDGET = 10.0  # elements per square meter
regime = rg.OptimizerRegime(snr="high", phase="random")

print(f"{'a3':>4} {'lambda*':>10} {'N*':>5} {'branch':>13}")
for a3 in (2.0, 2.5, 3.0, 3.5):
    opt = rg.optimize_density(BUDGET, make_params(a3), rho=1.0, regime=regime)
    print(f"{a3:4.1f} {opt.lambda_star:10.4f} {opt.n_star:5d} {opt.branch:>13}")

# Cross-check the a3 = 2 optimum against brute force over integer sizes.
params = make_params(2.0)
oracle = rg.grid_search_oracle(BUDGET, params, 1.0, regime, n_max=256)
print(f"\nexhaustive grid argmax: N = {oracle.n_star}")

# Objective along the budget curve around the optimum.
print(f"\n{'N':>4} {'objective':>10}")
for n in (10, 25, 45, 70, 120, 200):
    f = rg.deployment_objective(BUDGET / n, BUDGET, params, 1.0, regime)
    print(f"{n:4d} {f:10.4f}")

# Bounded phase errors with an inverse-fourth-power access link admit a fully
# closed-form optimum; larger serving radii ask for larger (sparser) arrays.
bounded = rg.OptimizerRegime(snr="high", phase="bounded")
print(f"\n{'C [m]':>6} {'N* (rho=0.25, a3=4)':>20}")
for c in (3.0, 5.0, 8.0, 12.0):
    p = rg.SystemParams.from_engineering(
        30.0, -80.0, -30.0, 3.0, 2.0, 4.0, 180.0, 220.0, c
    )
    opt = rg.optimize_density(BUDGET, p, rho=0.25, regime=bounded)
    print(f"{c:6.1f} {opt.n_star:20d}")
