"""Grid checks of the inequalities that make the test conservative."""

# %%
from meanprop import dominance
from meanprop.specfun import legendre_sequence

# %% The Legendre inequality by hand at one point
x, j = 1.3, 4
seq = legendre_sequence(x, j)
print("P_{j-1}/P_j:", seq[j - 1] / seq[j])
print("bound:      ", (j + 1) / j * (x - (x * x - 1) ** 0.5))

# %% All checks on their default grids (about 15 seconds)
reports = dominance.run_all_checks(j_max=200)
for r in reports:
    print(f"{'PASS' if r.passed else 'FAIL'}  {r.check_name:40s} {r.n_checked:>8d} points  worst margin {r.worst_margin:.3g}")

# %% Reports serialize to JSON for CI gating
print(reports[0].to_json(indent=1)[:300])
