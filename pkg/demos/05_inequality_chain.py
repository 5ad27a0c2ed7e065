"""Checking (1/2) log d <= chi_a <= chi_m <= k_inf <= log K on a few maps."""
from sphdyn.lab import inequality_chain_report
from sphdyn.zoo import FamilyLabel

header = f"{'map':22s} {'half log d':>10s} {'chi_a':>8s} {'chi_m >=':>9s} {'k_inf <=':>9s} {'log K':>8s}  ok"
print(header)
for text in ["power:d=3", "lattes4", "chebyshev:d=2", "theorem1:n=2", "random:d=3:seed=7"]:
    r = inequality_chain_report(FamilyLabel.parse(text).build(), label=text, n_paths=2000)
    print(f"{text:22s} {r.floors['half_log_d']:10.4f} {r.chi_a.value:8.4f} {r.k_inf_lower:9.4f}"
          f" {r.k_inf_upper:9.4f} {r.log_k:8.4f}  {r.chain_ok}")
