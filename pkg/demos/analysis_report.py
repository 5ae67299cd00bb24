"""Print the probability tables, deviation sweep and completeness matrices.

Run with: python3 demos/analysis_report.py [q]
"""
import sys

from moebius_crypto.analysis import aposteriori_tables, cipher_completeness_matrix, deviation_sweep
from moebius_crypto.proj_auth import AuthContext, auth_completeness_matrix, forgery_stats

q = int(sys.argv[1]) if len(sys.argv) > 1 else 5
report = aposteriori_tables(q)
print(f"q = {q}, message {report.message}")
for row in report.rows:
    print(f"  pos {row.position}  {row.label:<28} mu={row.mu!s:<6} nu={row.nu!s:<8} closed form={row.formula_value}")

print("\nq^2 * max|mu - nu|:")
for d in deviation_sweep([5, 7, 8, 16, 32]):
    print(f"  q={d.q:<3} {float(d.scaled):.4f}")

print("\ncipher avalanche matrix, n=3:")
print(cipher_completeness_matrix(3).grid())
matrix, _ = auth_completeness_matrix(3)
print("authentication matrix, n=3:")
print("\n".join(" ".join(str(int(e)) for e in r) for r in matrix))

print("\nforgery statistics, q=4:")
print(forgery_stats(AuthContext.of_order(4)).to_json())
