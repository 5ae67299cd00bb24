"""A short walk through the Möbius plane over GF(4)/GF(2).

Run with: python3 demos/plane_tour.py
"""
from moebius_crypto import INF, MoebiusPlane

P = MoebiusPlane.of_order(4)
print(P)
print("points:", len(P.points()), " circles:", len(P.circles()))

U = P.unit_circle()
print("unit circle", U, "->", P.points_of(U))

C = P.circle_through(0, 1, INF)
print("circle through 0, 1, INF is a line:", C.is_line, P.points_of(C))

p = P.points_of(U)[0]
T = P.tangent_line_at(U, p)
print(f"tangent line at {p}:", P.points_of(T), " meets U in", P.intersect(U, T))

# a line through p and an off-circle point cuts U a second time
k = next(z for z in P.finite_points() if not P.contains(U, z))
L = P.line_through(p, k)
print(f"line through {p} and {k} meets U in", P.intersect(U, L),
      " second point:", P.second_intersection(L, U, p))

print("audit:", P.audit().to_json())
