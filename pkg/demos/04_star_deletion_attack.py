"""The star-deletion attack: why unary auxiliary data cannot maintain
s-t-reachability, replayed as a concrete counterexample search.

The driver connects n layer nodes to s and t, peels s-edges off suffix by
suffix, builds one type word per suffix state, and uses a Higman pair of
those words to issue two deletion schedules whose reachability differs but
whose substructures the candidate cannot distinguish.  Run against a naive
unary candidate it produces a validated, replayable witness.
"""
from dynqf import attack_star_deletion, oracle_st_reach, validate_counterexample
from dynqf.corpus import strawman_program

candidate = strawman_program("unary-twopath-naive")
print("candidate:", candidate.name, "| aux arities:",
      {a: candidate.schema.arity(a) for a in candidate.schema.aux_symbols})

for n in range(1, 9):
    cex = attack_star_deletion(candidate, n)
    print(f"n = {n}: {'witness found' if cex else 'none at this scale'}")
    if cex:
        break

print()
print(f"witness sequence ({len(cex.sequence)} modifications):")
for i, m in enumerate(cex.sequence, start=1):
    marker = "   <- divergence" if i == cex.step else ""
    print(f"  {i:2d}. {m}{marker}")
print(f"expected (oracle) {cex.expected}, produced (candidate) {cex.produced}")
print("replay validation:", validate_counterexample(candidate, oracle_st_reach, cex))
