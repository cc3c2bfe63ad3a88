"""Maintenance checking: drive a program through every honest modification
sequence up to a bound and compare its query bit against a brute-force
oracle after each step.

A correct program comes back "ok"; a broken one yields a replayable
counterexample (shortest, lexicographically least).
"""
from dynqf import CheckConfig, builtin_program, check_maintenance, oracle_nonemptyset
from dynqf.parser import parse_program

for name in ("non-empty-set", "st-twopath-binary", "reach-1layer-qf"):
    entry = builtin_program(name)
    cfg = CheckConfig(domain_size=4, max_len=5, honest_only=True,
                      guard=entry.instance_guard if entry.guard_name != "any" else None)
    verdict = check_maintenance(entry.program, entry.oracle, cfg)
    print(f"{name:20s} -> {verdict.status} "
          f"({verdict.checked_states} reachable states, {verdict.checked_steps} transitions)")

print()
broken = parse_program("""
program broken
input { U/1 }
aux   { Q/0 }
query Q
init  oracle
on insert U(a):
  Q(): true
on delete U(a):
  Q(): true            # never turns off: wrong once U empties again
""")
verdict = check_maintenance(broken, oracle_nonemptyset, CheckConfig(domain_size=3, max_len=4))
cex = verdict.counterexample
print(f"broken program -> {verdict.status}")
print(f"  sequence: {[str(m) for m in cex.sequence]}")
print(f"  at step {cex.step}: oracle says {cex.expected}, program says {cex.produced}")
print(f"  trace digest: {cex.trace_digest[:16]}...  (replay-validated before emission)")
