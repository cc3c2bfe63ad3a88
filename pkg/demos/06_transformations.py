"""Program transformations with differential verification.

Repeated-variable elimination rewrites every atom like R(x,x) to a fresh
lower-arity relation with its own derived update rules; the function
encoding replaces each auxiliary relation by a function into two reserved
elements.  Both outputs are checked against the original's oracle over all
honest sequences at small scope.
"""
from dynqf import (CheckConfig, builtin_program, check_maintenance,
                   eliminate_repeated_variables, print_program,
                   relations_to_functions)
from dynqf.parser import parse_program

example = parse_program("""
program example
input { U/1 }
aux   { Q/0, R/2, S/2 }
query Q
init  empty
on insert U(u):
  Q(): Q() | R(u,u)
  R(x,y): S(x,y) & R(x,x)
  S(x,y): S(x,y) | (x = u & y = u)
on delete U(u):
  Q(): Q()
  R(x,y): R(x,y)
  S(x,y): S(x,y)
""")

dedup = eliminate_repeated_variables(example)
print("== repeated-variable elimination ==")
print(print_program(dedup))

entry = builtin_program("non-empty-set")
encoded = relations_to_functions(entry.program)
print("== function encoding of non_empty_set (insertion rules) ==")
text = print_program(encoded)
print(text[: text.index("on delete")].rstrip())

print()
verdict = check_maintenance(encoded, entry.oracle,
                            CheckConfig(domain_size=4, max_len=5, honest_only=True))
print("transformed program against the original's oracle:", verdict.status,
      f"({verdict.checked_states} states)")
