"""A first dynamic program: maintaining "is the set U non-empty?".

The program keeps the members of U in a linked list (List/First/Last) so a
quantifier-free deletion rule can tell whether the last member just left.
This script replays a short modification sequence and dumps the auxiliary
state after every step.
"""
from dynqf import builtin_program, delete, empty_input_db, init_state, ins, run

entry = builtin_program("non-empty-set")
program = entry.program

db = empty_input_db(program, 4)
state = init_state(program, db)
sequence = [ins("U", 2), ins("U", 0), ins("U", 3), delete("U", 0), delete("U", 2), delete("U", 3)]

print("program:", program.name, "| query symbol:", program.query_symbol)
for i, state in enumerate(run(program, state, sequence, honest_only=True)):
    label = "init" if i == 0 else f"after {sequence[i - 1]}"
    print(f"{label:22s} Q={str(state.query_value('Q')):5s} "
          f"First={sorted(state.rel('First'))} Last={sorted(state.rel('Last'))} "
          f"List={sorted(state.rel('List'))}")
    problems = entry.state_invariant(entry, state)
    assert not problems, problems

print("\nThe documented state invariant (List is a simple path over exactly")
print("the members of U, with First/Last at its ends) held at every step.")
