"""The combinatorial machinery behind the lower-bound proofs, at desk scale.

Homogeneous-set search finds witnesses (not bounds): a subset all of whose
order-respecting tuples share one atomic type.  Higman pairs find an earlier
type word embedding into a later one; the attack drivers turn such pairs
into modification schedules a quantifier-free program cannot tell apart.
"""
from dynqf import (atomic_type, find_homogeneous_subset, graph_state,
                   higman_pair, is_homogeneous, subsequence)

# a 1-layered star: every layer node looks exactly alike
edges = {(0, a) for a in (1, 2, 3, 4)} | {(a, 5) for a in (1, 2, 3, 4)}
g = graph_state(6, edges, s=0, t=5)
found = find_homogeneous_subset(g, list(range(6)), 3, anchor=(0, 5))
print("star graph, anchor (s,t): homogeneous 3-subset =", sorted(found))
print("validated:", is_homogeneous(g, sorted(found), found, 2, anchor=(0, 5)))

# break the symmetry and watch the witness shrink
lop = graph_state(6, edges - {(0, 1)}, s=0, t=5)
print("after removing (s,1):   ", find_homogeneous_subset(lop, list(range(6)), 4, anchor=(0, 5)),
      "of size 4 ->", find_homogeneous_subset(lop, list(range(6)), 3, anchor=(0, 5)))

# subsequence embedding and Higman pairs over plain words
print()
print('"ab" embeds into "acb":', subsequence("ab", "acb"))
print('"ba" embeds into "ab": ', subsequence("ba", "ab"))
words = ["ba", "c", "aba"]
print(f"higman_pair({words}) =", higman_pair(words), " (0-based: words[0] into words[2])")

# type words: the letters the attack drivers actually use
t1 = atomic_type(g, (1,), sigma=["E"])
t2 = atomic_type(g, (2,), sigma=["E"])
print()
print("atomic type of layer node 1:", t1)
print("equal to that of node 2:    ", t1 == t2)
