# Permutations, pattern containment and counting the members of Av(B).

from gridgrow.perms import Basis, Permutation, contains, enumerate_av, enumerate_av_lists

# 41523 contains 231 (through the subsequence 452) but has no decreasing
# subsequence of length three, so it avoids 321.
host = Permutation((4, 1, 5, 2, 3))
print("41523 contains 231:", contains((2, 3, 1), host))
print("41523 contains 321:", contains((3, 2, 1), host))

# Bases are reduced to their minimal patterns.
print(Basis.parse("Av(21, 321, 4321)"))

# Every class avoiding a single pattern of length 3 is counted by the Catalan
# numbers.
for beta in ("123", "132", "231", "321"):
    print(f"Av({beta}):", enumerate_av(Basis.parse(f"Av({beta})"), 10))

# Av(2143, 3412) is the skew-merged class; compare with the gridded counts in
# the next demo.  Av(4231) grows faster.
print("Av(2143,3412):", enumerate_av(Basis.parse("Av(2143,3412)"), 9))
print("Av(4231):     ", enumerate_av(Basis.parse("Av(4231)"), 9))

# Members themselves, not just counts.
for p in enumerate_av_lists(Basis.parse("Av(231)"), 4)[4]:
    print(p, end=" ")
print()
