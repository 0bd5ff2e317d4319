# Counterdeceptiveness of a small hand-built road network.
#
# A start s, one junction j, and three branches of length 2, 1 and 3 to
# three targets. An observer watching the agent cannot tell which target
# it is heading to until it leaves j, so each target's unique distance is
# its branch length and CD is the shortest of them.

from counterdeception import RootedTree, WeightedDigraph, cd_tree, priorities

pos = {
    0: (0, 0),
    1: (1, 0),
    2: (1, 1), 3: (1, 2),
    4: (2, 0),
    5: (1, -1), 6: (1, -2), 7: (1, -3),
}
roads = [(0, 1), (1, 2), (2, 3), (1, 4), (1, 5), (5, 6), (6, 7)]
g = WeightedDigraph(pos, roads + [(v, u) for u, v in roads])
tree = RootedTree(g, 0, {v: u for u, v in roads})
targets = [3, 4, 7]

report = cd_tree(tree, targets)
for rec in report.targets:
    print(f"target {rec.node}: last deceptive point {rec.ldp}, unique distance {rec.unique_distance}")
print("CD =", report.cd, " weight =", report.weight)

# priorities order the targets for rerouting, lowest first
print("reroute order:", priorities(tree, targets))

# extend the short branch through the middle target: 4 now sits on the way
# to a new target 8, so it is forced and CD drops to zero
pos[8] = (3, 0)
g2 = WeightedDigraph(pos, roads + [(4, 8)] + [(v, u) for u, v in roads])
tree2 = RootedTree(g2, 0, {**{v: u for u, v in roads}, 8: 4})
rep2 = cd_tree(tree2, [3, 4, 7, 8])
print("with a target behind target 4: CD =", rep2.cd, " forced =", rep2.forced_count)
