# Specker Kit
# Exact analysis of contextuality in Specker's scenario: statistics, polytope, inequalities,
# joint distributions, ontological models and the qubit joint-measurement layer.
