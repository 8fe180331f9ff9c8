# Services module for Specker Kit
# One module per concern: validation, polytope, inequalities, joint distributions, models and quantum
