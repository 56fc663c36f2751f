"""
Logic-model building, simulation and training utilities used by the cellnopt
execution and state modules
"""
