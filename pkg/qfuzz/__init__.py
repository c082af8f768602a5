"""
QFuzz Sentiment
===============

Quantum fuzzy neural networks for binary sentiment classification, with
the classical and hybrid baselines they are compared against.

Packages:
    qsim, circuit, simulators   statevector / density-matrix simulation
    channels                    Kraus noise channels and placement
    fuzzy                       membership functions, rules, CF baseline
    textprep                    cleaning, stemming, TF-IDF features
    models, optim               the six models and the ADAM training loop
    metrics                     confusion ratios, ROC / AUC
    harness, cli                experiments and the command line
    service                     in-memory prediction for the API
"""

__version__ = "1.0.0"
