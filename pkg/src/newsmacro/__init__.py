"""News-emotion panels and factor-augmented macroeconomic forecasting.

The package turns GKG-style news record files into monthly panels of
emotion scores (keyword filter, relevance classifier, country-group
aggregation), then evaluates their predictive power for industrial
production and consumer prices with a factor-augmented autoregression
benchmarked against three reference models.
"""

__version__ = "0.1.0"
