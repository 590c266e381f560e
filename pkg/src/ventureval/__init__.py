"""Decision support for iterative business-model validation.

Engine modules:

- ``schema``  -- design-choice taxonomy, venture models, one-hot codec
- ``cluster`` -- k-modes clustering and silhouette-based k selection
- ``learn``   -- CART / random forest / baseline classifiers
- ``judge``   -- rating sheets and crowd aggregation
- ``assign``  -- expertise profiles and evaluator matching
- ``fuse``    -- cross-validated scoring and hybrid prediction
- ``qca``     -- fuzzy-set configurational analysis

``service`` exposes the HTTP API, ``cli`` the batch front door.
"""

__version__ = "0.1.0"
