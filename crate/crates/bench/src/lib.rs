//! Criterion benchmarks for the solver, the verification sampler and the geodesic integrator.
