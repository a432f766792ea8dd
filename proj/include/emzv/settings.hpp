#pragma once

namespace emzv {

/// Numeric configuration shared by every module.  Defaults are the values
/// the test suites are calibrated against.
struct Settings {
    // q-series: smallest N with |q|^N below this, capped at q_cap factors.
    double q_tolerance = 1e-16;
    int q_cap = 400;

    // Panel quadrature along a path.
    int gl_nodes = 20;          // Gauss-Legendre nodes per panel
    int coarse_gl_nodes = 14;   // companion rule for error estimates
    int grading_levels = 50;    // geometric panels toward each endpoint
    int middle_panels = 8;      // uniform panels covering [1/4, 3/4]

    // Kernel evaluation near lattice points.
    double local_radius = 0.1;  // use the bivariate expansion inside this
    int local_order = 26;       // powers of the local coordinate kept

    // Caps.
    int max_depth = 8;
    int max_weight = 10;
    int max_d = 10;             // highest kernel index k_d

    // Branch tracking for log theta along sampled paths.
    int branch_samples_per_unit = 256;

    // Tolerance ladder.
    double quad_tolerance = 1e-10;
    double identity_tolerance = 1e-8;
    double ode_tolerance = 1e-5;
    double ode_step = 1e-3;
    double ibp_epsilon = 1e-5;
};

}  // namespace emzv
