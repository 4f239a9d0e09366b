#ifndef FRACVISC_CAPUTO_HPP
#define FRACVISC_CAPUTO_HPP

// Independent discretization of the Caputo fractional derivative (the L1
// product-integration rule on an arbitrary strictly increasing mesh) and the
// residual check of the fractional relaxation equation
//
//   sigma + tau0^alpha D^alpha sigma = 0.
//
// The fractional modulus has a weakly singular derivative ~t^(alpha-1) at
// t = 0, which ruins uniform-mesh accuracy; the graded mesh
// t_j = T (j/N)^r concentrates nodes there and restores usable convergence.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "fracvisc/detail/gamma.hpp"
#include "fracvisc/errors.hpp"
#include "fracvisc/relaxation.hpp"

namespace fracvisc {

/// Strictly increasing time grid starting at 0, with the grading exponent
/// that generated it kept as metadata.
struct CaputoMesh {
    std::vector<double> nodes;
    double grading = 1.0;

    void validate() const {
        if (nodes.size() < 2) throw domain_error("CaputoMesh: need at least 2 nodes");
        if (nodes.front() != 0.0) throw domain_error("CaputoMesh: nodes must start at 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw domain_error("CaputoMesh: nodes must strictly increase");
        if (!(grading >= 1.0)) throw domain_error("CaputoMesh: grading must be >= 1");
    }

    /// t_j = horizon * (j/n)^r, j = 0..n
    static CaputoMesh graded(double horizon, int n, double r) {
        if (!(horizon > 0.0) || n < 1 || !(r >= 1.0))
            throw domain_error("CaputoMesh::graded: invalid parameters");
        CaputoMesh m;
        m.grading = r;
        m.nodes.resize(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j)
            m.nodes[static_cast<std::size_t>(j)] =
                horizon * std::pow(static_cast<double>(j) / n, r);
        return m;
    }
};

/// L1 approximation of the Caputo derivative of order alpha in (0,1) at
/// nodes 1..N (the derivative needs only history, so every node past the
/// first has a value):
///
///   D^a f(t_n) ~= 1/Gamma(2-a) * sum_j (f_{j+1}-f_j)/(t_{j+1}-t_j)
///                 * [(t_n-t_j)^(1-a) - (t_n-t_{j+1})^(1-a)]
///
/// Exactly zero on constant data; linear in f.
inline std::vector<double> caputo_l1(const CaputoMesh& mesh,
                                     const std::vector<double>& values, double alpha) {
    mesh.validate();
    if (values.size() != mesh.nodes.size())
        throw domain_error("caputo_l1: values and mesh sizes differ");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw domain_error("caputo_l1: alpha must lie in (0, 1)");
    const std::vector<double>& t = mesh.nodes;
    const std::size_t n_nodes = t.size();
    const double inv_gamma = 1.0 / detail::gamma_fn(2.0 - alpha);
    const double q = 1.0 - alpha;
    std::vector<double> out(n_nodes - 1, 0.0);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        double acc = 0.0;
        double w_prev = std::pow(t[n] - t[0], q);
        for (std::size_t j = 0; j < n; ++j) {
            double w_next = (j + 1 == n) ? 0.0 : std::pow(t[n] - t[j + 1], q);
            double slope = (values[j + 1] - values[j]) / (t[j + 1] - t[j]);
            acc += slope * (w_prev - w_next);
            w_prev = w_next;
        }
        out[n - 1] = acc * inv_gamma;
    }
    return out;
}

/// Residual of the fractional relaxation equation along a sampled curve:
/// max of |sigma + tau0^alpha D^alpha sigma| / sigma0 over the nodes outside
/// the singular layer.
///
/// The modulus has an unbounded derivative at t = 0, and the L1 defect at a
/// fixed node index does not shrink as the mesh refines (the node slides
/// deeper into the layer); only the defect at fixed time converges. The pass
/// criterion therefore covers nodes with t >= layer_fraction * horizon
/// (never fewer exclusions than the first interior node), and the layer's
/// own worst residual is reported in the note. At alpha = 1 the L1 rule
/// degenerates; the backward difference (its continuous limit) is used
/// instead.
inline VerificationReport residual_fractional(const RelaxationCurve& curve,
                                              const MaterialParams& p,
                                              const CaputoMesh& mesh, double tol = 1e-2,
                                              double layer_fraction = 0.01) {
    p.validate();
    mesh.validate();
    const std::size_t n_nodes = mesh.nodes.size();
    if (curve.t_over_tau0.size() != n_nodes)
        throw domain_error("residual_fractional: curve is not sampled on the mesh");
    for (std::size_t i = 0; i < n_nodes; ++i)
        if (std::fabs(curve.t_over_tau0[i] * p.tau0 - mesh.nodes[i]) >
            1e-9 * (1.0 + mesh.nodes[i]))
            throw domain_error("residual_fractional: curve nodes deviate from the mesh");
    const double sigma0 = curve.sigma0;
    if (!(sigma0 > 0.0)) throw domain_error("residual_fractional: curve lacks sigma0");

    std::vector<double> sigma(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) sigma[i] = curve.sigma_over_k0[i] * p.k0;

    std::vector<double> deriv;
    if (p.alpha == 1.0) {
        deriv.resize(n_nodes - 1);
        for (std::size_t n = 1; n < n_nodes; ++n)
            deriv[n - 1] =
                (sigma[n] - sigma[n - 1]) / (mesh.nodes[n] - mesh.nodes[n - 1]);
    } else {
        deriv = caputo_l1(mesh, sigma, p.alpha);
    }

    const double tau_pow = std::pow(p.tau0, p.alpha);
    const double layer_end = layer_fraction * mesh.nodes.back();
    double layer_residual = 0.0;
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t n = 1; n < n_nodes; ++n) {
        double res = std::fabs(sigma[n] + tau_pow * deriv[n - 1]) / sigma0;
        if (n == 1 || mesh.nodes[n] < layer_end) {
            layer_residual = std::max(layer_residual, res);
            continue;
        }
        if (res > worst) {
            worst = res;
            worst_t = mesh.nodes[n];
        }
    }
    VerificationReport rep;
    rep.check = "fractional_residual";
    rep.tolerance = tol;
    rep.pass = worst <= tol;
    rep.worst_violation = worst;
    rep.worst_location = worst_t;
    std::ostringstream note;
    note << "singular layer (t < " << format_full(layer_end)
         << ") residual " << format_full(layer_residual)
         << ", excluded from the pass criterion; mesh N=" << (n_nodes - 1)
         << " r=" << format_full(mesh.grading);
    rep.note = note.str();
    return rep;
}

} // namespace fracvisc

#endif
