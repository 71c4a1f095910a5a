#pragma once

#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace mkge {

// Range restriction applied to learnable weight parameters before scoring.
enum class RestrictionKind { none, tanh, sigmoid, softmax };

RestrictionKind restriction_from_name(const std::string& name);
const char* restriction_name(RestrictionKind kind);

/// Elementwise tanh/sigmoid, full-vector softmax (max-subtracted), or
/// identity.
std::vector<double> restrict_weights(std::span<const double> raw, RestrictionKind kind);

/// Maps a gradient w.r.t. the restricted weights back to the raw parameters.
/// omega must be restrict_weights(raw, kind).
std::vector<double> restriction_backward(std::span<const double> omega,
                                         std::span<const double> grad_omega,
                                         RestrictionKind kind);

struct DirichletRegConfig {
    double alpha = 1.0 / 16.0;
    double lambda_dir = 1e-2;
    bool enabled = false;
};

/// Sparsity loss -lambda_dir * sum (alpha - 1) * log(|w| / ||w||_1) with its
/// gradient added into grad_omega. Magnitudes below 1e-12 are clamped inside
/// the log; the gradient uses the clamped value and sign(0) = 0.
double dirichlet_reg(std::span<const double> omega, const DirichletRegConfig& cfg,
                     std::span<double> grad_omega);

/// Optional L1 penalty lambda * ||w||_1 (experimental alternative to the
/// Dirichlet loss); gradient added into grad_omega.
double l1_reg(std::span<const double> omega, double lambda, std::span<double> grad_omega);

} // namespace mkge
